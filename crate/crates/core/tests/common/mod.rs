//! Brute-force oracles shared by the integration tests.
#![allow(dead_code)]

pub mod toy;

use swcsp::{Assignment, Domain, Swcsp, Value};

pub fn explicit_domain(p: &Swcsp, v: usize) -> Vec<Value> {
    match p.domain(v) {
        Domain::Explicit(values) => values.clone(),
        Domain::Strings { candidates, .. } => candidates.iter().map(|c| c.value.clone()).collect(),
    }
}

/// Every complete assignment satisfying all hard constraints.
pub fn all_solutions(p: &Swcsp) -> Vec<Assignment> {
    let domains: Vec<Vec<Value>> = (0..p.size()).map(|v| explicit_domain(p, v)).collect();
    let mut out = Vec::new();
    let mut current = Assignment::empty();
    fn go(p: &Swcsp, domains: &[Vec<Value>], v: usize, current: &mut Assignment, out: &mut Vec<Assignment>) {
        if v == domains.len() {
            if p.is_solution(current) {
                out.push(current.clone());
            }
            return;
        }
        for x in &domains[v] {
            current.bind(v, x.clone());
            go(p, domains, v + 1, current, out);
        }
        current.unbind(v);
    }
    go(p, &domains, 0, &mut current, &mut out);
    out
}

/// Exact cost of a complete assignment, summed in variable order.
pub fn total_cost(p: &Swcsp, s: &Assignment) -> f64 {
    s.iter().map(|(v, x)| p.value_cost(v, x)).sum()
}

/// Least cost over all solutions; `+inf` when there are none.
pub fn optimum(p: &Swcsp) -> f64 {
    all_solutions(p)
        .iter()
        .map(|s| total_cost(p, s))
        .fold(f64::INFINITY, f64::min)
}

/// Node count of a constraint-free pitch search with `d` unbound variables
/// and `m` discrepancies left: f(d, m) = 1 + f(d, m-1) + f(d-1, m).
pub fn pitch_tree_size(d: usize, m: usize) -> u64 {
    match (d, m) {
        (0, _) => 1,
        (d, 0) => d as u64 + 1,
        (d, m) => 1 + pitch_tree_size(d, m - 1) + pitch_tree_size(d - 1, m),
    }
}
