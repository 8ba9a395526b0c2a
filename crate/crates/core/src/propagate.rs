//! Sound domain reduction: one-level forward checking for the search, and
//! AC-3 for small extensional problems.

use std::collections::VecDeque;
use std::sync::Arc;

use crate::error::ProblemError;
use crate::problem::{Assignment, Candidate, Constraint, Swcsp, VarId};

/// Per-variable live domains. Copy-on-write, so cloning a search state
/// costs one pointer per variable.
#[derive(Clone, Debug, PartialEq)]
pub struct LiveDomains(Vec<Arc<Vec<Candidate>>>);

impl LiveDomains {
    pub fn get(&self, v: VarId) -> &[Candidate] {
        &self.0[v]
    }

    pub fn set(&mut self, v: VarId, values: Vec<Candidate>) {
        self.0[v] = Arc::new(values);
    }

    pub(crate) fn set_shared(&mut self, v: VarId, values: Arc<Vec<Candidate>>) {
        self.0[v] = values;
    }

    pub(crate) fn shared(&self, v: VarId) -> &Arc<Vec<Candidate>> {
        &self.0[v]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Cheapest live cost of `v`; `+inf` if the domain is empty.
    pub fn min_cost(&self, v: VarId) -> f64 {
        self.0[v].iter().map(|c| c.cost).fold(f64::INFINITY, f64::min)
    }

    pub fn any_empty(&self) -> bool {
        self.0.iter().any(|d| d.is_empty())
    }

    /// Live domains for `assignment` before any propagation: bound variables
    /// hold their value, unbound ones their full materialized domain.
    pub fn unpropagated(problem: &Swcsp, assignment: &Assignment) -> Self {
        LiveDomains(
            (0..problem.size())
                .map(|v| {
                    Arc::new(match assignment.get(v) {
                        Some(x) => vec![Candidate::new(x.clone(), problem.value_cost(v, x))],
                        None => problem.candidates(v),
                    })
                })
                .collect(),
        )
    }
}

/// Outcome of a propagation step.
#[derive(Clone, Debug, PartialEq)]
pub struct PropagationResult {
    pub reduced: LiveDomains,
    pub failed: bool,
}

/// Live domains at the root of a search: node consistency for unary and
/// nullary constraints, then forward checking from every bound variable.
pub fn initial_live(problem: &Swcsp, assignment: &Assignment) -> PropagationResult {
    let mut live = LiveDomains::unpropagated(problem, assignment);
    let mut failed = false;
    for c in problem.constraints() {
        match c.arity() {
            0 => {
                if c.check(|_| None) != Some(true) {
                    failed = true;
                }
            }
            1 => {
                let v = c.scope()[0];
                let kept: Vec<Candidate> = live
                    .get(v)
                    .iter()
                    .filter(|cand| c.check(|_| Some(&cand.value)) == Some(true))
                    .cloned()
                    .collect();
                live.set(v, kept);
            }
            _ => {}
        }
    }
    for (v, _) in assignment.iter() {
        if failed {
            break;
        }
        let step = forward_check_from(problem, assignment, &live, v);
        live = step.reduced;
        failed |= step.failed;
    }
    failed |= live.any_empty();
    PropagationResult { reduced: live, failed }
}

/// One-level lookahead from a freshly bound `v`, starting from the
/// unpropagated domains of `assignment`.
pub fn forward_check(problem: &Swcsp, assignment: &Assignment, v: VarId) -> PropagationResult {
    let live = LiveDomains::unpropagated(problem, assignment);
    forward_check_from(problem, assignment, &live, v)
}

/// One-level lookahead: every variable sharing a constraint with `v` keeps
/// only values consistent with `v`'s binding (and the other bound variables
/// of that constraint). Implicit string domains that empty are re-queried
/// with the letters now fixed before failure is declared.
pub fn forward_check_from(problem: &Swcsp, assignment: &Assignment, live: &LiveDomains, v: VarId) -> PropagationResult {
    let mut reduced = live.clone();
    let mut failed = false;
    if let Some(x) = assignment.get(v) {
        let cost = problem.value_cost(v, x);
        if reduced.get(v).len() != 1 || reduced.get(v)[0].value != *x {
            reduced.set(v, vec![Candidate::new(x.clone(), cost)]);
        }
    }
    for (u, shared) in problem.neighbor_groups(v) {
        let revised = revise(problem, assignment, live, shared, *u);
        failed |= revised.is_empty();
        reduced.set_shared(*u, revised);
    }
    PropagationResult { reduced, failed }
}

/// Live domain of `u` after filtering against the constraints in `shared`
/// (those it shares with a freshly bound variable).
pub(crate) fn revise(
    problem: &Swcsp,
    assignment: &Assignment,
    live: &LiveDomains,
    shared: &[usize],
    u: VarId,
) -> Arc<Vec<Candidate>> {
    let shared: Vec<&Constraint> = shared.iter().map(|&ci| &problem.constraints()[ci]).collect();
    let current = live.shared(u);
    let supported = |cand: &Candidate| shared.iter().all(|c| supports(c, assignment, live, u, cand));
    if current.iter().all(supported) {
        return Arc::clone(current);
    }
    let kept: Vec<Candidate> = current.iter().filter(|c| supported(c)).cloned().collect();
    if !kept.is_empty() || assignment.is_bound(u) || !problem.domain(u).is_implicit() {
        return Arc::new(kept);
    }
    let pattern = problem
        .pattern_for(u, assignment)
        .expect("implicit domains have patterns");
    let refill: Vec<Candidate> = problem
        .pattern_candidates(u, &pattern)
        .into_iter()
        .filter(|c| supported(c))
        .collect();
    Arc::new(refill)
}

/// Whether `u = cand` has support in `c` given the bound variables of
/// `assignment` and the live domains of the unbound ones.
fn supports(c: &Constraint, assignment: &Assignment, live: &LiveDomains, u: VarId, cand: &Candidate) -> bool {
    match c {
        Constraint::Table { scope, allowed } => allowed.iter().any(|tuple| {
            scope.iter().zip(tuple).all(|(&w, x)| {
                if w == u {
                    *x == cand.value
                } else if let Some(bound) = assignment.get(w) {
                    bound == x
                } else {
                    live.get(w).iter().any(|l| l.value == *x)
                }
            })
        }),
        Constraint::Crossing { vars, positions } => {
            let (mine, other, other_pos) = if vars[0] == u {
                (positions[0], vars[1], positions[1])
            } else {
                (positions[1], vars[0], positions[0])
            };
            match assignment.get(other) {
                Some(x) => {
                    let letter = x.letter(other_pos);
                    letter.is_some() && cand.value.letter(mine) == letter
                }
                None => true,
            }
        }
        Constraint::LetterAt { position, letter, .. } => cand.value.letter(*position) == Some(*letter),
    }
}

fn binary_allows(c: &Constraint, u: VarId, ux: &Candidate, w: VarId, wx: &Candidate) -> bool {
    let get = |v: VarId| {
        if v == u {
            Some(&ux.value)
        } else if v == w {
            Some(&wx.value)
        } else {
            None
        }
    };
    c.check(get).unwrap_or(false)
}

/// AC-3 over binary constraints, starting from the node-consistent root
/// domains. Non-binary constraints are rejected.
pub fn ac3(problem: &Swcsp) -> Result<PropagationResult, ProblemError> {
    if let Some(c) = problem.constraints().iter().find(|c| c.arity() > 2) {
        return Err(ProblemError::Unsupported(format!(
            "AC-3 needs binary constraints; found one over {:?}",
            c.scope()
        )));
    }
    let root = initial_live(problem, &Assignment::empty());
    let mut live = root.reduced;
    if root.failed {
        return Ok(PropagationResult {
            reduced: live,
            failed: true,
        });
    }

    let binary: Vec<(usize, VarId, VarId)> = problem
        .constraints()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.arity() == 2)
        .flat_map(|(i, c)| {
            let s = c.scope();
            [(i, s[0], s[1]), (i, s[1], s[0])]
        })
        .collect();
    let mut queue: VecDeque<(usize, VarId, VarId)> = binary.iter().copied().collect();
    let mut queued = vec![true; binary.len()];
    let arc_index = |ci: usize, u: VarId| {
        binary
            .iter()
            .position(|&(i, a, _)| i == ci && a == u)
            .expect("arc exists")
    };

    while let Some((ci, u, w)) = queue.pop_front() {
        queued[arc_index(ci, u)] = false;
        let c = &problem.constraints()[ci];
        let before = live.get(u).len();
        let kept: Vec<Candidate> = live
            .get(u)
            .iter()
            .filter(|ux| live.get(w).iter().any(|wx| binary_allows(c, u, ux, w, wx)))
            .cloned()
            .collect();
        if kept.len() == before {
            continue;
        }
        let emptied = kept.is_empty();
        live.set(u, kept);
        if emptied {
            return Ok(PropagationResult {
                reduced: live,
                failed: true,
            });
        }
        for (k, &(cj, a, b)) in binary.iter().enumerate() {
            if b == u && a != w && !queued[k] {
                queued[k] = true;
                queue.push_back((cj, a, b));
            }
        }
    }
    Ok(PropagationResult {
        reduced: live,
        failed: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{europe, t1, triangle};
    use crate::problem::Value;

    fn values(live: &LiveDomains, v: VarId) -> Vec<String> {
        live.get(v).iter().map(|c| c.value.to_string()).collect()
    }

    #[test]
    fn forward_check_without_neighbors_changes_nothing() {
        let p = crate::instances::random_free(
            &mut <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(1),
            3,
            3,
            5.0,
        );
        let s = Assignment::from_pairs([(0, "d1")]);
        let r = forward_check(&p, &s, 0);
        assert!(!r.failed);
        assert_eq!(values(&r.reduced, 1), vec!["d0", "d1", "d2"]);
        assert_eq!(values(&r.reduced, 2), vec!["d0", "d1", "d2"]);
    }

    #[test]
    fn forward_check_t1() {
        let r = forward_check(&t1(), &Assignment::from_pairs([(0, "a")]), 0);
        assert!(!r.failed);
        assert_eq!(values(&r.reduced, 1), vec!["a"]);
    }

    #[test]
    fn forward_check_only_touches_neighbors() {
        let p = europe();
        let s = Assignment::from_pairs([(5, "red")]);
        let before = LiveDomains::unpropagated(&p, &s);
        let r = forward_check_from(&p, &s, &before, 5);
        assert_eq!(values(&r.reduced, 0), vec!["green", "blue", "yellow"]);
        for v in 1..5 {
            assert_eq!(r.reduced.get(v), before.get(v));
        }
    }

    #[test]
    fn ac3_europe_chain() {
        let r = ac3(&europe()).unwrap();
        assert!(!r.failed);
        assert_eq!(values(&r.reduced, 1), vec!["green"]);
        assert!(!values(&r.reduced, 0).contains(&"green".to_string()));
        // Spain only borders France, which still has three colors.
        assert_eq!(values(&r.reduced, 5).len(), 4);
    }

    #[test]
    fn ac3_cannot_refute_two_colored_triangle() {
        // Every color has a support on every arc, so the unsatisfiable
        // triangle is already arc consistent.
        let p = triangle();
        let r = ac3(&p).unwrap();
        assert!(!r.failed);
        assert_eq!(r.reduced, LiveDomains::unpropagated(&p, &Assignment::empty()));
    }

    #[test]
    fn ac3_fails_on_emptied_domain() {
        let p = Swcsp::new(
            ["x", "y"]
                .iter()
                .map(|n| crate::problem::VariableSpec {
                    name: n.to_string(),
                    domain: crate::problem::Domain::Explicit(vec![Value::from("red")]),
                })
                .collect(),
            vec![Constraint::Table {
                scope: vec![0, 1],
                allowed: Default::default(),
            }],
            vec![],
        )
        .unwrap();
        assert!(ac3(&p).unwrap().failed);
    }

    #[test]
    fn forward_check_fails_on_triangle_path() {
        let p = triangle();
        let s = Assignment::from_pairs([(0, "red"), (1, "green")]);
        let live = initial_live(&p, &Assignment::from_pairs([(0, "red")])).reduced;
        assert!(forward_check_from(&p, &s, &live, 1).failed);
    }

    #[test]
    fn ac3_fixpoint_on_consistent_problem() {
        let p = t1();
        let r = ac3(&p).unwrap();
        assert_eq!(r.reduced, LiveDomains::unpropagated(&p, &Assignment::empty()));
    }

    #[test]
    fn ac3_rejects_ternary() {
        let p = Swcsp::new(
            ["a", "b", "c"]
                .iter()
                .map(|n| crate::problem::VariableSpec {
                    name: n.to_string(),
                    domain: crate::problem::Domain::Explicit(vec![Value::from("x")]),
                })
                .collect(),
            vec![Constraint::Table {
                scope: vec![0, 1, 2],
                allowed: [vec![Value::from("x"); 3]].into_iter().collect(),
            }],
            vec![],
        )
        .unwrap();
        assert!(matches!(ac3(&p), Err(ProblemError::Unsupported(_))));
    }
}
