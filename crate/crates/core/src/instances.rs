//! Small reference problems and seeded random generators.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::problem::{Constraint, Domain, Swcsp, UnaryCost, Value, VariableSpec};

fn explicit(values: &[&str]) -> Domain {
    Domain::Explicit(values.iter().map(|s| Value::from(*s)).collect())
}

fn costs(pairs: &[(&str, f64)], default: f64) -> UnaryCost {
    UnaryCost::new(pairs.iter().map(|(k, c)| (Value::from(*k), *c)).collect(), default)
        .expect("fixture costs are valid")
}

fn disequality(values: &[&str]) -> BTreeSet<Vec<Value>> {
    let mut out = BTreeSet::new();
    for a in values {
        for b in values {
            if a != b {
                out.insert(vec![Value::from(*a), Value::from(*b)]);
            }
        }
    }
    out
}

/// Two variables over {a, b} constrained equal, with costs
/// v1: a→1, b→0 and v2: a→0, b→3. The optimum is (a, a) at cost 1.
pub fn t1() -> Swcsp {
    Swcsp::new(
        vec![
            VariableSpec {
                name: "v1".into(),
                domain: explicit(&["a", "b"]),
            },
            VariableSpec {
                name: "v2".into(),
                domain: explicit(&["a", "b"]),
            },
        ],
        vec![Constraint::Table {
            scope: vec![0, 1],
            allowed: [
                vec![Value::from("a"), Value::from("a")],
                vec![Value::from("b"), Value::from("b")],
            ]
            .into_iter()
            .collect(),
        }],
        vec![
            (0, costs(&[("a", 1.0), ("b", 0.0)], 0.0)),
            (1, costs(&[("a", 0.0), ("b", 3.0)], 0.0)),
        ],
    )
    .expect("t1 is well formed")
}

/// Two disjoint copies of [`t1`]; optimum cost 2.
pub fn t1_twice() -> Swcsp {
    let single = t1();
    let mut vars = Vec::new();
    let mut cons = Vec::new();
    let mut soft = Vec::new();
    for copy in 0..2 {
        for v in single.variables() {
            vars.push(VariableSpec {
                name: format!("{}_{}", v.name, copy),
                domain: single.domain(v.id).clone(),
            });
            if let Some(s) = single.soft(v.id) {
                soft.push((copy * 2 + v.id, s.clone()));
            }
        }
        cons.push(Constraint::Table {
            scope: vec![copy * 2, copy * 2 + 1],
            allowed: [
                vec![Value::from("a"), Value::from("a")],
                vec![Value::from("b"), Value::from("b")],
            ]
            .into_iter()
            .collect(),
        });
    }
    Swcsp::new(vars, cons, soft).expect("t1_twice is well formed")
}

/// Three mutually different variables over two colors: unsatisfiable.
pub fn triangle() -> Swcsp {
    let colors = ["red", "green"];
    Swcsp::new(
        ["x", "y", "z"]
            .iter()
            .map(|n| VariableSpec {
                name: n.to_string(),
                domain: explicit(&colors),
            })
            .collect(),
        vec![
            Constraint::Table {
                scope: vec![0, 1],
                allowed: disequality(&colors),
            },
            Constraint::Table {
                scope: vec![1, 2],
                allowed: disequality(&colors),
            },
            Constraint::Table {
                scope: vec![0, 2],
                allowed: disequality(&colors),
            },
        ],
        vec![],
    )
    .expect("triangle is well formed")
}

/// Part of western Europe with Holland, Poland and Austria precolored so
/// that Germany is left with green.
pub fn europe() -> Swcsp {
    let colors = ["red", "green", "blue", "yellow"];
    let names = ["France", "Germany", "Holland", "Poland", "Austria", "Spain"];
    let domains = [
        explicit(&colors),
        explicit(&colors),
        explicit(&["red"]),
        explicit(&["blue"]),
        explicit(&["yellow"]),
        explicit(&colors),
    ];
    let borders = [(0, 1), (1, 2), (1, 3), (1, 4), (0, 5)];
    let mut cons = Vec::new();
    for (a, b) in borders {
        let da: Vec<&str> = match &domains[a] {
            Domain::Explicit(v) => v.iter().map(|x| x.as_str()).collect(),
            _ => unreachable!(),
        };
        let db: Vec<&str> = match &domains[b] {
            Domain::Explicit(v) => v.iter().map(|x| x.as_str()).collect(),
            _ => unreachable!(),
        };
        let mut allowed = BTreeSet::new();
        for x in &da {
            for y in &db {
                if x != y {
                    allowed.insert(vec![Value::from(*x), Value::from(*y)]);
                }
            }
        }
        cons.push(Constraint::Table {
            scope: vec![a, b],
            allowed,
        });
    }
    Swcsp::new(
        names
            .iter()
            .zip(domains)
            .map(|(n, d)| VariableSpec {
                name: n.to_string(),
                domain: d,
            })
            .collect(),
        cons,
        vec![],
    )
    .expect("europe is well formed")
}

/// Parameters for random binary SWCSPs.
#[derive(Clone, Debug)]
pub struct RandomSpec {
    pub vars: usize,
    pub max_domain: usize,
    /// Probability that a given pair of variables is constrained.
    pub density: f64,
    /// Probability that a value pair is forbidden by a constraint.
    pub tightness: f64,
    pub max_cost: f64,
}

impl Default for RandomSpec {
    fn default() -> Self {
        RandomSpec {
            vars: 6,
            max_domain: 4,
            density: 0.4,
            tightness: 0.3,
            max_cost: 10.0,
        }
    }
}

fn random_parts<R: Rng>(
    rng: &mut R,
    spec: &RandomSpec,
    prefix: &str,
    offset: usize,
) -> (Vec<VariableSpec>, Vec<Constraint>, Vec<(usize, UnaryCost)>) {
    let mut vars = Vec::new();
    let mut soft = Vec::new();
    let mut values_of = Vec::new();
    for i in 0..spec.vars {
        let d = rng.gen_range(1..=spec.max_domain.max(1));
        let values: Vec<Value> = (0..d).map(|j| Value::from(format!("d{j}"))).collect();
        let table: BTreeMap<Value, f64> = values
            .iter()
            .map(|x| {
                let c = (rng.gen_range(0.0..=spec.max_cost) * 100.0).round() / 100.0;
                (x.clone(), c)
            })
            .collect();
        soft.push((offset + i, UnaryCost::new(table, 0.0).expect("costs are in range")));
        vars.push(VariableSpec {
            name: format!("{prefix}{i}"),
            domain: Domain::Explicit(values.clone()),
        });
        values_of.push(values);
    }
    let mut cons = Vec::new();
    for a in 0..spec.vars {
        for b in a + 1..spec.vars {
            if !rng.gen_bool(spec.density.clamp(0.0, 1.0)) {
                continue;
            }
            let mut allowed = BTreeSet::new();
            for x in &values_of[a] {
                for y in &values_of[b] {
                    if !rng.gen_bool(spec.tightness.clamp(0.0, 1.0)) {
                        allowed.insert(vec![x.clone(), y.clone()]);
                    }
                }
            }
            cons.push(Constraint::Table {
                scope: vec![offset + a, offset + b],
                allowed,
            });
        }
    }
    (vars, cons, soft)
}

/// A random binary SWCSP with costs rounded to hundredths.
pub fn random_problem<R: Rng>(rng: &mut R, spec: &RandomSpec) -> Swcsp {
    let (vars, cons, soft) = random_parts(rng, spec, "x", 0);
    Swcsp::new(vars, cons, soft).expect("generated problem is well formed")
}

/// A random problem guaranteed disconnected at the root: two random blocks
/// of `left` and `right` variables, each internally chained so neither
/// splits further by accident of sampling.
pub fn random_disconnected<R: Rng>(rng: &mut R, spec: &RandomSpec, left: usize, right: usize) -> Swcsp {
    let mut all_vars = Vec::new();
    let mut all_cons = Vec::new();
    let mut all_soft = Vec::new();
    for (block, size, offset) in [("l", left, 0), ("r", right, left)] {
        let sub = RandomSpec {
            vars: size,
            ..spec.clone()
        };
        let (vars, mut cons, soft) = random_parts(rng, &sub, block, offset);
        let connected: BTreeSet<(usize, usize)> = cons
            .iter()
            .map(|c| {
                let s = c.scope();
                (s[0], s[1])
            })
            .collect();
        for i in 0..size.saturating_sub(1) {
            let (a, b) = (offset + i, offset + i + 1);
            if connected.contains(&(a, b)) {
                continue;
            }
            let mut allowed = BTreeSet::new();
            let dom = |v: &VariableSpec| match &v.domain {
                Domain::Explicit(x) => x.clone(),
                _ => unreachable!(),
            };
            for x in dom(&vars[i]) {
                for y in dom(&vars[i + 1]) {
                    if !rng.gen_bool(spec.tightness.clamp(0.0, 1.0) / 2.0) {
                        allowed.insert(vec![x.clone(), y]);
                    }
                }
            }
            cons.push(Constraint::Table {
                scope: vec![a, b],
                allowed,
            });
        }
        all_vars.extend(vars);
        all_cons.extend(cons);
        all_soft.extend(soft);
    }
    all_cons.shuffle(rng);
    Swcsp::new(all_vars, all_cons, all_soft).expect("generated problem is well formed")
}

/// `vars` unconstrained variables with `domain` values each and random costs.
pub fn random_free<R: Rng>(rng: &mut R, vars: usize, domain: usize, max_cost: f64) -> Swcsp {
    let spec = RandomSpec {
        vars,
        max_domain: domain,
        density: 0.0,
        tightness: 0.0,
        max_cost,
    };
    let (mut specs, cons, soft) = random_parts(rng, &spec, "f", 0);
    for v in &mut specs {
        v.domain = Domain::Explicit((0..domain).map(|j| Value::from(format!("d{j}"))).collect());
    }
    let soft = soft
        .into_iter()
        .map(|(v, c)| {
            let mut table = c.table;
            for j in 0..domain {
                table
                    .entry(Value::from(format!("d{j}")))
                    .or_insert_with(|| (rng.gen_range(0.0..=max_cost) * 100.0).round() / 100.0);
            }
            (v, UnaryCost::new(table, 0.0).expect("costs are in range"))
        })
        .collect();
    Swcsp::new(specs, cons, soft).expect("generated problem is well formed")
}
