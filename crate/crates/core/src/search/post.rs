use crate::problem::{Assignment, Candidate, Domain, Swcsp, Value, VarId};

/// Hill-climb a complete solution: re-solve one variable at a time with all
/// others fixed, keeping strict improvements, until a full pass changes
/// nothing.
pub fn postprocess(problem: &Swcsp, b: &Assignment) -> Assignment {
    let scope: Vec<VarId> = (0..problem.size()).collect();
    postprocess_scope(problem, b, &scope)
}

/// [`postprocess`] moving only the variables in `scope`.
pub(crate) fn postprocess_scope(problem: &Swcsp, b: &Assignment, scope: &[VarId]) -> Assignment {
    let mut best = b.clone();
    if best.is_inconsistent() {
        return best;
    }
    loop {
        let mut changed = false;
        for &v in scope {
            let Some(current) = best.get(v).cloned() else {
                continue;
            };
            let current_cost = problem.value_cost(v, &current);
            if let Some(better) = best_value(problem, &best, v) {
                if better.cost < current_cost {
                    best.bind(v, better.value);
                    changed = true;
                }
            }
        }
        if !changed {
            return best;
        }
    }
}

/// Cheapest value of `v` consistent with every other binding of `s`;
/// the first one in domain order on ties.
fn best_value(problem: &Swcsp, s: &Assignment, v: VarId) -> Option<Candidate> {
    let candidates = match problem.domain(v) {
        Domain::Explicit(_) => problem.candidates(v),
        Domain::Strings { .. } => {
            let mut rest = s.clone();
            rest.unbind(v);
            let pattern = problem.pattern_for(v, &rest)?;
            problem.pattern_candidates(v, &pattern)
        }
    };
    let consistent = |x: &Value| {
        problem
            .incident(v)
            .iter()
            .all(|&ci| problem.constraints()[ci].check(|u| if u == v { Some(x) } else { s.get(u) }) != Some(false))
    };
    let mut best: Option<Candidate> = None;
    for c in candidates {
        if best.as_ref().is_some_and(|b| c.cost >= b.cost) || !consistent(&c.value) {
            continue;
        }
        best = Some(c);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{random_free, t1};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn local_optimum_is_fixed() {
        let p = t1();
        let b = Assignment::from_pairs([(0, "a"), (1, "a")]);
        assert_eq!(postprocess(&p, &b), b);
    }

    #[test]
    fn coupled_move_is_out_of_reach() {
        let p = t1();
        let b = Assignment::from_pairs([(0, "b"), (1, "b")]);
        assert_eq!(postprocess(&p, &b), b);
    }

    #[test]
    fn unconstrained_variable_moves_to_minimum() {
        let p = random_free(&mut ChaCha8Rng::seed_from_u64(9), 1, 4, 10.0);
        let worst = p
            .candidates(0)
            .into_iter()
            .max_by(|a, b| a.cost.total_cmp(&b.cost))
            .unwrap();
        let out = postprocess(&p, &Assignment::from_pairs([(0, worst.value)]));
        let cost = p.cost(&out).unwrap();
        let lo = p.candidates(0).iter().map(|c| c.cost).fold(f64::INFINITY, f64::min);
        assert_eq!(cost, lo);
    }
}
