//! Damage-based value ordering and min2-gap variable selection.
//!
//! The damage of binding `v = f` is the rise in the state lower bound after
//! forward checking. Only `v` and its neighbors can change the bound, so the
//! sum runs over those alone.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::problem::{Assignment, Candidate, Constraint, Swcsp, Value, VarId};
use crate::propagate::{forward_check_from, revise, LiveDomains};
use crate::search::PitchSet;

/// A live value of some variable with its own cost and its damage.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValueScore {
    pub value: Value,
    pub cost: f64,
    pub damage: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VariableGap {
    pub var: VarId,
    pub gap: f64,
}

/// A live domain emptied, or only pitched values remain in a domain that is
/// not yet a singleton.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Error)]
#[error("no branchable value left for variable {0}")]
pub struct FailedState(pub VarId);

/// How the values of the selected variable are ordered.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueOrder {
    /// Ascending damage.
    #[default]
    Damage,
    /// Ascending own cost, ignoring what the binding does to neighbors.
    OwnCost,
}

/// Variable chosen for branching and its ordered candidate values.
#[derive(Clone, Debug, PartialEq)]
pub struct Choice {
    pub var: VarId,
    pub gap: f64,
    pub values: Vec<ValueScore>,
}

/// Exact costs of bound variables plus the cheapest live cost of each
/// unbound one.
pub fn state_bound(problem: &Swcsp, assignment: &Assignment, live: &LiveDomains) -> Result<f64, FailedState> {
    let mut total = 0.0;
    for v in 0..problem.size() {
        total += match assignment.get(v) {
            Some(x) => problem.value_cost(v, x),
            None if live.get(v).is_empty() => return Err(FailedState(v)),
            None => live.min_cost(v),
        };
    }
    Ok(total)
}

/// Damage of binding `v = f`: the neighbor-only evaluation.
/// `+inf` when the binding empties a neighbor's live domain.
pub fn damage(problem: &Swcsp, assignment: &Assignment, live: &LiveDomains, v: VarId, f: &Value) -> f64 {
    let cand = Candidate::new(f.clone(), problem.value_cost(v, f));
    Node::new(problem, assignment, live).damage(v, &cand)
}

/// Damage computed the long way: the bound over every variable after
/// forward checking, minus the bound before.
pub fn damage_exhaustive(problem: &Swcsp, assignment: &Assignment, live: &LiveDomains, v: VarId, f: &Value) -> f64 {
    let Ok(before) = state_bound(problem, assignment, live) else {
        return f64::INFINITY;
    };
    let bound = assignment.with(v, f.clone());
    let step = forward_check_from(problem, &bound, live, v);
    if step.failed {
        return f64::INFINITY;
    }
    match state_bound(problem, &bound, &step.reduced) {
        Ok(after) => after - before,
        Err(_) => f64::INFINITY,
    }
}

/// Unpitched live values of `v`, stably sorted by ascending damage.
pub fn order_values(
    problem: &Swcsp,
    assignment: &Assignment,
    live: &LiveDomains,
    v: VarId,
    pitched: &PitchSet,
) -> Vec<ValueScore> {
    let mut node = Node::new(problem, assignment, live);
    let mut scores: Vec<ValueScore> = branchable(live.get(v), v, pitched)
        .into_iter()
        .map(|c| node.score(v, c))
        .collect();
    sort_scores(&mut scores, ValueOrder::Damage);
    scores
}

/// Second smallest element counting multiplicity.
pub fn min2(xs: &[f64]) -> Option<f64> {
    let mut lo = f64::INFINITY;
    let mut second = f64::INFINITY;
    if xs.len() < 2 {
        return None;
    }
    for &x in xs {
        if x < lo {
            second = lo;
            lo = x;
        } else if x < second {
            second = x;
        }
    }
    Some(second)
}

/// Gap between the best and second best damage; `+inf` for a single value
/// or when every alternative fails.
pub fn gap(damages: &[f64]) -> f64 {
    let Some(second) = min2(damages) else {
        return f64::INFINITY;
    };
    if second.is_infinite() {
        return f64::INFINITY;
    }
    let best = damages.iter().copied().fold(f64::INFINITY, f64::min);
    second - best
}

/// The unbound variable with the largest gap, lowest id on ties.
pub fn select_variable(
    problem: &Swcsp,
    assignment: &Assignment,
    live: &LiveDomains,
    pitched: &PitchSet,
) -> Result<VarId, FailedState> {
    let scope: Vec<VarId> = (0..problem.size()).collect();
    choose(problem, assignment, live, pitched, &scope, ValueOrder::Damage).map(|c| c.var)
}

/// Gaps of every unbound variable, in id order.
pub fn variable_gaps(
    problem: &Swcsp,
    assignment: &Assignment,
    live: &LiveDomains,
    pitched: &PitchSet,
) -> Result<Vec<VariableGap>, FailedState> {
    let mut node = Node::new(problem, assignment, live);
    let mut out = Vec::new();
    for v in (0..problem.size()).filter(|&v| !assignment.is_bound(v)) {
        let scores = node.scores_for(v, pitched)?;
        let damages: Vec<f64> = scores.iter().map(|s| s.damage).collect();
        out.push(VariableGap {
            var: v,
            gap: gap(&damages),
        });
    }
    Ok(out)
}

/// Variable selection and value ordering in one pass over the unbound
/// variables of `scope`. `None` is never returned for a nonempty unbound set.
pub fn choose(
    problem: &Swcsp,
    assignment: &Assignment,
    live: &LiveDomains,
    pitched: &PitchSet,
    scope: &[VarId],
    order: ValueOrder,
) -> Result<Choice, FailedState> {
    let mut node = Node::new(problem, assignment, live);
    let mut best: Option<Choice> = None;
    for &v in scope {
        if assignment.is_bound(v) {
            continue;
        }
        let scores = node.scores_for(v, pitched)?;
        let damages: Vec<f64> = scores.iter().map(|s| s.damage).collect();
        let g = gap(&damages);
        if best.as_ref().is_none_or(|b| g > b.gap) {
            best = Some(Choice {
                var: v,
                gap: g,
                values: scores,
            });
        }
    }
    let mut choice = best.ok_or(FailedState(usize::MAX))?;
    sort_scores(&mut choice.values, order);
    Ok(choice)
}

fn sort_scores(scores: &mut [ValueScore], order: ValueOrder) {
    match order {
        ValueOrder::Damage => scores.sort_by(|a, b| a.damage.total_cmp(&b.damage)),
        ValueOrder::OwnCost => scores.sort_by(|a, b| a.cost.total_cmp(&b.cost)),
    }
}

/// Values of `v` eligible for branching: the unpitched live values, or the
/// single live value when it is pitched (the variable is then forced).
fn branchable<'a>(domain: &'a [Candidate], v: VarId, pitched: &PitchSet) -> Vec<&'a Candidate> {
    let open: Vec<&Candidate> = domain.iter().filter(|c| !pitched.contains(v, &c.value)).collect();
    if open.is_empty() && domain.len() == 1 {
        return vec![&domain[0]];
    }
    open
}

/// Per-node cache of live minima and per-letter minima used by the
/// crossing fast path.
struct Node<'a> {
    problem: &'a Swcsp,
    assignment: &'a Assignment,
    live: &'a LiveDomains,
    mins: Vec<f64>,
    letters: HashMap<(VarId, usize), [f64; 26]>,
    /// Refilled minima for crossing letters no live value carries.
    refilled: HashMap<(VarId, usize, u8), f64>,
}

impl<'a> Node<'a> {
    fn new(problem: &'a Swcsp, assignment: &'a Assignment, live: &'a LiveDomains) -> Self {
        let mins = (0..problem.size()).map(|v| live.min_cost(v)).collect();
        Node {
            problem,
            assignment,
            live,
            mins,
            letters: HashMap::new(),
            refilled: HashMap::new(),
        }
    }

    fn scores_for(&mut self, v: VarId, pitched: &PitchSet) -> Result<Vec<ValueScore>, FailedState> {
        let live = self.live;
        let values = branchable(live.get(v), v, pitched);
        if values.is_empty() {
            return Err(FailedState(v));
        }
        Ok(values.into_iter().map(|c| self.score(v, c)).collect())
    }

    fn score(&mut self, v: VarId, cand: &Candidate) -> ValueScore {
        ValueScore {
            value: cand.value.clone(),
            cost: cand.cost,
            damage: self.damage(v, cand),
        }
    }

    fn letter_minima(&mut self, u: VarId, position: usize) -> &[f64; 26] {
        let live = self.live;
        self.letters.entry((u, position)).or_insert_with(|| {
            let mut out = [f64::INFINITY; 26];
            for c in live.get(u) {
                if let Some(l @ b'A'..=b'Z') = c.value.letter(position) {
                    let slot = &mut out[(l - b'A') as usize];
                    *slot = slot.min(c.cost);
                }
            }
            out
        })
    }

    fn damage(&mut self, v: VarId, cand: &Candidate) -> f64 {
        let problem = self.problem;
        let mut total = cand.cost - self.mins[v];
        let mut extended: Option<Assignment> = None;
        for (u, shared) in problem.neighbor_groups(v) {
            let u = *u;
            if let [ci] = shared.as_slice() {
                if let Constraint::Crossing { vars, positions } = &problem.constraints()[*ci] {
                    let (pv, pu) = if vars[0] == v {
                        (positions[0], positions[1])
                    } else {
                        (positions[1], positions[0])
                    };
                    let letter = cand.value.letter(pv);
                    if let Some(x) = self.assignment.get(u) {
                        if letter.is_none() || x.letter(pu) != letter {
                            return f64::INFINITY;
                        }
                        continue;
                    }
                    if let Some(l @ b'A'..=b'Z') = letter {
                        let mut m = self.letter_minima(u, pu)[(l - b'A') as usize];
                        if m.is_infinite() {
                            m = match self.refilled.get(&(u, pu, l)) {
                                Some(&m) => m,
                                None => {
                                    let bound = self.assignment.with(v, cand.value.clone());
                                    let m = revise(problem, &bound, self.live, shared, u)
                                        .iter()
                                        .map(|c| c.cost)
                                        .fold(f64::INFINITY, f64::min);
                                    self.refilled.insert((u, pu, l), m);
                                    m
                                }
                            };
                        }
                        if m.is_infinite() {
                            return f64::INFINITY;
                        }
                        total += m - self.mins[u];
                        continue;
                    }
                }
            }
            let bound = extended.get_or_insert_with(|| self.assignment.with(v, cand.value.clone()));
            let revised = revise(problem, bound, self.live, shared, u);
            if revised.is_empty() {
                return f64::INFINITY;
            }
            if !self.assignment.is_bound(u) {
                let m = revised.iter().map(|c| c.cost).fold(f64::INFINITY, f64::min);
                total += m - self.mins[u];
            }
        }
        total
    }
}
