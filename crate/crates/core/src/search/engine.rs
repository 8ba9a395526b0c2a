use std::time::{Duration, Instant};

use serde::Serialize;

use super::post::postprocess_scope;
use super::{PitchSet, SearchStats, Termination};
use crate::heuristics::{choose, FailedState, ValueOrder};
use crate::problem::{components_of, Assignment, Swcsp, Value, VarId};
use crate::propagate::{forward_check_from, initial_live, LiveDomains};

/// The two variable sets of an independent split.
type Split = (Vec<VarId>, Vec<VarId>);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Mode {
    pub prune: bool,
    pub post: bool,
    pub split: bool,
}

impl Mode {
    pub const LDS: Mode = Mode {
        prune: true,
        post: false,
        split: false,
    };
    pub const LDS_POST: Mode = Mode {
        prune: false,
        post: true,
        split: false,
    };
    pub const ANDOR: Mode = Mode {
        prune: false,
        post: true,
        split: true,
    };
}

/// Wall-clock budget and stall window shared by all iterations of a run.
pub(crate) struct Clock {
    deadline: Option<Instant>,
    stall: Option<Duration>,
    last_improvement: Instant,
}

impl Clock {
    pub fn new(start: Instant, budget: Option<Duration>, stall: Option<Duration>) -> Self {
        Clock {
            deadline: budget.map(|b| start + b),
            stall,
            last_improvement: start,
        }
    }

    fn check(&self) -> Option<Termination> {
        let now = Instant::now();
        if self.deadline.is_some_and(|d| now >= d) {
            return Some(Termination::Budget);
        }
        if self
            .stall
            .is_some_and(|s| now.duration_since(self.last_improvement) >= s)
        {
            return Some(Termination::Stall);
        }
        None
    }
}

/// Best solution of the current scope. `assignment` binds exactly the
/// scope's variables.
#[derive(Clone, Debug)]
pub(crate) struct Incumbent {
    pub assignment: Assignment,
    pub cost: f64,
}

#[derive(Clone)]
struct State {
    assignment: Assignment,
    live: LiveDomains,
}

pub(crate) struct Engine<'a> {
    problem: &'a Swcsp,
    mode: Mode,
    limit: usize,
    order: ValueOrder,
    clock: &'a mut Clock,
    nodes: u64,
    base_nodes: u64,
    max_pitch: usize,
    trace: Vec<(u64, f64)>,
    global_best: f64,
    split_depth: usize,
    abort: Option<Termination>,
}

impl<'a> Engine<'a> {
    pub fn new(problem: &'a Swcsp, mode: Mode, limit: usize, order: ValueOrder, clock: &'a mut Clock) -> Self {
        Engine {
            problem,
            mode,
            limit,
            order,
            clock,
            nodes: 0,
            base_nodes: 0,
            max_pitch: 0,
            trace: Vec::new(),
            global_best: f64::INFINITY,
            split_depth: 0,
            abort: None,
        }
    }

    /// Continue numbering and improvement tracking from earlier iterations.
    pub fn carry(&mut self, stats: &SearchStats, best: Option<&Incumbent>) {
        self.base_nodes = stats.nodes_expanded;
        self.global_best = best.map_or(f64::INFINITY, |b| b.cost);
    }

    pub fn finish_iteration(self, stats: &mut SearchStats) {
        stats.nodes_expanded += self.nodes;
        stats.iteration_nodes.push(self.nodes);
        stats.discrepancies_used = stats.discrepancies_used.max(self.max_pitch);
        stats.trace.extend(self.trace);
        stats.termination = self.abort.unwrap_or(Termination::Completed);
    }

    fn enter(&mut self) -> bool {
        self.nodes += 1;
        if let Some(t) = self.clock.check() {
            self.abort = Some(t);
            return false;
        }
        true
    }

    fn record(&mut self, inc: &Incumbent) {
        if self.split_depth == 0 && inc.cost < self.global_best {
            self.global_best = inc.cost;
            self.trace.push((self.base_nodes + self.nodes, inc.cost));
            self.clock.last_improvement = Instant::now();
        }
    }

    fn root(&self) -> Option<State> {
        let empty = Assignment::empty();
        let r = initial_live(self.problem, &empty);
        (!r.failed).then_some(State {
            assignment: empty,
            live: r.reduced,
        })
    }

    fn all_vars(&self) -> Vec<VarId> {
        (0..self.problem.size()).collect()
    }

    fn bound(&self, scope: &[VarId], state: &State) -> f64 {
        scope.iter().map(|&v| state.live.min_cost(v)).sum()
    }

    fn complete(scope: &[VarId], state: &State) -> bool {
        scope.iter().all(|&v| state.assignment.is_bound(v))
    }

    fn incumbent(&self, assignment: Assignment, scope: &[VarId]) -> Incumbent {
        let cost = scope
            .iter()
            .map(|&v| {
                let x = assignment.get(v).expect("scope is fully bound");
                self.problem.value_cost(v, x)
            })
            .sum();
        Incumbent { assignment, cost }
    }

    fn better(&mut self, candidate: Incumbent, best: Option<Incumbent>) -> Option<Incumbent> {
        if best.as_ref().is_none_or(|b| candidate.cost < b.cost) {
            self.record(&candidate);
            Some(candidate)
        } else {
            best
        }
    }

    fn child(&self, state: &State, v: VarId, x: &Value) -> Option<State> {
        let assignment = state.assignment.with(v, x.clone());
        let step = forward_check_from(self.problem, &assignment, &state.live, v);
        (!step.failed).then_some(State {
            assignment,
            live: step.reduced,
        })
    }

    pub fn lds(&mut self, best: Option<Incumbent>) -> Option<Incumbent> {
        let Some(root) = self.root() else {
            self.enter();
            return best;
        };
        let scope = self.all_vars();
        self.solve(&scope, &root, best, &PitchSet::new())
    }

    fn solve(
        &mut self,
        scope: &[VarId],
        state: &State,
        best: Option<Incumbent>,
        pitched: &PitchSet,
    ) -> Option<Incumbent> {
        if self.abort.is_some() {
            return best;
        }
        // Neither a split nor a finished component is a node of the whole
        // search; both are bookkeeping around the component searches.
        if self.split_depth > 0 && Self::complete(scope, state) {
            return self.leaf(scope, state, best);
        }
        if self.mode.split {
            if let Some(parts) = self.split(scope, state, pitched) {
                return match parts {
                    Ok(parts) => self.solve_split(scope, parts, state, best, pitched),
                    Err(_) => best,
                };
            }
        }
        if !self.enter() {
            return best;
        }
        self.max_pitch = self.max_pitch.max(pitched.len());
        if self.mode.prune && best.as_ref().is_some_and(|b| self.bound(scope, state) >= b.cost) {
            return best;
        }
        if Self::complete(scope, state) {
            return self.leaf(scope, state, best);
        }
        let Ok(choice) = choose(self.problem, &state.assignment, &state.live, pitched, scope, self.order) else {
            return best;
        };
        let v = choice.var;
        let d = choice.values[0].value.clone();
        let mut best = best;
        if let Some(next) = self.child(state, v, &d) {
            best = self.solve(scope, &next, best, pitched);
        }
        // Pitching the only live value, or one already pitched, would
        // re-select the same pair forever.
        if pitched.len() < self.limit && state.live.get(v).len() > 1 && !pitched.contains(v, &d) {
            best = self.solve(scope, state, best, &pitched.with(v, d));
        }
        best
    }

    fn leaf(&mut self, scope: &[VarId], state: &State, best: Option<Incumbent>) -> Option<Incumbent> {
        let full = if self.mode.post {
            postprocess_scope(self.problem, &state.assignment, scope)
        } else {
            state.assignment.clone()
        };
        let candidate = self.incumbent(full.project(scope), scope);
        self.better(candidate, best)
    }

    /// If the unbound part of `scope` is disconnected: the component to
    /// solve first and the rest. A component whose best value already fails
    /// goes first, since it sinks the whole union; otherwise the one the
    /// heuristic would branch in.
    fn split(&self, scope: &[VarId], state: &State, pitched: &PitchSet) -> Option<Result<Split, FailedState>> {
        let unbound: Vec<VarId> = scope
            .iter()
            .copied()
            .filter(|&v| !state.assignment.is_bound(v))
            .collect();
        if unbound.len() < 2 {
            return None;
        }
        let comps = components_of(self.problem, &unbound, |_| true);
        if comps.len() < 2 {
            return None;
        }
        let mut ranked = Vec::with_capacity(comps.len());
        for (i, comp) in comps.iter().enumerate() {
            let choice = match choose(self.problem, &state.assignment, &state.live, pitched, comp, self.order) {
                Ok(c) => c,
                Err(e) => return Some(Err(e)),
            };
            let doomed = choice.values[0].damage.is_infinite();
            ranked.push((!doomed, -choice.gap, choice.var, i));
        }
        ranked.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.cmp(&b.2)));
        let lead = ranked[0].3;
        let mut rest: Vec<VarId> = comps
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != lead)
            .flat_map(|(_, c)| c.iter().copied())
            .collect();
        rest.sort_unstable();
        Some(Ok((comps[lead].clone(), rest)))
    }

    fn solve_split(
        &mut self,
        scope: &[VarId],
        (left, right): (Vec<VarId>, Vec<VarId>),
        state: &State,
        best: Option<Incumbent>,
        pitched: &PitchSet,
    ) -> Option<Incumbent> {
        let fixed: Vec<VarId> = scope
            .iter()
            .copied()
            .filter(|&v| state.assignment.is_bound(v))
            .collect();
        // The incumbent seeds the components only where it extends the
        // bindings made so far.
        let seed = best
            .as_ref()
            .filter(|b| fixed.iter().all(|&v| b.assignment.get(v) == state.assignment.get(v)));
        let part = |vars: &[VarId]| seed.map(|b| self.incumbent(b.assignment.project(vars), vars));
        let (seed_left, seed_right) = (part(&left), part(&right));

        self.split_depth += 1;
        let a = self.solve(&left, state, seed_left, pitched);
        // A component without a solution sinks the union.
        let b = match a {
            Some(_) => self.solve(&right, state, seed_right, pitched),
            None => None,
        };
        self.split_depth -= 1;

        let (Some(a), Some(b)) = (a, b) else {
            return best;
        };
        let union = state
            .assignment
            .project(&fixed)
            .union(&a.assignment)
            .union(&b.assignment);
        let candidate = self.incumbent(union, scope);
        self.better(candidate, best)
    }

    pub fn backtrack(&mut self) -> Option<Incumbent> {
        let Some(root) = self.root() else {
            self.enter();
            return None;
        };
        let scope = self.all_vars();
        self.backtrack_from(&scope, &root)
    }

    fn backtrack_from(&mut self, scope: &[VarId], state: &State) -> Option<Incumbent> {
        if !self.enter() {
            return None;
        }
        if Self::complete(scope, state) {
            return self.leaf(scope, state, None);
        }
        let choice = choose(
            self.problem,
            &state.assignment,
            &state.live,
            &PitchSet::new(),
            scope,
            self.order,
        )
        .ok()?;
        for score in &choice.values {
            if let Some(next) = self.child(state, choice.var, &score.value) {
                if let Some(found) = self.backtrack_from(scope, &next) {
                    return Some(found);
                }
            }
            if self.abort.is_some() {
                return None;
            }
        }
        None
    }

    pub fn branch_and_bound(&mut self) -> Option<Incumbent> {
        let Some(root) = self.root() else {
            self.enter();
            return None;
        };
        let scope = self.all_vars();
        self.bnb(&scope, &root, None)
    }

    fn bnb(&mut self, scope: &[VarId], state: &State, best: Option<Incumbent>) -> Option<Incumbent> {
        if self.abort.is_some() || !self.enter() {
            return best;
        }
        if best.as_ref().is_some_and(|b| self.bound(scope, state) >= b.cost) {
            return best;
        }
        if Self::complete(scope, state) {
            return self.leaf(scope, state, best);
        }
        let Ok(choice) = choose(
            self.problem,
            &state.assignment,
            &state.live,
            &PitchSet::new(),
            scope,
            self.order,
        ) else {
            return best;
        };
        let mut best = best;
        for score in &choice.values {
            if let Some(next) = self.child(state, choice.var, &score.value) {
                best = self.bnb(scope, &next, best);
            }
        }
        best
    }
}

/// One step of the heuristic dive.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiveStep {
    pub var: VarId,
    pub value: Value,
    pub gap: f64,
}

/// The left-most path of the pitch tree with no discrepancies: repeatedly
/// select a variable, bind its best value, and forward check, until every
/// variable is bound or propagation fails.
pub fn heuristic_dive(problem: &Swcsp, order: ValueOrder) -> Vec<DiveStep> {
    let mut steps = Vec::new();
    let empty = Assignment::empty();
    let root = initial_live(problem, &empty);
    if root.failed {
        return steps;
    }
    let mut assignment = empty;
    let mut live = root.reduced;
    let scope: Vec<VarId> = (0..problem.size()).collect();
    while assignment.len() < problem.size() {
        let Ok(choice) = choose(problem, &assignment, &live, &PitchSet::new(), &scope, order) else {
            break;
        };
        let value = choice.values[0].value.clone();
        steps.push(DiveStep {
            var: choice.var,
            value: value.clone(),
            gap: choice.gap,
        });
        assignment.bind(choice.var, value);
        let step = forward_check_from(problem, &assignment, &live, choice.var);
        if step.failed {
            break;
        }
        live = step.reduced;
    }
    steps
}


#[cfg(test)]
mod tests {
    use super::fixture::solve_lds_post_pruned;
    use crate::instances::{random_problem, RandomSpec};
    use crate::search::solve_lds_post;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bound_pruning_loses_a_postprocessed_solution() {
        let spec = RandomSpec {
            vars: 4,
            max_domain: 3,
            density: 0.5,
            tightness: 0.3,
            max_cost: 10.0,
        };
        let p = random_problem(&mut ChaCha8Rng::seed_from_u64(2795), &spec);
        let pruned = solve_lds_post_pruned(&p, 1).unwrap();
        let unpruned = solve_lds_post(&p, 1).cost();
        assert!((pruned - 21.46).abs() < 1e-9);
        assert!((unpruned - 20.39).abs() < 1e-9);
    }
}
