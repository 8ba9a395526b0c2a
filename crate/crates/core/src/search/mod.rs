//! Solving procedures: chronological backtracking, branch and bound,
//! limited discrepancy search over pitch sets (with optional postprocessing
//! and AND/OR splitting), and the iterative driver.

mod engine;
mod post;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::ProblemError;
use crate::heuristics::ValueOrder;
use crate::problem::{Assignment, Swcsp, Value, VarId};

pub use engine::{heuristic_dive, DiveStep};
pub use post::postprocess;

use engine::{Clock, Engine, Incumbent, Mode};

/// (variable, value) pairs excluded from branching below the point where
/// they were pitched. Passed by value down the recursion.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PitchSet(Vec<(VarId, Value)>);

impl PitchSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(&self, v: VarId, x: Value) -> Self {
        let mut out = self.clone();
        if !out.contains(v, &x) {
            out.0.push((v, x));
        }
        out
    }

    pub fn contains(&self, v: VarId, x: &Value) -> bool {
        self.0.iter().any(|(u, y)| *u == v && y == x)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(VarId, Value)> {
        self.0.iter()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    #[serde(rename = "bt")]
    Backtrack,
    Bnb,
    Lds,
    #[default]
    LdsPost,
    Andor,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Backtrack,
        Algorithm::Bnb,
        Algorithm::Lds,
        Algorithm::LdsPost,
        Algorithm::Andor,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Backtrack => "bt",
            Algorithm::Bnb => "bnb",
            Algorithm::Lds => "lds",
            Algorithm::LdsPost => "lds-post",
            Algorithm::Andor => "andor",
        }
    }

    /// Whether the algorithm takes a discrepancy limit.
    pub fn is_lds(self) -> bool {
        matches!(self, Algorithm::Lds | Algorithm::LdsPost | Algorithm::Andor)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = ProblemError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bt" | "backtrack" => Ok(Algorithm::Backtrack),
            "bnb" => Ok(Algorithm::Bnb),
            "lds" => Ok(Algorithm::Lds),
            "lds-post" | "lds_post" => Ok(Algorithm::LdsPost),
            "andor" => Ok(Algorithm::Andor),
            other => Err(ProblemError::InvalidConfig(format!("unknown algorithm `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    pub algorithm: Algorithm,
    /// Discrepancy limit, or the largest limit tried when iterating.
    /// `None` with `iterative` means no cap below the optimality certificate.
    pub max_discrepancies: Option<usize>,
    pub iterative: bool,
    pub budget: Option<Duration>,
    /// Stop when this long passes without a better incumbent.
    pub stall: Option<Duration>,
    pub stop_if_no_improvement: bool,
    /// Seeds instance generators; the solvers themselves are deterministic.
    pub seed: u64,
    pub value_order: ValueOrder,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            algorithm: Algorithm::LdsPost,
            max_discrepancies: Some(0),
            iterative: false,
            budget: None,
            stall: None,
            stop_if_no_improvement: false,
            seed: 0,
            value_order: ValueOrder::Damage,
        }
    }
}

impl SearchConfig {
    pub fn new(algorithm: Algorithm) -> Self {
        SearchConfig {
            algorithm,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ProblemError> {
        if self.budget.is_some_and(|b| b.is_zero()) {
            return Err(ProblemError::InvalidConfig("budget must be positive".into()));
        }
        if self.stall.is_some_and(|b| b.is_zero()) {
            return Err(ProblemError::InvalidConfig("stall window must be positive".into()));
        }
        if !self.iterative && self.algorithm.is_lds() && self.max_discrepancies.is_none() {
            return Err(ProblemError::InvalidConfig(
                "a discrepancy limit is required unless iterating".into(),
            ));
        }
        Ok(())
    }
}

/// Why a run stopped.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// Every scheduled iteration finished.
    #[default]
    Completed,
    /// The discrepancy limit reached k(|D| - 1), so the result is optimal.
    Optimal,
    /// An iteration finished without improving on the previous one.
    NoImprovement,
    Budget,
    Stall,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchStats {
    pub algorithm: Algorithm,
    /// Discrepancy limit of the last iteration run.
    pub n: usize,
    pub nodes_expanded: u64,
    /// Largest pitch set reached.
    pub discrepancies_used: usize,
    /// `None` when no solution was found.
    pub cost: Option<f64>,
    /// (cumulative nodes, cost) at every improvement of the incumbent.
    pub trace: Vec<(u64, f64)>,
    pub wall_ms: u64,
    pub iterations: usize,
    /// Nodes of each iteration, in order.
    pub iteration_nodes: Vec<u64>,
    pub termination: Termination,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchOutcome {
    /// Best solution found, or the inconsistent assignment.
    pub assignment: Assignment,
    pub stats: SearchStats,
}

impl SearchOutcome {
    pub fn cost(&self) -> f64 {
        self.stats.cost.unwrap_or(f64::INFINITY)
    }

    pub fn is_solved(&self) -> bool {
        !self.assignment.is_inconsistent()
    }
}

fn single(problem: &Swcsp, algorithm: Algorithm, n: usize) -> SearchOutcome {
    let cfg = SearchConfig {
        max_discrepancies: Some(n),
        ..SearchConfig::new(algorithm)
    };
    run(problem, &cfg).expect("fixed configurations are valid")
}

/// First solution in heuristic order, or the inconsistent assignment.
pub fn solve_backtrack(problem: &Swcsp) -> SearchOutcome {
    single(problem, Algorithm::Backtrack, 0)
}

/// A least-cost solution, or the inconsistent assignment.
pub fn solve_bnb(problem: &Swcsp) -> SearchOutcome {
    single(problem, Algorithm::Bnb, 0)
}

/// Best bound-pruned solution with at most `n` discrepancies.
pub fn solve_lds(problem: &Swcsp, n: usize) -> SearchOutcome {
    single(problem, Algorithm::Lds, n)
}

/// Pitch search without pruning, postprocessing every leaf.
pub fn solve_lds_post(problem: &Swcsp, n: usize) -> SearchOutcome {
    single(problem, Algorithm::LdsPost, n)
}

/// As [`solve_lds_post`], solving disconnected residual problems separately.
pub fn solve_andor(problem: &Swcsp, n: usize) -> SearchOutcome {
    single(problem, Algorithm::Andor, n)
}

/// The discrepancy limit that guarantees optimality: k(|D| - 1).
pub fn optimality_limit(problem: &Swcsp) -> usize {
    problem.size() * problem.max_domain_size().saturating_sub(1)
}

/// Run the configured algorithm, iterating the discrepancy limit if asked.
pub fn run(problem: &Swcsp, cfg: &SearchConfig) -> Result<SearchOutcome, ProblemError> {
    cfg.validate()?;
    let start = Instant::now();
    let mut clock = Clock::new(start, cfg.budget, cfg.stall);
    let mut stats = SearchStats {
        algorithm: cfg.algorithm,
        ..SearchStats::default()
    };
    let mut best: Option<Incumbent> = None;

    let mode = match cfg.algorithm {
        Algorithm::Backtrack | Algorithm::Bnb => None,
        Algorithm::Lds => Some(Mode::LDS),
        Algorithm::LdsPost => Some(Mode::LDS_POST),
        Algorithm::Andor => Some(Mode::ANDOR),
    };

    match mode {
        None => {
            let mut engine = Engine::new(problem, Mode::LDS, 0, cfg.value_order, &mut clock);
            best = if cfg.algorithm == Algorithm::Backtrack {
                engine.backtrack()
            } else {
                engine.branch_and_bound()
            };
            stats.iterations = 1;
            engine.finish_iteration(&mut stats);
        }
        Some(mode) => {
            let certificate = optimality_limit(problem);
            let (first, last) = if cfg.iterative {
                (0, cfg.max_discrepancies.unwrap_or(usize::MAX))
            } else {
                let n = cfg.max_discrepancies.unwrap_or(0);
                (n, n)
            };
            let mut n = first;
            loop {
                let previous = best.as_ref().map_or(f64::INFINITY, |b| b.cost);
                let mut engine = Engine::new(problem, mode, n, cfg.value_order, &mut clock);
                engine.carry(&stats, best.as_ref());
                best = engine.lds(best);
                stats.iterations += 1;
                stats.n = n;
                engine.finish_iteration(&mut stats);
                if stats.termination != Termination::Completed {
                    break;
                }
                let current = best.as_ref().map_or(f64::INFINITY, |b| b.cost);
                if n >= certificate {
                    stats.termination = Termination::Optimal;
                    break;
                }
                if n >= last {
                    break;
                }
                if cfg.stop_if_no_improvement && best.is_some() && current >= previous {
                    stats.termination = Termination::NoImprovement;
                    break;
                }
                n += 1;
            }
        }
    }

    stats.cost = best.as_ref().map(|b| b.cost);
    stats.wall_ms = start.elapsed().as_millis() as u64;
    let assignment = best.map_or(Assignment::Inconsistent, |b| b.assignment);
    Ok(SearchOutcome { assignment, stats })
}
