use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use swcsp::{Algorithm, SearchStats, Termination};

use crate::exit;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rendering {
    Bindings(BTreeMap<String, String>),
    /// Grid rows, `#` for blocks.
    Grid(Vec<String>),
}

/// Result of `solve` or `xw`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub instance: String,
    /// `None` when no solution was found.
    pub solution: Option<Rendering>,
    pub cost: Option<f64>,
    pub stats: SearchStats,
    /// Wall time of the whole command, loading excluded.
    pub elapsed_ms: u64,
    pub acpt: Option<u64>,
    pub words_correct: Option<usize>,
    pub words_total: Option<usize>,
    pub letters_correct: Option<usize>,
    pub letters_total: Option<usize>,
    pub first_mistake_depth: Option<usize>,
    pub candidate_cap: Option<usize>,
}

impl RunReport {
    pub fn exit_code(&self) -> i32 {
        match (&self.solution, self.stats.termination) {
            (None, _) => exit::NO_SOLUTION,
            (Some(_), Termination::Budget) => exit::BUDGET,
            _ => exit::OK,
        }
    }
}

/// One (instance, algorithm) cell of a benchmark.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchEntry {
    pub instance: String,
    pub algorithm: Algorithm,
    pub cost: Option<f64>,
    pub nodes: u64,
    pub wall_ms: u64,
    pub trace: Vec<(u64, f64)>,
    pub termination: Option<Termination>,
    /// Set when the instance could not be loaded or run.
    pub error: Option<String>,
}
