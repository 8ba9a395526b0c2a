//! Singly-weighted constraint satisfaction: problems whose hard constraints
//! are arbitrary and whose costs are per-variable, solved by limited
//! discrepancy search with damage-based heuristics, postprocessing and
//! AND/OR decomposition. A crossword front end compiles grids, clues and
//! scored word lists into such problems.

pub mod crossword;
pub mod error;
pub mod format;
pub mod heuristics;
pub mod instances;
pub mod problem;
pub mod propagate;
pub mod search;

pub use error::ProblemError;
pub use heuristics::{FailedState, ValueOrder, ValueScore, VariableGap};
pub use problem::{
    Assignment, Candidate, CandidateSource, Constraint, Domain, Swcsp, UnaryCost, Value, VarId, VariableSpec,
};
pub use propagate::{ac3, forward_check, LiveDomains, PropagationResult};
pub use search::{
    postprocess, run, solve_andor, solve_backtrack, solve_bnb, solve_lds, solve_lds_post, Algorithm, PitchSet,
    SearchConfig, SearchOutcome, SearchStats, Termination,
};
