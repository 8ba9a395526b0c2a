//! Crossword puzzles as singly-weighted CSPs.

mod compile;
mod eval;
mod grid;
mod lexicon;
mod scorer;
mod stream;

pub use compile::{compile, compile_unchecked, fill_grid, render_grid, CompileError, XwordSource};
pub use eval::{acpt_score, evaluate, first_mistake_depth, Evaluation};
pub use grid::{
    extract_slots, normalize_clue, parse_letter_grid, parse_puzzle, read_slots, validate_puzzle, Cell, Clue, Direction,
    Grid, ParseError, Puzzle, Slot, Violation,
};
pub use lexicon::{normalize_word, ClueDatabase, LexiconError, ScoredDictionary};
pub use scorer::{score_candidate, ClueMatchScorer, CostModel, Lexicon, MeritScorer, Scorer, ScorerConfig, Weights};
pub use stream::{fill_stream, multiword_cost, CandidateStream, Phase};
