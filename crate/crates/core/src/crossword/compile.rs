//! Puzzle to SWCSP compilation and decoding.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use thiserror::Error;

use super::grid::{validate_puzzle, Cell, Direction, Grid, Puzzle, Slot, Violation};
use super::scorer::Lexicon;
use super::stream::{fill_stream, multiword_cost};
use crate::problem::{Assignment, Candidate, CandidateSource, Constraint, Domain, Swcsp, Value, VarId, VariableSpec};

#[derive(Debug, Error)]
pub enum CompileError {
    #[error("invalid grid: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error(transparent)]
    Problem(#[from] crate::error::ProblemError),
}

type MemoKey = (VarId, Vec<Option<u8>>);

/// Candidate source backed by a lexicon and the puzzle's clues.
pub struct XwordSource {
    lexicon: Arc<Lexicon>,
    clues: Vec<String>,
    memo: Mutex<HashMap<MemoKey, Arc<Vec<Candidate>>>>,
}

impl XwordSource {
    pub fn new(lexicon: Arc<Lexicon>, puzzle: &Puzzle) -> Self {
        XwordSource {
            lexicon,
            clues: puzzle.clues.iter().map(|c| c.normalized.clone()).collect(),
            memo: Mutex::new(HashMap::new()),
        }
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }
}

impl CandidateSource for XwordSource {
    /// Single-word matches when there are any; multiwords only once those
    /// run out; the forced string last.
    fn candidates(&self, var: VarId, pattern: &[Option<u8>]) -> Vec<Candidate> {
        let key = (var, pattern.to_vec());
        if let Some(hit) = self.memo.lock().expect("memo lock").get(&key) {
            return hit.as_ref().clone();
        }
        let mut stream = fill_stream(self.lexicon.clone(), var, pattern, &self.clues[var]);
        let out = match stream.dictionary_len() {
            0 => stream.drain(),
            n => stream.prefix(n).to_vec(),
        };
        self.memo.lock().expect("memo lock").insert(key, Arc::new(out.clone()));
        out
    }

    fn cost(&self, var: VarId, value: &Value) -> f64 {
        let clue = &self.clues[var];
        let fill = value.as_str();
        if self.lexicon.is_known(fill, clue) {
            return self.lexicon.cost(fill, clue);
        }
        multiword_cost(&self.lexicon, fill, clue).unwrap_or_else(|| self.lexicon.config.floor_cost())
    }
}

/// One string variable per slot, named by its label, and one crossing
/// constraint per cell shared by an across and a down slot.
pub fn compile(puzzle: &Puzzle, lexicon: Arc<Lexicon>) -> Result<Swcsp, CompileError> {
    let errors: Vec<Violation> = validate_puzzle(&puzzle.grid, &puzzle.slots)
        .into_iter()
        .filter(Violation::is_error)
        .collect();
    if !errors.is_empty() {
        return Err(CompileError::Invalid(errors));
    }
    compile_unchecked(puzzle, lexicon)
}

/// [`compile`] without the grid rules; any slot shape is accepted.
pub fn compile_unchecked(puzzle: &Puzzle, lexicon: Arc<Lexicon>) -> Result<Swcsp, CompileError> {
    lexicon.config.validate()?;
    let source = Arc::new(XwordSource::new(lexicon, puzzle));
    let variables = puzzle
        .slots
        .iter()
        .map(|slot| VariableSpec {
            name: slot.label(),
            domain: Domain::Strings {
                length: slot.len(),
                candidates: source.candidates(slot.id, &vec![None; slot.len()]),
            },
        })
        .collect();
    let mut owner: HashMap<(usize, usize), (VarId, usize)> = HashMap::new();
    for slot in puzzle.slots.iter().filter(|s| s.direction == Direction::Across) {
        for (i, &cell) in slot.cells.iter().enumerate() {
            owner.insert(cell, (slot.id, i));
        }
    }
    let mut constraints = Vec::new();
    for slot in puzzle.slots.iter().filter(|s| s.direction == Direction::Down) {
        for (j, cell) in slot.cells.iter().enumerate() {
            if let Some(&(across, i)) = owner.get(cell) {
                constraints.push(Constraint::Crossing {
                    vars: [across, slot.id],
                    positions: [i, j],
                });
            }
        }
    }
    Ok(Swcsp::new(variables, constraints, Vec::new())?.with_source(source))
}

/// Write the bound slots of `assignment` into a copy of the blank grid.
pub fn fill_grid(grid: &Grid, slots: &[Slot], assignment: &Assignment) -> Grid {
    let mut out = grid.blank();
    for slot in slots {
        if let Some(value) = assignment.get(slot.id) {
            for (i, &(r, c)) in slot.cells.iter().enumerate() {
                out.set(r, c, Cell::Open(value.letter(i)));
            }
        }
    }
    out
}

/// A filled grid in GRID syntax, one row per line.
pub fn render_grid(grid: &Grid) -> String {
    let mut out = String::new();
    for row in grid.rows() {
        out.push_str(&row);
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crossword::grid::parse_puzzle;
    use crate::crossword::lexicon::{ClueDatabase, ScoredDictionary};
    use crate::crossword::scorer::ScorerConfig;

    fn lexicon() -> Arc<Lexicon> {
        let dict = ScoredDictionary::parse("CAT\t0.9\nAGE\t0.8\nTEN\t0.7\nDOG\t0.6\n").unwrap();
        Arc::new(Lexicon::new(dict, ClueDatabase::new(), ScorerConfig::default()))
    }

    #[test]
    fn open_three_by_three_shape() {
        let p = parse_puzzle("GRID\n...\n...\n...\nACROSS\n1 a\n4 b\n5 c\nDOWN\n1 d\n2 e\n3 f\n").unwrap();
        let c = compile(&p, lexicon()).unwrap();
        assert_eq!(c.size(), 6);
        assert_eq!(c.constraints().len(), 9);
        assert_eq!(c.variables()[0].name, "1A");
    }

    #[test]
    fn single_slot() {
        let p = parse_puzzle("GRID\n.....\nACROSS\n1 only\n").unwrap();
        let c = compile_unchecked(&p, lexicon()).unwrap();
        assert_eq!((c.size(), c.constraints().len()), (1, 0));
        assert!(compile(&p, lexicon()).is_err());
    }

    #[test]
    fn rejects_short_slots() {
        let p = parse_puzzle("GRID\n#..\n...\n...\nACROSS\n1 a\n3 b\n4 c\nDOWN\n1 d\n2 e\n3 f\n").unwrap();
        let err = compile(&p, lexicon()).unwrap_err();
        assert!(err.to_string().contains("row 1, column 2"), "{err}");
    }

    #[test]
    fn source_costs_agree_with_candidates() {
        let p = parse_puzzle("GRID\n...\n...\n...\nACROSS\n1 a\n4 b\n5 c\nDOWN\n1 d\n2 e\n3 f\n").unwrap();
        let lex = lexicon();
        let source = XwordSource::new(lex.clone(), &p);
        for c in source.candidates(0, &[None; 3]) {
            assert_eq!(source.cost(0, &c.value), c.cost);
        }
        assert_eq!(source.cost(0, &Value::from("ZZZ")), lex.config.floor_cost());
    }
}
