//! Python bindings: problems, search, and the crossword front end.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Duration;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use swcsp::crossword::{
    compile, evaluate, fill_grid, first_mistake_depth, parse_letter_grid, parse_puzzle, read_slots, validate_puzzle,
    ClueDatabase, ScoredDictionary, ScorerConfig,
};
use swcsp::format::{assignment_by_name, assignment_from_names, parse_problem, render_problem};
use swcsp::instances::{random_problem, RandomSpec};
use swcsp::search::heuristic_dive;
use swcsp::{run, Algorithm, SearchConfig, SearchOutcome, ValueOrder};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_order(order: &str) -> PyResult<ValueOrder> {
    match order {
        "damage" => Ok(ValueOrder::Damage),
        "own-cost" | "own_cost" => Ok(ValueOrder::OwnCost),
        other => Err(value_error(format!("unknown value order `{other}`"))),
    }
}

/// A singly-weighted CSP.
#[pyclass(frozen, module = "swcsp_py")]
struct Problem {
    inner: Arc<swcsp::Swcsp>,
}

#[pymethods]
impl Problem {
    /// Parse the JSON problem format.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Problem {
            inner: Arc::new(parse_problem(text).map_err(value_error)?),
        })
    }

    fn to_json(&self) -> PyResult<String> {
        render_problem(&self.inner).map_err(value_error)
    }

    #[getter]
    fn size(&self) -> usize {
        self.inner.size()
    }

    fn variable_names(&self) -> Vec<String> {
        self.inner.variables().iter().map(|v| v.name.clone()).collect()
    }

    /// Summed cost of a partial assignment; infinite when it cannot be
    /// extended.
    fn cost(&self, bindings: BTreeMap<String, String>) -> PyResult<f64> {
        let s = assignment_from_names(&self.inner, &bindings).map_err(value_error)?;
        self.inner.cost(&s).map_err(value_error)
    }

    fn is_solution(&self, bindings: BTreeMap<String, String>) -> PyResult<bool> {
        let s = assignment_from_names(&self.inner, &bindings).map_err(value_error)?;
        Ok(self.inner.is_solution(&s))
    }

    /// Whether the constraint graph falls into two or more components.
    fn is_disconnected(&self) -> bool {
        self.inner.split().is_some()
    }

    #[pyo3(signature = (algo="lds-post", max_disc=None, iterative=false, budget_ms=None, stall_seconds=None, stop_if_no_improvement=false, order="damage"))]
    #[allow(clippy::too_many_arguments)]
    fn solve(
        &self,
        py: Python<'_>,
        algo: &str,
        max_disc: Option<usize>,
        iterative: bool,
        budget_ms: Option<u64>,
        stall_seconds: Option<f64>,
        stop_if_no_improvement: bool,
        order: &str,
    ) -> PyResult<SearchResult> {
        let algorithm: Algorithm = algo.parse().map_err(value_error)?;
        let stall = match stall_seconds {
            Some(s) if !(s.is_finite() && s > 0.0) => return Err(value_error("stall_seconds must be positive")),
            s => s.map(Duration::from_secs_f64),
        };
        let cfg = SearchConfig {
            algorithm,
            max_discrepancies: if max_disc.is_none() && !iterative {
                Some(0)
            } else {
                max_disc
            },
            iterative,
            budget: budget_ms.map(Duration::from_millis),
            stall,
            stop_if_no_improvement,
            seed: 0,
            value_order: parse_order(order)?,
        };
        let problem = self.inner.clone();
        let out = py.detach(move || run(&problem, &cfg)).map_err(value_error)?;
        Ok(SearchResult::new(&self.inner, out))
    }

    fn __repr__(&self) -> String {
        format!("Problem(size={})", self.inner.size())
    }
}

/// Outcome of [`Problem::solve`].
#[pyclass(frozen, get_all, module = "swcsp_py")]
struct SearchResult {
    /// Bindings by variable name, or None when no solution was found.
    solution: Option<BTreeMap<String, String>>,
    cost: Option<f64>,
    nodes: u64,
    iterations: usize,
    discrepancies: usize,
    termination: String,
    trace: Vec<(u64, f64)>,
    wall_ms: u64,
}

impl SearchResult {
    fn new(problem: &swcsp::Swcsp, out: SearchOutcome) -> Self {
        let termination = serde_json::to_value(out.stats.termination)
            .ok()
            .and_then(|v| v.as_str().map(str::to_string))
            .unwrap_or_default();
        SearchResult {
            solution: out.is_solved().then(|| assignment_by_name(problem, &out.assignment)),
            cost: out.stats.cost,
            nodes: out.stats.nodes_expanded,
            iterations: out.stats.iterations,
            discrepancies: out.stats.n,
            termination,
            trace: out.stats.trace,
            wall_ms: out.stats.wall_ms,
        }
    }
}

#[pymethods]
impl SearchResult {
    fn __repr__(&self) -> String {
        format!(
            "SearchResult(cost={}, nodes={}, termination={})",
            self.cost.map_or("None".to_string(), |c| c.to_string()),
            self.nodes,
            self.termination
        )
    }
}

/// Scored word list, clue database and scoring parameters.
#[pyclass(frozen, module = "swcsp_py")]
struct Lexicon {
    inner: Arc<swcsp::crossword::Lexicon>,
}

#[pymethods]
impl Lexicon {
    /// `words` holds `WORD<TAB>merit` lines, `clues` holds
    /// `clue<TAB>ANSWER<TAB>count` lines, `config` is scorer JSON.
    #[new]
    #[pyo3(signature = (words, clues="", config=None))]
    fn new(words: &str, clues: &str, config: Option<&str>) -> PyResult<Self> {
        let dict = ScoredDictionary::parse(words).map_err(value_error)?;
        let db = ClueDatabase::parse(clues).map_err(value_error)?;
        let config = match config {
            Some(text) => ScorerConfig::from_json(text).map_err(value_error)?,
            None => ScorerConfig::default(),
        };
        config.validate().map_err(value_error)?;
        Ok(Lexicon {
            inner: Arc::new(swcsp::crossword::Lexicon::new(dict, db, config)),
        })
    }

    fn probability(&self, fill: &str, clue: &str) -> f64 {
        self.inner.probability(fill, &swcsp::crossword::normalize_clue(clue))
    }

    fn cost(&self, fill: &str, clue: &str) -> f64 {
        self.inner.cost(fill, &swcsp::crossword::normalize_clue(clue))
    }

    fn __len__(&self) -> usize {
        self.inner.dict.len()
    }
}

/// A crossword grid with clues and, optionally, its solution.
#[pyclass(frozen, module = "swcsp_py")]
struct Puzzle {
    inner: swcsp::crossword::Puzzle,
}

#[pymethods]
impl Puzzle {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(Puzzle {
            inner: parse_puzzle(text).map_err(value_error)?,
        })
    }

    /// Slot labels such as "1A", in variable order.
    fn slots(&self) -> Vec<String> {
        self.inner.slots.iter().map(|s| s.label()).collect()
    }

    /// Answers by slot label, when the file carried a solution.
    fn answers(&self) -> Option<BTreeMap<String, String>> {
        let answers = self.inner.answers()?;
        Some(self.slots().into_iter().zip(answers).collect())
    }

    /// Structural violations, each prefixed with "error" or "warning".
    fn validate(&self) -> Vec<String> {
        validate_puzzle(&self.inner.grid, &self.inner.slots)
            .iter()
            .map(|v| format!("{}: {v}", if v.is_error() { "error" } else { "warning" }))
            .collect()
    }

    fn compile(&self, lexicon: &Lexicon) -> PyResult<Problem> {
        Ok(Problem {
            inner: Arc::new(compile(&self.inner, lexicon.inner.clone()).map_err(value_error)?),
        })
    }

    /// Grid rows with the given slot fills written in.
    fn fill(&self, bindings: BTreeMap<String, String>) -> PyResult<Vec<String>> {
        let mut s = swcsp::Assignment::empty();
        for (label, word) in &bindings {
            let slot = self
                .inner
                .slots
                .iter()
                .find(|s| &s.label() == label)
                .ok_or_else(|| value_error(format!("no slot `{label}`")))?;
            if word.len() != slot.len() {
                return Err(value_error(format!("`{word}` does not fit {label}")));
            }
            s.bind(slot.id, swcsp::Value::from(word.as_str()));
        }
        Ok(fill_grid(&self.inner.grid, &self.inner.slots, &s).rows())
    }

    /// (words correct, words total, letters correct, letters total) of
    /// `rows` against `key` rows, or against the puzzle's own solution.
    #[pyo3(signature = (rows, key=None))]
    fn evaluate(&self, rows: Vec<String>, key: Option<Vec<String>>) -> PyResult<(usize, usize, usize, usize)> {
        let fill = parse_letter_grid(&rows.join("\n")).map_err(value_error)?;
        let key = match key {
            Some(k) => parse_letter_grid(&k.join("\n")).map_err(value_error)?,
            None if self.inner.has_solution() => self.inner.grid.clone(),
            None => return Err(value_error("no key given and the puzzle has no solution")),
        };
        let same_shape =
            |g: &swcsp::crossword::Grid| g.height == self.inner.grid.height && g.width == self.inner.grid.width;
        if !same_shape(&fill) || !same_shape(&key) {
            return Err(value_error("grid size does not match the puzzle"));
        }
        let e = evaluate(&fill, &key, &self.inner.slots);
        Ok((e.words_correct, e.words_total, e.letters_correct, e.letters_total))
    }

    /// Leading choices of a single heuristic dive that agree with the
    /// puzzle's solution.
    #[pyo3(signature = (lexicon, order="damage"))]
    fn first_mistake(&self, lexicon: &Lexicon, order: &str) -> PyResult<usize> {
        let answers = self
            .inner
            .answers()
            .ok_or_else(|| value_error("the puzzle has no solution"))?;
        let problem = compile(&self.inner, lexicon.inner.clone()).map_err(value_error)?;
        let dive = heuristic_dive(&problem, parse_order(order)?);
        Ok(first_mistake_depth(&dive, &answers))
    }

    fn __repr__(&self) -> String {
        format!(
            "Puzzle({}x{}, {} slots)",
            self.inner.grid.height,
            self.inner.grid.width,
            self.inner.slots.len()
        )
    }
}

#[pyfunction]
fn acpt_score(correct_words: u64, incorrect_letters: u64, full_minutes_remaining: u64, perfect: bool) -> u64 {
    swcsp::crossword::acpt_score(correct_words, incorrect_letters, full_minutes_remaining, perfect)
}

#[pyfunction]
#[pyo3(signature = (vars, domain, density=0.3, tightness=0.3, max_cost=10.0, seed=0))]
fn random_instance(
    vars: usize,
    domain: usize,
    density: f64,
    tightness: f64,
    max_cost: f64,
    seed: u64,
) -> PyResult<Problem> {
    if domain == 0
        || !(0.0..=1.0).contains(&density)
        || !(0.0..=1.0).contains(&tightness)
        || max_cost.is_nan()
        || max_cost < 0.0
    {
        return Err(value_error("invalid generator parameters"));
    }
    let spec = RandomSpec {
        vars,
        max_domain: domain,
        density,
        tightness,
        max_cost,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(Problem {
        inner: Arc::new(random_problem(&mut rng, &spec)),
    })
}

/// Answers read off a filled letter grid, slot by slot.
#[pyfunction]
fn read_answers(puzzle: &Puzzle, rows: Vec<String>) -> PyResult<Vec<String>> {
    let grid = parse_letter_grid(&rows.join("\n")).map_err(value_error)?;
    Ok(read_slots(&grid, &puzzle.inner.slots))
}

#[pymodule]
fn swcsp_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Problem>()?;
    m.add_class::<SearchResult>()?;
    m.add_class::<Lexicon>()?;
    m.add_class::<Puzzle>()?;
    m.add_function(wrap_pyfunction!(acpt_score, m)?)?;
    m.add_function(wrap_pyfunction!(random_instance, m)?)?;
    m.add_function(wrap_pyfunction!(read_answers, m)?)?;
    Ok(())
}
