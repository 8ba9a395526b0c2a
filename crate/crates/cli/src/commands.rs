use std::fs;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use anyhow::{bail, ensure, Context, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use swcsp::crossword::{
    acpt_score, compile, evaluate, fill_grid, first_mistake_depth, parse_letter_grid, parse_puzzle, read_slots,
    render_grid, validate_puzzle, ClueDatabase, Grid, Lexicon, Puzzle, ScoredDictionary, ScorerConfig,
};
use swcsp::format::{assignment_by_name, parse_problem, render_problem};
use swcsp::instances::{random_disconnected, random_free, random_problem, RandomSpec};
use swcsp::search::heuristic_dive;
use swcsp::{run, Algorithm, SearchConfig, Swcsp};

use crate::args::{Command, Kind, LexiconArgs, Order, SearchArgs};
use crate::exit;
use crate::report::{BenchEntry, Rendering, RunReport};

/// What a command prints and how the process exits.
#[derive(Debug)]
pub struct Output {
    pub text: String,
    pub code: i32,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, code: exit::OK }
    }
}

pub fn execute(command: Command) -> Result<Output> {
    match command {
        Command::Solve { file, search, json } => solve(&file, &search, json),
        Command::Xw {
            puzzle,
            lexicon,
            search,
            key,
            limit_minutes,
            json,
        } => xw(&puzzle, &lexicon, &search, key.as_deref(), limit_minutes, json),
        Command::Validate { puzzle, json } => validate(&puzzle, json),
        Command::FirstMistake {
            puzzle,
            lexicon,
            key,
            order,
            json,
        } => first_mistake(&puzzle, &lexicon, key.as_deref(), order, json),
        Command::Bench {
            files,
            algos,
            search,
            json,
        } => bench(&files, &algos, &search, json),
        Command::Gen {
            kind,
            vars,
            domain,
            density,
            tightness,
            max_cost,
            left,
            right,
            seed,
        } => {
            let spec = RandomSpec {
                vars,
                max_domain: domain,
                density,
                tightness,
                max_cost,
            };
            gen(kind, &spec, left, right, seed)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_problem(path: &Path) -> Result<Swcsp> {
    parse_problem(&read(path)?).with_context(|| format!("{}", path.display()))
}

fn load_puzzle(path: &Path) -> Result<Puzzle> {
    parse_puzzle(&read(path)?).with_context(|| format!("{}", path.display()))
}

pub fn load_lexicon(args: &LexiconArgs) -> Result<Arc<Lexicon>> {
    let dict = ScoredDictionary::parse(&read(&args.dict)?).with_context(|| format!("{}", args.dict.display()))?;
    let db = match &args.clues {
        Some(path) => ClueDatabase::parse(&read(path)?).with_context(|| format!("{}", path.display()))?,
        None => ClueDatabase::new(),
    };
    let config = match &args.scorer_config {
        Some(path) => ScorerConfig::from_json(&read(path)?).with_context(|| format!("{}", path.display()))?,
        None => ScorerConfig::default(),
    };
    Ok(Arc::new(Lexicon::new(dict, db, config)))
}

/// The key from `--key` (a letter grid or a solved puzzle), else the
/// puzzle's own solution.
fn load_key(puzzle: &Puzzle, key: Option<&Path>) -> Result<Option<Grid>> {
    let grid = match key {
        None => return Ok(puzzle.has_solution().then(|| puzzle.grid.clone())),
        Some(path) => {
            let text = read(path)?;
            match parse_puzzle(&text) {
                Ok(p) if p.has_solution() => p.grid,
                _ => parse_letter_grid(&text).with_context(|| format!("{}", path.display()))?,
            }
        }
    };
    ensure!(
        grid.height == puzzle.grid.height
            && grid.width == puzzle.grid.width
            && puzzle.grid.open_cells().all(|(r, c)| grid.is_open(r, c)),
        "key does not match the puzzle's block pattern"
    );
    ensure!(grid.is_filled(), "key has blank cells");
    Ok(Some(grid))
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn stats_line(report: &RunReport) -> Result<String> {
    Ok(serde_json::to_string(&report.stats)? + "\n")
}

pub fn solve(file: &Path, search: &SearchArgs, as_json: bool) -> Result<Output> {
    let problem = load_problem(file)?;
    let cfg = search.config()?;
    let start = Instant::now();
    let out = run(&problem, &cfg)?;
    let solution = out
        .is_solved()
        .then(|| Rendering::Bindings(assignment_by_name(&problem, &out.assignment)));
    let report = RunReport {
        instance: file.display().to_string(),
        solution,
        cost: out.stats.cost,
        stats: out.stats,
        elapsed_ms: start.elapsed().as_millis() as u64,
        acpt: None,
        words_correct: None,
        words_total: None,
        letters_correct: None,
        letters_total: None,
        first_mistake_depth: None,
        candidate_cap: None,
    };
    let text = if as_json {
        json(&report)?
    } else {
        let mut text = String::new();
        match (&report.solution, report.cost) {
            (Some(Rendering::Bindings(b)), Some(cost)) => {
                for (name, value) in b {
                    text.push_str(&format!("{name} = {value}\n"));
                }
                text.push_str(&format!("cost {cost}\n"));
            }
            _ => text.push_str("no solution\n"),
        }
        text + &stats_line(&report)?
    };
    Ok(Output {
        code: report.exit_code(),
        text,
    })
}

pub fn xw(
    puzzle_path: &Path,
    lexicon: &LexiconArgs,
    search: &SearchArgs,
    key: Option<&Path>,
    limit_minutes: Option<u64>,
    as_json: bool,
) -> Result<Output> {
    let puzzle = load_puzzle(puzzle_path)?;
    let lexicon = load_lexicon(lexicon)?;
    let key = load_key(&puzzle, key)?;
    let mut search = search.clone();
    if search.max_disc.is_none() {
        search.iterative = true;
    }
    let mut cfg = search.config()?;
    if cfg.budget.is_none() {
        cfg.budget = limit_minutes.map(|m| std::time::Duration::from_secs(60 * m));
    }
    cfg.validate()?;

    let start = Instant::now();
    let cap = lexicon.config.candidate_cap;
    let problem = compile(&puzzle, lexicon)?;
    let out = run(&problem, &cfg)?;
    let elapsed_ms = start.elapsed().as_millis() as u64;

    let fill = out
        .is_solved()
        .then(|| fill_grid(&puzzle.grid, &puzzle.slots, &out.assignment));
    let mut report = RunReport {
        instance: puzzle_path.display().to_string(),
        solution: fill.as_ref().map(|g| Rendering::Grid(g.rows())),
        cost: out.stats.cost,
        stats: out.stats,
        elapsed_ms,
        acpt: None,
        words_correct: None,
        words_total: None,
        letters_correct: None,
        letters_total: None,
        first_mistake_depth: None,
        candidate_cap: Some(cap),
    };
    if let Some(key) = &key {
        let blank = puzzle.grid.blank();
        let e = evaluate(fill.as_ref().unwrap_or(&blank), key, &puzzle.slots);
        report.words_correct = Some(e.words_correct);
        report.words_total = Some(e.words_total);
        report.letters_correct = Some(e.letters_correct);
        report.letters_total = Some(e.letters_total);
        report.acpt = limit_minutes.map(|m| {
            let remaining = (60_000 * m).saturating_sub(elapsed_ms) / 60_000;
            acpt_score(
                e.words_correct as u64,
                e.letters_wrong() as u64,
                remaining,
                e.is_perfect(),
            )
        });
        let dive = heuristic_dive(&problem, cfg.value_order);
        report.first_mistake_depth = Some(first_mistake_depth(&dive, &read_slots(key, &puzzle.slots)));
    }

    let text = if as_json {
        json(&report)?
    } else {
        let mut text = match &fill {
            Some(g) => render_grid(g),
            None => "no solution\n".to_string(),
        };
        if let Some(cost) = report.cost {
            text.push_str(&format!("cost {cost}\n"));
        }
        if let (Some(w), Some(wt), Some(l), Some(lt)) = (
            report.words_correct,
            report.words_total,
            report.letters_correct,
            report.letters_total,
        ) {
            text.push_str(&format!("words {w}/{wt} letters {l}/{lt}\n"));
        }
        if let Some(depth) = report.first_mistake_depth {
            text.push_str(&format!("first mistake after {depth}\n"));
        }
        if let Some(points) = report.acpt {
            text.push_str(&format!("acpt {points}\n"));
        }
        text + &stats_line(&report)?
    };
    Ok(Output {
        code: report.exit_code(),
        text,
    })
}

pub fn validate(path: &Path, as_json: bool) -> Result<Output> {
    let puzzle = load_puzzle(path)?;
    let violations = validate_puzzle(&puzzle.grid, &puzzle.slots);
    let code = if violations.iter().any(|v| v.is_error()) {
        exit::USAGE
    } else {
        exit::OK
    };
    let text = if as_json {
        json(&violations)?
    } else if violations.is_empty() {
        "ok\n".to_string()
    } else {
        violations
            .iter()
            .map(|v| format!("{}: {v}\n", if v.is_error() { "error" } else { "warning" }))
            .collect()
    };
    Ok(Output { text, code })
}

#[derive(Serialize)]
struct DiveReport {
    depth: usize,
    slots: usize,
    steps: Vec<DiveLine>,
}

#[derive(Serialize)]
struct DiveLine {
    slot: String,
    value: String,
    answer: String,
}

pub fn first_mistake(
    path: &Path,
    lexicon: &LexiconArgs,
    key: Option<&Path>,
    order: Order,
    as_json: bool,
) -> Result<Output> {
    let puzzle = load_puzzle(path)?;
    let lexicon = load_lexicon(lexicon)?;
    let Some(key) = load_key(&puzzle, key)? else {
        bail!("no answer key: pass --key or give the puzzle a SOLUTION section");
    };
    let answers = read_slots(&key, &puzzle.slots);
    let problem = compile(&puzzle, lexicon)?;
    let dive = heuristic_dive(&problem, order.into());
    let report = DiveReport {
        depth: first_mistake_depth(&dive, &answers),
        slots: puzzle.slots.len(),
        steps: dive
            .iter()
            .map(|s| DiveLine {
                slot: puzzle.slots[s.var].label(),
                value: s.value.to_string(),
                answer: answers[s.var].clone(),
            })
            .collect(),
    };
    let text = if as_json {
        json(&report)?
    } else {
        format!("{}\n", report.depth)
    };
    Ok(Output::ok(text))
}

fn bench_one(path: &Path, algorithm: Algorithm, base: &SearchConfig) -> BenchEntry {
    let mut entry = BenchEntry {
        instance: path.display().to_string(),
        algorithm,
        cost: None,
        nodes: 0,
        wall_ms: 0,
        trace: Vec::new(),
        termination: None,
        error: None,
    };
    let cfg = SearchConfig {
        algorithm,
        ..base.clone()
    };
    match load_problem(path).and_then(|p| Ok(run(&p, &cfg)?)) {
        Ok(out) => {
            entry.cost = out.stats.cost;
            entry.nodes = out.stats.nodes_expanded;
            entry.wall_ms = out.stats.wall_ms;
            entry.trace = out.stats.trace;
            entry.termination = Some(out.stats.termination);
        }
        Err(e) => entry.error = Some(format!("{e:#}")),
    }
    entry
}

pub fn bench(files: &[std::path::PathBuf], algos: &[Algorithm], search: &SearchArgs, as_json: bool) -> Result<Output> {
    ensure!(!algos.is_empty(), "--algos needs at least one algorithm");
    let base = search.config()?;
    let entries: Vec<BenchEntry> = files
        .iter()
        .flat_map(|f| algos.iter().map(|&a| bench_one(f, a, &base)))
        .collect();
    let text = if as_json {
        json(&entries)?
    } else {
        let mut text = format!(
            "{:<32} {:<9} {:>14} {:>10} {:>8}\n",
            "instance", "algo", "cost", "nodes", "ms"
        );
        for e in &entries {
            let cost = match (&e.error, e.cost) {
                (Some(_), _) => "error".to_string(),
                (None, Some(c)) => format!("{c:.4}"),
                (None, None) => "none".to_string(),
            };
            text.push_str(&format!(
                "{:<32} {:<9} {:>14} {:>10} {:>8}\n",
                e.instance, e.algorithm, cost, e.nodes, e.wall_ms
            ));
        }
        for e in entries.iter().filter(|e| e.error.is_some()) {
            text.push_str(&format!("{}: {}\n", e.instance, e.error.as_deref().unwrap_or_default()));
        }
        text
    };
    Ok(Output::ok(text))
}

pub fn gen(kind: Kind, spec: &RandomSpec, left: usize, right: usize, seed: u64) -> Result<Output> {
    ensure!(spec.max_domain >= 1, "--domain must be at least 1");
    ensure!((0.0..=1.0).contains(&spec.density), "--density must lie in [0, 1]");
    ensure!((0.0..=1.0).contains(&spec.tightness), "--tightness must lie in [0, 1]");
    ensure!(
        spec.max_cost.is_finite() && spec.max_cost >= 0.0,
        "--max-cost must be finite and non-negative"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let problem = match kind {
        Kind::Random => random_problem(&mut rng, spec),
        Kind::Disconnected => {
            ensure!(left >= 1 && right >= 1, "both components need a variable");
            random_disconnected(&mut rng, spec, left, right)
        }
        Kind::Free => random_free(&mut rng, spec.vars, spec.max_domain, spec.max_cost),
    };
    Ok(Output::ok(render_problem(&problem)? + "\n"))
}
