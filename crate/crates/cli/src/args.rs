use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use swcsp::{Algorithm, SearchConfig, ValueOrder};

#[derive(Debug, Parser)]
#[command(name = "swcsp", version, about = "Singly-weighted CSP solver and crossword filler")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a JSON problem file.
    Solve {
        file: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long)]
        json: bool,
    },
    /// Fill a crossword puzzle.
    Xw {
        puzzle: PathBuf,
        #[command(flatten)]
        lexicon: LexiconArgs,
        #[command(flatten)]
        search: SearchArgs,
        /// Answer key: a letter grid or a puzzle with a SOLUTION section.
        /// Defaults to the puzzle's own solution.
        #[arg(long)]
        key: Option<PathBuf>,
        /// Time limit for the puzzle; also the search budget unless
        /// --budget-ms is given.
        #[arg(long)]
        limit_minutes: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Check a puzzle's grid for structural violations.
    Validate {
        puzzle: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Count the leading correct choices of a single heuristic dive.
    FirstMistake {
        puzzle: PathBuf,
        #[command(flatten)]
        lexicon: LexiconArgs,
        #[arg(long)]
        key: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Order::Damage)]
        order: Order,
        #[arg(long)]
        json: bool,
    },
    /// Run several algorithms over several problem files.
    Bench {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Comma-separated algorithms.
        #[arg(long, value_delimiter = ',', required = true, value_parser = parse_algorithm)]
        algos: Vec<Algorithm>,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long)]
        json: bool,
    },
    /// Print a random problem as JSON.
    Gen {
        #[arg(long, value_enum, default_value_t = Kind::Random)]
        kind: Kind,
        #[arg(long, default_value_t = 8)]
        vars: usize,
        #[arg(long, default_value_t = 4)]
        domain: usize,
        #[arg(long, default_value_t = 0.3)]
        density: f64,
        #[arg(long, default_value_t = 0.3)]
        tightness: f64,
        #[arg(long, default_value_t = 10.0)]
        max_cost: f64,
        /// Variables in the first component of a disconnected instance.
        #[arg(long, default_value_t = 4)]
        left: usize,
        #[arg(long, default_value_t = 4)]
        right: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Args)]
pub struct LexiconArgs {
    /// Scored word list, one `WORD<TAB>merit` per line.
    #[arg(long)]
    pub dict: PathBuf,
    /// Clue database, one `clue<TAB>ANSWER<TAB>count` per line.
    #[arg(long)]
    pub clues: Option<PathBuf>,
    #[arg(long)]
    pub scorer_config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    #[arg(long, default_value = "lds-post", value_parser = parse_algorithm)]
    pub algo: Algorithm,
    /// Discrepancy limit, or the cap on the limit when iterating.
    #[arg(long)]
    pub max_disc: Option<usize>,
    /// Raise the discrepancy limit from 0 until a stopping rule fires.
    #[arg(long)]
    pub iterative: bool,
    #[arg(long)]
    pub stop_if_no_improvement: bool,
    #[arg(long)]
    pub budget_ms: Option<u64>,
    /// Stop after this long without improvement; 0 disables.
    #[arg(long, default_value_t = 60.0)]
    pub stall_seconds: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Order::Damage)]
    pub order: Order,
}

impl SearchArgs {
    pub fn config(&self) -> anyhow::Result<SearchConfig> {
        anyhow::ensure!(
            self.stall_seconds.is_finite() && self.stall_seconds >= 0.0,
            "--stall-seconds must be a non-negative number"
        );
        let max_discrepancies = match (self.max_disc, self.iterative) {
            (None, false) => Some(0),
            (n, _) => n,
        };
        let cfg = SearchConfig {
            algorithm: self.algo,
            max_discrepancies,
            iterative: self.iterative,
            budget: self.budget_ms.map(Duration::from_millis),
            stall: (self.stall_seconds > 0.0).then(|| Duration::from_secs_f64(self.stall_seconds)),
            stop_if_no_improvement: self.stop_if_no_improvement,
            seed: self.seed,
            value_order: self.order.into(),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: swcsp::ProblemError| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Order {
    Damage,
    OwnCost,
}

impl From<Order> for ValueOrder {
    fn from(o: Order) -> Self {
        match o {
            Order::Damage => ValueOrder::Damage,
            Order::OwnCost => ValueOrder::OwnCost,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Random,
    Disconnected,
    Free,
}
