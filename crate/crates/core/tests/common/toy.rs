//! The bundled toy crossword suite and an exact optimality check for it.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::Arc;

use swcsp::crossword::{parse_puzzle, ClueDatabase, Lexicon, Puzzle, ScoredDictionary, ScorerConfig};

pub const TOYS: [&str; 6] = ["toy5a", "toy5b", "toy6", "toy7", "toy8", "toy9"];

pub fn toy_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/toy")
}

fn read(name: &str) -> String {
    std::fs::read_to_string(toy_dir().join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub struct Toy {
    pub name: &'static str,
    pub puzzle: Puzzle,
    pub answers: Vec<String>,
}

pub fn suite() -> Vec<Toy> {
    TOYS.iter()
        .map(|&name| {
            let puzzle = parse_puzzle(&read(&format!("{name}.txt"))).expect("toy parses");
            let answers = puzzle.answers().expect("toy carries its key");
            Toy { name, puzzle, answers }
        })
        .collect()
}

pub fn lexicon(config: ScorerConfig) -> Arc<Lexicon> {
    let dict = ScoredDictionary::parse(&read("dict.tsv")).unwrap();
    let db = ClueDatabase::parse(&read("clues.tsv")).unwrap();
    Arc::new(Lexicon::new(dict, db, config))
}

/// Costs recomputed straight from the TSV rows.
pub struct RawCosts {
    merits: HashMap<String, f64>,
    counts: HashMap<String, HashMap<String, u64>>,
    config: ScorerConfig,
}

impl RawCosts {
    pub fn load(config: ScorerConfig) -> Self {
        let merits = read("dict.tsv")
            .lines()
            .map(|l| {
                let (w, m) = l.split_once('\t').unwrap();
                (w.to_string(), m.parse().unwrap())
            })
            .collect();
        let mut counts: HashMap<String, HashMap<String, u64>> = HashMap::new();
        for l in read("clues.tsv").lines() {
            let f: Vec<&str> = l.split('\t').collect();
            *counts
                .entry(f[0].to_string())
                .or_default()
                .entry(f[1].to_string())
                .or_default() += f[2].parse::<u64>().unwrap();
        }
        RawCosts { merits, counts, config }
    }

    pub fn rho(&self, word: &str, clue: &str) -> f64 {
        let answers = self.counts.get(clue);
        let total: u64 = answers.map_or(0, |a| a.values().sum());
        let count = answers.and_then(|a| a.get(word)).copied().unwrap_or(0);
        let clue_p = if count == 0 {
            0.0
        } else {
            count as f64 / (total as f64 + 1.0)
        };
        let merit = self.merits.get(word).copied().unwrap_or(0.0);
        let w = self.config.weights;
        let eps = self.config.floor_epsilon;
        let p = eps + (1.0 - eps) * (w.clue * clue_p + w.merit * merit) / (w.clue + w.merit);
        -p.ln()
    }

    /// Every scored word that fits a slot of `len` letters under `clue`.
    pub fn words(&self, len: usize, clue: &str) -> Vec<(String, f64)> {
        let mut all: Vec<&String> = self.merits.keys().collect();
        if let Some(a) = self.counts.get(clue) {
            all.extend(a.keys());
        }
        all.sort();
        all.dedup();
        all.into_iter()
            .filter(|w| w.len() == len)
            .map(|w| (w.clone(), self.rho(w, clue)))
            .collect()
    }

    /// A lower bound on the cost of any unscored string of `len` letters:
    /// the floor, or the cheapest conceivable multiword.
    pub fn wild(&self, len: usize, clue: &str) -> f64 {
        let mut cheapest = vec![f64::INFINITY; len + 1];
        for w in self.merits.keys() {
            if w.len() <= len {
                cheapest[w.len()] = cheapest[w.len()].min(self.rho(w, clue));
            }
        }
        // split[i]: cheapest cover of i letters by one or more words
        let mut split = vec![f64::INFINITY; len + 1];
        split[0] = 0.0;
        let mut multi = f64::INFINITY;
        for i in 2..=len {
            for l in 2..=i {
                let prev = if i == l {
                    0.0
                } else {
                    split[i - l] + self.config.multiword_penalty
                };
                split[i] = split[i].min(prev + cheapest[l]);
                if i == len && l < len {
                    multi = multi.min(split[i - l] + self.config.multiword_penalty + cheapest[l]);
                }
            }
        }
        multi.min(-self.config.floor_epsilon.ln())
    }
}

/// Searches every fill in which each slot takes a scored word or an
/// unconstrained wildcard priced at its lower bound. Returns a fill other
/// than the key costing at most `limit`, if one exists.
pub fn rival_within(toy: &Toy, costs: &RawCosts, limit: f64) -> Option<(f64, Vec<Option<String>>)> {
    let p = &toy.puzzle;
    let slots = &p.slots;
    let options: Vec<Vec<(String, f64)>> = slots
        .iter()
        .map(|s| costs.words(s.len(), &p.clues[s.id].normalized))
        .collect();
    let wild: Vec<f64> = slots
        .iter()
        .map(|s| costs.wild(s.len(), &p.clues[s.id].normalized))
        .collect();
    struct Dfs<'a> {
        toy: &'a Toy,
        options: &'a [Vec<(String, f64)>],
        wild: &'a [f64],
        limit: f64,
        letters: HashMap<(usize, usize), (u8, usize)>,
        chosen: Vec<Option<String>>,
    }

    impl Dfs<'_> {
        fn fits(&self, i: usize, word: &str) -> bool {
            let cells = &self.toy.puzzle.slots[i].cells;
            cells
                .iter()
                .zip(word.bytes())
                .all(|(cell, b)| self.letters.get(cell).is_none_or(|&(l, _)| l == b))
        }

        /// Least cost of slots `i..` given the letters placed so far.
        fn remaining(&self, i: usize) -> f64 {
            (i..self.options.len())
                .map(|j| {
                    self.options[j]
                        .iter()
                        .filter(|(w, _)| self.fits(j, w))
                        .map(|o| o.1)
                        .fold(self.wild[j], f64::min)
                })
                .sum()
        }

        fn go(&mut self, i: usize, cost: f64, differs: bool) -> Option<f64> {
            if cost + self.remaining(i) > self.limit {
                return None;
            }
            let slots = &self.toy.puzzle.slots;
            if i == slots.len() {
                return differs.then_some(cost);
            }
            for k in 0..self.options[i].len() {
                let (word, rho) = &self.options[i][k];
                if !self.fits(i, word) {
                    continue;
                }
                let cells = &slots[i].cells;
                let mut placed = Vec::new();
                for (cell, b) in cells.iter().zip(word.bytes()) {
                    if !self.letters.contains_key(cell) {
                        self.letters.insert(*cell, (b, i));
                        placed.push(*cell);
                    }
                }
                self.chosen.push(Some(word.clone()));
                let d = differs || *word != self.toy.answers[i];
                let found = self.go(i + 1, cost + rho, d);
                if found.is_some() {
                    return found;
                }
                self.chosen.pop();
                for cell in placed {
                    self.letters.remove(&cell);
                }
            }
            self.chosen.push(None);
            let found = self.go(i + 1, cost + self.wild[i], true);
            if found.is_none() {
                self.chosen.pop();
            }
            found
        }
    }

    let mut dfs = Dfs {
        toy,
        options: &options,
        wild: &wild,
        limit,
        letters: HashMap::new(),
        chosen: Vec::new(),
    };
    dfs.go(0, 0.0, false).map(|c| (c, dfs.chosen))
}

/// Cost of the key under the raw formula.
pub fn key_cost(toy: &Toy, costs: &RawCosts) -> f64 {
    toy.puzzle
        .slots
        .iter()
        .map(|s| costs.rho(&toy.answers[s.id], &toy.puzzle.clues[s.id].normalized))
        .sum()
}
