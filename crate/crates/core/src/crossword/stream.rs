//! Lazily extended, cost-ordered candidate fills for one slot.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};
use std::sync::Arc;

use super::scorer::Lexicon;
use crate::problem::{forced_string, pattern_matches, Candidate, Value, VarId};

/// Heap pops allowed while searching for multiwords.
const MULTIWORD_EXPANSIONS: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    Dictionary,
    Multiword,
    Forced,
}

/// Candidates for one slot and pattern: dictionary words and recorded
/// answers by ascending cost, then multiwords by ascending cost, then the
/// forced string if the pattern fixes every letter and nothing else fit.
pub struct CandidateStream {
    pub slot: VarId,
    scored: Vec<Candidate>,
    dictionary_len: usize,
    multi: Option<Multiwords>,
    forced_pending: bool,
    cap: usize,
}

pub fn fill_stream(lexicon: Arc<Lexicon>, slot: VarId, pattern: &[Option<u8>], clue: &str) -> CandidateStream {
    let mut seen = HashSet::new();
    let mut scored = Vec::new();
    for (word, _) in lexicon.dict.matching(pattern) {
        if seen.insert(word.to_string()) {
            scored.push(Candidate::new(word, lexicon.cost(word, clue)));
        }
    }
    for (answer, _) in lexicon.db.answers(clue) {
        if seen.contains(answer) {
            continue;
        }
        let value = Value::from(answer);
        if pattern.len() == value.len() && pattern_matches(pattern, &value) {
            seen.insert(answer.to_string());
            scored.push(Candidate::new(value, lexicon.cost(answer, clue)));
        }
    }
    scored.sort_by(|a, b| a.cost.total_cmp(&b.cost).then_with(|| a.value.cmp(&b.value)));
    let cap = lexicon.config.candidate_cap;
    scored.truncate(cap);
    let dictionary_len = scored.len();
    CandidateStream {
        slot,
        forced_pending: dictionary_len == 0 && forced_string(pattern).is_some(),
        multi: Some(Multiwords::new(lexicon, pattern, clue, seen)),
        scored,
        dictionary_len,
        cap,
    }
}

impl CandidateStream {
    /// The `n`th candidate, extending the stream as needed.
    pub fn fill(&mut self, n: usize) -> Option<&Candidate> {
        while self.scored.len() <= n && self.advance() {}
        self.scored.get(n)
    }

    /// Up to `n` leading candidates.
    pub fn prefix(&mut self, n: usize) -> &[Candidate] {
        self.fill(n.saturating_sub(1));
        &self.scored[..n.min(self.scored.len())]
    }

    /// Every candidate up to the cap.
    pub fn drain(mut self) -> Vec<Candidate> {
        while self.advance() {}
        self.scored
    }

    pub fn dictionary_len(&self) -> usize {
        self.dictionary_len
    }

    pub fn exhausted_dictionary(&self) -> bool {
        self.scored.len() > self.dictionary_len
    }

    pub fn phase(&self, n: usize) -> Option<Phase> {
        let c = self.scored.get(n)?;
        Some(if n < self.dictionary_len {
            Phase::Dictionary
        } else if self
            .multi
            .as_ref()
            .is_some_and(|m| m.emitted.contains(c.value.as_str()))
        {
            Phase::Multiword
        } else {
            Phase::Forced
        })
    }

    fn advance(&mut self) -> bool {
        if self.scored.len() >= self.cap {
            return false;
        }
        if let Some(m) = self.multi.as_mut() {
            if let Some(c) = m.next() {
                self.forced_pending = false;
                self.scored.push(c);
                return true;
            }
        }
        if std::mem::take(&mut self.forced_pending) {
            let m = self.multi.as_ref().expect("multiword state outlives the stream");
            let forced = forced_string(&m.pattern).expect("forced only for full patterns");
            let cost = m.lexicon.config.floor_cost();
            self.scored.push(Candidate::new(forced, cost));
            return true;
        }
        false
    }
}

struct Partial {
    cost: f64,
    text: String,
    parts: usize,
}

impl PartialEq for Partial {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Partial {}

impl PartialOrd for Partial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Reversed so the heap pops the cheapest, then the lexically smallest.
impl Ord for Partial {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.text.cmp(&self.text))
            .then_with(|| other.parts.cmp(&self.parts))
    }
}

/// Best-first enumeration of multiwords matching a pattern.
struct Multiwords {
    lexicon: Arc<Lexicon>,
    pattern: Vec<Option<u8>>,
    clue: String,
    known: HashSet<String>,
    emitted: HashSet<String>,
    heap: BinaryHeap<Partial>,
    pops: usize,
}

impl Multiwords {
    fn new(lexicon: Arc<Lexicon>, pattern: &[Option<u8>], clue: &str, known: HashSet<String>) -> Self {
        let mut heap = BinaryHeap::new();
        heap.push(Partial {
            cost: 0.0,
            text: String::new(),
            parts: 0,
        });
        Multiwords {
            lexicon,
            pattern: pattern.to_vec(),
            clue: clue.to_string(),
            known,
            emitted: HashSet::new(),
            heap,
            pops: 0,
        }
    }

    fn next(&mut self) -> Option<Candidate> {
        let total = self.pattern.len();
        let penalty = self.lexicon.config.multiword_penalty;
        while let Some(p) = self.heap.pop() {
            self.pops += 1;
            if self.pops > MULTIWORD_EXPANSIONS {
                self.heap.clear();
                return None;
            }
            let pos = p.text.len();
            if pos == total {
                if self.known.contains(&p.text) || !self.emitted.insert(p.text.clone()) {
                    continue;
                }
                return Some(Candidate::new(p.text, p.cost));
            }
            for len in 2..=total - pos {
                let rest = total - pos - len;
                if rest == 1 || (p.parts == 0 && rest == 0) {
                    continue;
                }
                let extra = if p.parts == 0 { 0.0 } else { penalty };
                for (word, _) in self.lexicon.dict.matching(&self.pattern[pos..pos + len]) {
                    self.heap.push(Partial {
                        cost: p.cost + extra + self.lexicon.cost(word, &self.clue),
                        text: format!("{}{word}", p.text),
                        parts: p.parts + 1,
                    });
                }
            }
        }
        None
    }
}

/// Cheapest split of `fill` into two or more dictionary words of at least
/// two letters, priced like the multiword phase of [`fill_stream`].
pub fn multiword_cost(lexicon: &Lexicon, fill: &str, clue: &str) -> Option<f64> {
    let n = fill.len();
    let penalty = lexicon.config.multiword_penalty;
    // best[i][k]: cheapest cover of fill[..i] by k words, k capped at 2
    let mut best = vec![[f64::INFINITY; 3]; n + 1];
    best[0][0] = 0.0;
    for i in 0..n {
        for k in 0..3 {
            if !best[i][k].is_finite() {
                continue;
            }
            for j in i + 2..=n {
                let part = &fill[i..j];
                if !lexicon.dict.contains(part) {
                    continue;
                }
                let extra = if k == 0 { 0.0 } else { penalty };
                let cost = best[i][k] + extra + lexicon.cost(part, clue);
                let slot = &mut best[j][(k + 1).min(2)];
                if cost < *slot {
                    *slot = cost;
                }
            }
        }
    }
    best[n][2].is_finite().then_some(best[n][2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crossword::lexicon::{ClueDatabase, ScoredDictionary};
    use crate::crossword::scorer::ScorerConfig;

    fn pat(s: &str) -> Vec<Option<u8>> {
        s.bytes().map(|b| (b != b'.').then_some(b)).collect()
    }

    fn lexicon(words: &str) -> Arc<Lexicon> {
        let dict = ScoredDictionary::parse(words).unwrap();
        Arc::new(Lexicon::new(dict, ClueDatabase::new(), ScorerConfig::default()))
    }

    #[test]
    fn multiword_follows_single_words() {
        let lex = lexicon("RAW\t0.7\nBAR\t0.8\nREGALAR\t0.1\nRADIAR\t0.3\nRA\t0.2\n");
        let all = fill_stream(lex.clone(), 0, &pat("R...AR"), "clue").drain();
        let words: Vec<&str> = all.iter().map(|c| c.value.as_str()).collect();
        assert_eq!(words[0], "RADIAR");
        assert!(words.contains(&"RAWBAR"));
        let mut s = fill_stream(lex.clone(), 0, &pat("R...AR"), "clue");
        assert_eq!(s.dictionary_len(), 1);
        s.fill(1);
        assert_eq!(s.phase(1), Some(Phase::Multiword));
        let rawbar = all.iter().find(|c| c.value.as_str() == "RAWBAR").unwrap();
        let expected = lex.cost("RAW", "clue") + lex.cost("BAR", "clue") + 2.0;
        assert!((rawbar.cost - expected).abs() < 1e-12);
        assert_eq!(multiword_cost(&lex, "RAWBAR", "clue"), Some(rawbar.cost));
    }

    #[test]
    fn forced_pattern_yields_one_string() {
        let lex = lexicon("CAT\t0.5\n");
        assert_eq!(fill_stream(lex.clone(), 0, &pat("CAT"), "x").drain().len(), 1);
        let out = fill_stream(lex.clone(), 0, &pat("QZX"), "x").drain();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].value.as_str(), "QZX");
        assert!((out[0].cost - lex.config.floor_cost()).abs() < 1e-12);
        assert!(fill_stream(lex, 0, &pat("Q.X"), "x").drain().is_empty());
    }

    #[test]
    fn small_dictionary_sorted_by_cost() {
        let lex = lexicon("CAT\t0.5\nDOG\t0.9\nCOW\t0.1\nEMU\t0.7\nHORSE\t1.0\n");
        let mut expected: Vec<(f64, &str)> = ["CAT", "DOG", "COW", "EMU"]
            .into_iter()
            .map(|w| (lex.cost(w, "x"), w))
            .collect();
        expected.sort_by(|a, b| a.0.total_cmp(&b.0));
        let got: Vec<_> = fill_stream(lex, 0, &pat("..."), "x")
            .drain()
            .into_iter()
            .map(|c| c.value.as_str().to_string())
            .collect();
        let want: Vec<_> = expected.iter().map(|(_, w)| w.to_string()).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn cap_truncates() {
        let config = ScorerConfig {
            candidate_cap: 2,
            ..ScorerConfig::default()
        };
        let dict = ScoredDictionary::parse("AB\t0.5\nCD\t0.6\nABCD\t0.2\nCDAB\t0.1\n").unwrap();
        let lex = Arc::new(Lexicon::new(dict, ClueDatabase::new(), config));
        assert_eq!(fill_stream(lex, 0, &pat("...."), "x").drain().len(), 2);
    }
}
