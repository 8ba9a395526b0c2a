//! Scored dictionaries and clue databases loaded from TSV.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use super::grid::normalize_clue;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{file} line {line}: {message}")]
pub struct LexiconError {
    pub file: &'static str,
    pub line: usize,
    pub message: String,
}

fn fail(file: &'static str, line: usize, message: impl Into<String>) -> LexiconError {
    LexiconError {
        file,
        line,
        message: message.into(),
    }
}

fn fields(line: &str) -> Option<Vec<&str>> {
    let trimmed = line.trim_end_matches(['\r', '\n']);
    if trimmed.trim().is_empty() || trimmed.starts_with('#') {
        return None;
    }
    Some(trimmed.split('\t').collect())
}

/// Uppercase an entry, rejecting anything but ASCII letters.
pub fn normalize_word(word: &str) -> Option<String> {
    let w = word.trim();
    (!w.is_empty() && w.bytes().all(|b| b.is_ascii_alphabetic())).then(|| w.to_ascii_uppercase())
}

/// Words of one length with a per-position letter index.
#[derive(Debug, Default, Clone)]
struct LengthBucket {
    words: Vec<u32>,
    /// `at[pos][letter]` lists word ids with `letter` at `pos`.
    at: Vec<[Vec<u32>; 26]>,
}

/// Word list with merits in [0, 1].
#[derive(Debug, Default, Clone)]
pub struct ScoredDictionary {
    words: Vec<String>,
    merits: Vec<f64>,
    ids: HashMap<String, u32>,
    buckets: HashMap<usize, LengthBucket>,
}

impl ScoredDictionary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Add or overwrite a word. Panics on non-alphabetic input or a merit
    /// outside [0, 1]; use [`ScoredDictionary::parse`] for untrusted data.
    pub fn insert(&mut self, word: &str, merit: f64) {
        let w = normalize_word(word).expect("dictionary words are alphabetic");
        assert!((0.0..=1.0).contains(&merit), "merit must lie in [0, 1]");
        if let Some(&id) = self.ids.get(&w) {
            self.merits[id as usize] = merit;
            return;
        }
        let id = self.words.len() as u32;
        let bucket = self.buckets.entry(w.len()).or_insert_with(|| LengthBucket {
            words: Vec::new(),
            at: vec![Default::default(); w.len()],
        });
        bucket.words.push(id);
        for (pos, b) in w.bytes().enumerate() {
            bucket.at[pos][(b - b'A') as usize].push(id);
        }
        self.ids.insert(w.clone(), id);
        self.words.push(w);
        self.merits.push(merit);
    }

    /// `WORD<TAB>merit` per line; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self, LexiconError> {
        let mut dict = Self::new();
        for (i, line) in text.lines().enumerate() {
            let Some(f) = fields(line) else { continue };
            let [word, merit] = f[..] else {
                return Err(fail("dictionary", i + 1, "expected WORD<TAB>merit"));
            };
            let w = normalize_word(word)
                .ok_or_else(|| fail("dictionary", i + 1, format!("non-alphabetic word `{word}`")))?;
            let m: f64 = merit
                .trim()
                .parse()
                .map_err(|_| fail("dictionary", i + 1, format!("bad merit `{merit}`")))?;
            if !(0.0..=1.0).contains(&m) {
                return Err(fail("dictionary", i + 1, format!("merit {m} outside [0, 1]")));
            }
            dict.insert(&w, m);
        }
        Ok(dict)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn merit(&self, word: &str) -> Option<f64> {
        self.ids.get(word).map(|&id| self.merits[id as usize])
    }

    pub fn contains(&self, word: &str) -> bool {
        self.ids.contains_key(word)
    }

    /// Words matching `pattern` with their merits, in insertion order.
    pub fn matching(&self, pattern: &[Option<u8>]) -> Vec<(&str, f64)> {
        let Some(bucket) = self.buckets.get(&pattern.len()) else {
            return Vec::new();
        };
        let fixed: Vec<(usize, usize)> = pattern
            .iter()
            .enumerate()
            .filter_map(|(pos, l)| l.filter(u8::is_ascii_uppercase).map(|l| (pos, (l - b'A') as usize)))
            .collect();
        if fixed.len() != pattern.iter().flatten().count() {
            return Vec::new();
        }
        let base: &[u32] = fixed
            .iter()
            .map(|&(pos, l)| bucket.at[pos][l].as_slice())
            .min_by_key(|ids| ids.len())
            .unwrap_or(&bucket.words);
        base.iter()
            .filter(|&&id| {
                let w = self.words[id as usize].as_bytes();
                fixed.iter().all(|&(pos, l)| (w[pos] - b'A') as usize == l)
            })
            .map(|&id| (self.words[id as usize].as_str(), self.merits[id as usize]))
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.words.iter().map(String::as_str).zip(self.merits.iter().copied())
    }
}

/// Answers previously recorded for each normalized clue, with counts.
#[derive(Debug, Default, Clone)]
pub struct ClueDatabase {
    entries: HashMap<String, BTreeMap<String, u64>>,
    totals: HashMap<String, u64>,
}

impl ClueDatabase {
    pub fn new() -> Self {
        Self::default()
    }

    /// Record `count` more uses of `answer` for `clue`.
    pub fn add(&mut self, clue: &str, answer: &str, count: u64) {
        let answer = normalize_word(answer).expect("answers are alphabetic");
        let key = normalize_clue(clue);
        *self.entries.entry(key.clone()).or_default().entry(answer).or_default() += count;
        *self.totals.entry(key).or_default() += count;
    }

    /// `clue<TAB>ANSWER<TAB>count` per line.
    pub fn parse(text: &str) -> Result<Self, LexiconError> {
        let mut db = Self::new();
        for (i, line) in text.lines().enumerate() {
            let Some(f) = fields(line) else { continue };
            let [clue, answer, count] = f[..] else {
                return Err(fail("clue database", i + 1, "expected clue<TAB>ANSWER<TAB>count"));
            };
            if normalize_word(answer).is_none() {
                return Err(fail(
                    "clue database",
                    i + 1,
                    format!("non-alphabetic answer `{answer}`"),
                ));
            }
            let n: u64 = count
                .trim()
                .parse()
                .map_err(|_| fail("clue database", i + 1, format!("bad count `{count}`")))?;
            if n == 0 {
                return Err(fail("clue database", i + 1, "count must be positive"));
            }
            db.add(clue, answer, n);
        }
        Ok(db)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Recorded answers for a normalized clue.
    pub fn answers(&self, normalized: &str) -> impl Iterator<Item = (&str, u64)> {
        self.entries
            .get(normalized)
            .into_iter()
            .flat_map(|m| m.iter().map(|(a, &c)| (a.as_str(), c)))
    }

    pub fn count(&self, normalized: &str, answer: &str) -> u64 {
        self.entries
            .get(normalized)
            .and_then(|m| m.get(answer))
            .copied()
            .unwrap_or(0)
    }

    pub fn total(&self, normalized: &str) -> u64 {
        self.totals.get(normalized).copied().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pat(s: &str) -> Vec<Option<u8>> {
        s.bytes().map(|b| (b != b'.').then_some(b)).collect()
    }

    #[test]
    fn dictionary_parse_and_match() {
        let d = ScoredDictionary::parse("cat\t0.9\nCOT\t0.5\n# note\n\nDOG\t1\nCATS\t0.2\n").unwrap();
        assert_eq!(d.len(), 4);
        assert_eq!(d.merit("CAT"), Some(0.9));
        let words: Vec<_> = d.matching(&pat("C.T")).into_iter().map(|(w, _)| w).collect();
        assert_eq!(words, ["CAT", "COT"]);
        assert_eq!(d.matching(&pat("...")).len(), 3);
        assert!(d.matching(&pat("X..")).is_empty());
        assert!(d.matching(&pat(".....")).is_empty());
    }

    #[test]
    fn dictionary_rejects_bad_lines() {
        assert_eq!(ScoredDictionary::parse("A1\t0.5\n").unwrap_err().line, 1);
        assert_eq!(ScoredDictionary::parse("AB\t0.5\nCD\t1.5\n").unwrap_err().line, 2);
        assert_eq!(ScoredDictionary::parse("AB 0.5\n").unwrap_err().line, 1);
    }

    #[test]
    fn clue_database_counts() {
        let db = ClueDatabase::parse("Feline pet\tCAT\t3\nfeline pet!\tcat\t1\nFeline pet\tPUMA\t1\n").unwrap();
        assert_eq!(db.count("feline pet", "CAT"), 4);
        assert_eq!(db.total("feline pet"), 5);
        assert!(ClueDatabase::parse("x\tCAT\t0\n").is_err());
    }
}
