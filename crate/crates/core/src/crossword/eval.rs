//! Tournament scoring and answer-key comparison.

use serde::{Deserialize, Serialize};

use super::grid::{read_slots, Grid, Slot};
use crate::search::DiveStep;

/// 10 per correct word, 25 per full minute left less 25 per wrong letter
/// (never below zero), and 150 for a perfect grid.
pub fn acpt_score(correct_words: u64, incorrect_letters: u64, full_minutes_remaining: u64, perfect: bool) -> u64 {
    let time = (25 * full_minutes_remaining).saturating_sub(25 * incorrect_letters);
    10 * correct_words + time + if perfect { 150 } else { 0 }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evaluation {
    pub words_correct: usize,
    pub words_total: usize,
    pub letters_correct: usize,
    pub letters_total: usize,
}

impl Evaluation {
    pub fn letters_wrong(&self) -> usize {
        self.letters_total - self.letters_correct
    }

    pub fn is_perfect(&self) -> bool {
        self.letters_correct == self.letters_total
    }
}

/// Compare a fill with the key; blank cells count as wrong.
pub fn evaluate(fill: &Grid, key: &Grid, slots: &[Slot]) -> Evaluation {
    let filled = read_slots(fill, slots);
    let answers = read_slots(key, slots);
    let words_correct = filled.iter().zip(&answers).filter(|(f, a)| f == a).count();
    let open: Vec<_> = key.open_cells().collect();
    let letters_correct = open.iter().filter(|&&(r, c)| fill.cell(r, c) == key.cell(r, c)).count();
    Evaluation {
        words_correct,
        words_total: slots.len(),
        letters_correct,
        letters_total: open.len(),
    }
}

/// Steps of a dive that match the key before the first that does not.
pub fn first_mistake_depth(dive: &[DiveStep], answers: &[String]) -> usize {
    dive.iter()
        .take_while(|s| answers.get(s.var).is_some_and(|a| a == s.value.as_str()))
        .count()
}
