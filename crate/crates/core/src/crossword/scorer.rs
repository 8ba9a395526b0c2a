//! Fill costs: ρ(f, c) = −ln p(f | c), with p a floored linear mixture of
//! evidence from pluggable scorers.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::lexicon::{ClueDatabase, ScoredDictionary};
use crate::error::ProblemError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Weights {
    pub clue: f64,
    pub merit: f64,
}

impl Default for Weights {
    fn default() -> Self {
        Weights { clue: 1.0, merit: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScorerConfig {
    pub weights: Weights,
    /// Probability assigned to arbitrary letter strings.
    pub floor_epsilon: f64,
    /// Cost added per word break in a multiword.
    pub multiword_penalty: f64,
    /// Maximum candidates materialized for one slot and pattern.
    pub candidate_cap: usize,
}

impl Default for ScorerConfig {
    fn default() -> Self {
        ScorerConfig {
            weights: Weights::default(),
            floor_epsilon: 1e-6,
            multiword_penalty: 2.0,
            candidate_cap: 5000,
        }
    }
}

impl ScorerConfig {
    pub fn validate(&self) -> Result<(), ProblemError> {
        let bad = |m: &str| Err(ProblemError::InvalidConfig(m.to_string()));
        let Weights { clue, merit } = self.weights;
        if !(clue.is_finite() && merit.is_finite() && clue >= 0.0 && merit >= 0.0) {
            return bad("scorer weights must be finite and non-negative");
        }
        if !(self.floor_epsilon > 0.0 && self.floor_epsilon < 1.0) {
            return bad("floor_epsilon must lie in (0, 1)");
        }
        if !(self.multiword_penalty > 0.0 && self.multiword_penalty.is_finite()) {
            return bad("multiword_penalty must be positive");
        }
        if self.candidate_cap == 0 {
            return bad("candidate_cap must be at least 1");
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, ProblemError> {
        let config: ScorerConfig =
            serde_json::from_str(text).map_err(|e| ProblemError::InvalidConfig(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Cost of a string no scorer knows.
    pub fn floor_cost(&self) -> f64 {
        -self.floor_epsilon.ln()
    }
}

/// One source of evidence that a fill answers a clue.
pub trait Scorer: Send + Sync {
    /// Evidence in [0, 1]; `clue` is normalized.
    fn evidence(&self, fill: &str, clue: &str) -> f64;
}

/// count(c, f) / (count(c, ·) + 1) from a clue database.
pub struct ClueMatchScorer(pub Arc<ClueDatabase>);

impl Scorer for ClueMatchScorer {
    fn evidence(&self, fill: &str, clue: &str) -> f64 {
        let count = self.0.count(clue, fill);
        if count == 0 {
            return 0.0;
        }
        count as f64 / (self.0.total(clue) as f64 + 1.0)
    }
}

/// Dictionary merit, ignoring the clue.
pub struct MeritScorer(pub Arc<ScoredDictionary>);

impl Scorer for MeritScorer {
    fn evidence(&self, fill: &str, _clue: &str) -> f64 {
        self.0.merit(fill).unwrap_or(0.0)
    }
}

/// p = ε + (1 − ε) · Σ wᵢ eᵢ / Σ wᵢ.
pub struct CostModel {
    scorers: Vec<(f64, Arc<dyn Scorer>)>,
    epsilon: f64,
}

impl CostModel {
    pub fn new(epsilon: f64) -> Self {
        CostModel {
            scorers: Vec::new(),
            epsilon,
        }
    }

    pub fn with(mut self, weight: f64, scorer: Arc<dyn Scorer>) -> Self {
        self.scorers.push((weight, scorer));
        self
    }

    pub fn probability(&self, fill: &str, clue: &str) -> f64 {
        let total: f64 = self.scorers.iter().map(|(w, _)| w).sum();
        let mix = if total > 0.0 {
            self.scorers
                .iter()
                .filter(|(w, _)| *w > 0.0)
                .map(|(w, s)| w * s.evidence(fill, clue).clamp(0.0, 1.0))
                .sum::<f64>()
                / total
        } else {
            0.0
        };
        self.epsilon + (1.0 - self.epsilon) * mix
    }

    pub fn cost(&self, fill: &str, clue: &str) -> f64 {
        (-self.probability(fill, clue).ln()).max(0.0)
    }
}

/// Dictionary, clue database and the cost model built over them.
pub struct Lexicon {
    pub dict: Arc<ScoredDictionary>,
    pub db: Arc<ClueDatabase>,
    pub config: ScorerConfig,
    model: CostModel,
}

impl Lexicon {
    /// The standard clue-match plus merit mixture.
    pub fn new(dict: ScoredDictionary, db: ClueDatabase, config: ScorerConfig) -> Self {
        let dict = Arc::new(dict);
        let db = Arc::new(db);
        let model = CostModel::new(config.floor_epsilon)
            .with(config.weights.clue, Arc::new(ClueMatchScorer(db.clone())))
            .with(config.weights.merit, Arc::new(MeritScorer(dict.clone())));
        Lexicon {
            dict,
            db,
            config,
            model,
        }
    }

    /// Replace the cost model, e.g. to add further scorers.
    pub fn with_model(mut self, model: CostModel) -> Self {
        self.model = model;
        self
    }

    pub fn probability(&self, fill: &str, clue: &str) -> f64 {
        self.model.probability(fill, clue)
    }

    pub fn cost(&self, fill: &str, clue: &str) -> f64 {
        self.model.cost(fill, clue)
    }

    /// In the dictionary or recorded for this clue.
    pub fn is_known(&self, fill: &str, clue: &str) -> bool {
        self.dict.contains(fill) || self.db.count(clue, fill) > 0
    }
}

/// ρ of `fill` for the normalized `clue` under the standard mixture.
pub fn score_candidate(
    fill: &str,
    clue: &str,
    dict: &ScoredDictionary,
    db: &ClueDatabase,
    config: &ScorerConfig,
) -> f64 {
    let w = config.weights;
    let total = w.clue + w.merit;
    let clue_p = match db.count(clue, fill) {
        0 => 0.0,
        n => n as f64 / (db.total(clue) as f64 + 1.0),
    };
    let merit = dict.merit(fill).unwrap_or(0.0);
    let mix = if total > 0.0 {
        (w.clue * clue_p + w.merit * merit) / total
    } else {
        0.0
    };
    let p = config.floor_epsilon + (1.0 - config.floor_epsilon) * mix;
    (-p.ln()).max(0.0)
}
