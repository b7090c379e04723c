//! Stream-based label selection.
//!
//! A label is skipped when the current kernel functions agree on the incoming
//! sample,
//!
//! ```text
//! max_j Σ_{i∈V} p(i) · 𝓛(fᵢ(x), f_j(x)) ≤ η_c,
//! ```
//!
//! and fewer than `M` labels in a row have been skipped already.

use serde::{Deserialize, Serialize};

use crate::weights::WeightDistribution;
use crate::{Error, Result};

/// Pairwise loss used by the confidence condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Discrepancy {
    /// `(a - b)²`
    #[default]
    Squared,
    /// `|a - b|`
    Absolute,
}

impl Discrepancy {
    pub fn eval(self, a: f64, b: f64) -> f64 {
        match self {
            Discrepancy::Squared => (a - b) * (a - b),
            Discrepancy::Absolute => (a - b).abs(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActiveConfig {
    /// Confidence threshold η_c. `f64::INFINITY` makes every sample confident.
    pub eta_c: f64,
    /// Maximum number of consecutive skipped labels `M`.
    pub max_skips: usize,
    pub enabled: bool,
    #[serde(default)]
    pub discrepancy: Discrepancy,
}

impl Default for ActiveConfig {
    fn default() -> Self {
        Self {
            eta_c: 5e-4,
            max_skips: 1,
            enabled: true,
            discrepancy: Discrepancy::Squared,
        }
    }
}

impl ActiveConfig {
    pub fn disabled() -> Self {
        Self {
            enabled: false,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_skips == 0 {
            return Err(Error::Config("max_skips (M) must be at least 1".into()));
        }
        if self.eta_c.is_nan() || self.eta_c < 0.0 {
            return Err(Error::Config(format!("eta_c must be nonnegative, got {}", self.eta_c)));
        }
        Ok(())
    }
}

/// Label decisions so far.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelHistory {
    decisions: Vec<bool>,
    consecutive_skips: usize,
    labeled: usize,
}

impl LabelHistory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn decisions(&self) -> &[bool] {
        &self.decisions
    }

    pub fn consecutive_skips(&self) -> usize {
        self.consecutive_skips
    }

    pub fn labeled(&self) -> usize {
        self.labeled
    }

    pub fn len(&self) -> usize {
        self.decisions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.decisions.is_empty()
    }

    pub fn record(&mut self, labeled: bool) {
        self.decisions.push(labeled);
        if labeled {
            self.labeled += 1;
            self.consecutive_skips = 0;
        } else {
            self.consecutive_skips += 1;
        }
    }

    /// Decides `a_t` and records it. Returns `true` when the label is
    /// requested.
    ///
    /// The first sample is always labeled. Afterwards a skip needs a
    /// confident sample and fewer than `M` skips immediately before it.
    pub fn decide(&mut self, confident: bool, config: &ActiveConfig) -> bool {
        let skip = config.enabled
            && !self.decisions.is_empty()
            && confident
            && self.consecutive_skips < config.max_skips;
        self.record(!skip);
        !skip
    }

    /// Fraction of labeled samples, `Σa_t / T`.
    pub fn efficiency(&self) -> Result<f64> {
        if self.decisions.is_empty() {
            return Err(Error::invalid("efficiency of an empty label history"));
        }
        Ok(self.labeled as f64 / self.decisions.len() as f64)
    }
}

/// `max_{j} Σ_{i∈subset} p(i) · 𝓛(fᵢ, f_j)`, with `j` ranging over every
/// kernel and `p` the full-dictionary distribution (not renormalized).
pub fn confidence_score(
    predictions: &[f64],
    p: &WeightDistribution,
    subset: &[usize],
    discrepancy: Discrepancy,
) -> Result<f64> {
    if subset.is_empty() {
        return Err(Error::invalid("confidence check needs a nonempty subset"));
    }
    if p.len() != predictions.len() {
        return Err(Error::invalid(format!(
            "{} weights for {} kernel predictions",
            p.len(),
            predictions.len()
        )));
    }
    if subset.iter().any(|&i| i >= predictions.len()) {
        return Err(Error::invalid("subset index out of range"));
    }
    let mut worst = f64::NEG_INFINITY;
    for &fj in predictions {
        let s: f64 = subset
            .iter()
            .map(|&i| p.p[i] * discrepancy.eval(predictions[i], fj))
            .sum();
        if s.is_nan() {
            return Ok(f64::NAN);
        }
        worst = worst.max(s);
    }
    Ok(worst)
}

/// Whether the confidence condition holds. A NaN score never passes.
pub fn confidence_check(
    predictions: &[f64],
    p: &WeightDistribution,
    subset: &[usize],
    eta_c: f64,
    discrepancy: Discrepancy,
) -> Result<bool> {
    let score = confidence_score(predictions, p, subset, discrepancy)?;
    Ok(score <= eta_c)
}
