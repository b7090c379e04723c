//! Exponential weights over the kernel dictionary.
//!
//! Weights are kept as cumulative losses `Cᵢ` so that `wᵢ = exp(-η_g Cᵢ)` is
//! never materialized unshifted; every normalization subtracts the largest log
//! weight first.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightState {
    cumulative_loss: Vec<f64>,
    eta_g: f64,
}

impl WeightState {
    /// Unit weights (zero cumulative loss) for `kernels` experts.
    pub fn new(kernels: usize, eta_g: f64) -> Result<Self> {
        if kernels == 0 {
            return Err(Error::invalid("weight state needs at least one kernel"));
        }
        if !(eta_g.is_finite() && eta_g > 0.0) {
            return Err(Error::invalid(format!("eta_g must be positive, got {eta_g}")));
        }
        Ok(Self {
            cumulative_loss: vec![0.0; kernels],
            eta_g,
        })
    }

    pub fn from_cumulative(cumulative_loss: Vec<f64>, eta_g: f64) -> Result<Self> {
        let mut state = Self::new(cumulative_loss.len(), eta_g)?;
        if cumulative_loss.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(Error::invalid("cumulative losses must be finite and nonnegative"));
        }
        state.cumulative_loss = cumulative_loss;
        Ok(state)
    }

    pub fn len(&self) -> usize {
        self.cumulative_loss.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cumulative_loss.is_empty()
    }

    pub fn eta_g(&self) -> f64 {
        self.eta_g
    }

    pub fn cumulative_loss(&self) -> &[f64] {
        &self.cumulative_loss
    }

    /// Adds `losses` when the sample was labeled; unlabeled samples leave the
    /// state unchanged.
    pub fn accumulate(&mut self, losses: &[f64], labeled: bool) -> Result<()> {
        if losses.len() != self.len() {
            return Err(Error::invalid(format!(
                "expected {} losses, got {}",
                self.len(),
                losses.len()
            )));
        }
        if let Some(bad) = losses.iter().find(|l| !l.is_finite() || **l < 0.0) {
            return Err(Error::invalid(format!("loss must be finite and nonnegative, got {bad}")));
        }
        if labeled {
            self.cumulative_loss
                .iter_mut()
                .zip(losses)
                .for_each(|(c, l)| *c += l);
        }
        Ok(())
    }

    /// `log wᵢ = -η_g Cᵢ`.
    pub fn log_weight(&self, i: usize) -> f64 {
        -self.eta_g * self.cumulative_loss[i]
    }

    /// Weights over `indices`, shifted so the largest equals one.
    pub(crate) fn shifted_weights(&self, indices: &[usize]) -> Vec<f64> {
        let shift = indices
            .iter()
            .map(|&i| self.log_weight(i))
            .fold(f64::NEG_INFINITY, f64::max);
        indices.iter().map(|&i| (self.log_weight(i) - shift).exp()).collect()
    }

    pub fn distribution(&self) -> WeightDistribution {
        let all: Vec<usize> = (0..self.len()).collect();
        self.normalized(&all)
    }

    /// Weights renormalized over `subset`, aligned with the order of `subset`.
    pub fn restricted_distribution(&self, subset: &[usize]) -> Result<WeightDistribution> {
        if subset.is_empty() {
            return Err(Error::invalid("kernel subset must be nonempty"));
        }
        if let Some(&bad) = subset.iter().find(|&&i| i >= self.len()) {
            return Err(Error::invalid(format!(
                "kernel index {bad} out of range for {} kernels",
                self.len()
            )));
        }
        Ok(self.normalized(subset))
    }

    fn normalized(&self, indices: &[usize]) -> WeightDistribution {
        let w = self.shifted_weights(indices);
        let total: f64 = w.iter().sum();
        WeightDistribution {
            p: w.into_iter().map(|v| v / total).collect(),
        }
    }
}

/// Probability vector over kernels (or over a subset of them).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightDistribution {
    pub p: Vec<f64>,
}

impl WeightDistribution {
    pub fn uniform(n: usize) -> Self {
        Self {
            p: vec![1.0 / n as f64; n],
        }
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.p.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Index of the largest weight; the lowest index wins ties.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &v) in self.p.iter().enumerate() {
            if v > self.p[best] {
                best = i;
            }
        }
        best
    }
}

/// Convex combination `Σ_{i∈V} q(i) fᵢ(x)` of the kernel predictions in
/// `subset`. `predictions` is indexed by kernel, `weights` by subset position.
pub fn combine(predictions: &[f64], weights: &WeightDistribution, subset: &[usize]) -> Result<f64> {
    if weights.len() != subset.len() {
        return Err(Error::invalid(format!(
            "{} weights for a subset of {} kernels",
            weights.len(),
            subset.len()
        )));
    }
    let mut acc = 0.0;
    for (&q, &i) in weights.p.iter().zip(subset) {
        let f = predictions.get(i).ok_or_else(|| {
            Error::invalid(format!("kernel index {i} out of range for {} predictions", predictions.len()))
        })?;
        acc += q * f;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accumulate_semantics() {
        let mut s = WeightState::new(2, 1.0).unwrap();
        let before = s.clone();
        s.accumulate(&[5.0, 1.0], false).unwrap();
        assert_eq!(s, before);
        s.accumulate(&[1.0, 2.0], true).unwrap();
        assert_eq!(s.cumulative_loss(), &[1.0, 2.0]);

        let mut a = WeightState::new(2, 1.0).unwrap();
        let mut b = a.clone();
        a.accumulate(&[0.3, 0.1], true).unwrap();
        a.accumulate(&[0.2, 0.7], true).unwrap();
        b.accumulate(&[0.2, 0.7], true).unwrap();
        b.accumulate(&[0.3, 0.1], true).unwrap();
        assert_eq!(a, b);

        assert!(s.accumulate(&[-1.0, 0.0], true).is_err());
        assert!(s.accumulate(&[f64::NAN, 0.0], true).is_err());
        assert!(s.accumulate(&[1.0], true).is_err());
        assert_eq!(s.cumulative_loss(), &[1.0, 2.0]);
    }

    #[test]
    fn distribution_values() {
        let s = WeightState::new(5, 0.3).unwrap();
        assert!(s.distribution().p.iter().all(|&p| (p - 0.2).abs() < 1e-15));

        let s = WeightState::from_cumulative(vec![0.0, 3f64.ln()], 1.0).unwrap();
        let p = s.distribution().p;
        assert!((p[0] - 0.75).abs() < 1e-12 && (p[1] - 0.25).abs() < 1e-12);

        let s = WeightState::from_cumulative(vec![1e6, 1e6 + 1.0], 1.0).unwrap();
        let p = s.distribution().p;
        let e = std::f64::consts::E;
        assert!((p[0] - e / (1.0 + e)).abs() < 1e-12);
        assert!((p[1] - 1.0 / (1.0 + e)).abs() < 1e-12);
    }

    #[test]
    fn no_overflow_for_huge_losses() {
        let s = WeightState::from_cumulative(vec![1e9, 5e8, 1e9 - 3.0, 0.0], 1.0).unwrap();
        let p = s.distribution().p;
        assert!(p.iter().all(|v| v.is_finite()));
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert_eq!(s.distribution().argmax(), 3);
    }

    #[test]
    fn restricted_distribution_cases() {
        let s = WeightState::from_cumulative(vec![0.5, 1.5, 0.2, 3.0], 0.7).unwrap();
        let full = s.restricted_distribution(&[0, 1, 2, 3]).unwrap();
        assert_eq!(full, s.distribution());
        assert_eq!(s.restricted_distribution(&[2]).unwrap().p, vec![1.0]);
        let u = WeightState::new(6, 1.0).unwrap();
        let q = u.restricted_distribution(&[0, 3, 5]).unwrap();
        assert!(q.p.iter().all(|&v| (v - 1.0 / 3.0).abs() < 1e-15));
        assert!(s.restricted_distribution(&[]).is_err());
        assert!(s.restricted_distribution(&[4]).is_err());
    }

    #[test]
    fn combine_cases() {
        let preds = [0.0, 1.0, 0.4];
        let uniform = WeightDistribution::uniform(2);
        assert!((combine(&preds, &uniform, &[0, 1]).unwrap() - 0.5).abs() < 1e-15);
        let one_hot = WeightDistribution { p: vec![0.0, 1.0] };
        assert_eq!(combine(&preds, &one_hot, &[0, 2]).unwrap(), 0.4);
        let c = [0.3; 3];
        let w = WeightDistribution { p: vec![0.2, 0.5, 0.3] };
        assert!((combine(&c, &w, &[0, 1, 2]).unwrap() - 0.3).abs() < 1e-15);
        assert!(combine(&preds, &uniform, &[0]).is_err());
        assert!(combine(&preds, &uniform, &[0, 7]).is_err());
    }

    #[test]
    fn argmax_prefers_lowest_index() {
        let d = WeightDistribution { p: vec![0.25, 0.375, 0.375] };
        assert_eq!(d.argmax(), 1);
    }
}
