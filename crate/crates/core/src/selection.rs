//! Adaptive kernel selection.
//!
//! After each labeled step the learner keeps `K` kernels whose weight is
//! within a factor `δ` of the best one, builds a collection of kernel subsets
//! in which every kernel occurs exactly `J` times ("uniform frequency"), and
//! samples one subset with probability
//!
//! ```text
//! α(j) = Σ_{i∈V_j} w(i) / (J · Σ_i w(i))
//! ```
//!
//! Uniform frequency is what makes `α` sum to one, so it is checked before
//! every PMF is formed.

use rand::seq::index;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::seed::Rng;
use crate::weights::{WeightDistribution, WeightState};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionParams {
    /// Relative-weight threshold δ in (0, 1).
    pub delta: f64,
    /// Cap γ on the collection size `⌊γP⌋`.
    pub gamma_cap: f64,
    /// Seed for the collection and subset draws. Derived from the engine's
    /// master seed when absent.
    #[serde(default)]
    pub seed: Option<u64>,
    /// Forces `K` to a fixed value instead of the δ rule.
    #[serde(default)]
    pub fixed_k: Option<usize>,
}

impl Default for SelectionParams {
    fn default() -> Self {
        Self {
            delta: 0.8,
            gamma_cap: 2.0,
            seed: None,
            fixed_k: None,
        }
    }
}

impl SelectionParams {
    pub fn validate(&self, kernels: usize) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Config(format!("delta must lie in (0, 1), got {}", self.delta)));
        }
        if !(self.gamma_cap.is_finite() && self.gamma_cap > 0.0) {
            return Err(Error::Config(format!("gamma_cap must be positive, got {}", self.gamma_cap)));
        }
        if let Some(k) = self.fixed_k {
            if k == 0 || k > kernels {
                return Err(Error::Config(format!("fixed_k must lie in 1..={kernels}, got {k}")));
            }
        }
        Ok(())
    }

    /// Largest collection built exhaustively: `⌊γ_cap · P⌋`.
    pub fn size_cap(&self, kernels: usize) -> usize {
        (self.gamma_cap * kernels as f64).floor() as usize
    }
}

/// Family of kernel subsets with uniform frequency `J`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetCollection {
    pub subsets: Vec<Vec<usize>>,
    /// Occurrences of every kernel across the collection.
    pub frequency: usize,
    /// Requested subset size `K`.
    pub target_size: usize,
    pub kernels: usize,
}

impl SubsetCollection {
    pub fn len(&self) -> usize {
        self.subsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsets.is_empty()
    }

    /// Occurrence count of each kernel.
    pub fn occurrences(&self) -> Vec<usize> {
        let mut counts = vec![0; self.kernels];
        for s in &self.subsets {
            for &i in s {
                counts[i] += 1;
            }
        }
        counts
    }

    pub fn check_uniform_frequency(&self) -> Result<()> {
        if let Some(empty) = self.subsets.iter().position(|s| s.is_empty()) {
            return Err(Error::InvariantViolation(format!("subset {empty} is empty")));
        }
        if self.subsets.iter().flatten().any(|&i| i >= self.kernels) {
            return Err(Error::InvariantViolation("subset holds an out-of-range kernel".into()));
        }
        let counts = self.occurrences();
        if let Some((i, c)) = counts.iter().enumerate().find(|(_, &c)| c != self.frequency) {
            return Err(Error::InvariantViolation(format!(
                "kernel {i} occurs {c} times, expected {}",
                self.frequency
            )));
        }
        Ok(())
    }
}

/// `K = |{i : p(i)/p* > δ}|`. The best kernel always counts, so `K ≥ 1`.
pub fn choose_k(p: &WeightDistribution, delta: f64) -> usize {
    let best = p.max();
    p.p.iter().filter(|&&v| v / best > delta).count().max(1)
}

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// All size-`k` subsets of `[p]` in lexicographic order, with `J = K·C(P,K)/P`.
pub fn build_exhaustive(p: usize, k: usize, cap: usize) -> Result<SubsetCollection> {
    if k == 0 || k > p {
        return Err(Error::invalid(format!("subset size {k} must lie in 1..={p}")));
    }
    let size = binomial(p, k);
    if size > cap as u128 {
        return Err(Error::Capacity { size, cap });
    }
    let mut subsets = Vec::with_capacity(size as usize);
    let mut current: Vec<usize> = (0..k).collect();
    loop {
        subsets.push(current.clone());
        // Advance the rightmost index that still has room.
        let Some(pos) = (0..k).rev().find(|&i| current[i] < p - k + i) else {
            break;
        };
        current[pos] += 1;
        for j in pos + 1..k {
            current[j] = current[j - 1] + 1;
        }
    }
    Ok(SubsetCollection {
        frequency: k * subsets.len() / p,
        subsets,
        target_size: k,
        kernels: p,
    })
}

/// Balls-bins construction: each of the `p` kernels is placed into `j`
/// distinct bins out of `⌊γp⌋`, chosen uniformly without replacement. Bins
/// left empty are dropped; `J` is unaffected.
pub fn build_balls_bins(p: usize, j: usize, k: usize, gamma: f64, rng: &mut Rng) -> Result<SubsetCollection> {
    if p == 0 || j == 0 {
        return Err(Error::invalid("balls-bins needs at least one kernel and J >= 1"));
    }
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::invalid(format!("gamma must be positive, got {gamma}")));
    }
    let bins = (gamma * p as f64).floor() as usize;
    if bins < j {
        return Err(Error::invalid(format!("{bins} bins cannot hold each kernel {j} times")));
    }
    let mut subsets = vec![Vec::new(); bins];
    for ball in 0..p {
        for bin in index::sample(rng, bins, j) {
            subsets[bin].push(ball);
        }
    }
    subsets.retain(|s| !s.is_empty());
    Ok(SubsetCollection {
        subsets,
        frequency: j,
        target_size: k,
        kernels: p,
    })
}

/// Collection used by the engine for subset size `k`: exhaustive when
/// `C(P,K) ≤ ⌊γ_cap·P⌋`, balls-bins with `γ = γ_cap` otherwise.
pub fn build_collection(p: usize, k: usize, params: &SelectionParams, rng: &mut Rng) -> Result<SubsetCollection> {
    let cap = params.size_cap(p);
    match build_exhaustive(p, k, cap) {
        Err(Error::Capacity { .. }) => {
            let bins = cap;
            let mut j = ((params.gamma_cap * k as f64).round() as usize).max(1);
            while j > bins && j > 1 {
                j -= 1;
            }
            build_balls_bins(p, j, k, params.gamma_cap, rng)
        }
        other => other,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetPmf {
    pub alpha: Vec<f64>,
}

impl SubsetPmf {
    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }
}

/// Subset probabilities from the current weights.
pub fn subset_pmf(collection: &SubsetCollection, state: &WeightState) -> Result<SubsetPmf> {
    if collection.kernels != state.len() {
        return Err(Error::invalid(format!(
            "collection over {} kernels, weights over {}",
            collection.kernels,
            state.len()
        )));
    }
    collection.check_uniform_frequency()?;
    let all: Vec<usize> = (0..state.len()).collect();
    let w = state.shifted_weights(&all);
    let denom = collection.frequency as f64 * w.iter().sum::<f64>();
    let alpha = collection
        .subsets
        .iter()
        .map(|s| s.iter().map(|&i| w[i]).sum::<f64>() / denom)
        .collect();
    Ok(SubsetPmf { alpha })
}

/// Draws a subset index with probability `α(j)`.
pub fn sample_subset(pmf: &SubsetPmf, rng: &mut Rng) -> usize {
    let u: f64 = rng.random();
    let mut cum = 0.0;
    let mut last_positive = 0;
    for (j, &a) in pmf.alpha.iter().enumerate() {
        if a > 0.0 {
            last_positive = j;
        }
        cum += a;
        if u < cum {
            return j;
        }
    }
    // u landed in the rounding gap above Σα.
    last_positive
}
