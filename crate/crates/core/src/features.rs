//! Shift-invariant kernels and their random Fourier feature maps.
//!
//! A Gaussian kernel `exp(-‖x - x'‖² / 2σ²)` is the expectation of
//! `cos(vᵀ(x - x'))` over frequencies `v ~ N(0, σ⁻² I)`. Sampling `D` such
//! frequencies gives the feature map
//!
//! ```text
//! z(x) = D^{-1/2} [sin(v₁ᵀx), …, sin(v_Dᵀx), cos(v₁ᵀx), …, cos(v_Dᵀx)]
//! ```
//!
//! whose inner products approximate the kernel. Every feature vector has unit
//! norm since each sin/cos pair contributes exactly `1/D`.

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::seed;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelFamily {
    Gaussian,
}

/// A shift-invariant kernel with its bandwidth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub family: KernelFamily,
    /// Gaussian bandwidth σ².
    pub sigma2: f64,
}

impl KernelSpec {
    pub fn gaussian(sigma2: f64) -> Result<Self> {
        let spec = Self {
            family: KernelFamily::Gaussian,
            sigma2,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma2.is_finite() && self.sigma2 > 0.0) {
            return Err(Error::invalid(format!(
                "kernel bandwidth must be positive and finite, got {}",
                self.sigma2
            )));
        }
        Ok(())
    }

    /// Exact kernel value. Used as the reference the random features are
    /// checked against.
    pub fn evaluate(&self, x: &[f64], other: &[f64]) -> Result<f64> {
        exact_kernel(self, x, other)
    }
}

/// The 17-kernel Gaussian dictionary with σ²ᵢ = 10^((i-9)/2), i = 1..=17.
pub fn gaussian_dictionary() -> Vec<KernelSpec> {
    (1..=17)
        .map(|i| KernelSpec {
            family: KernelFamily::Gaussian,
            sigma2: 10f64.powf((i as f64 - 9.0) / 2.0),
        })
        .collect()
}

pub fn exact_kernel(kernel: &KernelSpec, x: &[f64], other: &[f64]) -> Result<f64> {
    if x.len() != other.len() {
        return Err(Error::invalid(format!(
            "kernel arguments differ in dimension: {} vs {}",
            x.len(),
            other.len()
        )));
    }
    let dist2: f64 = x.iter().zip(other).map(|(a, b)| (a - b) * (a - b)).sum();
    match kernel.family {
        KernelFamily::Gaussian => Ok((-dist2 / (2.0 * kernel.sigma2)).exp()),
    }
}

/// Feature vector `z(x)` of dimension `2D`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector(Vec<f64>);

impl FeatureVector {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn dot(&self, other: &FeatureVector) -> f64 {
        dot(&self.0, &other.0)
    }

    pub fn norm_squared(&self) -> f64 {
        dot(&self.0, &self.0)
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `D` spectral frequencies drawn for one kernel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomFeatureMap {
    kernel: KernelSpec,
    num_features: usize,
    input_dim: usize,
    seed: u64,
    /// Row-major `num_features × input_dim`.
    frequencies: Vec<f64>,
}

impl RandomFeatureMap {
    /// Draws `num_features` i.i.d. frequencies from the kernel's spectral
    /// density. The same arguments always reproduce the same map.
    pub fn sample(kernel: KernelSpec, num_features: usize, input_dim: usize, seed: u64) -> Result<Self> {
        kernel.validate()?;
        if num_features == 0 {
            return Err(Error::invalid("number of random features must be at least 1"));
        }
        if input_dim == 0 {
            return Err(Error::invalid("input dimension must be at least 1"));
        }
        let mut rng = seed::rng_from(seed);
        let scale = match kernel.family {
            KernelFamily::Gaussian => 1.0 / kernel.sigma2.sqrt(),
        };
        let frequencies = (0..num_features * input_dim)
            .map(|_| {
                let g: f64 = StandardNormal.sample(&mut rng);
                g * scale
            })
            .collect();
        Ok(Self {
            kernel,
            num_features,
            input_dim,
            seed,
            frequencies,
        })
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    /// Number of frequencies `D`; the feature dimension is `2D`.
    pub fn num_features(&self) -> usize {
        self.num_features
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn frequency(&self, i: usize) -> &[f64] {
        &self.frequencies[i * self.input_dim..(i + 1) * self.input_dim]
    }

    pub fn frequencies(&self) -> impl Iterator<Item = &[f64]> {
        self.frequencies.chunks_exact(self.input_dim)
    }

    pub fn map(&self, x: &[f64]) -> Result<FeatureVector> {
        if x.len() != self.input_dim {
            return Err(Error::invalid(format!(
                "input has dimension {}, feature map expects {}",
                x.len(),
                self.input_dim
            )));
        }
        let d = self.num_features;
        let scale = 1.0 / (d as f64).sqrt();
        let mut values = vec![0.0; 2 * d];
        for (i, v) in self.frequencies().enumerate() {
            let (s, c) = dot(v, x).sin_cos();
            values[i] = scale * s;
            values[d + i] = scale * c;
        }
        Ok(FeatureVector(values))
    }
}

/// Feature map attached to one dictionary entry.
///
/// `Identity` passes the (unit-norm) input through unchanged and backs the
/// linear-kernel baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeatureMap {
    Fourier(RandomFeatureMap),
    Identity { input_dim: usize },
}

impl FeatureMap {
    pub fn input_dim(&self) -> usize {
        match self {
            FeatureMap::Fourier(m) => m.input_dim(),
            FeatureMap::Identity { input_dim } => *input_dim,
        }
    }

    pub fn output_dim(&self) -> usize {
        match self {
            FeatureMap::Fourier(m) => 2 * m.num_features(),
            FeatureMap::Identity { input_dim } => *input_dim,
        }
    }

    pub fn map(&self, x: &[f64]) -> Result<FeatureVector> {
        match self {
            FeatureMap::Fourier(m) => m.map(x),
            FeatureMap::Identity { input_dim } => {
                if x.len() != *input_dim {
                    return Err(Error::invalid(format!(
                        "input has dimension {}, feature map expects {input_dim}",
                        x.len()
                    )));
                }
                Ok(FeatureVector(x.to_vec()))
            }
        }
    }
}

impl From<RandomFeatureMap> for FeatureMap {
    fn from(m: RandomFeatureMap) -> Self {
        FeatureMap::Fourier(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampling_is_deterministic() {
        let k = KernelSpec::gaussian(1.0).unwrap();
        let a = RandomFeatureMap::sample(k, 50, 13, 7).unwrap();
        let b = RandomFeatureMap::sample(k, 50, 13, 7).unwrap();
        assert_eq!(a.frequencies().count(), 50);
        assert!(a.frequencies().all(|v| v.len() == 13));
        let bits = |m: &RandomFeatureMap| m.frequencies.iter().map(|f| f.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
        let c = RandomFeatureMap::sample(k, 50, 13, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn rejects_degenerate_shapes() {
        let k = KernelSpec::gaussian(1.0).unwrap();
        assert!(matches!(RandomFeatureMap::sample(k, 0, 3, 1), Err(Error::InvalidArgument(_))));
        assert!(matches!(RandomFeatureMap::sample(k, 3, 0, 1), Err(Error::InvalidArgument(_))));
        assert!(KernelSpec::gaussian(0.0).is_err());
        assert!(KernelSpec::gaussian(-1.0).is_err());
    }

    #[test]
    fn frequency_variance_matches_bandwidth() {
        // Entries are N(0, 1/σ²); sample variance of n draws has standard
        // error sqrt(2/(n-1))·(1/σ²).
        for sigma2 in [0.25, 1.0, 100.0] {
            let k = KernelSpec::gaussian(sigma2).unwrap();
            let m = RandomFeatureMap::sample(k, 10_000, 1, 3).unwrap();
            let n = m.frequencies.len() as f64;
            let mean = m.frequencies.iter().sum::<f64>() / n;
            let var = m.frequencies.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / (n - 1.0);
            let target = 1.0 / sigma2;
            let se = target * (2.0 / (n - 1.0)).sqrt();
            assert!((var - target).abs() <= 3.0 * se, "σ²={sigma2}: var {var} vs {target}");
        }
    }

    #[test]
    fn dictionary_matches_experiment_setup() {
        let dict = gaussian_dictionary();
        assert_eq!(dict.len(), 17);
        assert!((dict[0].sigma2 - 1e-4).abs() < 1e-18);
        assert!((dict[8].sigma2 - 1.0).abs() < 1e-15);
        assert!((dict[16].sigma2 - 1e4).abs() < 1e-9);
        let m = RandomFeatureMap::sample(dict[0], 50, 77, 1).unwrap();
        assert_eq!(m.map(&[0.0; 77]).unwrap().len(), 100);
    }

    #[test]
    fn zero_input_maps_to_cosine_block() {
        let k = KernelSpec::gaussian(1.0).unwrap();
        let m = RandomFeatureMap::sample(k, 8, 4, 2).unwrap();
        let z = m.map(&[0.0; 4]).unwrap();
        let s = 1.0 / 8f64.sqrt();
        assert!(z.as_slice()[..8].iter().all(|&v| v == 0.0));
        assert!(z.as_slice()[8..].iter().all(|&v| (v - s).abs() < 1e-15));
        assert!((z.norm_squared() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let k = KernelSpec::gaussian(1.0).unwrap();
        let m = RandomFeatureMap::sample(k, 8, 4, 2).unwrap();
        assert!(m.map(&[0.0; 3]).is_err());
        assert!(exact_kernel(&k, &[0.0; 2], &[0.0; 3]).is_err());
        assert!(FeatureMap::Identity { input_dim: 2 }.map(&[1.0]).is_err());
    }

    #[test]
    fn exact_kernel_values() {
        let k = KernelSpec::gaussian(1.0).unwrap();
        let x = [0.3, -0.2, 0.9];
        assert_eq!(exact_kernel(&k, &x, &x).unwrap(), 1.0);
        let a = [1.0, 0.0];
        let b = [0.0, 1.0];
        assert!((exact_kernel(&k, &a, &b).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        assert!((exact_kernel(&k, &a, &b).unwrap() - 0.367_879).abs() < 1e-6);
        assert_eq!(exact_kernel(&k, &a, &x[..2]).unwrap(), exact_kernel(&k, &x[..2], &a).unwrap());
    }
}
