//! Per-kernel linear models over random features.
//!
//! Each kernel function is `f(x) = θᵀz(x)` and is trained with online gradient
//! descent on the regularized least-squares loss
//! `[y - θᵀz]² + λ‖θ‖²`, whose gradient is `2(θᵀz - y)z + 2λθ`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::features::{dot, FeatureVector};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossFamily {
    #[default]
    RegularizedLeastSquares,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossSpec {
    pub lambda: f64,
    #[serde(default)]
    pub family: LossFamily,
}

impl LossSpec {
    pub fn least_squares(lambda: f64) -> Result<Self> {
        let spec = Self {
            lambda,
            family: LossFamily::RegularizedLeastSquares,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(Error::invalid(format!("lambda must be nonnegative, got {}", self.lambda)));
        }
        Ok(())
    }
}

/// Parameter vector of one kernel function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalModel {
    pub theta: Vec<f64>,
    pub kernel_index: usize,
}

impl LocalModel {
    pub fn zeros(dim: usize, kernel_index: usize) -> Self {
        Self {
            theta: vec![0.0; dim],
            kernel_index,
        }
    }

    pub fn dim(&self) -> usize {
        self.theta.len()
    }

    pub fn norm_squared(&self) -> f64 {
        dot(&self.theta, &self.theta)
    }

    fn check(&self, z: &FeatureVector) -> Result<()> {
        if z.len() != self.theta.len() {
            return Err(Error::invalid(format!(
                "feature dimension {} does not match model dimension {}",
                z.len(),
                self.theta.len()
            )));
        }
        Ok(())
    }

    pub fn predict(&self, z: &FeatureVector) -> Result<f64> {
        self.check(z)?;
        Ok(dot(&self.theta, z.as_slice()))
    }

    pub fn loss(&self, z: &FeatureVector, y: f64, spec: &LossSpec) -> Result<f64> {
        let r = y - self.predict(z)?;
        Ok(r * r + spec.lambda * self.norm_squared())
    }

    pub fn gradient(&self, z: &FeatureVector, y: f64, spec: &LossSpec) -> Result<Vec<f64>> {
        let residual = self.predict(z)? - y;
        Ok(self
            .theta
            .iter()
            .zip(z.as_slice())
            .map(|(t, zi)| 2.0 * residual * zi + 2.0 * spec.lambda * t)
            .collect())
    }

    /// One gradient step `θ - η∇𝓛`; `self` is left untouched.
    pub fn ogd_step(&self, z: &FeatureVector, y: f64, eta_l: f64, spec: &LossSpec) -> Result<LocalModel> {
        if !(eta_l.is_finite() && eta_l >= 0.0) {
            return Err(Error::invalid(format!("step size must be nonnegative, got {eta_l}")));
        }
        let grad = self.gradient(z, y, spec)?;
        if grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::NumericFailure(format!(
                "non-finite gradient for kernel {}",
                self.kernel_index
            )));
        }
        let theta = self.theta.iter().zip(&grad).map(|(t, g)| t - eta_l * g).collect();
        Ok(LocalModel {
            theta,
            kernel_index: self.kernel_index,
        })
    }

    /// Rescales θ onto the ball of the given radius if it lies outside.
    pub fn clip_norm(&mut self, radius: f64) {
        let norm = self.norm_squared().sqrt();
        if norm > radius && norm > 0.0 {
            let s = radius / norm;
            self.theta.iter_mut().for_each(|t| *t *= s);
        }
    }
}

/// Sufficient statistics `(ZᵀZ, Zᵀy, yᵀy, T)` of a labeled feature stream.
///
/// The hindsight comparator minimizes `Σ_t [y_t - θᵀz_t]² + λ‖θ‖²`, i.e. the
/// per-step loss summed over the stream, which puts an effective ridge of `λT`
/// on the normal equations.
#[derive(Debug, Clone)]
pub struct HindsightAccumulator {
    gram: DMatrix<f64>,
    cross: DVector<f64>,
    label_energy: f64,
    count: usize,
}

impl HindsightAccumulator {
    pub fn new(dim: usize) -> Self {
        Self {
            gram: DMatrix::zeros(dim, dim),
            cross: DVector::zeros(dim),
            label_energy: 0.0,
            count: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.cross.len()
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn push(&mut self, z: &FeatureVector, y: f64) -> Result<()> {
        if z.len() != self.dim() {
            return Err(Error::invalid(format!(
                "feature dimension {} does not match accumulator dimension {}",
                z.len(),
                self.dim()
            )));
        }
        let v = DVector::from_column_slice(z.as_slice());
        self.gram.ger(1.0, &v, &v, 1.0);
        self.cross.axpy(y, &v, 1.0);
        self.label_energy += y * y;
        self.count += 1;
        Ok(())
    }

    /// Solves `(ZᵀZ + λT·I)θ = Zᵀy`.
    pub fn solve(&self, lambda: f64) -> Result<Vec<f64>> {
        if self.count == 0 {
            return Err(Error::invalid("hindsight comparator needs at least one sample"));
        }
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::invalid(format!("lambda must be nonnegative, got {lambda}")));
        }
        let ridge = lambda * self.count as f64;
        let mut a = self.gram.clone();
        for i in 0..a.nrows() {
            a[(i, i)] += ridge;
        }
        let chol = a.clone().cholesky().ok_or_else(|| {
            Error::NumericFailure("normal equations are singular; use lambda > 0".into())
        })?;
        let theta = chol.solve(&self.cross);
        if theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::NumericFailure("non-finite hindsight solution".into()));
        }
        let residual = (&a * &theta - &self.cross).amax();
        let scale = a.amax() * theta.amax() + self.cross.amax() + 1.0;
        if residual > 1e-8 * scale {
            return Err(Error::NumericFailure(format!(
                "normal-equation residual {residual:e} exceeds tolerance (ill-conditioned system)"
            )));
        }
        Ok(theta.iter().copied().collect())
    }

    /// `Σ_t [y_t - θᵀz_t]² + λT‖θ‖²`, evaluated from the statistics.
    pub fn cumulative_loss(&self, theta: &[f64], lambda: f64) -> f64 {
        let t = DVector::from_column_slice(theta);
        let quad = (&self.gram * &t).dot(&t);
        let fit = self.label_energy - 2.0 * t.dot(&self.cross) + quad;
        fit.max(0.0) + lambda * self.count as f64 * t.norm_squared()
    }
}

/// Hindsight-optimal model for one kernel over a labeled stream.
pub fn ridge_hindsight(features: &[FeatureVector], labels: &[f64], lambda: f64) -> Result<LocalModel> {
    if features.is_empty() {
        return Err(Error::invalid("hindsight comparator needs at least one sample"));
    }
    if features.len() != labels.len() {
        return Err(Error::invalid(format!(
            "{} feature vectors but {} labels",
            features.len(),
            labels.len()
        )));
    }
    let mut acc = HindsightAccumulator::new(features[0].len());
    for (z, &y) in features.iter().zip(labels) {
        acc.push(z, y)?;
    }
    Ok(LocalModel {
        theta: acc.solve(lambda)?,
        kernel_index: 0,
    })
}
