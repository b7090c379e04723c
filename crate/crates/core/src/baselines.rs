//! Comparators: single-kernel learners and kernel-expansion learners.
//!
//! The random-feature single-kernel learner is the one-kernel special case of
//! the engine. Polynomial kernels are not shift invariant, so they run on an
//! explicit kernel expansion, as do the budgeted multiple kernel learners.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::data::StreamSample;
use crate::engine::{self, AlgorithmConfig, RunningMetrics, TraceRecord, Variant};
use crate::features::{dot, FeatureMap, KernelSpec, RandomFeatureMap};
use crate::local::{LocalModel, LossSpec};
use crate::seed::{self, Stream};
use crate::weights::{self, WeightState};
use crate::{Error, Result};

/// Support-point cap used where the expansion is meant to be untruncated.
pub const EXPANSION_CAP: usize = 2000;

/// Kernel evaluated directly on inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExpansionKernel {
    Gaussian { sigma2: f64 },
    /// `(xᵀx′ + offset)^degree`
    Polynomial { degree: u32, offset: f64 },
}

impl ExpansionKernel {
    pub fn polynomial(degree: u32) -> Self {
        ExpansionKernel::Polynomial { degree, offset: 1.0 }
    }

    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match *self {
            ExpansionKernel::Gaussian { sigma2 } => {
                let d2: f64 = a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum();
                (-d2 / (2.0 * sigma2)).exp()
            }
            ExpansionKernel::Polynomial { degree, offset } => (dot(a, b) + offset).powi(degree as i32),
        }
    }
}

impl From<KernelSpec> for ExpansionKernel {
    fn from(k: KernelSpec) -> Self {
        ExpansionKernel::Gaussian { sigma2: k.sigma2 }
    }
}

/// Truncated kernel expansion `f(x) = Σ αⱼ κ(x, xⱼ)` holding at most `budget`
/// support points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetedExpansion {
    support: VecDeque<(Vec<f64>, f64)>,
    budget: usize,
}

impl BudgetedExpansion {
    pub fn new(budget: usize) -> Result<Self> {
        if budget == 0 {
            return Err(Error::invalid("budget must be at least 1"));
        }
        Ok(Self {
            support: VecDeque::with_capacity(budget.min(4096) + 1),
            budget,
        })
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.support.iter().map(|(x, a)| (x.as_slice(), *a))
    }

    pub fn predict(&self, kernel: &ExpansionKernel, x: &[f64]) -> f64 {
        self.support.iter().map(|(s, a)| a * kernel.eval(s, x)).sum()
    }

    /// Functional gradient step on `(f(x) - y)² + λ‖f‖²`:
    /// `f ← (1 - 2ηλ) f - 2η (f(x) - y) κ(x, ·)`, then the oldest support
    /// point is evicted if the budget is exceeded.
    pub fn step(&mut self, kernel: &ExpansionKernel, x: &[f64], y: f64, eta_l: f64, lambda: f64) -> Result<f64> {
        let f = self.predict(kernel, x);
        let coeff = -2.0 * eta_l * (f - y);
        if !coeff.is_finite() {
            return Err(Error::NumericFailure(format!("expansion coefficient {coeff}")));
        }
        let shrink = 1.0 - 2.0 * eta_l * lambda;
        if shrink != 1.0 {
            self.support.iter_mut().for_each(|(_, a)| *a *= shrink);
        }
        self.support.push_back((x.to_vec(), coeff));
        while self.support.len() > self.budget {
            self.support.pop_front();
        }
        Ok(f)
    }
}

/// One-kernel online learner on a fixed feature map, fully supervised.
/// Matches the engine with a one-entry dictionary bit for bit.
pub fn single_kernel_run(map: &FeatureMap, samples: &[StreamSample], eta_l: f64, lambda: f64) -> Result<Vec<TraceRecord>> {
    if samples.is_empty() {
        return Err(Error::Data("empty stream".into()));
    }
    let spec = LossSpec::least_squares(lambda)?;
    if !(eta_l.is_finite() && eta_l > 0.0) {
        return Err(Error::Config(format!("eta_l must be positive, got {eta_l}")));
    }
    let mut model = LocalModel::zeros(map.output_dim(), 0);
    let mut metrics = RunningMetrics::new();
    let mut trace = Vec::with_capacity(samples.len());
    for (row, s) in samples.iter().enumerate() {
        let z = map.map(&s.x).map_err(|e| Error::Parse {
            row,
            message: e.to_string(),
        })?;
        let f = model.predict(&z)?;
        let prediction = weights::combine(&[f], &weights::WeightDistribution { p: vec![1.0] }, &[0])?;
        let penalty = 1.0 * model.norm_squared();
        let kernel_loss = model.loss(&z, s.y, &spec)?;
        model = model.ogd_step(&z, s.y, eta_l, &spec)?;
        let (mse, al_eff) = metrics.push(prediction, s.y, true);
        trace.push(TraceRecord {
            t: row + 1,
            prediction,
            y: s.y,
            labeled: true,
            k: 1,
            subset: vec![0],
            loss: (prediction - s.y).powi(2) + lambda * penalty,
            mse,
            al_eff,
            kernel_losses: Some(vec![kernel_loss]),
        });
    }
    Ok(trace)
}

/// Single-kernel learner on an explicit expansion. The recorded loss is the
/// squared prediction error.
pub fn expansion_run(
    kernel: ExpansionKernel,
    budget: usize,
    samples: &[StreamSample],
    eta_l: f64,
    lambda: f64,
) -> Result<Vec<TraceRecord>> {
    if samples.is_empty() {
        return Err(Error::Data("empty stream".into()));
    }
    let mut exp = BudgetedExpansion::new(budget)?;
    let mut metrics = RunningMetrics::new();
    let mut trace = Vec::with_capacity(samples.len());
    for (row, s) in samples.iter().enumerate() {
        let prediction = exp.step(&kernel, &s.x, s.y, eta_l, lambda)?;
        let (mse, al_eff) = metrics.push(prediction, s.y, true);
        trace.push(record(row, prediction, s.y, 1, mse, al_eff));
    }
    Ok(trace)
}

fn record(row: usize, prediction: f64, y: f64, k: usize, mse: f64, al_eff: f64) -> TraceRecord {
    TraceRecord {
        t: row + 1,
        prediction,
        y,
        labeled: true,
        k,
        subset: (0..k).collect(),
        loss: (prediction - y).powi(2),
        mse,
        al_eff,
        kernel_losses: None,
    }
}

/// Multiple kernel learner over per-kernel budgeted expansions combined with
/// exponential weights on the squared prediction error.
pub fn budgeted_mkl_run(
    dictionary: &[ExpansionKernel],
    budget: usize,
    samples: &[StreamSample],
    eta_l: f64,
    eta_g: f64,
    lambda: f64,
) -> Result<Vec<TraceRecord>> {
    if samples.is_empty() {
        return Err(Error::Data("empty stream".into()));
    }
    let p = dictionary.len();
    let mut experts = (0..p).map(|_| BudgetedExpansion::new(budget)).collect::<Result<Vec<_>>>()?;
    let mut w = WeightState::new(p, eta_g)?;
    let all: Vec<usize> = (0..p).collect();
    let mut metrics = RunningMetrics::new();
    let mut trace = Vec::with_capacity(samples.len());
    for (row, s) in samples.iter().enumerate() {
        let preds = experts
            .iter_mut()
            .zip(dictionary)
            .map(|(e, k)| e.step(k, &s.x, s.y, eta_l, lambda))
            .collect::<Result<Vec<_>>>()?;
        let prediction = weights::combine(&preds, &w.distribution(), &all)?;
        let losses: Vec<f64> = preds.iter().map(|f| (f - s.y) * (f - s.y)).collect();
        w.accumulate(&losses, true)?;
        let (mse, al_eff) = metrics.push(prediction, s.y, true);
        let mut r = record(row, prediction, s.y, p, mse, al_eff);
        r.kernel_losses = Some(losses);
        trace.push(r);
    }
    Ok(trace)
}

/// Runs any variant with the parameters in `config`.
///
/// * `single_kernel`: the engine on the config's one-kernel dictionary.
/// * `linear`: one-kernel learner on the raw (unit-norm) inputs.
/// * `poly2`, `poly3`: `(xᵀx′ + 1)^deg` expansion capped at [`EXPANSION_CAP`].
/// * `budgeted_kernel`: Gaussian expansions of `config.budget` points per
///   dictionary kernel.
/// * `omkl_exact`: the same with [`EXPANSION_CAP`] points.
pub fn run_variant(config: &AlgorithmConfig, samples: &[StreamSample]) -> Result<Vec<TraceRecord>> {
    let first = samples.first().ok_or_else(|| Error::Data("empty stream".into()))?;
    config.validate()?;
    let d = first.x.len();
    let gaussians = || config.dictionary.iter().map(|&k| ExpansionKernel::from(k)).collect::<Vec<_>>();
    match config.variant {
        v if v.uses_engine() => engine::run(config, samples),
        Variant::Linear => single_kernel_run(&FeatureMap::Identity { input_dim: d }, samples, config.eta_l, config.lambda),
        Variant::Poly2 => expansion_run(ExpansionKernel::polynomial(2), EXPANSION_CAP, samples, config.eta_l, config.lambda),
        Variant::Poly3 => expansion_run(ExpansionKernel::polynomial(3), EXPANSION_CAP, samples, config.eta_l, config.lambda),
        Variant::BudgetedKernel => {
            budgeted_mkl_run(&gaussians(), config.budget, samples, config.eta_l, config.eta_g, config.lambda)
        }
        Variant::OmklExact => {
            budgeted_mkl_run(&gaussians(), EXPANSION_CAP, samples, config.eta_l, config.eta_g, config.lambda)
        }
        v => Err(Error::Config(format!("no runner for variant {v}"))),
    }
}

/// Random feature map for kernel `i` of a dictionary, drawn exactly as
/// [`engine::Engine::new`] draws it.
pub fn engine_feature_map(kernel: KernelSpec, index: usize, num_features: usize, input_dim: usize, seed: u64) -> Result<FeatureMap> {
    RandomFeatureMap::sample(kernel, num_features, input_dim, seed::derive(seed, Stream::FeatureMap(index))).map(FeatureMap::from)
}
