//! Streaming driver for the random-feature multiple kernel learners.
//!
//! One [`Engine::step`] runs, in order:
//!
//! 1. prediction `ŷ_t` from the subset chosen at the end of the previous step;
//! 2. the label decision (active variants only);
//! 3. when labeled: an OGD step on every kernel, the weight update, and a
//!    fresh subset draw (selection variants only).
//!
//! An unlabeled step leaves models, weights and subset untouched.
//!
//! | variant     | kernel selection | active labeling |
//! |-------------|------------------|-----------------|
//! | `raker`     | no               | no              |
//! | `omkl_aks`  | yes              | no              |
//! | `amkl`      | no               | yes             |
//! | `amkl_aks`  | yes              | yes             |

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::active::{self, ActiveConfig, LabelHistory};
use crate::data::StreamSample;
use crate::features::{gaussian_dictionary, FeatureMap, FeatureVector, KernelSpec, RandomFeatureMap};
use crate::local::{HindsightAccumulator, LocalModel, LossSpec};
use crate::seed::{self, Rng, Stream};
use crate::selection::{self, SelectionParams};
use crate::weights::{self, WeightDistribution, WeightState};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Raker,
    OmklAks,
    Amkl,
    AmklAks,
    SingleKernel,
    BudgetedKernel,
    Linear,
    Poly2,
    Poly3,
    /// Multiple kernel learner on exact kernel expansions.
    OmklExact,
}

impl Variant {
    pub const ALL: [Variant; 10] = [
        Variant::Raker,
        Variant::OmklAks,
        Variant::Amkl,
        Variant::AmklAks,
        Variant::SingleKernel,
        Variant::BudgetedKernel,
        Variant::Linear,
        Variant::Poly2,
        Variant::Poly3,
        Variant::OmklExact,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Raker => "raker",
            Variant::OmklAks => "omkl_aks",
            Variant::Amkl => "amkl",
            Variant::AmklAks => "amkl_aks",
            Variant::SingleKernel => "single_kernel",
            Variant::BudgetedKernel => "budgeted_kernel",
            Variant::Linear => "linear",
            Variant::Poly2 => "poly2",
            Variant::Poly3 => "poly3",
            Variant::OmklExact => "omkl_exact",
        }
    }

    pub fn selects_kernels(self) -> bool {
        matches!(self, Variant::OmklAks | Variant::AmklAks)
    }

    pub fn is_active(self) -> bool {
        matches!(self, Variant::Amkl | Variant::AmklAks)
    }

    /// Variants driven by [`Engine`]; the rest live in [`crate::baselines`].
    pub fn uses_engine(self) -> bool {
        matches!(
            self,
            Variant::Raker | Variant::OmklAks | Variant::Amkl | Variant::AmklAks | Variant::SingleKernel
        )
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == norm)
            .ok_or_else(|| Error::Config(format!("unknown variant '{s}'")))
    }
}

/// Loss fed to the exponential weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightLoss {
    /// The same regularized loss the local step descends.
    #[default]
    Regularized,
    /// Squared prediction error only.
    PredictionOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmConfig {
    pub variant: Variant,
    pub eta_l: f64,
    pub eta_g: f64,
    pub lambda: f64,
    /// Random features per kernel, `D`.
    pub num_features: usize,
    pub dictionary: Vec<KernelSpec>,
    #[serde(default)]
    pub selection: SelectionParams,
    #[serde(default = "ActiveConfig::disabled")]
    pub active: ActiveConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub weight_loss: WeightLoss,
    /// Optional projection radius for every θ. Off by default.
    #[serde(default)]
    pub theta_clip: Option<f64>,
    /// Support-point budget for the expansion baselines.
    #[serde(default = "default_budget")]
    pub budget: usize,
}

fn default_budget() -> usize {
    50
}

impl AlgorithmConfig {
    /// The experiment defaults: 17 Gaussian kernels, `D = 50`, `λ = 0.01`,
    /// `η_l = η_g = 1/√T`, `δ = 0.8`, `γ ≤ 2`, `η_c = 5·10⁻⁴`, `M = 1`.
    pub fn standard(variant: Variant, horizon: usize) -> Self {
        let eta = 1.0 / (horizon.max(1) as f64).sqrt();
        let active = if variant.is_active() {
            ActiveConfig::default()
        } else {
            ActiveConfig::disabled()
        };
        let dictionary = match variant {
            Variant::SingleKernel => vec![KernelSpec {
                family: crate::features::KernelFamily::Gaussian,
                sigma2: 1.0,
            }],
            _ => gaussian_dictionary(),
        };
        Self {
            variant,
            eta_l: eta,
            eta_g: eta,
            lambda: 0.01,
            num_features: 50,
            dictionary,
            selection: SelectionParams::default(),
            active,
            seed: 0,
            weight_loss: WeightLoss::Regularized,
            theta_clip: None,
            budget: default_budget(),
        }
    }

    /// Sets `η_l = η_g = 1/√T`.
    pub fn with_horizon(mut self, horizon: usize) -> Self {
        let eta = 1.0 / (horizon.max(1) as f64).sqrt();
        self.eta_l = eta;
        self.eta_g = eta;
        self
    }

    pub fn kernels(&self) -> usize {
        self.dictionary.len()
    }

    pub fn loss_spec(&self) -> LossSpec {
        LossSpec {
            lambda: self.lambda,
            family: Default::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dictionary.is_empty() {
            return Err(Error::Config("kernel dictionary is empty".into()));
        }
        for k in &self.dictionary {
            k.validate().map_err(|e| Error::Config(e.to_string()))?;
        }
        for (name, v) in [("eta_l", self.eta_l), ("eta_g", self.eta_g)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(Error::Config(format!("lambda must be nonnegative, got {}", self.lambda)));
        }
        if self.num_features == 0 {
            return Err(Error::Config("num_features must be at least 1".into()));
        }
        if self.budget == 0 {
            return Err(Error::Config("budget must be at least 1".into()));
        }
        if let Some(r) = self.theta_clip {
            if !(r.is_finite() && r > 0.0) {
                return Err(Error::Config(format!("theta_clip must be positive, got {r}")));
            }
        }
        if self.variant.selects_kernels() {
            self.selection.validate(self.kernels())?;
        }
        self.active.validate()?;
        if self.active.enabled && !self.variant.is_active() {
            return Err(Error::Config(format!(
                "variant {} does not support active labeling",
                self.variant
            )));
        }
        if self.variant == Variant::SingleKernel && self.kernels() != 1 {
            return Err(Error::Config("single_kernel needs a one-kernel dictionary".into()));
        }
        Ok(())
    }
}

/// Source of labels for samples the learner decides to query.
pub trait LabelOracle {
    fn label(&mut self, t: usize) -> Result<f64>;
}

impl<F: FnMut(usize) -> Result<f64>> LabelOracle for F {
    fn label(&mut self, t: usize) -> Result<f64> {
        self(t)
    }
}

/// Oracle that always answers with the same label; counts its queries.
#[derive(Debug, Clone)]
pub struct FixedLabel {
    pub value: f64,
    pub queries: usize,
}

impl FixedLabel {
    pub fn new(value: f64) -> Self {
        Self { value, queries: 0 }
    }
}

impl LabelOracle for FixedLabel {
    fn label(&mut self, _t: usize) -> Result<f64> {
        self.queries += 1;
        Ok(self.value)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineState {
    pub models: Vec<LocalModel>,
    pub weights: WeightState,
    /// Subset used for the next prediction.
    pub current_subset: Vec<usize>,
    pub label_history: LabelHistory,
    pub step: usize,
}

/// Everything [`Engine::step`] observed and decided at one time step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub t: usize,
    pub prediction: f64,
    pub labeled: bool,
    pub label: Option<f64>,
    /// `fᵢ(x_t)` for every kernel, before the update.
    pub kernel_predictions: Vec<f64>,
    /// Per-kernel losses fed to the weights (labeled steps only).
    pub kernel_losses: Option<Vec<f64>>,
    /// Subset the prediction was made with.
    pub subset: Vec<usize>,
    /// `Σ_{i∈V} q(i)‖θᵢ‖²` of the models that produced the prediction.
    pub penalty: f64,
    /// Confidence score, when the active criterion was evaluated.
    pub confidence: Option<f64>,
}

pub struct Engine {
    config: AlgorithmConfig,
    maps: Vec<FeatureMap>,
    state: EngineState,
    balls_rng: Rng,
    subset_rng: Rng,
}

impl Engine {
    /// Fresh engine: zero models, unit weights, full subset. Feature maps are
    /// drawn from per-kernel sub-streams of `config.seed`.
    pub fn new(config: AlgorithmConfig, input_dim: usize) -> Result<Self> {
        config.validate()?;
        if !config.variant.uses_engine() {
            return Err(Error::Config(format!(
                "variant {} runs through the baselines module",
                config.variant
            )));
        }
        let maps = config
            .dictionary
            .iter()
            .enumerate()
            .map(|(i, &k)| {
                RandomFeatureMap::sample(
                    k,
                    config.num_features,
                    input_dim,
                    seed::derive(config.seed, Stream::FeatureMap(i)),
                )
                .map(FeatureMap::from)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::with_maps(config, maps)
    }

    /// Engine over caller-supplied feature maps, one per dictionary entry.
    pub fn with_maps(config: AlgorithmConfig, maps: Vec<FeatureMap>) -> Result<Self> {
        config.validate()?;
        if maps.len() != config.kernels() {
            return Err(Error::Config(format!(
                "{} feature maps for {} kernels",
                maps.len(),
                config.kernels()
            )));
        }
        if maps.iter().any(|m| m.input_dim() != maps[0].input_dim()) {
            return Err(Error::Config("feature maps disagree on input dimension".into()));
        }
        let p = maps.len();
        let state = EngineState {
            models: maps
                .iter()
                .enumerate()
                .map(|(i, m)| LocalModel::zeros(m.output_dim(), i))
                .collect(),
            weights: WeightState::new(p, config.eta_g)?,
            current_subset: (0..p).collect(),
            label_history: LabelHistory::new(),
            step: 0,
        };
        let selection_seed = config.selection.seed.unwrap_or(config.seed);
        Ok(Self {
            balls_rng: seed::substream(selection_seed, Stream::BallsBins),
            subset_rng: seed::substream(selection_seed, Stream::SubsetSampling),
            config,
            maps,
            state,
        })
    }

    pub fn config(&self) -> &AlgorithmConfig {
        &self.config
    }

    pub fn maps(&self) -> &[FeatureMap] {
        &self.maps
    }

    pub fn state(&self) -> &EngineState {
        &self.state
    }

    pub fn input_dim(&self) -> usize {
        self.maps[0].input_dim()
    }

    /// Current full-dictionary weight distribution.
    pub fn distribution(&self) -> WeightDistribution {
        self.state.weights.distribution()
    }

    pub fn features(&self, x: &[f64]) -> Result<Vec<FeatureVector>> {
        self.maps.iter().map(|m| m.map(x)).collect()
    }

    pub fn kernel_predictions(&self, x: &[f64]) -> Result<Vec<f64>> {
        let feats = self.features(x)?;
        self.predict_from(&feats)
    }

    fn predict_from(&self, feats: &[FeatureVector]) -> Result<Vec<f64>> {
        self.state
            .models
            .iter()
            .zip(feats)
            .map(|(m, z)| m.predict(z))
            .collect()
    }

    fn weight_losses(&self, feats: &[FeatureVector], y: f64) -> Result<Vec<f64>> {
        let spec = self.config.loss_spec();
        self.state
            .models
            .iter()
            .zip(feats)
            .map(|(m, z)| match self.config.weight_loss {
                WeightLoss::Regularized => m.loss(z, y, &spec),
                WeightLoss::PredictionOnly => m.predict(z).map(|f| (y - f) * (y - f)),
            })
            .collect()
    }

    /// Per-kernel losses of the current models on `(x, y)`, as fed to the
    /// weights.
    pub fn kernel_losses(&self, x: &[f64], y: f64) -> Result<Vec<f64>> {
        let feats = self.features(x)?;
        self.weight_losses(&feats, y)
    }

    /// Prediction of the current combined function, without side effects.
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        let preds = self.kernel_predictions(x)?;
        let q = self.state.weights.restricted_distribution(&self.state.current_subset)?;
        weights::combine(&preds, &q, &self.state.current_subset)
    }

    /// Processes one stream sample. The oracle is consulted only after the
    /// prediction is formed, and only when the label is requested.
    pub fn step<O: LabelOracle + ?Sized>(&mut self, x: &[f64], oracle: &mut O) -> Result<StepOutcome> {
        let t = self.state.step + 1;
        let feats = self.features(x)?;
        let preds = self.predict_from(&feats)?;
        let subset = self.state.current_subset.clone();
        let q = self.state.weights.restricted_distribution(&subset)?;
        let prediction = weights::combine(&preds, &q, &subset)?;
        let penalty = q
            .p
            .iter()
            .zip(&subset)
            .map(|(qi, &i)| qi * self.state.models[i].norm_squared())
            .sum();

        let active = &self.config.active;
        let (confident, confidence) = if self.config.variant.is_active() && active.enabled {
            let p = self.state.weights.distribution();
            let score = active::confidence_score(&preds, &p, &subset, active.discrepancy)?;
            (score <= active.eta_c, Some(score))
        } else {
            (false, None)
        };
        let mut history = self.state.label_history.clone();
        let labeled = history.decide(confident, active);

        if !labeled {
            self.state.label_history = history;
            self.state.step = t;
            return Ok(StepOutcome {
                t,
                prediction,
                labeled,
                label: None,
                kernel_predictions: preds,
                kernel_losses: None,
                subset,
                penalty,
                confidence,
            });
        }

        let y = oracle.label(t).map_err(|e| match e {
            e @ Error::Labeling { .. } => e,
            other => Error::Labeling {
                step: t,
                message: other.to_string(),
            },
        })?;
        if !y.is_finite() {
            return Err(Error::Labeling {
                step: t,
                message: format!("oracle returned non-finite label {y}"),
            });
        }

        let losses = self.weight_losses(&feats, y)?;
        let spec = self.config.loss_spec();
        let mut models = self
            .state
            .models
            .iter()
            .zip(&feats)
            .map(|(m, z)| m.ogd_step(z, y, self.config.eta_l, &spec))
            .collect::<Result<Vec<_>>>()?;
        if let Some(r) = self.config.theta_clip {
            models.iter_mut().for_each(|m| m.clip_norm(r));
        }
        let mut weights = self.state.weights.clone();
        weights.accumulate(&losses, true)?;

        let p = self.maps.len();
        let next_subset = if self.config.variant.selects_kernels() {
            let dist = weights.distribution();
            let k = self
                .config
                .selection
                .fixed_k
                .unwrap_or_else(|| selection::choose_k(&dist, self.config.selection.delta));
            let collection = selection::build_collection(p, k, &self.config.selection, &mut self.balls_rng)?;
            let pmf = selection::subset_pmf(&collection, &weights)?;
            let s = selection::sample_subset(&pmf, &mut self.subset_rng);
            collection.subsets[s].clone()
        } else {
            (0..p).collect()
        };

        self.state.models = models;
        self.state.weights = weights;
        self.state.current_subset = next_subset;
        self.state.label_history = history;
        self.state.step = t;
        Ok(StepOutcome {
            t,
            prediction,
            labeled,
            label: Some(y),
            kernel_predictions: preds,
            kernel_losses: Some(losses),
            subset,
            penalty,
            confidence,
        })
    }

    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            format: CHECKPOINT_FORMAT.to_string(),
            version: CHECKPOINT_VERSION,
            rng_algorithm: seed::RNG_ALGORITHM.to_string(),
            config: self.config.clone(),
            maps: self.maps.clone(),
            state: self.state.clone(),
            balls_rng: self.balls_rng.clone(),
            subset_rng: self.subset_rng.clone(),
        }
    }

    pub fn restore(checkpoint: Checkpoint) -> Result<Self> {
        if checkpoint.format != CHECKPOINT_FORMAT {
            return Err(Error::Checkpoint(format!("unknown format '{}'", checkpoint.format)));
        }
        if checkpoint.version != CHECKPOINT_VERSION {
            return Err(Error::Checkpoint(format!(
                "unsupported version {} (expected {CHECKPOINT_VERSION})",
                checkpoint.version
            )));
        }
        if checkpoint.rng_algorithm != seed::RNG_ALGORITHM {
            return Err(Error::Checkpoint(format!(
                "checkpoint written with generator '{}'",
                checkpoint.rng_algorithm
            )));
        }
        let mut engine = Self::with_maps(checkpoint.config, checkpoint.maps)?;
        let p = engine.maps.len();
        let s = &checkpoint.state;
        if s.models.len() != p || s.weights.len() != p || s.current_subset.iter().any(|&i| i >= p) {
            return Err(Error::Checkpoint("state does not match the dictionary".into()));
        }
        engine.state = checkpoint.state;
        engine.balls_rng = checkpoint.balls_rng;
        engine.subset_rng = checkpoint.subset_rng;
        Ok(engine)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let json = serde_json::to_string(&self.checkpoint()).map_err(|e| Error::Checkpoint(e.to_string()))?;
        std::fs::write(path.as_ref(), json).map_err(|e| Error::io(path.as_ref(), e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref()).map_err(|e| Error::io(path.as_ref(), e))?;
        let cp: Checkpoint = serde_json::from_str(&text).map_err(|e| Error::Checkpoint(e.to_string()))?;
        Self::restore(cp)
    }
}

const CHECKPOINT_FORMAT: &str = "amkl-engine-checkpoint";
const CHECKPOINT_VERSION: u32 = 1;

/// Serializable snapshot of an [`Engine`], including generator positions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    pub rng_algorithm: String,
    pub config: AlgorithmConfig,
    pub maps: Vec<FeatureMap>,
    pub state: EngineState,
    balls_rng: Rng,
    subset_rng: Rng,
}

/// One row of a run trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub t: usize,
    pub prediction: f64,
    /// True label, used for evaluation whether or not it was revealed.
    pub y: f64,
    pub labeled: bool,
    /// Size of the subset used for the prediction.
    pub k: usize,
    pub subset: Vec<usize>,
    /// Learner loss `(ŷ - y)² + λ Σ_{i∈V} q(i)‖θᵢ‖²`.
    pub loss: f64,
    pub mse: f64,
    pub al_eff: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel_losses: Option<Vec<f64>>,
}

/// Running MSE and labeling efficiency.
#[derive(Debug, Clone, Default)]
pub struct RunningMetrics {
    steps: usize,
    labeled: usize,
    sq_err_sum: f64,
}

impl RunningMetrics {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns `(mse, al_eff)` after including this step.
    pub fn push(&mut self, prediction: f64, y: f64, labeled: bool) -> (f64, f64) {
        self.steps += 1;
        self.labeled += labeled as usize;
        self.sq_err_sum += (prediction - y) * (prediction - y);
        let t = self.steps as f64;
        (self.sq_err_sum / t, self.labeled as f64 / t)
    }
}

/// Runs a fresh engine over `samples`, one trace record per sample.
pub fn run(config: &AlgorithmConfig, samples: &[StreamSample]) -> Result<Vec<TraceRecord>> {
    let first = samples.first().ok_or_else(|| Error::Data("empty stream".into()))?;
    let mut engine = Engine::new(config.clone(), first.x.len())?;
    run_engine(&mut engine, samples)
}

/// Continues `engine` over `samples`.
pub fn run_engine(engine: &mut Engine, samples: &[StreamSample]) -> Result<Vec<TraceRecord>> {
    if samples.is_empty() {
        return Err(Error::Data("empty stream".into()));
    }
    let lambda = engine.config().lambda;
    let mut metrics = RunningMetrics::new();
    let mut trace = Vec::with_capacity(samples.len());
    for (row, sample) in samples.iter().enumerate() {
        if sample.x.len() != engine.input_dim() {
            return Err(Error::Parse {
                row,
                message: format!(
                    "sample has {} features, stream expects {}",
                    sample.x.len(),
                    engine.input_dim()
                ),
            });
        }
        let y = sample.y;
        let mut oracle = |_t: usize| Ok(y);
        let out = engine.step(&sample.x, &mut oracle)?;
        let (mse, al_eff) = metrics.push(out.prediction, y, out.labeled);
        trace.push(TraceRecord {
            t: out.t,
            prediction: out.prediction,
            y,
            labeled: out.labeled,
            k: out.subset.len(),
            subset: out.subset,
            loss: (out.prediction - y).powi(2) + lambda * out.penalty,
            mse,
            al_eff,
            kernel_losses: out.kernel_losses,
        });
    }
    Ok(trace)
}

/// Virtual learner that shares the engine's kernel functions but weights them
/// as if every label had been revealed.
#[derive(Debug, Clone)]
pub struct VirtualShadow {
    weights: WeightState,
}

/// What the shadow predicted before absorbing a sample.
#[derive(Debug, Clone, PartialEq)]
pub struct ShadowStep {
    pub prediction: f64,
    pub distribution: WeightDistribution,
}

impl VirtualShadow {
    pub fn new(engine: &Engine) -> Result<Self> {
        Ok(Self {
            weights: WeightState::new(engine.maps().len(), engine.config().eta_g)?,
        })
    }

    pub fn distribution(&self) -> WeightDistribution {
        self.weights.distribution()
    }

    /// Must be called with the engine's pre-step state for sample `(x, y)`.
    /// Returns the shadow's prediction at `x`, then charges every kernel its
    /// loss on `(x, y)`.
    pub fn observe(&mut self, engine: &Engine, x: &[f64], y: f64) -> Result<ShadowStep> {
        let feats = engine.features(x)?;
        let preds = engine.predict_from(&feats)?;
        let distribution = self.weights.distribution();
        let all: Vec<usize> = (0..preds.len()).collect();
        let prediction = weights::combine(&preds, &distribution, &all)?;
        let losses = engine.weight_losses(&feats, y)?;
        self.weights.accumulate(&losses, true)?;
        Ok(ShadowStep {
            prediction,
            distribution,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretReport {
    pub learner_loss: f64,
    /// Cumulative loss of each kernel's hindsight-optimal model.
    pub comparator_losses: Vec<f64>,
    pub best_kernel: usize,
    pub regret: f64,
}

/// Learner loss from `trace` minus the cumulative loss of the best kernel's
/// hindsight-optimal model over the same samples.
pub fn regret(trace: &[TraceRecord], maps: &[FeatureMap], samples: &[StreamSample], lambda: f64) -> Result<RegretReport> {
    if trace.len() != samples.len() {
        return Err(Error::invalid(format!(
            "trace has {} records for {} samples",
            trace.len(),
            samples.len()
        )));
    }
    if maps.is_empty() || samples.is_empty() {
        return Err(Error::invalid("regret needs at least one kernel and one sample"));
    }
    let mut accs: Vec<HindsightAccumulator> = maps.iter().map(|m| HindsightAccumulator::new(m.output_dim())).collect();
    for s in samples {
        for (acc, m) in accs.iter_mut().zip(maps) {
            acc.push(&m.map(&s.x)?, s.y)?;
        }
    }
    let comparator_losses = accs
        .iter()
        .map(|acc| acc.solve(lambda).map(|theta| acc.cumulative_loss(&theta, lambda)))
        .collect::<Result<Vec<_>>>()?;
    let best_kernel = WeightDistribution {
        p: comparator_losses.iter().map(|c| -c).collect(),
    }
    .argmax();
    let learner_loss: f64 = trace.iter().map(|r| r.loss).sum();
    Ok(RegretReport {
        learner_loss,
        regret: learner_loss - comparator_losses[best_kernel],
        comparator_losses,
        best_kernel,
    })
}
