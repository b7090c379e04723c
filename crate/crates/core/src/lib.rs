//! Random-feature online multiple kernel learning.
//!
//! The crate implements a streaming learner that keeps one online
//! gradient-descent model per Gaussian kernel in a dictionary, each operating
//! on a random Fourier feature approximation of its kernel, and combines them
//! with exponential weights. On top of that base learner (usually called
//! Raker) it provides:
//!
//! * adaptive kernel selection, which restricts the combination at every step
//!   to a randomly drawn subset of well-performing kernels ([`selection`]);
//! * stream-based active labeling, which skips the label request whenever the
//!   kernel functions already agree on the incoming sample ([`active`]).
//!
//! The [`engine`] module drives the four variants (Raker, OMKL-AKS, AMKL and
//! AMKL-AKS) over a stream, [`baselines`] holds single-kernel and budgeted
//! comparators, [`data`] loads and normalizes CSV datasets or generates
//! synthetic streams, and [`harness`] runs experiments and writes traces.

pub mod active;
pub mod baselines;
pub mod data;
pub mod engine;
mod error;
pub mod features;
pub mod harness;
pub mod local;
pub mod seed;
pub mod selection;
pub mod weights;

pub use error::{Error, Result};

pub use active::{ActiveConfig, Discrepancy, LabelHistory};
pub use data::{DatasetManifest, StreamSample, SyntheticSpec};
pub use engine::{AlgorithmConfig, Engine, LabelOracle, TraceRecord, Variant, VirtualShadow};
pub use features::{FeatureMap, FeatureVector, KernelFamily, KernelSpec, RandomFeatureMap};
pub use local::{LocalModel, LossSpec};
pub use selection::{SelectionParams, SubsetCollection, SubsetPmf};
pub use weights::{WeightDistribution, WeightState};
