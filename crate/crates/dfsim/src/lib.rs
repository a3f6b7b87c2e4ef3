//! Channel-aware decision fusion for wireless sensor networks.
//!
//! A fusion center combines `K` one-bit sensor reports received over noisy
//! binary symmetric channels into a global detection decision. The sensors'
//! false-alarm probabilities and the link bit-error probabilities are known
//! at the fusion center; the detection probability is not, which rules out
//! the plain likelihood-ratio test and motivates the rules compared here.
//!
//! The crate provides:
//!
//! - [`model`]: the sensing/reporting pmf primitives and trial sampling;
//! - [`rules`]: the fusion statistics (clairvoyant LRT, ideal-sensors,
//!   locally optimum detection for identical and non-identical sensors,
//!   counting, and the affine estimator rule), plus their low-SNR
//!   expansions;
//! - [`analysis`]: score, Fisher information and deflection measures with
//!   exhaustive-enumeration oracles;
//! - [`channel`]: on-off keying over Rayleigh fading mapped to per-link
//!   bit-error probabilities;
//! - [`montecarlo`]: a reproducible parallel Monte Carlo engine with
//!   randomized-threshold calibration to exact false-alarm targets;
//! - [`config`] and [`experiments`]: a flat JSON experiment configuration
//!   and CSV-emitting runners for the standard figures.

pub mod analysis;
pub mod channel;
pub mod config;
pub mod error;
pub mod experiments;
pub mod model;
pub mod montecarlo;
pub mod rules;

pub use error::{Error, Result};
pub use model::{
    DecisionVector, Hypothesis, LinkState, Priors, ProbParam, SensorBank, SensorModel,
};
pub use montecarlo::{CalibratedTest, LinkModel, Scenario, ScenarioSpec};
pub use rules::{RuleContext, RuleId};
