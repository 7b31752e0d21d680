//! Laser prognostics and health management.
//!
//! The crate covers the whole diagnostics-to-prognostics chain for a laser
//! monitored through its operating current:
//!
//! * [`sim`] synthesizes run-to-failure current traces from an exponential
//!   non-radiative-current degradation model.
//! * [`preprocess`] smooths, resamples and normalizes traces into fixed
//!   100-step feature windows and ranks features by correlation.
//! * [`nn`] is a small double-precision LSTM engine with exact
//!   backpropagation through time, Adam and a finite-difference checker.
//! * [`models`] holds the fault detector, the two RUL regressors and the
//!   piecewise RUL labeling rule.
//! * [`eval`] computes confusion matrices, accuracy, RMSE and trajectory
//!   dumps.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod eval;
pub mod models;
pub mod nn;
pub mod preprocess;
pub mod rng;
pub mod sim;

pub use error::{Error, Result};
pub use eval::{ConfusionMatrix, EvalReport};
pub use models::{FaultDetectorModel, RulLabelSpec, RulPredictorModel, TrainConfig};
pub use nn::LstmNetwork;
pub use preprocess::{FeatureWindow, SgFilterSpec, WINDOW_LEN};
pub use sim::{
    DegradationMode, DegradationParams, DegradationScenario, ModeCounts, OperatingConditions,
    RunToFailureSequence,
};
