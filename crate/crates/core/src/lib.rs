//! Finite-sample generalization-error bounds for time-series forecasting.
//!
//! The crate computes probabilistic upper bounds on the one-step prediction
//! risk of forecasting models fitted to a single dependent sample: the
//! in-sample training error plus a truncation penalty for growing-memory
//! predictors plus a confidence penalty balancing model capacity against
//! the effective sample size that beta-mixing leaves.
//!
//! Modules map onto the pipeline:
//!
//! - [`series`], [`loss`], [`risk`]: the sample, losses, and training error;
//! - [`mixing`]: beta-mixing profiles, independent blocking, plan selection;
//! - [`capacity`]: VC-dimension catalog and growth-function bound;
//! - [`lambert`], [`bounds`]: the bound engine;
//! - [`statespace`]: Kalman filtering, prediction weights, truncation
//!   penalties, simulation;
//! - [`forecasters`]: least-squares mean/AR/VAR baselines;
//! - [`volatility`]: the linearized stochastic-volatility pipeline;
//! - [`econ`]: macro data preparation and penalized likelihood estimation;
//! - [`srm`]: bound-based model selection;
//! - [`harness`]: Monte-Carlo risk oracles and coverage experiments.
//!
//! The crate is `no_std`-compatible (with `alloc`); disable the default
//! `std` feature for embedded use. File formats and the command-line
//! surface live in the companion CLI crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod bounds;
pub mod capacity;
pub mod econ;
pub mod error;
pub mod forecasters;
pub mod harness;
pub mod lambert;
pub mod linalg;
pub mod loss;
pub mod mixing;
pub mod optim;
pub mod risk;
pub mod series;
pub mod srm;
pub mod statespace;
pub mod volatility;

pub use bounds::{
    risk_bound, risk_penalty, BoundInputs, BoundReport, Penalty, PenaltyVariant,
};
pub use capacity::{vc_dimension, ModelClass, VcDim};
pub use error::Error;
pub use loss::{LossKind, LossSpec};
pub use mixing::{choose_blocks, BlockingPlan, MixingProfile};
pub use risk::{training_error, Forecaster};
pub use series::TimeSeries;
pub use statespace::StateSpaceModel;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
