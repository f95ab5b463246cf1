//! Hierarchical Bayesian evidence inference from posterior samples.
//!
//! The pipeline approximates a normalized posterior with a Dirichlet-process
//! Gaussian mixture, converts each posterior sample into a distribution of
//! per-sample evidence estimates, and combines those distributions
//! hierarchically into a posterior density for the log evidence. Harmonic-mean
//! baselines, Bayes-factor posteriors, analytic testbeds, a nested-sampling
//! oracle, and a PP-plot calibration harness round out the toolkit.

pub mod dpgmm;
pub mod error;
pub mod evidence;
pub mod hdpgmm;
pub mod io;
pub mod parallel;
pub mod prob;
pub mod quad;
pub mod rng;
pub mod testbeds;

pub use error::{Error, Result};
pub use rng::RngHandle;
