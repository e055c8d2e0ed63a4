//! Random ReLU feature regression with noisy covariates.
//!
//! This crate implements the full experimental pipeline for studying
//! minimum-norm least-squares interpolation on two-layer random ReLU
//! features when the training covariates carry additive measurement noise:
//!
//! - [`numlin`]: dense matrices, thin SVD, symmetric eigensolver, truncated
//!   pseudoinverse. Deterministic, generic over `f32`/`f64`.
//! - [`synth`]: covariance spectra, covariate/noise/label synthesis, and the
//!   dimension schedules that tie feature count and ambient dimension to the
//!   sample size.
//! - [`relu_features`]: the frozen random first layer and ReLU feature maps.
//! - [`interpolator`]: the minimum-norm least-squares fit through one SVD.
//! - [`risk`]: exact bias/variance decomposition of the excess test risk and
//!   the matching Monte Carlo estimators.
//! - [`spectral`]: effective-dimension index, convergence-regime
//!   classification, and reference bound curves.
//! - [`conc_lab`]: empirical checks of the concentration inequalities the
//!   theory leans on, with constants fitted on one batch and validated on a
//!   fresh one.
//!
//! All computation is written against the [`numlin::Real`] scalar trait; the
//! aliases below pin the production `f64` instantiation.

pub mod conc_lab;
pub mod interpolator;
pub mod numlin;
pub mod relu_features;
pub mod risk;
pub mod spectral;
pub mod synth;

pub use numlin::{Real, RealMatrix};

/// Production matrix type.
pub type Mat = numlin::RealMatrix<f64>;
/// Production SVD result.
pub type Svd = numlin::SvdResult<f64>;
/// Production symmetric eigendecomposition result.
pub type SymEig = numlin::SymEigResult<f64>;
