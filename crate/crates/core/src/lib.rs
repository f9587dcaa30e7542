//! Quantum timing jitter of optical-fiber solitons.
//!
//! The crate integrates the Raman-modified stochastic nonlinear Schrödinger
//! equation in the truncated Wigner representation and compares ensemble
//! statistics with closed-form soliton perturbation theory.
//!
//! Module map:
//! - [`grid`]: uniform time lattice, spectral transforms, field container.
//! - [`physics`]: fiber scales, Raman gain/fluorescence and response kernels.
//! - [`noise`]: vacuum, amplifier and Raman noise synthesis.
//! - [`integrator`]: split-step stochastic propagation.
//! - [`solitons`]: analytic solitons, projections and jitter predictions.
//! - [`analysis`]: homodyne position measurement and ensemble statistics.
//! - [`cli`]: experiment configuration, orchestration and file output.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod error;
pub mod grid;
pub mod integrator;
pub mod noise;
pub mod physics;
pub mod solitons;

pub use error::{Error, Result};
pub use num_complex::Complex64;
