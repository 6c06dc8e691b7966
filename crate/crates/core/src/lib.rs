//! High-order spectra of finite signals and recovery of a signal, up to its
//! symmetry orbit, from a few linear measurements of those spectra.
//!
//! - [`spectra`]: DFT, the order-q spectrum `M_q`, its Jacobian and the
//!   shift × root-of-unity group action.
//! - [`sensing`]: dense Gaussian, spectra-row and sampling-mask operators.
//! - [`solver`]: multi-start steepest descent on `‖y - A·M_q(x)‖²`.
//! - [`alignment`]: shift- and sign-aligned relative errors.
//! - [`analytic`]: closed-form recursive phase recovery for unit-modulus
//!   spectra.
//! - [`rank`]: numerical rank probes of the compressed Jacobian.
//! - [`experiments`]: the success-rate sweep harness and its outputs.

pub mod alignment;
pub mod analytic;
pub mod error;
pub mod experiments;
pub mod rank;
pub mod seeding;
pub mod sensing;
pub mod solver;
pub mod spectra;

pub use error::{HosError, Result};
