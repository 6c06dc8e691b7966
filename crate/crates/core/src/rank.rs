//! Numerical rank of the compressed spectrum Jacobian.
//!
//! At a generic real x, full column rank N of the Jacobian of
//! `x ↦ A·M_q(x)` means the map is locally injective up to the finite
//! symmetry group. The probe checks this for random Gaussian operators.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{HosError, Result};
use crate::seeding::{derive_seed, gaussian_vec, rng_from_seed};
use crate::sensing::{build_operator, MeasurementOperator, OperatorKind};
use crate::spectra::{Signal, SpectrumMap};

pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// Signals with norm at or below this are treated as non-generic.
pub const GENERIC_NORM_FLOOR: f64 = 1e-8;

/// Singular values in decreasing order.
pub fn singular_values(m: &DMatrix<Complex64>) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Number of singular values with `σ_i ≥ rel_tol·σ_1`; 0 for a zero matrix.
pub fn numerical_rank(m: &DMatrix<Complex64>, rel_tol: f64) -> usize {
    let sv = singular_values(m);
    match sv.first() {
        Some(&top) if top > 0.0 => sv.iter().filter(|&&s| s >= rel_tol * top).count(),
        _ => 0,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankTrial {
    pub trial: usize,
    pub signal_seed: u64,
    pub operator_seed: u64,
    pub signal_norm: f64,
    pub rank: usize,
    /// Whether the trial counts toward the generic statistic.
    pub generic: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankReport {
    #[serde(rename = "N")]
    pub n: usize,
    pub q: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub kind: OperatorKind,
    pub rel_tol: f64,
    pub trials: Vec<RankTrial>,
    /// Minimum rank over generic trials.
    pub min_rank: Option<usize>,
    /// Whether K ≥ N + 1, the regime where full rank is expected.
    pub full_rank_expected: bool,
    /// Every generic trial reached rank N.
    pub pass: bool,
}

/// Rank of `A·J(x)` at one point.
pub fn compressed_jacobian_rank(x: &[f64], op: &MeasurementOperator, rel_tol: f64) -> Result<usize> {
    let map = SpectrumMap::new(op.n(), op.q())?;
    if x.len() != op.n() {
        return Err(HosError::ShapeMismatch(format!("signal of length {} for N = {}", x.len(), op.n())));
    }
    let jac = op.compose_jacobian(&map.jacobian(&Signal::real(x)?))?;
    Ok(numerical_rank(&jac, rel_tol))
}

/// Collects trials into a report.
pub fn summarize(n: usize, q: usize, k: usize, kind: OperatorKind, rel_tol: f64, trials: Vec<RankTrial>) -> RankReport {
    let min_rank = trials.iter().filter(|t| t.generic).map(|t| t.rank).min();
    RankReport { n, q, k, kind, rel_tol, min_rank, full_rank_expected: k > n, pass: min_rank == Some(n), trials }
}

/// Configuration of a rank probe run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankProbe {
    #[serde(rename = "N")]
    pub n: usize,
    pub q: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub trials: usize,
    pub seed: u64,
    pub rel_tol: f64,
    pub kind: OperatorKind,
}

impl RankProbe {
    pub fn new(n: usize, q: usize, k: usize, trials: usize, seed: u64) -> Self {
        Self { n, q, k, trials, seed, rel_tol: DEFAULT_RANK_TOL, kind: OperatorKind::DenseRandom }
    }

    /// Runs every trial: a standard normal x, a fresh operator, and the rank
    /// of the compressed Jacobian at x.
    pub fn run(&self) -> Result<RankReport> {
        if self.k == 0 {
            return Err(HosError::NoRows);
        }
        let mut trials = Vec::with_capacity(self.trials);
        for trial in 0..self.trials {
            let signal_seed = derive_seed(self.seed, &[trial as u64, 0]);
            let operator_seed = derive_seed(self.seed, &[trial as u64, 1]);
            let x = gaussian_vec(&mut rng_from_seed(signal_seed), self.n, 1.0);
            let op = build_operator(self.kind, self.k, self.n, self.q, operator_seed)?;
            trials.push(self.trial_at(trial, signal_seed, operator_seed, &x, &op)?);
        }
        Ok(summarize(self.n, self.q, self.k, self.kind, self.rel_tol, trials))
    }

    /// One trial at a caller-chosen point and operator.
    pub fn trial_at(
        &self,
        trial: usize,
        signal_seed: u64,
        operator_seed: u64,
        x: &[f64],
        op: &MeasurementOperator,
    ) -> Result<RankTrial> {
        let signal_norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let rank = compressed_jacobian_rank(x, op, self.rel_tol)?;
        Ok(RankTrial {
            trial,
            signal_seed,
            operator_seed,
            signal_norm,
            rank,
            generic: signal_norm > GENERIC_NORM_FLOOR,
        })
    }
}

/// Probe with a dense Gaussian operator at the default tolerance.
pub fn probe_injectivity_rank(n: usize, q: usize, k: usize, trials: usize, seed: u64) -> Result<RankReport> {
    RankProbe::new(n, q, k, trials, seed).run()
}
