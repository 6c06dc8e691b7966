//! Orbit-aware relative errors and the success test.

use serde::{Deserialize, Serialize};

use crate::error::{HosError, Result};

/// Success threshold on the aligned relative error.
pub const DEFAULT_SUCCESS_THRESHOLD: f64 = 5e-5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuccessCriterion {
    pub threshold: f64,
}

impl Default for SuccessCriterion {
    fn default() -> Self {
        Self { threshold: DEFAULT_SUCCESS_THRESHOLD }
    }
}

impl SuccessCriterion {
    pub fn new(threshold: f64) -> Result<Self> {
        if !(threshold > 0.0 && threshold.is_finite()) {
            return Err(HosError::InvalidConfig(format!("success threshold {threshold} must be positive")));
        }
        Ok(Self { threshold })
    }
}

/// `err < threshold`, strictly.
pub fn is_success(err: f64, criterion: &SuccessCriterion) -> bool {
    err < criterion.threshold
}

/// `min_s ‖R_s·estimate - truth‖ / ‖truth‖` over all N circular shifts.
pub fn bispectrum_relative_error(estimate: &[f64], truth: &[f64]) -> Result<f64> {
    aligned_error(estimate, truth, &[1.0])
}

/// As [`bispectrum_relative_error`], also minimizing over the sign `z = ±1`.
pub fn trispectrum_relative_error(estimate: &[f64], truth: &[f64]) -> Result<f64> {
    aligned_error(estimate, truth, &[1.0, -1.0])
}

/// The error matching a spectrum order: sign flips are part of the real
/// symmetry group only when q is even.
pub fn relative_error_for_order(q: usize, estimate: &[f64], truth: &[f64]) -> Result<f64> {
    if q.is_multiple_of(2) {
        trispectrum_relative_error(estimate, truth)
    } else {
        bispectrum_relative_error(estimate, truth)
    }
}

fn aligned_error(estimate: &[f64], truth: &[f64], signs: &[f64]) -> Result<f64> {
    let n = truth.len();
    if estimate.len() != n {
        return Err(HosError::ShapeMismatch(format!(
            "estimate of length {} compared with truth of length {n}",
            estimate.len()
        )));
    }
    let truth_norm = truth.iter().map(|v| v * v).sum::<f64>().sqrt();
    if truth_norm == 0.0 {
        return Err(HosError::ZeroTruthSignal);
    }
    let mut best = f64::INFINITY;
    for s in 0..n {
        for &z in signs {
            // (R_s e)[i] = e[i - s]
            let dist: f64 = (0..n)
                .map(|i| {
                    let d = z * estimate[(i + n - s) % n] - truth[i];
                    d * d
                })
                .sum();
            best = best.min(dist);
        }
    }
    Ok(best.sqrt() / truth_norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::circular_shift;

    const TRUTH: [f64; 9] = [0.5, -1.2, 2.0, 0.3, -0.7, 1.1, 0.0, -2.2, 0.9];

    #[test]
    fn shifted_truth_has_zero_error() {
        let est = circular_shift(&TRUTH, 7);
        assert_eq!(bispectrum_relative_error(&est, &TRUTH).unwrap(), 0.0);
    }

    #[test]
    fn small_perturbation_is_measured_exactly() {
        let mut est = TRUTH;
        est[0] += 1e-6;
        let norm = TRUTH.iter().map(|v| v * v).sum::<f64>().sqrt();
        let err = bispectrum_relative_error(&est, &TRUTH).unwrap();
        assert!((err - 1e-6 / norm).abs() < 1e-15);
    }

    #[test]
    fn negated_shift_is_zero_only_with_sign_flips() {
        let est: Vec<f64> = circular_shift(&TRUTH, 3).iter().map(|v| -v).collect();
        assert_eq!(trispectrum_relative_error(&est, &TRUTH).unwrap(), 0.0);
        assert!(bispectrum_relative_error(&est, &TRUTH).unwrap() > 0.1);
        assert_eq!(trispectrum_relative_error(&TRUTH, &TRUTH).unwrap(), 0.0);
        assert_eq!(relative_error_for_order(4, &est, &TRUTH).unwrap(), 0.0);
    }

    #[test]
    fn zero_truth_is_an_error() {
        assert!(matches!(bispectrum_relative_error(&[1.0, 2.0], &[0.0, 0.0]), Err(HosError::ZeroTruthSignal)));
        assert!(matches!(bispectrum_relative_error(&[1.0], &[1.0, 2.0]), Err(HosError::ShapeMismatch(_))));
    }

    #[test]
    fn success_is_strict() {
        let c = SuccessCriterion::default();
        assert!(is_success(0.0, &c));
        assert!(!is_success(5e-5, &c));
        assert!(is_success(4.9e-5, &c));
        assert!(SuccessCriterion::new(0.0).is_err());
    }
}
