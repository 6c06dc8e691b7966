//! Closed-form recursive phase recovery for real signals whose non-DC Fourier
//! coefficients all have unit modulus.
//!
//! With `x̂[1] = 1` fixed and `x̂[0]` known, the bispectrum entry
//! `M_3[k, N-1] = x̂[k]·conj(x̂[1])·conj(x̂[k-1])` yields `x̂[k]` from
//! `x̂[k-1]` for `k = 2, …, N-1`. The trispectrum path reads
//! `M_4[k, N-1, 0] = x̂[k]·conj(x̂[1])·conj(x̂[k-1])·x̂[0]`: pinning the third
//! index to 0 makes the extra factor the known DC coefficient, which must
//! therefore be non-zero.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{HosError, Result};
use crate::spectra::{flat_index, idft, FourierVector, HighOrderSpectrum, Signal};

/// Relative tolerance on the unit-modulus check of consumed entries.
pub const MODULUS_TOL: f64 = 1e-8;
/// Largest tolerated conjugate-symmetry defect of the recovered DFT.
pub const SYMMETRY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseRecoveryInput {
    pub n: usize,
    pub q: usize,
    /// The known DC coefficient `x̂[0]` (N times the mean).
    pub dc: f64,
    /// Consumed spectrum entries for `k = 2, …, N-1`, in order.
    pub entries: Vec<Complex64>,
}

/// Flat spectrum indices consumed by the recursion, for `k = 2, …, N-1`.
pub fn consumed_indices(n: usize, q: usize) -> Result<Vec<usize>> {
    let pin: fn(usize, usize) -> Vec<usize> = match q {
        3 => |k, n| vec![k, n - 1],
        4 => |k, n| vec![k, n - 1, 0],
        _ => return Err(HosError::InvalidConfig(format!("recursive recovery supports q = 3 or 4, got {q}"))),
    };
    Ok((2..n).map(|k| flat_index(n, &pin(k, n))).collect())
}

impl PhaseRecoveryInput {
    /// Picks the consumed entries out of a full spectrum.
    pub fn from_spectrum(m: &HighOrderSpectrum, dc: f64) -> Result<Self> {
        let idx = consumed_indices(m.n(), m.q())?;
        Ok(Self { n: m.n(), q: m.q(), dc, entries: idx.iter().map(|&i| m.entries()[i]).collect() })
    }
}

/// Recovers the real signal, up to circular shift, from its consumed spectrum
/// entries and DC coefficient.
pub fn recursive_recover(inp: &PhaseRecoveryInput) -> Result<Signal> {
    let n = inp.n;
    if n == 0 {
        return Err(HosError::EmptySignal);
    }
    if inp.q != 3 && inp.q != 4 {
        return Err(HosError::InvalidConfig(format!("recursive recovery supports q = 3 or 4, got {}", inp.q)));
    }
    if inp.entries.len() != n.saturating_sub(2) {
        return Err(HosError::ShapeMismatch(format!(
            "expected {} spectrum entries for N = {n}, got {}",
            n.saturating_sub(2),
            inp.entries.len()
        )));
    }
    if !inp.dc.is_finite() {
        return Err(HosError::AssumptionViolated("DC coefficient is not finite".into()));
    }
    let dc = Complex64::new(inp.dc, 0.0);
    // Modulus every consumed entry must have, and the factor to divide out.
    let (modulus, extra) = match inp.q {
        3 => (1.0, Complex64::new(1.0, 0.0)),
        _ => {
            if inp.dc == 0.0 {
                return Err(HosError::AssumptionViolated(
                    "trispectrum recursion needs a non-zero DC coefficient".into(),
                ));
            }
            (inp.dc.abs(), dc)
        }
    };

    let mut xhat = vec![Complex64::new(0.0, 0.0); n];
    xhat[0] = dc;
    if n > 1 {
        xhat[1] = Complex64::new(1.0, 0.0);
    }
    for k in 2..n {
        let e = inp.entries[k - 2];
        let deviation = (e.norm() - modulus).abs();
        if deviation.is_nan() || deviation > MODULUS_TOL * modulus {
            return Err(HosError::AssumptionViolated(format!(
                "entry for k = {k} has modulus {} instead of {modulus}",
                e.norm()
            )));
        }
        // Unit modulus turns the conjugates into inverses.
        xhat[k] = e / extra * xhat[1] * xhat[k - 1];
    }

    let fourier = FourierVector::new(xhat);
    let defect =
        (0..n).map(|k| (fourier.coeffs()[k] - fourier.coeffs()[(n - k) % n].conj()).norm()).fold(0.0, f64::max);
    if defect > SYMMETRY_TOL {
        return Err(HosError::InconsistentInput(format!(
            "recovered coefficients break conjugate symmetry by {defect:.3e}"
        )));
    }
    let symmetric: Vec<Complex64> =
        (0..n).map(|k| 0.5 * (fourier.coeffs()[k] + fourier.coeffs()[(n - k) % n].conj())).collect();
    let x: Vec<f64> = idft(&FourierVector::new(symmetric)).iter().map(|v| v.re).collect();
    Signal::real(&x)
}

/// A real signal with `x̂[0] = dc`, `x̂[1] = 1` and random unit-modulus
/// coefficients elsewhere, conjugate symmetric. For even N the Nyquist
/// coefficient is a random sign.
pub fn unit_modulus_signal(n: usize, dc: f64, rng: &mut ChaCha8Rng) -> Result<Signal> {
    if n == 0 {
        return Err(HosError::EmptySignal);
    }
    let mut xhat = vec![Complex64::new(0.0, 0.0); n];
    xhat[0] = Complex64::new(dc, 0.0);
    if n > 1 {
        xhat[1] = Complex64::new(1.0, 0.0);
        xhat[n - 1] = Complex64::new(1.0, 0.0);
    }
    for k in 2..n.div_ceil(2) {
        let theta = rng.random_range(0.0..2.0 * PI);
        xhat[k] = Complex64::from_polar(1.0, theta);
        xhat[n - k] = xhat[k].conj();
    }
    if n.is_multiple_of(2) && n >= 4 {
        xhat[n / 2] = Complex64::new(if rng.random::<bool>() { 1.0 } else { -1.0 }, 0.0);
    }
    let x: Vec<f64> = idft(&FourierVector::new(xhat)).iter().map(|v| v.re).collect();
    Signal::real(&x)
}
