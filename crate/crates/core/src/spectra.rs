//! Discrete Fourier transforms, q-th order spectra and their derivatives.
//!
//! The forward DFT is unnormalized with kernel `exp(-2πi nk/N)`. A q-th order
//! spectrum is stored as a flat vector of length `N^(q-1)`: the index tuple
//! `(k_1, …, k_{q-1})` lives at `k_1·N^(q-2) + … + k_{q-1}` (k_1 most
//! significant) and holds `x̂[k_1]·…·x̂[k_{q-1}]·x̂[-(k_1+…+k_{q-1}) mod N]`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{HosError, Result};

/// Largest spectrum length accepted unless a caller raises the cap.
pub const DEFAULT_DIMENSION_CAP: usize = 1 << 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Domain {
    Real,
    Complex,
}

/// A finite signal of length N over the reals or the complex numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    values: Vec<Complex64>,
    domain: Domain,
}

impl Signal {
    pub fn real(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(HosError::EmptySignal);
        }
        Ok(Self { values: values.iter().map(|&v| Complex64::new(v, 0.0)).collect(), domain: Domain::Real })
    }

    pub fn complex(values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(HosError::EmptySignal);
        }
        Ok(Self { values, domain: Domain::Complex })
    }

    /// Builds a signal in the given domain, rejecting real signals with
    /// non-zero imaginary parts.
    pub fn with_domain(values: Vec<Complex64>, domain: Domain) -> Result<Self> {
        if values.is_empty() {
            return Err(HosError::EmptySignal);
        }
        if domain == Domain::Real {
            if let Some(i) = values.iter().position(|v| v.im != 0.0) {
                return Err(HosError::NonRealEntry(i));
            }
        }
        Ok(Self { values, domain })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Real parts of the entries; exact for real-domain signals.
    pub fn real_values(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// DFT coefficients x̂ of a signal.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierVector {
    coeffs: Vec<Complex64>,
}

impl FourierVector {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest `|x̂[l] - conj(x̂[-l])|`, relative to the largest coefficient.
    pub fn conjugate_asymmetry(&self) -> f64 {
        let n = self.coeffs.len();
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        (0..n).map(|l| (self.coeffs[l] - self.coeffs[(n - l) % n].conj()).norm()).fold(0.0, f64::max) / scale
    }
}

/// Forward DFT, `x̂[k] = Σ_n x[n]·exp(-2πi nk/N)`.
pub fn dft(x: &Signal) -> FourierVector {
    let fft = FftPlanner::new().plan_fft_forward(x.len());
    let mut buf = x.values.clone();
    fft.process(&mut buf);
    FourierVector { coeffs: buf }
}

/// Inverse of [`dft`], including the `1/N` factor.
pub fn idft(xhat: &FourierVector) -> Vec<Complex64> {
    let n = xhat.len();
    let fft = FftPlanner::new().plan_fft_inverse(n);
    let mut buf = xhat.coeffs.clone();
    fft.process(&mut buf);
    let scale = 1.0 / n as f64;
    buf.iter_mut().for_each(|v| *v *= scale);
    buf
}

/// A flattened q-th order spectrum `M_q(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HighOrderSpectrum {
    q: usize,
    n: usize,
    entries: Vec<Complex64>,
}

impl HighOrderSpectrum {
    pub fn from_entries(n: usize, q: usize, entries: Vec<Complex64>) -> Result<Self> {
        let expected = spectrum_len(n, q, usize::MAX)?;
        if entries.len() != expected {
            return Err(HosError::ShapeMismatch(format!(
                "spectrum of order {q} for N = {n} has {expected} entries, got {}",
                entries.len()
            )));
        }
        Ok(Self { q, n, entries })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Complex64> {
        self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entry at the index tuple `(k_1, …, k_{q-1})`, each reduced mod N.
    pub fn get(&self, index: &[usize]) -> Option<Complex64> {
        if index.len() + 1 != self.q {
            return None;
        }
        Some(self.entries[flat_index(self.n, index)])
    }
}

/// Flat position of `(k_1, …, k_{q-1})`, indices reduced mod N.
pub fn flat_index(n: usize, index: &[usize]) -> usize {
    index.iter().fold(0, |acc, &k| acc * n + k % n)
}

/// Inverse of [`flat_index`] for a spectrum of order `q`.
pub fn unflatten_index(n: usize, q: usize, mut flat: usize) -> Vec<usize> {
    let mut digits = vec![0; q - 1];
    for d in digits.iter_mut().rev() {
        *d = flat % n;
        flat /= n;
    }
    digits
}

/// `N^(q-1)`, checked against `q >= 3` and the dimension cap.
pub fn spectrum_len(n: usize, q: usize, cap: usize) -> Result<usize> {
    if n == 0 {
        return Err(HosError::EmptySignal);
    }
    if q < 3 {
        return Err(HosError::SpectrumOrderTooLow(q));
    }
    let overflow = HosError::DimensionOverflow { n, exponent: q - 1, cap };
    let exponent = u32::try_from(q - 1).map_err(|_| HosError::DimensionOverflow { n, exponent: q - 1, cap })?;
    match n.checked_pow(exponent) {
        Some(len) if len <= cap => Ok(len),
        _ => Err(overflow),
    }
}

/// Element `(s, l)` of `Z_N × Z_q`: shift by `s` then scale by `exp(2πi l/q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupElement {
    shift: usize,
    scale_index: usize,
    n: usize,
    q: usize,
}

impl GroupElement {
    pub fn new(shift: usize, scale_index: usize, n: usize, q: usize) -> Result<Self> {
        if n == 0 || q == 0 || shift >= n || scale_index >= q {
            return Err(HosError::InvalidGroupElement { shift, scale: scale_index, n, q });
        }
        Ok(Self { shift, scale_index, n, q })
    }

    pub fn identity(n: usize, q: usize) -> Result<Self> {
        Self::new(0, 0, n, q)
    }

    pub fn shift(&self) -> usize {
        self.shift
    }

    pub fn scale_index(&self) -> usize {
        self.scale_index
    }

    /// The root of unity `exp(2πi l/q)`; the real and imaginary axis cases
    /// are exact.
    pub fn scale(&self) -> Complex64 {
        let (l, q) = (self.scale_index, self.q);
        if l == 0 {
            Complex64::new(1.0, 0.0)
        } else if 2 * l == q {
            Complex64::new(-1.0, 0.0)
        } else if 4 * l == q {
            Complex64::new(0.0, 1.0)
        } else if 4 * l == 3 * q {
            Complex64::new(0.0, -1.0)
        } else {
            Complex64::from_polar(1.0, 2.0 * PI * l as f64 / q as f64)
        }
    }

    /// Whether the scale is `±1`, i.e. the action keeps real signals real.
    pub fn is_real(&self) -> bool {
        self.scale_index == 0 || 2 * self.scale_index == self.q
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &GroupElement) -> Result<GroupElement> {
        if self.n != other.n || self.q != other.q {
            return Err(HosError::ShapeMismatch(format!(
                "cannot compose elements of Z_{} x Z_{} and Z_{} x Z_{}",
                self.n, self.q, other.n, other.q
            )));
        }
        GroupElement::new(
            (self.shift + other.shift) % self.n,
            (self.scale_index + other.scale_index) % self.q,
            self.n,
            self.q,
        )
    }
}

/// `output[n] = z·x[(n - s) mod N]`. Real signals acted on by a non-real
/// scale come back complex.
pub fn act(g: &GroupElement, x: &Signal) -> Result<Signal> {
    let n = x.len();
    if g.n != n {
        return Err(HosError::ShapeMismatch(format!(
            "group element for N = {} applied to a signal of length {n}",
            g.n
        )));
    }
    let z = g.scale();
    let values = (0..n).map(|i| z * x.values[(i + n - g.shift) % n]).collect();
    let domain = if x.domain == Domain::Real && g.is_real() { Domain::Real } else { Domain::Complex };
    Ok(Signal { values, domain })
}

/// Circular shift by `s`: `x[n] ↦ x[n - s]`.
pub fn circular_shift(x: &[f64], s: usize) -> Vec<f64> {
    let n = x.len();
    (0..n).map(|i| x[(i + n - s % n) % n]).collect()
}

/// `M_q(x)` with the default dimension cap.
pub fn spectrum(x: &Signal, q: usize) -> Result<HighOrderSpectrum> {
    Ok(SpectrumMap::new(x.len(), q)?.spectrum(x))
}

/// Jacobian of `x ↦ M_q(x)`, an `N^(q-1) × N` matrix. The map is
/// holomorphic, so the same matrix serves as the derivative with respect to
/// the N real entries of a real signal.
pub fn spectrum_jacobian(x: &Signal, q: usize) -> Result<DMatrix<Complex64>> {
    Ok(SpectrumMap::new(x.len(), q)?.jacobian(x))
}

/// Precomputed evaluator for the order-q spectrum of length-N signals.
///
/// Owns the FFT plans so repeated evaluation (the solver's inner loop) does
/// not re-plan.
#[derive(Clone)]
pub struct SpectrumMap {
    n: usize,
    q: usize,
    len: usize,
    forward: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for SpectrumMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectrumMap").field("n", &self.n).field("q", &self.q).field("len", &self.len).finish()
    }
}

impl SpectrumMap {
    pub fn new(n: usize, q: usize) -> Result<Self> {
        Self::with_cap(n, q, DEFAULT_DIMENSION_CAP)
    }

    pub fn with_cap(n: usize, q: usize, cap: usize) -> Result<Self> {
        let len = spectrum_len(n, q, cap)?;
        let forward = FftPlanner::new().plan_fft_forward(n);
        Ok(Self { n, q, len, forward })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// Number of spectrum entries, `N^(q-1)`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn dft_real(&self, x: &[f64]) -> Vec<Complex64> {
        debug_assert_eq!(x.len(), self.n);
        let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward.process(&mut buf);
        buf
    }

    pub fn dft_complex(&self, x: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(x.len(), self.n);
        let mut buf = x.to_vec();
        self.forward.process(&mut buf);
        buf
    }

    pub fn spectrum(&self, x: &Signal) -> HighOrderSpectrum {
        assert_eq!(x.len(), self.n, "signal length does not match the map");
        let xhat = self.dft_complex(&x.values);
        let mut entries = vec![Complex64::new(0.0, 0.0); self.len];
        self.spectrum_from_fourier(&xhat, &mut entries);
        HighOrderSpectrum { q: self.q, n: self.n, entries }
    }

    /// Fills `out` with the spectrum entries built from DFT coefficients.
    pub fn spectrum_from_fourier(&self, xhat: &[Complex64], out: &mut [Complex64]) {
        assert_eq!(xhat.len(), self.n);
        assert_eq!(out.len(), self.len);
        let mut walker = TupleWalker::new(xhat, self.q);
        for slot in out.iter_mut() {
            *slot = walker.head_product() * xhat[walker.closing_index()];
            walker.advance();
        }
    }

    /// `Re(Jᴴ w)` for the spectrum Jacobian J at the signal with DFT `xhat`.
    ///
    /// Contracts `w` against the leave-one-out factor products, then maps the
    /// result back through one forward DFT, so J is never materialized.
    pub fn real_pullback(&self, xhat: &[Complex64], w: &[Complex64]) -> Vec<f64> {
        assert_eq!(xhat.len(), self.n);
        assert_eq!(w.len(), self.len);
        let last = self.q - 1;
        let mut acc = vec![Complex64::new(0.0, 0.0); self.n];
        let mut walker = TupleWalker::new(xhat, self.q);
        for wj in w {
            let cw = wj.conj();
            let closing = walker.closing_index();
            // The closing factor is left out against the full head product.
            acc[closing] += cw * walker.prefix[last];
            let mut suffix = xhat[closing];
            for i in (0..last).rev() {
                let k = walker.digits[i];
                acc[k] += cw * walker.prefix[i] * suffix;
                suffix *= xhat[k];
            }
            walker.advance();
        }
        self.forward.process(&mut acc);
        acc.iter().map(|v| v.re).collect()
    }

    /// Dense `N^(q-1) × N` Jacobian of the spectrum at `x`.
    pub fn jacobian(&self, x: &Signal) -> DMatrix<Complex64> {
        assert_eq!(x.len(), self.n, "signal length does not match the map");
        let n = self.n;
        let xhat = self.dft_complex(&x.values);
        let twiddle: Vec<Complex64> =
            (0..n).map(|m| Complex64::from_polar(1.0, -2.0 * PI * m as f64 / n as f64)).collect();
        let last = self.q - 1;
        let mut jac = DMatrix::<Complex64>::zeros(self.len, n);
        let mut walker = TupleWalker::new(&xhat, self.q);
        let mut coeff = vec![Complex64::new(0.0, 0.0); n];
        for row in 0..self.len {
            coeff.iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
            let closing = walker.closing_index();
            coeff[closing] += walker.prefix[last];
            let mut suffix = xhat[closing];
            for i in (0..last).rev() {
                let k = walker.digits[i];
                coeff[k] += walker.prefix[i] * suffix;
                suffix *= xhat[k];
            }
            for (k, c) in coeff.iter().enumerate() {
                if *c == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for col in 0..n {
                    jac[(row, col)] += c * twiddle[(k * col) % n];
                }
            }
            walker.advance();
        }
        jac
    }
}

/// Walks the index tuples `(k_1, …, k_{q-1})` in flat order, keeping the
/// running prefix products of `x̂[k_i]` and the index sums up to date.
struct TupleWalker<'a> {
    xhat: &'a [Complex64],
    n: usize,
    digits: Vec<usize>,
    /// `prefix[d] = x̂[k_1]·…·x̂[k_d]`, `prefix[0] = 1`.
    prefix: Vec<Complex64>,
    /// `sums[d] = (k_1 + … + k_d) mod N`.
    sums: Vec<usize>,
}

impl<'a> TupleWalker<'a> {
    fn new(xhat: &'a [Complex64], q: usize) -> Self {
        let depth = q - 1;
        let mut walker = Self {
            xhat,
            n: xhat.len(),
            digits: vec![0; depth],
            prefix: vec![Complex64::new(1.0, 0.0); depth + 1],
            sums: vec![0; depth + 1],
        };
        walker.refresh_from(0);
        walker
    }

    fn refresh_from(&mut self, level: usize) {
        for i in level..self.digits.len() {
            let k = self.digits[i];
            self.prefix[i + 1] = self.prefix[i] * self.xhat[k];
            self.sums[i + 1] = (self.sums[i] + k) % self.n;
        }
    }

    fn head_product(&self) -> Complex64 {
        self.prefix[self.digits.len()]
    }

    fn closing_index(&self) -> usize {
        (self.n - self.sums[self.digits.len()]) % self.n
    }

    fn advance(&mut self) {
        let mut level = self.digits.len() - 1;
        loop {
            self.digits[level] += 1;
            if self.digits[level] < self.n {
                break;
            }
            self.digits[level] = 0;
            if level == 0 {
                break;
            }
            level -= 1;
        }
        self.refresh_from(level);
    }
}
