//! Linear measurement operators acting on flattened high-order spectra.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::error::{HosError, Result};
use crate::seeding::{gaussian_vec, rng_from_seed};
use crate::spectra::{spectrum_len, HighOrderSpectrum, Signal, SpectrumMap, DEFAULT_DIMENSION_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OperatorKind {
    /// Real i.i.d. standard normal entries.
    DenseRandom,
    /// Each row is the spectrum of a real standard normal generator signal.
    SpectraRows,
    /// K distinct spectrum entries chosen uniformly at random.
    SamplingMask,
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            OperatorKind::DenseRandom => "DenseRandom",
            OperatorKind::SpectraRows => "SpectraRows",
            OperatorKind::SamplingMask => "SamplingMask",
        };
        f.write_str(name)
    }
}

impl FromStr for OperatorKind {
    type Err = HosError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "DenseRandom" | "dense-random" | "random" => Ok(OperatorKind::DenseRandom),
            "SpectraRows" | "spectra-rows" => Ok(OperatorKind::SpectraRows),
            "SamplingMask" | "sampling-mask" | "samples" => Ok(OperatorKind::SamplingMask),
            other => Err(HosError::InvalidConfig(format!("unknown operator kind {other:?}"))),
        }
    }
}

/// The serializable identity of an operator. The payload is regenerated from
/// the seed and never stored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorDescriptor {
    pub kind: OperatorKind,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub q: usize,
    pub seed: u64,
}

impl OperatorDescriptor {
    pub fn build(&self) -> Result<MeasurementOperator> {
        build_operator(self.kind, self.k, self.n, self.q, self.seed)
    }
}

#[derive(Clone, PartialEq)]
enum Payload {
    /// Row-major K × R.
    Real(Vec<f64>),
    /// Row-major K × R plus the generator signal behind each row.
    Spectra { rows: Vec<Complex64>, generators: Vec<Vec<f64>> },
    /// Sorted distinct flat indices.
    Mask(Vec<usize>),
}

/// A K × N^(q-1) linear map from spectra to measurements.
#[derive(Clone, PartialEq)]
pub struct MeasurementOperator {
    descriptor: OperatorDescriptor,
    cols: usize,
    payload: Payload,
}

impl fmt::Debug for MeasurementOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MeasurementOperator")
            .field("descriptor", &self.descriptor)
            .field("cols", &self.cols)
            .finish_non_exhaustive()
    }
}

/// Measured values `y = A·M_q(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementVector {
    pub values: Vec<Complex64>,
}

impl MeasurementVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Builds an operator; the result is a pure function of the arguments.
pub fn build_operator(kind: OperatorKind, k: usize, n: usize, q: usize, seed: u64) -> Result<MeasurementOperator> {
    let cols = spectrum_len(n, q, DEFAULT_DIMENSION_CAP)?;
    if k == 0 {
        return Err(HosError::NoRows);
    }
    let mut rng = rng_from_seed(seed);
    let payload = match kind {
        OperatorKind::DenseRandom => Payload::Real(gaussian_vec(&mut rng, k * cols, 1.0)),
        OperatorKind::SpectraRows => {
            let map = SpectrumMap::new(n, q)?;
            let mut rows = Vec::with_capacity(k * cols);
            let mut generators = Vec::with_capacity(k);
            for _ in 0..k {
                let w = gaussian_vec(&mut rng, n, 1.0);
                rows.extend_from_slice(map.spectrum(&Signal::real(&w)?).entries());
                generators.push(w);
            }
            Payload::Spectra { rows, generators }
        }
        OperatorKind::SamplingMask => {
            if k > cols {
                return Err(HosError::TooManySamples { k, r: cols });
            }
            let mut picked = index::sample(&mut rng, cols, k).into_vec();
            picked.sort_unstable();
            Payload::Mask(picked)
        }
    };
    Ok(MeasurementOperator { descriptor: OperatorDescriptor { kind, k, n, q, seed }, cols, payload })
}

impl MeasurementOperator {
    /// Selects the given flat spectrum indices. Indices must be distinct and
    /// below `N^(q-1)`; they are stored sorted.
    pub fn sampling_mask(indices: Vec<usize>, n: usize, q: usize) -> Result<Self> {
        let cols = spectrum_len(n, q, DEFAULT_DIMENSION_CAP)?;
        if indices.is_empty() {
            return Err(HosError::NoRows);
        }
        if indices.len() > cols {
            return Err(HosError::TooManySamples { k: indices.len(), r: cols });
        }
        let mut sorted = indices;
        sorted.sort_unstable();
        if let Some(&bad) = sorted.iter().find(|&&i| i >= cols) {
            return Err(HosError::ShapeMismatch(format!("sample index {bad} outside 0..{cols}")));
        }
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(HosError::InvalidConfig("sample indices must be distinct".into()));
        }
        let k = sorted.len();
        Ok(Self {
            descriptor: OperatorDescriptor { kind: OperatorKind::SamplingMask, k, n, q, seed: 0 },
            cols,
            payload: Payload::Mask(sorted),
        })
    }

    /// Selects every spectrum entry in order.
    pub fn full_sampling(n: usize, q: usize) -> Result<Self> {
        let cols = spectrum_len(n, q, DEFAULT_DIMENSION_CAP)?;
        Self::sampling_mask((0..cols).collect(), n, q)
    }

    pub fn descriptor(&self) -> OperatorDescriptor {
        self.descriptor
    }

    pub fn kind(&self) -> OperatorKind {
        self.descriptor.kind
    }

    pub fn rows(&self) -> usize {
        self.descriptor.k
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn n(&self) -> usize {
        self.descriptor.n
    }

    pub fn q(&self) -> usize {
        self.descriptor.q
    }

    /// Sample indices of a sampling mask.
    pub fn mask_indices(&self) -> Option<&[usize]> {
        match &self.payload {
            Payload::Mask(idx) => Some(idx),
            _ => None,
        }
    }

    /// Generator signals of a spectra-rows operator.
    pub fn generators(&self) -> Option<&[Vec<f64>]> {
        match &self.payload {
            Payload::Spectra { generators, .. } => Some(generators),
            _ => None,
        }
    }

    /// Row `j` as a dense complex vector.
    pub fn row(&self, j: usize) -> Vec<Complex64> {
        assert!(j < self.rows(), "row {j} out of range");
        let r = self.cols;
        match &self.payload {
            Payload::Real(a) => a[j * r..(j + 1) * r].iter().map(|&v| Complex64::new(v, 0.0)).collect(),
            Payload::Spectra { rows, .. } => rows[j * r..(j + 1) * r].to_vec(),
            Payload::Mask(idx) => {
                let mut row = vec![Complex64::new(0.0, 0.0); r];
                row[idx[j]] = Complex64::new(1.0, 0.0);
                row
            }
        }
    }

    fn check_spectrum(&self, m: &HighOrderSpectrum) -> Result<()> {
        if m.n() != self.n() || m.q() != self.q() {
            return Err(HosError::ShapeMismatch(format!(
                "operator for N = {}, q = {} applied to a spectrum with N = {}, q = {}",
                self.n(),
                self.q(),
                m.n(),
                m.q()
            )));
        }
        Ok(())
    }

    pub fn apply(&self, m: &HighOrderSpectrum) -> Result<MeasurementVector> {
        self.check_spectrum(m)?;
        let mut out = vec![Complex64::new(0.0, 0.0); self.rows()];
        self.apply_into(m.entries(), &mut out);
        Ok(MeasurementVector { values: out })
    }

    /// `out = A·m` on raw slices.
    pub fn apply_into(&self, m: &[Complex64], out: &mut [Complex64]) {
        assert_eq!(m.len(), self.cols);
        assert_eq!(out.len(), self.rows());
        let r = self.cols;
        match &self.payload {
            Payload::Real(a) => {
                for (row, o) in a.chunks_exact(r).zip(out.iter_mut()) {
                    let (mut re, mut im) = (0.0, 0.0);
                    for (&w, v) in row.iter().zip(m) {
                        re += w * v.re;
                        im += w * v.im;
                    }
                    *o = Complex64::new(re, im);
                }
            }
            Payload::Spectra { rows, .. } => {
                for (row, o) in rows.chunks_exact(r).zip(out.iter_mut()) {
                    *o = row.iter().zip(m).map(|(w, v)| w * v).sum();
                }
            }
            Payload::Mask(idx) => {
                for (&i, o) in idx.iter().zip(out.iter_mut()) {
                    *o = m[i];
                }
            }
        }
    }

    /// `out = Aᴴ·r` on raw slices.
    pub fn adjoint_into(&self, r: &[Complex64], out: &mut [Complex64]) {
        assert_eq!(r.len(), self.rows());
        assert_eq!(out.len(), self.cols);
        out.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        let cols = self.cols;
        match &self.payload {
            Payload::Real(a) => {
                for (row, rk) in a.chunks_exact(cols).zip(r) {
                    for (o, &w) in out.iter_mut().zip(row) {
                        o.re += w * rk.re;
                        o.im += w * rk.im;
                    }
                }
            }
            Payload::Spectra { rows, .. } => {
                for (row, rk) in rows.chunks_exact(cols).zip(r) {
                    for (o, w) in out.iter_mut().zip(row) {
                        *o += w.conj() * rk;
                    }
                }
            }
            Payload::Mask(idx) => {
                for (&i, rk) in idx.iter().zip(r) {
                    out[i] = *rk;
                }
            }
        }
    }

    /// `A·J` for a spectrum Jacobian `J` (R × N), giving the K × N Jacobian
    /// of `x ↦ A·M_q(x)`.
    pub fn compose_jacobian(&self, jac: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
        if jac.nrows() != self.cols {
            return Err(HosError::ShapeMismatch(format!(
                "operator has {} columns but the Jacobian has {} rows",
                self.cols,
                jac.nrows()
            )));
        }
        let (k, n) = (self.rows(), jac.ncols());
        let mut out = DMatrix::<Complex64>::zeros(k, n);
        match &self.payload {
            Payload::Mask(idx) => {
                for (row, &i) in idx.iter().enumerate() {
                    out.set_row(row, &jac.row(i));
                }
            }
            _ => {
                let mut buf = vec![Complex64::new(0.0, 0.0); k];
                for col in 0..n {
                    let column: Vec<Complex64> = jac.column(col).iter().copied().collect();
                    self.apply_into(&column, &mut buf);
                    for (row, v) in buf.iter().enumerate() {
                        out[(row, col)] = *v;
                    }
                }
            }
        }
        Ok(out)
    }
}

/// `A·M_q(x)` in one call.
pub fn measure(op: &MeasurementOperator, x: &Signal) -> Result<MeasurementVector> {
    if x.len() != op.n() {
        return Err(HosError::ShapeMismatch(format!(
            "signal of length {} measured by an operator for N = {}",
            x.len(),
            op.n()
        )));
    }
    op.apply(&SpectrumMap::new(op.n(), op.q())?.spectrum(x))
}
