//! Success-rate sweeps: plant a Gaussian signal, measure its spectrum through
//! a random operator, invert with the multi-start solver, and count the
//! trials whose aligned error falls below the threshold.

mod config;
mod output;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alignment::{is_success, relative_error_for_order, SuccessCriterion, DEFAULT_SUCCESS_THRESHOLD};
use crate::error::{HosError, Result};
use crate::seeding::{derive_seed, gaussian_vec, rng_from_seed};
use crate::sensing::{build_operator, OperatorKind};
use crate::solver::{solve, SolverConfig};
use crate::spectra::{spectrum_len, Signal, SpectrumMap, DEFAULT_DIMENSION_CAP};

pub use config::{parse_k_list, SweepFile};
pub use output::{
    emit_outputs, read_summary, render_svg, write_records_csv, Environment, OutputPaths, SeedInfo, Summary, CSV_COLUMNS,
};

/// Desk-scale default; full-fidelity runs use 1000.
pub const DEFAULT_TRIALS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Experiment {
    /// Dense Gaussian sensing matrix.
    #[serde(rename = "random")]
    RandomLinear,
    /// Rows are spectra of Gaussian signals.
    #[serde(rename = "spectra-rows")]
    SpectraRows,
    /// Uniformly random spectrum samples.
    #[serde(rename = "samples")]
    RandomSamples,
}

impl Experiment {
    pub const ALL: [Experiment; 3] = [Experiment::RandomLinear, Experiment::SpectraRows, Experiment::RandomSamples];

    pub fn operator_kind(self) -> OperatorKind {
        match self {
            Experiment::RandomLinear => OperatorKind::DenseRandom,
            Experiment::SpectraRows => OperatorKind::SpectraRows,
            Experiment::RandomSamples => OperatorKind::SamplingMask,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Experiment::RandomLinear => "random",
            Experiment::SpectraRows => "spectra-rows",
            Experiment::RandomSamples => "samples",
        }
    }

    /// Label mixed into per-trial seeds.
    fn seed_label(self) -> u64 {
        match self {
            Experiment::RandomLinear => 1,
            Experiment::SpectraRows => 2,
            Experiment::RandomSamples => 3,
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = HosError;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| HosError::InvalidConfig(format!("unknown experiment {s:?} (random, spectra-rows, samples)")))
    }
}

/// Default signal length for a spectrum order: 30 for the bispectrum, 10 for
/// the trispectrum.
pub fn default_length(q: usize) -> usize {
    if q == 3 {
        30
    } else {
        10
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub experiment: Experiment,
    pub q: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "K")]
    pub ks: Vec<usize>,
    pub trials: usize,
    pub solver: SolverConfig,
    pub base_seed: u64,
    pub threshold: f64,
    /// Run trials on the rayon pool. Records are identical either way.
    pub parallel: bool,
}

impl ExperimentSpec {
    pub fn new(experiment: Experiment, q: usize, ks: Vec<usize>) -> Self {
        Self {
            experiment,
            q,
            n: default_length(q),
            ks,
            trials: DEFAULT_TRIALS,
            solver: SolverConfig::default(),
            base_seed: 0,
            threshold: DEFAULT_SUCCESS_THRESHOLD,
            parallel: true,
        }
    }

    pub fn spectrum_len(&self) -> Result<usize> {
        spectrum_len(self.n, self.q, DEFAULT_DIMENSION_CAP)
    }

    pub fn validate(&self) -> Result<()> {
        if self.q != 3 && self.q != 4 {
            return Err(HosError::InvalidConfig(format!("experiments use q = 3 or 4, got {}", self.q)));
        }
        let r = self.spectrum_len()?;
        if self.ks.is_empty() {
            return Err(HosError::InvalidConfig("K list is empty".into()));
        }
        if let Some(&bad) = self.ks.iter().find(|&&k| k == 0) {
            return Err(HosError::InvalidConfig(format!("K = {bad} must be positive")));
        }
        if self.experiment == Experiment::RandomSamples {
            if let Some(&k) = self.ks.iter().find(|&&k| k > r) {
                return Err(HosError::TooManySamples { k, r });
            }
        }
        if self.trials == 0 {
            return Err(HosError::InvalidConfig("trials must be at least 1".into()));
        }
        SuccessCriterion::new(self.threshold)?;
        self.solver.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialSeeds {
    pub signal: u64,
    pub operator: u64,
    pub solver: u64,
}

/// Per-trial seeds: `derive_seed(base, [experiment, K, trial, role])` with
/// role 0 for the signal, 1 for the operator and 2 for the solver starts.
pub fn trial_seeds(base: u64, experiment: Experiment, k: usize, trial: usize) -> TrialSeeds {
    let seed = |role| derive_seed(base, &[experiment.seed_label(), k as u64, trial as u64, role]);
    TrialSeeds { signal: seed(0), operator: seed(1), solver: seed(2) }
}

/// One recovery attempt. Field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub experiment: Experiment,
    pub q: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub trial: usize,
    pub seed_signal: u64,
    pub seed_operator: u64,
    pub seed_solver: u64,
    pub objective: f64,
    pub error: f64,
    pub success: bool,
    pub ms: f64,
    /// Why the trial could not run to completion.
    #[serde(skip)]
    pub failure: Option<String>,
}

impl TrialRecord {
    /// Equality on everything except wall time; floats compared bitwise.
    pub fn same_outcome(&self, other: &TrialRecord) -> bool {
        self.experiment == other.experiment
            && self.q == other.q
            && self.n == other.n
            && self.k == other.k
            && self.trial == other.trial
            && self.seed_signal == other.seed_signal
            && self.seed_operator == other.seed_operator
            && self.seed_solver == other.seed_solver
            && self.objective.to_bits() == other.objective.to_bits()
            && self.error.to_bits() == other.error.to_bits()
            && self.success == other.success
            && self.failure == other.failure
    }
}

/// Runs trial `trial` of the sweep point `k`.
pub fn run_trial(spec: &ExperimentSpec, k: usize, trial: usize) -> TrialRecord {
    let seeds = trial_seeds(spec.base_seed, spec.experiment, k, trial);
    let start = Instant::now();
    let outcome = attempt(spec, k, seeds);
    let ms = start.elapsed().as_secs_f64() * 1e3;
    let (objective, error, failure) = match outcome {
        Ok((objective, error)) => (objective, error, None),
        Err(e) => (f64::NAN, f64::NAN, Some(e.to_string())),
    };
    let success = failure.is_none() && is_success(error, &SuccessCriterion { threshold: spec.threshold });
    TrialRecord {
        experiment: spec.experiment,
        q: spec.q,
        n: spec.n,
        k,
        trial,
        seed_signal: seeds.signal,
        seed_operator: seeds.operator,
        seed_solver: seeds.solver,
        objective,
        error,
        success,
        ms,
        failure,
    }
}

fn attempt(spec: &ExperimentSpec, k: usize, seeds: TrialSeeds) -> Result<(f64, f64)> {
    let truth = gaussian_vec(&mut rng_from_seed(seeds.signal), spec.n, 1.0);
    let op = build_operator(spec.experiment.operator_kind(), k, spec.n, spec.q, seeds.operator)?;
    let m = SpectrumMap::new(spec.n, spec.q)?.spectrum(&Signal::real(&truth)?);
    let y = op.apply(&m)?;
    let cfg = SolverConfig { seed: seeds.solver, ..spec.solver };
    let result = solve(&op, &y.values, spec.n, spec.q, &cfg)?;
    let error = relative_error_for_order(spec.q, &result.estimate.real_values(), &truth)?;
    Ok((result.objective, error))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    #[serde(rename = "K")]
    pub k: usize,
    pub trials: usize,
    pub successes: usize,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// One point per distinct K, sorted by K.
    pub table: Vec<SweepPoint>,
    /// Sorted by (K, trial).
    pub records: Vec<TrialRecord>,
}

impl SweepResult {
    pub fn rate(&self, k: usize) -> Option<f64> {
        self.table.iter().find(|p| p.k == k).map(|p| p.rate)
    }
}

/// Success-rate table from trial records, sorted by K.
pub fn tabulate(records: &[TrialRecord]) -> Vec<SweepPoint> {
    let mut ks: Vec<usize> = records.iter().map(|r| r.k).collect();
    ks.sort_unstable();
    ks.dedup();
    ks.into_iter()
        .map(|k| {
            let at_k = records.iter().filter(|r| r.k == k);
            let (trials, successes) = at_k.fold((0, 0), |(t, s), r| (t + 1, s + usize::from(r.success)));
            SweepPoint { k, trials, successes, rate: successes as f64 / trials as f64 }
        })
        .collect()
}

/// Runs every trial of every K in `spec`.
pub fn run_sweep(spec: &ExperimentSpec) -> Result<SweepResult> {
    spec.validate()?;
    let mut ks = spec.ks.clone();
    ks.sort_unstable();
    ks.dedup();
    let jobs: Vec<(usize, usize)> = ks.iter().flat_map(|&k| (0..spec.trials).map(move |t| (k, t))).collect();
    let mut records: Vec<TrialRecord> = if spec.parallel {
        jobs.par_iter().map(|&(k, t)| run_trial(spec, k, t)).collect()
    } else {
        jobs.iter().map(|&(k, t)| run_trial(spec, k, t)).collect()
    };
    records.sort_by_key(|r| (r.k, r.trial));
    Ok(SweepResult { table: tabulate(&records), records })
}
