//! Multi-start steepest descent for `min_x ‖y - A·M_q(x)‖²` over real x.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{HosError, Result};
use crate::seeding::{derive_seed, gaussian_vec, rng_from_seed};
use crate::sensing::MeasurementOperator;
use crate::spectra::{Signal, SpectrumMap};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub num_starts: usize,
    /// Iteration cap per start.
    pub max_iters: usize,
    /// Stop when the gradient infinity-norm falls to this value.
    pub grad_tol: f64,
    /// Stop when the objective falls to `objective_tol · ‖y‖²`.
    pub objective_tol: f64,
    /// Trial step of the first line search in each start.
    pub initial_step: f64,
    /// Backtracking factor applied to a rejected step.
    pub shrink: f64,
    /// Armijo sufficient-decrease constant.
    pub armijo: f64,
    /// Each line search after the first opens at the previously accepted step
    /// times this factor.
    pub step_growth: f64,
    /// Rejected steps tolerated in one line search before the start is
    /// declared stalled.
    pub max_backtracks: usize,
    pub step_rule: StepRule,
    /// Stagnation check period in iterations; 0 disables it.
    pub stall_window: usize,
    /// A start stops when one stall window reduces the objective by less
    /// than this fraction.
    pub stall_tol: f64,
    /// Standard deviation of the Gaussian starting points.
    pub init_scale: f64,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            num_starts: 3,
            max_iters: 10_000,
            grad_tol: 1e-9,
            objective_tol: 1e-24,
            initial_step: 1.0,
            shrink: 0.5,
            armijo: 1e-4,
            step_growth: 2.0,
            max_backtracks: 80,
            step_rule: StepRule::BarzilaiBorwein,
            stall_window: 1000,
            stall_tol: 1e-3,
            init_scale: 1.0,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(HosError::InvalidConfig(msg.to_string()));
        if self.num_starts == 0 {
            return bad("num_starts must be at least 1");
        }
        if self.max_backtracks == 0 {
            return bad("max_backtracks must be at least 1");
        }
        let positive = [
            ("grad_tol", self.grad_tol),
            ("objective_tol", self.objective_tol),
            ("initial_step", self.initial_step),
            ("armijo", self.armijo),
            ("init_scale", self.init_scale),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return bad(&format!("{name} must be positive and finite"));
            }
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return bad("shrink must lie in (0, 1)");
        }
        if self.armijo >= 1.0 {
            return bad("armijo must lie in (0, 1)");
        }
        if !(self.stall_tol >= 0.0 && self.stall_tol < 1.0) {
            return bad("stall_tol must lie in [0, 1)");
        }
        if !(self.step_growth >= 1.0 && self.step_growth.is_finite()) {
            return bad("step_growth must be at least 1");
        }
        Ok(())
    }
}

/// How each line search picks its first trial step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepRule {
    /// Previous accepted step times `step_growth`.
    Growth,
    /// `‖s‖² / sᵀ(g_new - g_old)` from the last accepted move, falling back to
    /// `Growth` when the curvature estimate is not positive.
    BarzilaiBorwein,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    GradientTolerance,
    ObjectiveTolerance,
    IterationCap,
    /// No step passed the sufficient-decrease test.
    LineSearchStalled,
    /// The objective barely moved over a whole stall window.
    Stagnated,
    NonFinite,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StartTrace {
    pub seed: u64,
    pub final_objective: f64,
    pub iterations: usize,
    pub converged: bool,
    pub stop: StopReason,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub estimate: Signal,
    pub objective: f64,
    pub starts: Vec<StartTrace>,
    pub best_start: usize,
}

/// The least-squares objective for a fixed operator and measurement vector.
#[derive(Debug, Clone)]
pub struct LeastSquares<'a> {
    op: &'a MeasurementOperator,
    y: &'a [Complex64],
    map: SpectrumMap,
}

/// Residual `A·M_q(x) - y` together with the DFT it was built from.
struct Evaluation {
    value: f64,
    xhat: Vec<Complex64>,
    residual: Vec<Complex64>,
}

impl<'a> LeastSquares<'a> {
    pub fn new(op: &'a MeasurementOperator, y: &'a [Complex64]) -> Result<Self> {
        if y.len() != op.rows() {
            return Err(HosError::ShapeMismatch(format!(
                "{} measurements for an operator with {} rows",
                y.len(),
                op.rows()
            )));
        }
        let map = SpectrumMap::new(op.n(), op.q())?;
        Ok(Self { op, y, map })
    }

    pub fn n(&self) -> usize {
        self.map.n()
    }

    fn evaluate(&self, x: &[f64]) -> Evaluation {
        let xhat = self.map.dft_real(x);
        let mut spec = vec![Complex64::new(0.0, 0.0); self.map.len()];
        self.map.spectrum_from_fourier(&xhat, &mut spec);
        let mut residual = vec![Complex64::new(0.0, 0.0); self.op.rows()];
        self.op.apply_into(&spec, &mut residual);
        for (r, y) in residual.iter_mut().zip(self.y) {
            *r -= y;
        }
        let value = residual.iter().map(|r| r.norm_sqr()).sum();
        Evaluation { value, xhat, residual }
    }

    fn gradient_at(&self, eval: &Evaluation) -> Vec<f64> {
        let mut w = vec![Complex64::new(0.0, 0.0); self.map.len()];
        self.op.adjoint_into(&eval.residual, &mut w);
        let mut g = self.map.real_pullback(&eval.xhat, &w);
        g.iter_mut().for_each(|v| *v *= 2.0);
        g
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.n());
        self.evaluate(x).value
    }

    /// Gradient `2·Re(Jᴴ Aᴴ r)` with `r = A·M_q(x) - y`.
    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n());
        self.gradient_at(&self.evaluate(x))
    }

    pub fn value_and_gradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
        assert_eq!(x.len(), self.n());
        let eval = self.evaluate(x);
        (eval.value, self.gradient_at(&eval))
    }

    /// One steepest-descent run with Armijo backtracking.
    ///
    /// `on_accept` sees the objective after every accepted step.
    pub fn descend(&self, x0: Vec<f64>, cfg: &SolverConfig, mut on_accept: impl FnMut(f64)) -> (Vec<f64>, StartTrace) {
        let target = cfg.objective_tol * self.y.iter().map(|v| v.norm_sqr()).sum::<f64>();
        let mut x = x0;
        let mut eval = self.evaluate(&x);
        let mut trace = StartTrace {
            seed: 0,
            final_objective: eval.value,
            iterations: 0,
            converged: false,
            stop: StopReason::IterationCap,
        };
        if !eval.value.is_finite() {
            trace.stop = StopReason::NonFinite;
            return (x, trace);
        }
        let mut grad = self.gradient_at(&eval);
        let mut step = cfg.initial_step;
        let mut trial = vec![0.0; x.len()];
        let mut checkpoint = eval.value;
        loop {
            let gmax = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
            if !gmax.is_finite() {
                trace.stop = StopReason::NonFinite;
                break;
            }
            if gmax <= cfg.grad_tol {
                trace.stop = StopReason::GradientTolerance;
                trace.converged = true;
                break;
            }
            if eval.value <= target {
                trace.stop = StopReason::ObjectiveTolerance;
                trace.converged = true;
                break;
            }
            if trace.iterations >= cfg.max_iters {
                trace.stop = StopReason::IterationCap;
                break;
            }
            if cfg.stall_window > 0 && trace.iterations > 0 && trace.iterations.is_multiple_of(cfg.stall_window) {
                if eval.value > (1.0 - cfg.stall_tol) * checkpoint {
                    trace.stop = StopReason::Stagnated;
                    break;
                }
                checkpoint = eval.value;
            }
            let slope: f64 = grad.iter().map(|g| g * g).sum();
            let mut accepted = None;
            for _ in 0..cfg.max_backtracks {
                for ((t, xi), gi) in trial.iter_mut().zip(&x).zip(&grad) {
                    *t = xi - step * gi;
                }
                let candidate = self.evaluate(&trial);
                if candidate.value.is_finite() && candidate.value <= eval.value - cfg.armijo * step * slope {
                    accepted = Some(candidate);
                    break;
                }
                step *= cfg.shrink;
            }
            let Some(next) = accepted else {
                trace.stop = StopReason::LineSearchStalled;
                break;
            };
            std::mem::swap(&mut x, &mut trial);
            eval = next;
            let new_grad = self.gradient_at(&eval);
            trace.iterations += 1;
            on_accept(eval.value);
            step = match cfg.step_rule {
                StepRule::Growth => step * cfg.step_growth,
                StepRule::BarzilaiBorwein => {
                    // s = x_new - x_old = -step·g_old
                    let (mut ss, mut sy) = (0.0, 0.0);
                    for (g_old, g_new) in grad.iter().zip(&new_grad) {
                        let sv = -step * g_old;
                        ss += sv * sv;
                        sy += sv * (g_new - g_old);
                    }
                    if sy > 0.0 && (ss / sy).is_finite() {
                        ss / sy
                    } else {
                        step * cfg.step_growth
                    }
                }
            };
            grad = new_grad;
        }
        trace.final_objective = eval.value;
        (x, trace)
    }
}

/// `‖y - A·M_q(x)‖²`.
pub fn objective(x: &Signal, op: &MeasurementOperator, y: &[Complex64]) -> Result<f64> {
    let problem = LeastSquares::new(op, y)?;
    check_signal(x, problem.n())?;
    Ok(problem.value(&x.real_values()))
}

/// Gradient of [`objective`] with respect to the N real entries of x.
pub fn gradient(x: &Signal, op: &MeasurementOperator, y: &[Complex64]) -> Result<Vec<f64>> {
    let problem = LeastSquares::new(op, y)?;
    check_signal(x, problem.n())?;
    if x.domain() != crate::spectra::Domain::Real {
        return Err(HosError::InvalidConfig("gradient is defined for real signals only".into()));
    }
    Ok(problem.gradient(&x.real_values()))
}

fn check_signal(x: &Signal, n: usize) -> Result<()> {
    if x.len() != n {
        return Err(HosError::ShapeMismatch(format!("signal of length {} for an operator with N = {n}", x.len())));
    }
    Ok(())
}

/// Seed of the starting point for start `index`.
pub fn start_seed(cfg: &SolverConfig, index: usize) -> u64 {
    derive_seed(cfg.seed, &[index as u64])
}

/// Runs `cfg.num_starts` independent descents from `N(0, init_scale²)` starts
/// and returns the candidate with the smallest final objective.
pub fn solve(op: &MeasurementOperator, y: &[Complex64], n: usize, q: usize, cfg: &SolverConfig) -> Result<SolveResult> {
    cfg.validate()?;
    if op.n() != n || op.q() != q {
        return Err(HosError::ShapeMismatch(format!(
            "operator for N = {}, q = {} asked to solve N = {n}, q = {q}",
            op.n(),
            op.q()
        )));
    }
    let problem = LeastSquares::new(op, y)?;
    let mut best: Option<(usize, f64, Vec<f64>)> = None;
    let mut starts = Vec::with_capacity(cfg.num_starts);
    for index in 0..cfg.num_starts {
        let seed = start_seed(cfg, index);
        let x0 = gaussian_vec(&mut rng_from_seed(seed), n, cfg.init_scale);
        let (x, mut trace) = problem.descend(x0, cfg, |_| {});
        trace.seed = seed;
        let usable = trace.stop != StopReason::NonFinite && trace.final_objective.is_finite();
        let better = best.as_ref().is_none_or(|(_, f, _)| trace.final_objective < *f);
        if usable && better {
            best = Some((index, trace.final_objective, x));
        }
        starts.push(trace);
    }
    let (best_start, _, x) = best.ok_or(HosError::NonFiniteObjective)?;
    let estimate = Signal::real(&x)?;
    let objective = problem.value(&x);
    Ok(SolveResult { estimate, objective, starts, best_start })
}
