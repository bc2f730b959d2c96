//! Problem instances, solver configuration and solver reports.

use std::fmt;

use crate::error::{check_len, invalid, Result};
use crate::linalg::{ensure_finite, DenseMatrix};

/// `min ||y - A x||^2  s.t. ||x||_0 <= k`, plus the knobs of the
/// partial-gradient iteration.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub a: DenseMatrix,
    pub y: Vec<f64>,
    /// Sparsity level.
    pub k: usize,
    /// Number of gradient entries kept by the partial gradient `H_q`.
    pub q: usize,
    /// Gradient stepsize.
    pub lambda: f64,
    /// Planted solution, when known.
    pub truth: Option<Vec<f64>>,
    /// `||eta||_2` of the measurement noise, when known.
    pub noise_norm: Option<f64>,
}

impl ProblemInstance {
    /// Builds an instance with `q = min(2k, n)` and unit stepsize.
    pub fn new(a: DenseMatrix, y: Vec<f64>, k: usize) -> Result<Self> {
        let q = (2 * k).min(a.cols());
        Self::with_q(a, y, k, q)
    }

    pub fn with_q(a: DenseMatrix, y: Vec<f64>, k: usize, q: usize) -> Result<Self> {
        let p = Self {
            a,
            y,
            k,
            q,
            lambda: 1.0,
            truth: None,
            noise_norm: None,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn stepsize(mut self, lambda: f64) -> Result<Self> {
        self.lambda = lambda;
        self.validate()?;
        Ok(self)
    }

    pub fn planted(mut self, truth: Vec<f64>) -> Result<Self> {
        self.truth = Some(truth);
        self.validate()?;
        Ok(self)
    }

    pub fn noise(mut self, noise_norm: f64) -> Result<Self> {
        self.noise_norm = Some(noise_norm);
        self.validate()?;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.a.cols()
    }

    pub fn m(&self) -> usize {
        self.a.rows()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        check_len("measurement vector", self.a.rows(), self.y.len())?;
        ensure_finite("measurement vector", &self.y)?;
        if self.k == 0 || self.k > n {
            return Err(invalid(format!(
                "sparsity level k = {} must satisfy 1 <= k <= n = {n}",
                self.k
            )));
        }
        if self.q < self.k || self.q > n {
            return Err(invalid(format!(
                "partial gradient width q = {} must satisfy k = {} <= q <= n = {n}",
                self.q, self.k
            )));
        }
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(invalid(format!(
                "stepsize must be positive, got {}",
                self.lambda
            )));
        }
        if let Some(t) = &self.truth {
            check_len("planted solution", n, t.len())?;
            ensure_finite("planted solution", t)?;
        }
        if let Some(e) = self.noise_norm {
            if !(e.is_finite() && e >= 0.0) {
                return Err(invalid(format!("noise norm must be nonnegative, got {e}")));
            }
        }
        Ok(())
    }
}

/// Iteration limits and tolerances shared by all solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub max_iterations: usize,
    /// Relative error `||x - x*|| / ||x*||` that counts as recovery.
    pub recovery_tolerance: f64,
    /// Stop once `||y - A x||_2` drops to this value.
    pub residual_tolerance: f64,
    /// Fixed-point residual at which the relaxed QP is considered solved.
    pub rot_tolerance: f64,
    pub rot_max_iterations: usize,
    /// Largest number of supports the exact thresholding may enumerate.
    pub exhaustive_limit: u64,
    /// Replace the stepsize `lambda` by `lambda / ||A^T A||_2`.
    pub normalize_step: bool,
    /// Keep every iterate in the report.
    pub record_iterates: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iterations: 50,
            recovery_tolerance: 1e-3,
            residual_tolerance: 1e-6,
            rot_tolerance: 1e-8,
            rot_max_iterations: 5000,
            exhaustive_limit: 200_000,
            normalize_step: false,
            record_iterates: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("recovery_tolerance", self.recovery_tolerance),
            ("residual_tolerance", self.residual_tolerance),
            ("rot_tolerance", self.rot_tolerance),
        ] {
            if v.is_nan() || v <= 0.0 {
                return Err(invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if self.rot_max_iterations == 0 || self.exhaustive_limit == 0 {
            return Err(invalid("iteration and enumeration limits must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Termination {
    RecoveryCriterionMet,
    ResidualToleranceMet,
    /// The iterate map reached an exact fixed point.
    Stalled,
    MaxIterations,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Termination::RecoveryCriterionMet => "recovery_criterion_met",
            Termination::ResidualToleranceMet => "residual_tolerance_met",
            Termination::Stalled => "stalled",
            Termination::MaxIterations => "max_iterations",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry {
    pub iteration: usize,
    /// `||y - A x^p||_2`
    pub objective: f64,
    /// `||x^p - x*||_2 / ||x*||_2` when the planted solution is known.
    pub relative_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverReport {
    pub final_x: Vec<f64>,
    pub iterations: usize,
    /// One entry per iterate, starting with `x^0`.
    pub trace: Vec<TraceEntry>,
    pub termination: Termination,
    /// Iterations whose relaxed QP hit its iteration cap before certifying
    /// optimality.
    pub rot_unconverged: Vec<usize>,
    /// `x^0, x^1, ...` when [`SolverConfig::record_iterates`] is set.
    pub iterates: Vec<Vec<f64>>,
}

impl SolverReport {
    pub fn final_objective(&self) -> f64 {
        self.trace.last().map_or(f64::NAN, |t| t.objective)
    }
}
