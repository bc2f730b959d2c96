//! Sparse solvers: the partial-gradient optimal k-thresholding family
//! (PGOT, PGROT, PGROTP), their full-gradient reductions (OT, ROT, ROTP) and
//! the IHT, OMP and SP baselines.
//!
//! All iterative solvers start from `x^0 = 0` and share one stopping rule,
//! checked after every iterate in this order:
//!
//! 1. recovery criterion `||x - x*|| / ||x*|| <= recovery_tolerance` (only
//!    when the planted solution is known),
//! 2. residual `||y - A x|| <= residual_tolerance`,
//! 3. exact fixed point (`x^{p+1} == x^p`),
//! 4. iteration budget.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::linalg::{
    distance, least_squares_on_support, norm2, objective, residual, spectral_norm_squared,
    SupportSet,
};
use crate::operators::{
    check_enumeration, hard_threshold, optimal_threshold_within, solve_rot, top_k_support,
};
use crate::problem::{ProblemInstance, SolverConfig, SolverReport, Termination, TraceEntry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AlgorithmId {
    Pgot,
    Pgrot,
    Pgrotp,
    /// PGOT with `q = n`.
    Ot,
    /// PGROT with `q = n`.
    RotAlg,
    /// PGROTP with `q = n`.
    Rotp,
    Iht,
    Omp,
    Sp,
}

impl AlgorithmId {
    pub const ALL: [AlgorithmId; 9] = [
        AlgorithmId::Pgot,
        AlgorithmId::Pgrot,
        AlgorithmId::Pgrotp,
        AlgorithmId::Ot,
        AlgorithmId::RotAlg,
        AlgorithmId::Rotp,
        AlgorithmId::Iht,
        AlgorithmId::Omp,
        AlgorithmId::Sp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AlgorithmId::Pgot => "PGOT",
            AlgorithmId::Pgrot => "PGROT",
            AlgorithmId::Pgrotp => "PGROTP",
            AlgorithmId::Ot => "OT",
            AlgorithmId::RotAlg => "ROT",
            AlgorithmId::Rotp => "ROTP",
            AlgorithmId::Iht => "IHT",
            AlgorithmId::Omp => "OMP",
            AlgorithmId::Sp => "SP",
        }
    }

    /// Whether the partial-gradient width `q` is a free parameter.
    pub fn uses_q(self) -> bool {
        matches!(
            self,
            AlgorithmId::Pgot | AlgorithmId::Pgrot | AlgorithmId::Pgrotp
        )
    }

    /// The full-gradient reductions force `q = n`.
    pub fn full_gradient(self) -> bool {
        matches!(
            self,
            AlgorithmId::Ot | AlgorithmId::RotAlg | AlgorithmId::Rotp
        )
    }
}

impl fmt::Display for AlgorithmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AlgorithmId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_uppercase().as_str() {
            "PGOT" => AlgorithmId::Pgot,
            "PGROT" | "RPGOT" => AlgorithmId::Pgrot,
            "PGROTP" | "RPGOTP" => AlgorithmId::Pgrotp,
            "OT" => AlgorithmId::Ot,
            "ROT" | "ROT_ALG" => AlgorithmId::RotAlg,
            "ROTP" => AlgorithmId::Rotp,
            "IHT" => AlgorithmId::Iht,
            "OMP" => AlgorithmId::Omp,
            "SP" => AlgorithmId::Sp,
            _ => {
                return Err(invalid(format!(
                    "unknown algorithm '{s}' (expected one of PGOT, PGROT, PGROTP, OT, ROT, ROTP, IHT, OMP, SP)"
                )))
            }
        })
    }
}

/// Runs the selected algorithm.
pub fn solve(
    algo: AlgorithmId,
    problem: &ProblemInstance,
    cfg: &SolverConfig,
) -> Result<SolverReport> {
    match algo {
        AlgorithmId::Pgot => pgot(problem, cfg),
        AlgorithmId::Pgrot => pgrot(problem, cfg),
        AlgorithmId::Pgrotp => pgrotp(problem, cfg),
        AlgorithmId::Ot => pgot(&full_gradient(problem), cfg),
        AlgorithmId::RotAlg => pgrot(&full_gradient(problem), cfg),
        AlgorithmId::Rotp => pgrotp(&full_gradient(problem), cfg),
        AlgorithmId::Iht => iht(problem, cfg),
        AlgorithmId::Omp => omp(problem, cfg),
        AlgorithmId::Sp => sp(problem, cfg),
    }
}

fn full_gradient(problem: &ProblemInstance) -> ProblemInstance {
    let mut p = problem.clone();
    p.q = p.n();
    p
}

/// `||x - x*|| / ||x*|| <= tol`; for `x* = 0` the test is `||x|| <= tol`.
pub fn check_recovery(x: &[f64], x_star: &[f64], tol: f64) -> bool {
    let scale = norm2(x_star);
    if scale == 0.0 {
        norm2(x) <= tol
    } else {
        distance(x, x_star) / scale <= tol
    }
}

/// `||x - x*|| / ||x*||`, or `||x||` when `x* = 0`.
pub fn relative_error(x: &[f64], x_star: &[f64]) -> f64 {
    let scale = norm2(x_star);
    if scale == 0.0 {
        norm2(x)
    } else {
        distance(x, x_star) / scale
    }
}

fn effective_stepsize(problem: &ProblemInstance, cfg: &SolverConfig) -> f64 {
    if cfg.normalize_step {
        let l = spectral_norm_squared(&problem.a) * 1.01;
        if l > 0.0 {
            return problem.lambda / l;
        }
    }
    problem.lambda
}

/// `u = x + lambda * H_q(A^T (y - A x))`.
pub fn partial_gradient_point(
    problem: &ProblemInstance,
    x: &[f64],
    q: usize,
    lambda: f64,
) -> Result<Vec<f64>> {
    let r = residual(&problem.a, &problem.y, x)?;
    let g = problem.a.transpose_mat_vec(&r)?;
    let h = hard_threshold(&g, q)?;
    Ok(x.iter().zip(&h).map(|(xi, hi)| xi + lambda * hi).collect())
}

/// One PGOT step: `x^{p+1} = Z#_k(x^p + lambda * H_q(A^T(y - A x^p)))`, with
/// the binary thresholding enumerated over `supp(u)` only.
pub fn pgot_step(
    problem: &ProblemInstance,
    x: &[f64],
    q: usize,
    lambda: f64,
    exhaustive_limit: u64,
) -> Result<Vec<f64>> {
    let u = partial_gradient_point(problem, x, q, lambda)?;
    let cand = SupportSet::of(&u);
    let ot = optimal_threshold_within(
        &problem.a,
        &problem.y,
        &u,
        problem.k,
        &cand,
        exhaustive_limit,
    )?;
    Ok(ot.x)
}

struct Step {
    x: Vec<f64>,
    rot_unconverged: bool,
}

/// Shared iteration driver; `step` maps `x^p` to `x^{p+1}`.
fn run(
    problem: &ProblemInstance,
    cfg: &SolverConfig,
    budget: usize,
    mut step: impl FnMut(&[f64]) -> Result<Step>,
) -> Result<SolverReport> {
    problem.validate()?;
    cfg.validate()?;
    let n = problem.n();
    let truth = problem.truth.as_deref();

    let entry = |p: usize, x: &[f64]| -> Result<TraceEntry> {
        Ok(TraceEntry {
            iteration: p,
            objective: objective(&problem.a, &problem.y, x)?.residual_norm,
            relative_error: truth.map(|t| relative_error(x, t)),
        })
    };
    let criterion = |x: &[f64], e: &TraceEntry| -> Option<Termination> {
        if truth.is_some_and(|t| check_recovery(x, t, cfg.recovery_tolerance)) {
            Some(Termination::RecoveryCriterionMet)
        } else if e.objective <= cfg.residual_tolerance {
            Some(Termination::ResidualToleranceMet)
        } else {
            None
        }
    };

    let mut x = vec![0.0; n];
    let first = entry(0, &x)?;
    let mut report = SolverReport {
        final_x: Vec::new(),
        iterations: 0,
        termination: Termination::MaxIterations,
        trace: Vec::new(),
        rot_unconverged: Vec::new(),
        iterates: Vec::new(),
    };
    let mut stop = criterion(&x, &first);
    report.trace.push(first);
    if cfg.record_iterates {
        report.iterates.push(x.clone());
    }

    while stop.is_none() && report.iterations < budget {
        let next = step(&x)?;
        report.iterations += 1;
        let p = report.iterations;
        if next.rot_unconverged {
            report.rot_unconverged.push(p);
        }
        let e = entry(p, &next.x)?;
        stop = criterion(&next.x, &e);
        if stop.is_none() && next.x == x {
            stop = Some(Termination::Stalled);
        }
        report.trace.push(e);
        x = next.x;
        if cfg.record_iterates {
            report.iterates.push(x.clone());
        }
    }
    report.termination = stop.unwrap_or(Termination::MaxIterations);
    report.final_x = x;
    Ok(report)
}

/// Partial gradient optimal k-thresholding.
///
/// The binary subproblem is enumerated over `supp(u^p)`, which has at most
/// `k + q` entries; the instance is rejected up front when
/// `C(min(k + q, n), k)` exceeds `cfg.exhaustive_limit`.
pub fn pgot(problem: &ProblemInstance, cfg: &SolverConfig) -> Result<SolverReport> {
    problem.validate()?;
    let (k, q) = (problem.k, problem.q);
    check_enumeration((k + q).min(problem.n()), k, cfg.exhaustive_limit)?;
    let lambda = effective_stepsize(problem, cfg);
    run(problem, cfg, cfg.max_iterations, |x| {
        Ok(Step {
            x: pgot_step(problem, x, q, lambda, cfg.exhaustive_limit)?,
            rot_unconverged: false,
        })
    })
}

/// Relaxed partial gradient optimal k-thresholding:
/// `x^{p+1} = H_k(w̄ ⊗ u^p)` with `w̄` from the relaxed QP.
pub fn pgrot(problem: &ProblemInstance, cfg: &SolverConfig) -> Result<SolverReport> {
    let lambda = effective_stepsize(problem, cfg);
    run(problem, cfg, cfg.max_iterations, |x| {
        let (v, converged) = relaxed_threshold_point(problem, x, lambda, cfg)?;
        Ok(Step {
            x: hard_threshold(&v, problem.k)?,
            rot_unconverged: !converged,
        })
    })
}

/// PGROT followed by a least-squares pursuit step on `L_k(w̄ ⊗ u^p)`.
pub fn pgrotp(problem: &ProblemInstance, cfg: &SolverConfig) -> Result<SolverReport> {
    let lambda = effective_stepsize(problem, cfg);
    run(problem, cfg, cfg.max_iterations, |x| {
        let (v, converged) = relaxed_threshold_point(problem, x, lambda, cfg)?;
        let support = top_k_support(&v, problem.k)?;
        Ok(Step {
            x: least_squares_on_support(&problem.a, &problem.y, &support)?,
            rot_unconverged: !converged,
        })
    })
}

/// `w̄ ⊗ u^p` for the current iterate, plus the QP convergence flag.
pub fn relaxed_threshold_point(
    problem: &ProblemInstance,
    x: &[f64],
    lambda: f64,
    cfg: &SolverConfig,
) -> Result<(Vec<f64>, bool)> {
    let u = partial_gradient_point(problem, x, problem.q, lambda)?;
    let rot = solve_rot(&problem.a, &problem.y, &u, problem.k, cfg)?;
    let v = rot.w.iter().zip(&u).map(|(w, u)| w * u).collect();
    Ok((v, rot.converged))
}

/// Iterative hard thresholding: `x^{p+1} = H_k(x^p + lambda A^T(y - A x^p))`.
pub fn iht(problem: &ProblemInstance, cfg: &SolverConfig) -> Result<SolverReport> {
    let lambda = effective_stepsize(problem, cfg);
    let n = problem.n();
    run(problem, cfg, cfg.max_iterations, |x| {
        let u = partial_gradient_point(problem, x, n, lambda)?;
        Ok(Step {
            x: hard_threshold(&u, problem.k)?,
            rot_unconverged: false,
        })
    })
}

/// Orthogonal matching pursuit with exactly `k` greedy selections (fewer only
/// when the shared stopping rule fires first).
pub fn omp(problem: &ProblemInstance, cfg: &SolverConfig) -> Result<SolverReport> {
    run(problem, cfg, problem.k, |x| {
        let support = SupportSet::of(x);
        let r = residual(&problem.a, &problem.y, x)?;
        let g = problem.a.transpose_mat_vec(&r)?;
        let mut pick: Option<(usize, f64)> = None;
        for (j, gj) in g.iter().enumerate() {
            if support.contains(j) {
                continue;
            }
            if pick.is_none_or(|(_, best)| gj.abs() > best) {
                pick = Some((j, gj.abs()));
            }
        }
        let next = match pick {
            Some((j, _)) => {
                let grown = support.union(&SupportSet::from_sorted_unchecked(vec![j]));
                least_squares_on_support(&problem.a, &problem.y, &grown)?
            }
            None => x.to_vec(),
        };
        Ok(Step {
            x: next,
            rot_unconverged: false,
        })
    })
}

/// Subspace pursuit: merge `supp(x)` with the `k` largest correlations, fit,
/// prune to `k`, and refit.
pub fn sp(problem: &ProblemInstance, cfg: &SolverConfig) -> Result<SolverReport> {
    let k = problem.k;
    run(problem, cfg, cfg.max_iterations, |x| {
        let r = residual(&problem.a, &problem.y, x)?;
        let g = problem.a.transpose_mat_vec(&r)?;
        let merged = SupportSet::of(x).union(&top_k_support(&g, k)?);
        let z = least_squares_on_support(&problem.a, &problem.y, &merged)?;
        let pruned = top_k_support(&z, k)?;
        Ok(Step {
            x: least_squares_on_support(&problem.a, &problem.y, &pruned)?,
            rot_unconverged: false,
        })
    })
}
