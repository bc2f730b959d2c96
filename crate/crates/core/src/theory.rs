//! Restricted-isometry certificates for the optimal k-thresholding family.
//!
//! Every bound depends on `q` and `k` only through `t = ceil(q / k)` and is
//! valid for `q >= 2k`. With `phi = (sqrt(5) + 1) / 2`:
//!
//! | variant | RIC threshold on `delta_3k`                                            |
//! |---------|-------------------------------------------------------------------------|
//! | PGOT    | root of `(t+1)^2 a^3 + (t+1)^2 a^2 + a / phi^2 - 1 / phi^2`             |
//! | PGOT    | sufficient: `2 / (sqrt(f^2 + 6f + 1) + f + 1)`, `f = phi (t+1)`         |
//! | PGROT   | root of `9(t+1)^2 b^3 + 9(t+1)^2 b^2 + b / phi^4 - 1 / phi^4`           |
//! | PGROT   | sufficient: same closed form with `f = 3 phi^2 (t+1)`                   |
//! | PGROTP  | `1 / (3 phi^2 (t+1) + 1)`                                               |

use crate::error::{invalid, Error, Result};
use crate::linalg::{distance, nnz, norm2, symmetric_eigenvalues, DenseMatrix};
use crate::operators::check_enumeration;
use crate::problem::ProblemInstance;
use crate::solvers::{pgot_step, AlgorithmId};

const SQRT5: f64 = 2.236_067_977_499_79;
const GOLDEN: f64 = (SQRT5 + 1.0) / 2.0;

/// `ceil(q / k)`.
pub fn ceil_ratio(q: usize, k: usize) -> usize {
    assert!(k > 0, "k must be positive");
    q.div_ceil(k)
}

fn regime(q: usize, k: usize) -> Result<f64> {
    if k == 0 || q < 2 * k {
        return Err(invalid(format!(
            "convergence bounds require q >= 2k (got q = {q}, k = {k})"
        )));
    }
    Ok(ceil_ratio(q, k) as f64)
}

/// `g(a) = c2 a^3 + c2 a^2 + c0 a - c0` with `c2 = scale (t+1)^2`.
#[derive(Debug, Clone, Copy)]
pub struct RootCubic {
    pub leading: f64,
    pub constant: f64,
}

impl RootCubic {
    pub fn eval(&self, a: f64) -> f64 {
        self.leading * a * a * (a + 1.0) + self.constant * (a - 1.0)
    }

    /// Unique root in `(0, 1)`; `g` is increasing there with `g(0) < 0 < g(1)`.
    pub fn root(&self) -> f64 {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        while hi - lo > 1e-10 || self.eval(0.5 * (lo + hi)).abs() > 1e-12 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.eval(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

pub fn pgot_cubic(q: usize, k: usize) -> Result<RootCubic> {
    let t = regime(q, k)?;
    Ok(RootCubic {
        leading: (t + 1.0).powi(2),
        constant: 2.0 / (3.0 + SQRT5),
    })
}

pub fn pgrot_cubic(q: usize, k: usize) -> Result<RootCubic> {
    let t = regime(q, k)?;
    Ok(RootCubic {
        leading: 9.0 * (t + 1.0).powi(2),
        constant: 2.0 / (7.0 + 3.0 * SQRT5),
    })
}

/// RIC threshold `alpha*` guaranteeing PGOT contraction.
pub fn pgot_root_bound(q: usize, k: usize) -> Result<f64> {
    Ok(pgot_cubic(q, k)?.root())
}

fn quadratic_bound(f: f64) -> f64 {
    2.0 / ((f * f + 6.0 * f + 1.0).sqrt() + f + 1.0)
}

/// Closed-form sufficient threshold for PGOT.
pub fn pgot_explicit_bound(q: usize, k: usize) -> Result<f64> {
    let t = regime(q, k)?;
    Ok(quadratic_bound(GOLDEN * (t + 1.0)))
}

/// RIC threshold `beta*` guaranteeing PGROT contraction.
pub fn pgrot_root_bound(q: usize, k: usize) -> Result<f64> {
    Ok(pgrot_cubic(q, k)?.root())
}

/// `psi = 3 phi^2 (ceil(q/k) + 1)`.
pub fn pgrot_psi(q: usize, k: usize) -> Result<f64> {
    let t = regime(q, k)?;
    Ok(3.0 * GOLDEN * GOLDEN * (t + 1.0))
}

/// Closed-form sufficient threshold for PGROT.
pub fn pgrot_explicit_bound(q: usize, k: usize) -> Result<f64> {
    Ok(quadratic_bound(pgrot_psi(q, k)?))
}

/// RIC threshold guaranteeing PGROTP contraction.
pub fn pgrotp_bound(q: usize, k: usize) -> Result<f64> {
    let t = regime(q, k)?;
    Ok(1.0 / (3.0 * GOLDEN * GOLDEN * (t + 1.0) + 1.0))
}

/// Restricted isometry constants of orders `k`, `2k`, `3k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RicTriple {
    pub delta_k: f64,
    pub delta_2k: f64,
    pub delta_3k: f64,
}

impl RicTriple {
    pub fn new(delta_k: f64, delta_2k: f64, delta_3k: f64) -> Result<Self> {
        let ok = [delta_k, delta_2k, delta_3k]
            .iter()
            .all(|d| d.is_finite() && *d >= 0.0);
        // rounding in the eigen solver may reorder nearly equal constants
        let slack = 1e-12;
        if !ok || delta_k > delta_2k + slack || delta_2k > delta_3k + slack {
            return Err(invalid(format!(
                "RIC triple must be nonnegative and nondecreasing, got ({delta_k}, {delta_2k}, {delta_3k})"
            )));
        }
        Ok(Self {
            delta_k,
            delta_2k,
            delta_3k,
        })
    }

    pub fn uniform(delta: f64) -> Result<Self> {
        Self::new(delta, delta, delta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContractionConstants {
    pub rho: f64,
    pub tau: f64,
    pub variant: AlgorithmId,
    pub converges: bool,
}

/// Per-iteration error bound `||x^{p+1} - x*|| <= rho ||x^p - x*|| + tau ||eta||`.
///
/// The full-gradient ids map to their partial-gradient counterparts.
pub fn contraction_constants(
    ric: &RicTriple,
    q: usize,
    k: usize,
    variant: AlgorithmId,
) -> Result<ContractionConstants> {
    let t = regime(q, k)?;
    let RicTriple {
        delta_k: dk,
        delta_2k: d2,
        delta_3k: d3,
    } = *ric;
    if d2 >= 1.0 {
        return Err(Error::Domain(format!(
            "contraction constants need delta_2k < 1, got {d2}"
        )));
    }
    let g2 = GOLDEN * GOLDEN;
    let (rho, tau) = match variant {
        AlgorithmId::Pgot | AlgorithmId::Ot => (
            GOLDEN * (t + 1.0) * d3 * ((1.0 + dk) / (1.0 - d2)).sqrt(),
            ((SQRT5 + 1.0) * (t + 1.0) * (1.0 + d2) + 4.0) / (2.0 * (1.0 - d2).sqrt()),
        ),
        AlgorithmId::Pgrot | AlgorithmId::RotAlg => (
            3.0 * g2 * (t + 1.0) * d3 * ((1.0 + dk) / (1.0 - d2)).sqrt(),
            g2 * 3.0 * (t + 1.0) * (1.0 + dk) / (1.0 - d2).sqrt()
                + (SQRT5 + 1.0) / (1.0 - d2).sqrt(),
        ),
        AlgorithmId::Pgrotp | AlgorithmId::Rotp => {
            if d3 >= 1.0 {
                return Err(Error::Domain(format!(
                    "PGROTP contraction constants need delta_3k < 1, got {d3}"
                )));
            }
            (
                g2 * 3.0 * (t + 1.0) * d3 / (1.0 - d3),
                (3.0 * g2 * (t + 1.0) * (1.0 + dk) + SQRT5 + 1.0)
                    / ((1.0 - d2) * (1.0 + d2).sqrt())
                    + (1.0 + dk).sqrt() / (1.0 - d2),
            )
        }
        other => {
            return Err(invalid(format!(
                "no contraction constants for baseline algorithm {other}"
            )))
        }
    };
    Ok(ContractionConstants {
        rho,
        tau,
        variant,
        converges: rho < 1.0,
    })
}

/// Exact `delta_s` of `A`: the largest `||A_S^T A_S - I||_2` over all column
/// subsets of size `s` (for `s > n` this is `delta_n`).
pub fn brute_force_ric(a: &DenseMatrix, s: usize, exhaustive_limit: u64) -> Result<f64> {
    let n = a.cols();
    let s = s.min(n);
    if s == 0 {
        return Ok(0.0);
    }
    check_enumeration(n, s, exhaustive_limit)?;
    let all: Vec<usize> = (0..n).collect();
    let gram = a.gram_of_columns(&all);
    let mut combo: Vec<usize> = (0..s).collect();
    let mut sub = vec![0.0; s * s];
    let mut worst = 0.0f64;
    loop {
        for (i, &ci) in combo.iter().enumerate() {
            for (j, &cj) in combo.iter().enumerate() {
                sub[i * s + j] = gram[ci * n + cj] - if i == j { 1.0 } else { 0.0 };
            }
        }
        let eig = symmetric_eigenvalues(&sub, s);
        worst = worst.max(eig[0].abs()).max(eig[s - 1].abs());
        let Some(i) = (0..s).rev().find(|&i| combo[i] < n - s + i) else {
            break;
        };
        combo[i] += 1;
        for j in i + 1..s {
            combo[j] = combo[j - 1] + 1;
        }
    }
    Ok(worst)
}

/// `(delta_k, delta_2k, delta_3k)` by brute force.
pub fn brute_force_ric_triple(
    a: &DenseMatrix,
    k: usize,
    exhaustive_limit: u64,
) -> Result<RicTriple> {
    let d1 = brute_force_ric(a, k, exhaustive_limit)?;
    let d2 = brute_force_ric(a, 2 * k, exhaustive_limit)?.max(d1);
    let d3 = brute_force_ric(a, 3 * k, exhaustive_limit)?.max(d2);
    RicTriple::new(d1, d2, d3)
}

/// Variant and RIC-threshold pair, as listed in the bound table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundRow {
    /// `ceil(q / k)`.
    pub ratio: usize,
    pub pgot_root: f64,
    pub pgot_explicit: f64,
    pub pgrot_root: f64,
    pub pgrot_explicit: f64,
    pub pgrotp: f64,
}

impl BoundRow {
    pub fn for_ratio(ratio: usize) -> Result<Self> {
        Ok(Self {
            ratio,
            pgot_root: pgot_root_bound(ratio, 1)?,
            pgot_explicit: pgot_explicit_bound(ratio, 1)?,
            pgrot_root: pgrot_root_bound(ratio, 1)?,
            pgrot_explicit: pgrot_explicit_bound(ratio, 1)?,
            pgrotp: pgrotp_bound(ratio, 1)?,
        })
    }

    /// The sharpest threshold on `delta_3k` for the variant.
    pub fn threshold(&self, variant: AlgorithmId) -> Option<f64> {
        match variant {
            AlgorithmId::Pgot | AlgorithmId::Ot => Some(self.pgot_root),
            AlgorithmId::Pgrot | AlgorithmId::RotAlg => Some(self.pgrot_root),
            AlgorithmId::Pgrotp | AlgorithmId::Rotp => Some(self.pgrotp),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundTable {
    pub rows: Vec<BoundRow>,
}

impl BoundTable {
    pub fn for_ratios(ratios: &[usize]) -> Result<Self> {
        Ok(Self {
            rows: ratios
                .iter()
                .map(|&r| BoundRow::for_ratio(r))
                .collect::<Result<_>>()?,
        })
    }

    pub fn get(&self, ratio: usize, variant: AlgorithmId) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.ratio == ratio)
            .and_then(|r| r.threshold(variant))
    }
}

/// RIC thresholds for `q = 2k`, `2k < q <= 3k` and `3k < q <= 4k`.
pub fn table1() -> BoundTable {
    BoundTable::for_ratios(&[2, 3, 4]).expect("ratios >= 2 are always valid")
}

/// Outcome of checking one PGOT step against its contraction bound.
#[derive(Debug, Clone, PartialEq)]
pub struct OneStepCheck {
    /// `||x^{p+1} - x*||_2`
    pub lhs: f64,
    /// `rho ||x^p - x*||_2` (noiseless measurements).
    pub rhs: f64,
    pub holds: bool,
    pub ric: RicTriple,
    pub constants: ContractionConstants,
    pub next: Vec<f64>,
}

/// Runs one exact PGOT step from `x_p` on `y = A x*` and compares the error
/// against `rho ||x_p - x*||` with `rho` computed from brute-force RICs.
pub fn verify_one_step_bound(
    a: &DenseMatrix,
    x_star: &[f64],
    x_p: &[f64],
    q: usize,
    k: usize,
    exhaustive_limit: u64,
) -> Result<OneStepCheck> {
    for (name, v) in [("x*", x_star), ("x^p", x_p)] {
        if v.len() != a.cols() || nnz(v) > k {
            return Err(invalid(format!(
                "{name} must be a {k}-sparse vector of length {}",
                a.cols()
            )));
        }
    }
    let ric = brute_force_ric_triple(a, k, exhaustive_limit)?;
    let constants = contraction_constants(&ric, q, k, AlgorithmId::Pgot)?;
    let y = a.mat_vec(x_star)?;
    let problem = ProblemInstance::with_q(a.clone(), y, k, q)?;
    let next = pgot_step(&problem, x_p, q, 1.0, exhaustive_limit)?;
    let lhs = distance(&next, x_star);
    let rhs = constants.rho * distance(x_p, x_star);
    let holds = lhs <= rhs + 1e-10 * (1.0 + norm2(x_star));
    Ok(OneStepCheck {
        lhs,
        rhs,
        holds,
        ric,
        constants,
        next,
    })
}
