//! Seeded synthetic recovery experiments.
//!
//! Every trial draws its own planted instance from a seed derived from the
//! experiment seed and the instance key `(m, n, k, scaling, trial)`. The
//! algorithm and `q` are not part of the key, so all algorithms in one run
//! are compared on the same instances, and any cell can be re-run alone.
//! Results do not depend on the number of worker threads.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::io::{field, fmt_real, CsvRow};
use crate::linalg::{norm2, DenseMatrix};
use crate::problem::{ProblemInstance, SolverConfig, Termination};
use crate::solvers::{check_recovery, solve, AlgorithmId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MatrixScaling {
    /// i.i.d. N(0, 1) entries.
    Raw,
    /// N(0, 1) entries divided by `sqrt(m)`.
    InvSqrtM,
}

impl fmt::Display for MatrixScaling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatrixScaling::Raw => "raw",
            MatrixScaling::InvSqrtM => "inv_sqrt_m",
        })
    }
}

impl FromStr for MatrixScaling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw" => Ok(MatrixScaling::Raw),
            "inv_sqrt_m" => Ok(MatrixScaling::InvSqrtM),
            _ => Err(invalid(format!(
                "unknown scaling '{s}' (expected raw or inv_sqrt_m)"
            ))),
        }
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gen_gaussian_matrix(m: usize, n: usize, seed: u64, scaling: MatrixScaling) -> DenseMatrix {
    assert!(m > 0 && n > 0, "matrix dimensions must be positive");
    let mut r = rng(seed);
    let factor = match scaling {
        MatrixScaling::Raw => 1.0,
        MatrixScaling::InvSqrtM => 1.0 / (m as f64).sqrt(),
    };
    let data = (0..m * n)
        .map(|_| r.sample::<f64, _>(StandardNormal) * factor)
        .collect();
    DenseMatrix::new(m, n, data).expect("gaussian samples are finite")
}

pub fn gen_gaussian_vector(len: usize, seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    (0..len).map(|_| r.sample(StandardNormal)).collect()
}

/// `k`-sparse vector with a uniformly drawn support and N(0, 1) values.
pub fn gen_sparse_vector(n: usize, k: usize, seed: u64) -> Vec<f64> {
    assert!(k <= n, "sparsity exceeds dimension");
    let mut r = rng(seed);
    let mut support = sample(&mut r, n, k).into_vec();
    support.sort_unstable();
    let mut x = vec![0.0; n];
    for i in support {
        let mut v = 0.0;
        while v == 0.0 {
            v = r.sample(StandardNormal);
        }
        x[i] = v;
    }
    x
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a(words: &[u64]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for w in words {
        for b in w.to_le_bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    splitmix64(h)
}

/// Partial-gradient width, possibly relative to the sparsity level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QSpec {
    /// `q = c * k`.
    TimesK(usize),
    /// `q = n`.
    Full,
    Fixed(usize),
}

impl QSpec {
    /// Resolves against `(k, n)`, capped at `n`.
    pub fn resolve(self, k: usize, n: usize) -> usize {
        match self {
            QSpec::TimesK(c) => (c * k).min(n),
            QSpec::Full => n,
            QSpec::Fixed(q) => q.min(n),
        }
    }
}

impl fmt::Display for QSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QSpec::TimesK(1) => write!(f, "k"),
            QSpec::TimesK(c) => write!(f, "{c}k"),
            QSpec::Full => write!(f, "n"),
            QSpec::Fixed(q) => write!(f, "{q}"),
        }
    }
}

impl FromStr for QSpec {
    type Err = Error;

    /// Accepts `k`, `2k`, `n` or a plain integer.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || invalid(format!("invalid q '{s}' (expected e.g. k, 2k, n or 17)"));
        if s == "n" {
            return Ok(QSpec::Full);
        }
        if let Some(c) = s.strip_suffix('k') {
            let c = if c.is_empty() {
                1
            } else {
                c.parse().map_err(|_| bad())?
            };
            if c == 0 {
                return Err(bad());
            }
            return Ok(QSpec::TimesK(c));
        }
        s.parse().map(QSpec::Fixed).map_err(|_| bad())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub m: usize,
    pub n: usize,
    pub k_grid: Vec<usize>,
    pub q_list: Vec<QSpec>,
    pub algorithms: Vec<AlgorithmId>,
    pub trials: usize,
    /// Noise level: `y = A x* + sigma * eta`.
    pub sigma: f64,
    pub seed: u64,
    pub scaling: MatrixScaling,
    pub solver: SolverConfig,
    /// Iteration budget of the objective-trace experiment.
    pub trace_iterations: usize,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(m: usize, n: usize, seed: u64) -> Self {
        Self {
            m,
            n,
            k_grid: default_k_grid(m),
            q_list: vec![QSpec::TimesK(2)],
            algorithms: vec![AlgorithmId::Pgrotp],
            trials: 50,
            sigma: 0.0,
            seed,
            scaling: MatrixScaling::InvSqrtM,
            solver: SolverConfig::default(),
            trace_iterations: 70,
            threads: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 {
            return Err(invalid("m and n must be positive"));
        }
        if self.k_grid.is_empty() || self.q_list.is_empty() || self.algorithms.is_empty() {
            return Err(invalid(
                "k grid, q list and algorithm list must be nonempty",
            ));
        }
        if self.trials == 0 {
            return Err(invalid("trials must be positive"));
        }
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(invalid(format!(
                "sigma must be nonnegative, got {}",
                self.sigma
            )));
        }
        for &k in &self.k_grid {
            if k == 0 || k > self.n {
                return Err(invalid(format!(
                    "k = {k} must satisfy 1 <= k <= n = {}",
                    self.n
                )));
            }
            for q in &self.q_list {
                if q.resolve(k, self.n) < k {
                    return Err(invalid(format!("q = {q} is smaller than k = {k}")));
                }
            }
        }
        self.solver.validate()
    }

    /// Seed of one planted instance.
    pub fn trial_seed(&self, k: usize, trial: usize) -> u64 {
        let scaling = match self.scaling {
            MatrixScaling::Raw => 0,
            MatrixScaling::InvSqrtM => 1,
        };
        self.seed
            ^ fnv1a(&[
                self.m as u64,
                self.n as u64,
                k as u64,
                scaling,
                trial as u64,
            ])
    }

    /// `(k, q, algorithm)` cells in output order; `q = 0` marks algorithms
    /// without a partial-gradient width.
    fn cells(&self) -> Vec<(usize, usize, AlgorithmId)> {
        let mut cells = Vec::new();
        for &k in &self.k_grid {
            for &algo in &self.algorithms {
                if algo.uses_q() {
                    for q in &self.q_list {
                        cells.push((k, q.resolve(k, self.n), algo));
                    }
                } else if algo.full_gradient() {
                    cells.push((k, self.n, algo));
                } else {
                    cells.push((k, 0, algo));
                }
            }
        }
        cells.sort_by_key(|&(k, q, algo)| (k, q, algo.name()));
        cells.dedup();
        cells
    }

    fn run_parallel<T: Send>(&self, job: impl Fn() -> T + Send) -> Result<T> {
        match self.threads {
            None => Ok(job()),
            Some(t) => rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map(|pool| pool.install(job))
                .map_err(|e| invalid(format!("cannot start thread pool: {e}"))),
        }
    }
}

/// `k = 1, 1 + step, ...` up to `floor(0.4 m)` with `step = ceil(m / 20)`.
pub fn default_k_grid(m: usize) -> Vec<usize> {
    let top = (2 * m / 5).max(1);
    let step = m.div_ceil(20).max(1);
    (1..=top).step_by(step).collect()
}

/// A planted recovery instance.
#[derive(Debug, Clone)]
pub struct PlantedInstance {
    pub a: DenseMatrix,
    pub truth: Vec<f64>,
    pub y: Vec<f64>,
    pub noise_norm: f64,
}

impl PlantedInstance {
    pub fn generate(cfg: &ExperimentConfig, k: usize, trial: usize) -> Self {
        let seed = cfg.trial_seed(k, trial);
        let a = gen_gaussian_matrix(cfg.m, cfg.n, splitmix64(seed ^ 1), cfg.scaling);
        let truth = gen_sparse_vector(cfg.n, k, splitmix64(seed ^ 2));
        let mut y = a.mat_vec(&truth).expect("dimensions agree");
        let mut noise_norm = 0.0;
        if cfg.sigma > 0.0 {
            let eta = gen_gaussian_vector(cfg.m, splitmix64(seed ^ 3));
            noise_norm = cfg.sigma * norm2(&eta);
            for (yi, e) in y.iter_mut().zip(&eta) {
                *yi += cfg.sigma * e;
            }
        }
        Self {
            a,
            truth,
            y,
            noise_norm,
        }
    }

    fn problem(&self, k: usize, q: usize, with_truth: bool) -> Result<ProblemInstance> {
        let n = self.a.cols();
        let q = if q == 0 { (2 * k).min(n) } else { q };
        let p = ProblemInstance::with_q(self.a.clone(), self.y.clone(), k, q)?
            .noise(self.noise_norm)?;
        if with_truth {
            p.planted(self.truth.clone())
        } else {
            Ok(p)
        }
    }
}

/// Aggregate over the trials of one `(m, n, k, q, algorithm, sigma)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub q: usize,
    pub algorithm: AlgorithmId,
    pub sigma: f64,
    pub success_count: usize,
    pub trials: usize,
    pub mean_iterations: f64,
    pub mean_final_objective: f64,
}

impl CellResult {
    pub fn rate(&self) -> f64 {
        self.success_count as f64 / self.trials as f64
    }
}

struct Outcome {
    success: bool,
    iterations: usize,
    final_objective: f64,
}

#[derive(Clone, Copy)]
enum Protocol {
    /// Stop at the recovery criterion; failures count as the full budget.
    IterationsToCriterion,
    /// Run the whole budget, then test recovery.
    FixedBudget,
}

fn run_cells(cfg: &ExperimentConfig, protocol: Protocol) -> Result<Vec<CellResult>> {
    cfg.validate()?;
    let cells = cfg.cells();
    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..cfg.trials).map(move |t| (c, t)))
        .collect();
    let outcomes: Vec<Result<Outcome>> = cfg.run_parallel(|| {
        jobs.par_iter()
            .map(|&(c, t)| {
                let (k, q, algo) = cells[c];
                let inst = PlantedInstance::generate(cfg, k, t);
                let with_truth = matches!(protocol, Protocol::IterationsToCriterion);
                let problem = inst.problem(k, q, with_truth)?;
                let report = solve(algo, &problem, &cfg.solver)?;
                let success =
                    check_recovery(&report.final_x, &inst.truth, cfg.solver.recovery_tolerance);
                let iterations = match protocol {
                    Protocol::IterationsToCriterion
                        if report.termination != Termination::RecoveryCriterionMet || !success =>
                    {
                        cfg.solver.max_iterations
                    }
                    _ => report.iterations,
                };
                Ok(Outcome {
                    success,
                    iterations,
                    final_objective: report.final_objective(),
                })
            })
            .collect()
    })?;

    let mut results = Vec::with_capacity(cells.len());
    let mut it = outcomes.into_iter();
    for &(k, q, algo) in &cells {
        let mut success_count = 0;
        let mut iters = 0.0;
        let mut obj = 0.0;
        for _ in 0..cfg.trials {
            let o = it.next().expect("one outcome per job")?;
            success_count += usize::from(o.success);
            iters += o.iterations as f64;
            obj += o.final_objective;
        }
        let trials = cfg.trials as f64;
        results.push(CellResult {
            m: cfg.m,
            n: cfg.n,
            k,
            q,
            algorithm: algo,
            sigma: cfg.sigma,
            success_count,
            trials: cfg.trials,
            mean_iterations: iters / trials,
            mean_final_objective: obj / trials,
        });
    }
    Ok(results)
}

/// Mean number of iterations needed to meet the recovery criterion on
/// noiseless planted instances; failed trials count as `max_iterations`.
pub fn iteration_count_experiment(cfg: &ExperimentConfig) -> Result<Vec<CellResult>> {
    if cfg.sigma != 0.0 {
        return Err(invalid(
            "the iteration-count experiment uses exact measurements (sigma = 0)",
        ));
    }
    run_cells(cfg, Protocol::IterationsToCriterion)
}

/// Empirical recovery rate after each algorithm's iteration budget
/// (`max_iterations`; `k` selections for OMP).
pub fn success_rate_experiment(cfg: &ExperimentConfig) -> Result<Vec<CellResult>> {
    run_cells(cfg, Protocol::FixedBudget)
}

/// One point of an objective trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub iter: usize,
    pub algo: AlgorithmId,
    pub q: usize,
    /// `||y - A x^p||_2`
    pub objective: f64,
}

/// `||y - A x^p||_2` along the iterations, for every algorithm and `q`, on
/// the first planted instance of the first grid sparsity level.
pub fn objective_trace_experiment(cfg: &ExperimentConfig) -> Result<Vec<TraceRow>> {
    cfg.validate()?;
    let k = cfg.k_grid[0];
    let mut only_k = cfg.clone();
    only_k.k_grid = vec![k];
    let cells = only_k.cells();
    let inst = PlantedInstance::generate(cfg, k, 0);
    let solver = SolverConfig {
        max_iterations: cfg.trace_iterations,
        ..cfg.solver.clone()
    };
    let traces: Vec<Result<Vec<TraceRow>>> = cfg.run_parallel(|| {
        cells
            .par_iter()
            .map(|&(k, q, algo)| {
                let report = solve(algo, &inst.problem(k, q, false)?, &solver)?;
                Ok(report
                    .trace
                    .iter()
                    .map(|t| TraceRow {
                        iter: t.iteration,
                        algo,
                        q,
                        objective: t.objective,
                    })
                    .collect())
            })
            .collect()
    })?;
    let mut rows = Vec::new();
    for t in traces {
        rows.extend(t?);
    }
    Ok(rows)
}

/// Row of the iteration-count CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRow {
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub q: usize,
    pub algo: AlgorithmId,
    pub mean_iters: f64,
    pub trials: usize,
}

impl From<&CellResult> for IterationRow {
    fn from(c: &CellResult) -> Self {
        Self {
            m: c.m,
            n: c.n,
            k: c.k,
            q: c.q,
            algo: c.algorithm,
            mean_iters: c.mean_iterations,
            trials: c.trials,
        }
    }
}

/// Row of the success-rate CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct SuccessRow {
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub q: usize,
    pub algo: AlgorithmId,
    pub sigma: f64,
    pub success: usize,
    pub trials: usize,
    pub rate: f64,
}

impl From<&CellResult> for SuccessRow {
    fn from(c: &CellResult) -> Self {
        Self {
            m: c.m,
            n: c.n,
            k: c.k,
            q: c.q,
            algo: c.algorithm,
            sigma: c.sigma,
            success: c.success_count,
            trials: c.trials,
            rate: c.rate(),
        }
    }
}

fn algo_field(fields: &[&str], i: usize) -> std::result::Result<AlgorithmId, String> {
    let s: String = field(fields, i, "algo")?;
    s.parse().map_err(|e: Error| e.to_string())
}

impl CsvRow for TraceRow {
    const HEADER: &'static [&'static str] = &["iter", "algo", "q", "objective"];

    fn to_fields(&self) -> Vec<String> {
        vec![
            self.iter.to_string(),
            self.algo.to_string(),
            self.q.to_string(),
            fmt_real(self.objective),
        ]
    }

    fn from_fields(f: &[&str]) -> std::result::Result<Self, String> {
        Ok(Self {
            iter: field(f, 0, "iter")?,
            algo: algo_field(f, 1)?,
            q: field(f, 2, "q")?,
            objective: field(f, 3, "objective")?,
        })
    }
}

impl CsvRow for IterationRow {
    const HEADER: &'static [&'static str] = &["m", "n", "k", "q", "algo", "mean_iters", "trials"];

    fn to_fields(&self) -> Vec<String> {
        vec![
            self.m.to_string(),
            self.n.to_string(),
            self.k.to_string(),
            self.q.to_string(),
            self.algo.to_string(),
            fmt_real(self.mean_iters),
            self.trials.to_string(),
        ]
    }

    fn from_fields(f: &[&str]) -> std::result::Result<Self, String> {
        Ok(Self {
            m: field(f, 0, "m")?,
            n: field(f, 1, "n")?,
            k: field(f, 2, "k")?,
            q: field(f, 3, "q")?,
            algo: algo_field(f, 4)?,
            mean_iters: field(f, 5, "mean_iters")?,
            trials: field(f, 6, "trials")?,
        })
    }
}

impl CsvRow for SuccessRow {
    const HEADER: &'static [&'static str] = &[
        "m", "n", "k", "q", "algo", "sigma", "success", "trials", "rate",
    ];

    fn to_fields(&self) -> Vec<String> {
        vec![
            self.m.to_string(),
            self.n.to_string(),
            self.k.to_string(),
            self.q.to_string(),
            self.algo.to_string(),
            fmt_real(self.sigma),
            self.success.to_string(),
            self.trials.to_string(),
            fmt_real(self.rate),
        ]
    }

    fn from_fields(f: &[&str]) -> std::result::Result<Self, String> {
        Ok(Self {
            m: field(f, 0, "m")?,
            n: field(f, 1, "n")?,
            k: field(f, 2, "k")?,
            q: field(f, 3, "q")?,
            algo: algo_field(f, 4)?,
            sigma: field(f, 5, "sigma")?,
            success: field(f, 6, "success")?,
            trials: field(f, 7, "trials")?,
            rate: field(f, 8, "rate")?,
        })
    }
}

impl CsvRow for crate::theory::BoundRow {
    const HEADER: &'static [&'static str] = &[
        "ratio",
        "pgot_root",
        "pgot_explicit",
        "pgrot_root",
        "pgrot_explicit",
        "pgrotp",
    ];

    fn to_fields(&self) -> Vec<String> {
        vec![
            self.ratio.to_string(),
            fmt_real(self.pgot_root),
            fmt_real(self.pgot_explicit),
            fmt_real(self.pgrot_root),
            fmt_real(self.pgrot_explicit),
            fmt_real(self.pgrotp),
        ]
    }

    fn from_fields(f: &[&str]) -> std::result::Result<Self, String> {
        Ok(Self {
            ratio: field(f, 0, "ratio")?,
            pgot_root: field(f, 1, "pgot_root")?,
            pgot_explicit: field(f, 2, "pgot_explicit")?,
            pgrot_root: field(f, 3, "pgrot_root")?,
            pgrot_explicit: field(f, 4, "pgrot_explicit")?,
            pgrotp: field(f, 5, "pgrotp")?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{read_csv, write_csv};
    use crate::linalg::nnz;

    #[test]
    fn generators_are_deterministic() {
        let a = gen_gaussian_matrix(5, 7, 42, MatrixScaling::Raw);
        assert_eq!(a, gen_gaussian_matrix(5, 7, 42, MatrixScaling::Raw));
        assert_ne!(a, gen_gaussian_matrix(5, 7, 43, MatrixScaling::Raw));
        assert_eq!(gen_sparse_vector(30, 4, 9), gen_sparse_vector(30, 4, 9));
    }

    #[test]
    fn raw_matrix_mean_is_near_zero() {
        let a = gen_gaussian_matrix(200, 200, 3, MatrixScaling::Raw);
        let mean = a.data().iter().sum::<f64>() / a.data().len() as f64;
        assert!(mean.abs() < 0.05, "{mean}");
    }

    #[test]
    fn scaled_columns_have_near_unit_norm() {
        let a = gen_gaussian_matrix(400, 100, 5, MatrixScaling::InvSqrtM);
        for j in 0..100 {
            let c = norm2(&a.column(j));
            assert!(c > 0.85 && c < 1.15, "column {j}: {c}");
        }
    }

    #[test]
    fn sparse_vector_support_is_uniform() {
        let mut counts = [0usize; 10];
        for seed in 0..10_000 {
            let x = gen_sparse_vector(10, 1, seed);
            assert_eq!(nnz(&x), 1);
            counts[x.iter().position(|v| *v != 0.0).unwrap()] += 1;
        }
        for c in counts {
            let f = c as f64 / 10_000.0;
            assert!((f - 0.1).abs() <= 0.02, "{counts:?}");
        }
        for k in [0, 3, 10] {
            assert_eq!(nnz(&gen_sparse_vector(10, k, 77)), k);
        }
    }

    #[test]
    fn q_specs_parse_and_resolve() {
        assert_eq!("2k".parse::<QSpec>().unwrap(), QSpec::TimesK(2));
        assert_eq!("k".parse::<QSpec>().unwrap(), QSpec::TimesK(1));
        assert_eq!("n".parse::<QSpec>().unwrap(), QSpec::Full);
        assert_eq!("17".parse::<QSpec>().unwrap(), QSpec::Fixed(17));
        assert!("0k".parse::<QSpec>().is_err());
        assert!("x".parse::<QSpec>().is_err());
        assert_eq!(QSpec::TimesK(3).resolve(40, 100), 100);
        assert_eq!(QSpec::TimesK(2).resolve(5, 100), 10);
    }

    #[test]
    fn default_grid() {
        assert_eq!(default_k_grid(100), vec![1, 6, 11, 16, 21, 26, 31, 36]);
        assert_eq!(default_k_grid(2), vec![1]);
    }

    #[test]
    fn config_validation() {
        let mut cfg = ExperimentConfig::new(20, 40, 1);
        assert!(cfg.validate().is_ok());
        cfg.k_grid = vec![41];
        assert!(cfg.validate().is_err());
        cfg.k_grid = vec![5];
        cfg.q_list = vec![QSpec::Fixed(3)];
        assert!(cfg.validate().is_err());
        cfg.q_list = vec![];
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn trace_has_one_series_per_q() {
        let mut cfg = ExperimentConfig::new(30, 40, 3);
        cfg.k_grid = vec![3];
        cfg.q_list = vec![QSpec::TimesK(2), QSpec::Full];
        cfg.trace_iterations = 10;
        let rows = objective_trace_experiment(&cfg).unwrap();
        let labels: std::collections::BTreeSet<usize> = rows.iter().map(|r| r.q).collect();
        assert_eq!(labels, [6, 40].into_iter().collect());
        assert!(rows.iter().all(|r| r.iter <= 10 && r.objective >= 0.0));
        assert!(rows.iter().any(|r| r.iter == 0));
    }

    #[test]
    fn cell_bookkeeping() {
        let mut cfg = ExperimentConfig::new(20, 40, 11);
        cfg.k_grid = vec![2, 12];
        cfg.trials = 4;
        cfg.algorithms = vec![AlgorithmId::Pgrotp, AlgorithmId::Sp, AlgorithmId::Omp];
        let res = success_rate_experiment(&cfg).unwrap();
        assert_eq!(res.len(), 6);
        for c in &res {
            assert!(c.success_count <= c.trials);
            assert!((0.0..=1.0).contains(&c.rate()));
            assert!(c.mean_iterations <= cfg.solver.max_iterations as f64);
        }
        let omp = res
            .iter()
            .find(|c| c.algorithm == AlgorithmId::Omp && c.k == 2)
            .unwrap();
        assert_eq!(omp.q, 0);
        assert!(omp.mean_iterations <= 2.0);
    }

    #[test]
    fn csv_round_trip_and_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        write_csv::<SuccessRow>(&[], &path).unwrap();
        assert_eq!(
            std::fs::read_to_string(&path).unwrap(),
            "m,n,k,q,algo,sigma,success,trials,rate\n"
        );
        let rows = vec![SuccessRow {
            m: 100,
            n: 200,
            k: 10,
            q: 20,
            algo: AlgorithmId::Pgrotp,
            sigma: 0.001,
            success: 7,
            trials: 9,
            rate: 7.0 / 9.0,
        }];
        write_csv(&rows, &path).unwrap();
        assert_eq!(read_csv::<SuccessRow>(&path).unwrap(), rows);
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("7.7777777777777779e-1"), "{text}");

        let trace = vec![TraceRow {
            iter: 3,
            algo: AlgorithmId::Rotp,
            q: 200,
            objective: 0.1 + 0.2,
        }];
        let p2 = dir.path().join("t.csv");
        write_csv(&trace, &p2).unwrap();
        assert_eq!(read_csv::<TraceRow>(&p2).unwrap(), trace);
        assert!(read_csv::<IterationRow>(&p2).is_err());
    }

    #[test]
    fn csv_write_reports_path_on_failure() {
        let err =
            write_csv::<SuccessRow>(&[], std::path::Path::new("/no/such/dir/x.csv")).unwrap_err();
        assert!(err.to_string().contains("/no/such/dir/x.csv"));
    }
}
