//! Partial-gradient optimal k-thresholding for sparse linear inverse problems.
//!
//! Solves `min ||y - A x||_2^2` subject to `||x||_0 <= k` with the
//! partial-gradient optimal thresholding family (PGOT, PGROT, PGROTP), their
//! full-gradient special cases, and the IHT, OMP and SP baselines. The
//! [`theory`] module evaluates the RIP-based recovery guarantees and the
//! [`experiment`] module runs seeded synthetic recovery experiments.
//!
//! ```
//! use optk::{solve, AlgorithmId, DenseMatrix, ProblemInstance, SolverConfig};
//!
//! let a = DenseMatrix::identity(4);
//! let y = vec![0.0, 3.0, 0.0, -1.0];
//! let problem = ProblemInstance::new(a, y, 2).unwrap();
//! let report = solve(AlgorithmId::Pgrotp, &problem, &SolverConfig::default()).unwrap();
//! assert_eq!(report.final_x, vec![0.0, 3.0, 0.0, -1.0]);
//! ```

pub mod error;
pub mod experiment;
pub mod io;
pub mod linalg;
pub mod operators;
pub mod problem;
pub mod solvers;
pub mod theory;

pub use error::{Error, Result};
pub use experiment::{CellResult, ExperimentConfig, MatrixScaling, QSpec};
pub use linalg::{DenseMatrix, Objective, SupportSet};
pub use problem::{ProblemInstance, SolverConfig, SolverReport, Termination, TraceEntry};
pub use solvers::{check_recovery, solve, AlgorithmId};
pub use theory::{ContractionConstants, RicTriple};
