//! Least squares (LS), total least squares (TLS) and mixed LS-TLS solvers for
//! overdetermined systems `A X ~ B` over reduced biquaternions, with a real
//! unknown `X`.
//!
//! The RB problem is reduced to a real problem on the stacked components
//! `[A0; A1; A2; A3]`; see [`solve`] for the algorithm and [`experiment`] for
//! the randomized solver comparison.

pub mod error;
pub mod experiment;
pub mod io;
pub mod linalg;
pub mod matrix;
mod plot;
pub mod scalar;
pub mod solve;

pub use error::{Error, NonUniqueCause, Result};
pub use experiment::{ExperimentConfig, ExperimentRow, NoiseCase};
pub use matrix::{structural_operator, RbMatrix, StructuralOperator};
pub use scalar::ReducedBiquaternion;
pub use solve::{
    residual_check, solve_complex, solve_ls, solve_mtls, solve_tls, Method, MtlsProblem,
    MtlsSolution, SolvabilityReport, SolveOptions,
};
