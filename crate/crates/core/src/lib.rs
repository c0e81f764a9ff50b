//! Sharp bounds between ℓ_p quasi-norms (0 < p ≤ 1) and ℓ_q norms (q > 1).
//!
//! For any real n-vector x the gap ‖x‖_q − n^{1/q−1/p}‖x‖_p lies between 0
//! and n^{1/q} c_{p,q} (max|x_i| − min|x_i|) with the sharp constant
//! c_{p,q} = (1 − p/q)(p/q)^{p/(q−p)}. This crate evaluates both sides,
//! classifies the equality cases, constructs extremal vectors, verifies
//! everything adversarially against independent oracles, and demonstrates
//! the bound on an IRLS ℓ_p-minimization solver for sparse recovery.
//!
//! Modules:
//! - [`norms`]: stable ℓ_p / ℓ_0 / power-mean evaluation.
//! - [`gapbound`]: the constant c_{p,q}, gap, bound, and equality reports.
//! - [`extremal`]: border configurations attaining the bound.
//! - [`oracle`]: brute-force enumeration, fuzzing, and monotonicity checks.
//! - [`solver`]: IRLS ℓ_p minimization with gap diagnostics.
//! - [`io`]: CSV vector and matrix files.

pub mod error;
pub mod extremal;
pub mod gapbound;
pub mod io;
pub mod norms;
pub mod oracle;
mod seeding;
pub mod solver;

pub use error::{Error, Result};
pub use extremal::ExtremalConfig;
pub use gapbound::{EqualityClass, Exponents, GapReport};
pub use norms::{PExponent, Signal};
pub use oracle::StressReport;
pub use solver::{IrlsOptions, MeasurementProblem, SolveResult};
