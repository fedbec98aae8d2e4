//! Non-linear traces on matrix algebras built from Choquet integrals.
//!
//! A continuous increasing weight `alpha` on `[0, 1]` with `alpha(0) = 0`
//! induces `phi_alpha(a) = int_0^1 lambda_t(a) d alpha(t)` on Hermitian
//! matrices, where `lambda_t` is the generalized eigenvalue function of the
//! normalized trace. The crate evaluates these traces, their signed and
//! complex extensions, and runs law-of-large-numbers experiments on
//! coin-toss and anticommuting sequences.

pub mod capacity;
pub mod error;
pub mod lln;
pub mod models;
pub mod spectra;
pub mod trace;
pub mod verify;
pub mod weights;

pub use capacity::{
    antisymmetric_choquet, choquet_integral, dual_capacity, make_capacity, symmetric_choquet, translatable_choquet,
    Capacity, SimpleFunction,
};
pub use error::{Error, Result};
pub use lln::{envelope, finite_n_bound, moment_report, moment_sequence, powers_report, ExperimentReport, ReportRow};
pub use models::{CoinTossModel, PowersShiftModel, ShiftModel, SumModel};
pub use spectra::{
    abs_distribution, eigen_decompose, eigenvalues, lambda_t, mu_t, spectral_distribution, HermitianOperator, Matrix,
    SpectralDistribution, C64,
};
pub use trace::{
    alpha_norm, evaluate, phi_antisymmetric, phi_complex, phi_positive, phi_symmetric, phi_translatable, ExtensionKind,
    TraceValue,
};
pub use weights::{dual_weight, eval_weight, parse_weight, Shape, WeightFunction};
