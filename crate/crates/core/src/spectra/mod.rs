//! Dense Hermitian matrices, eigensolvers and spectral distributions under
//! the normalized trace.

pub mod distribution;
pub mod eigen;
pub mod matrix;
pub mod sample;

pub use distribution::{
    abs_distribution, functional_calculus, lambda_t, mu_t, normalized_trace, operator_norm, positive_negative_parts,
    spectral_distribution, spectral_projection, spectral_projection_closed, tensor_product, SpectralDistribution,
    MERGE_REL_TOL, WEIGHT_SUM_TOL,
};
pub use eigen::{eigen_decompose, eigenvalues, EigenDecomposition};
pub use matrix::{HermitianOperator, Matrix, C64, MAX_DIM};
pub use sample::{gaussian_matrix, sample, sample_with, unitary_from_generator, SampleKind, MAX_SAMPLE_DIM};
