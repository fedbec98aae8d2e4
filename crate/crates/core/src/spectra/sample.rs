//! Seeded random operators for property suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::eigen::{eigen_decompose, weighted_outer_sum};
use super::matrix::{HermitianOperator, Matrix, C64};
use crate::error::{Error, Result};

/// Largest order produced by the generators.
pub const MAX_SAMPLE_DIM: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleKind {
    Hermitian,
    Positive,
    /// The Hermitian generator `h` of `u = exp(i h)`; see [`unitary_from_generator`].
    Unitary,
    Projection,
}

/// Standard complex Gaussian matrix.
pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Matrix {
    Matrix::from_fn(dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// Draws one operator of `kind` from `rng`.
pub fn sample_with<R: Rng + ?Sized>(rng: &mut R, kind: SampleKind, dim: usize) -> Result<HermitianOperator> {
    if dim == 0 || dim > MAX_SAMPLE_DIM {
        return Err(Error::DimensionOverflow {
            dim,
            max: MAX_SAMPLE_DIM,
        });
    }
    let g = gaussian_matrix(rng, dim);
    let scale = 1.0 / (dim as f64).sqrt();
    match kind {
        SampleKind::Hermitian => HermitianOperator::new(g.scale_real(scale)),
        SampleKind::Positive => {
            let g = g.scale_real(scale);
            HermitianOperator::new(&g * &g.adjoint())
        }
        SampleKind::Unitary => HermitianOperator::new(g.scale_real(std::f64::consts::PI * scale)),
        SampleKind::Projection => {
            let rank = rng.random_range(0..=dim);
            let h = HermitianOperator::new(g)?;
            let dec = eigen_decompose(&h)?;
            let w: Vec<f64> = (0..dim).map(|i| if i < rank { 1.0 } else { 0.0 }).collect();
            Ok(HermitianOperator::from_hermitian_unchecked(weighted_outer_sum(
                &dec.vectors,
                &w,
            )))
        }
    }
}

/// Deterministic draw from a ChaCha8 stream seeded with `seed`.
pub fn sample(kind: SampleKind, dim: usize, seed: u64) -> Result<HermitianOperator> {
    sample_with(&mut ChaCha8Rng::seed_from_u64(seed), kind, dim)
}

/// `exp(i h)`.
pub fn unitary_from_generator(h: &HermitianOperator) -> Result<Matrix> {
    let dec = eigen_decompose(h)?;
    let n = h.dim();
    let phases: Vec<C64> = dec.values.iter().map(|&l| C64::from_polar(1.0, l)).collect();
    let v = &dec.vectors;
    Ok(Matrix::from_fn(n, |i, j| {
        (0..n).map(|k| v[(i, k)] * phases[k] * v[(j, k)].conj()).sum()
    }))
}
