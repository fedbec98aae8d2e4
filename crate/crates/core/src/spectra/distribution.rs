use super::eigen::{eigen_decompose, eigenvalues, weighted_outer_sum};
use super::matrix::{HermitianOperator, Matrix};
use crate::error::{Error, Result};

/// Weights must sum to one within this tolerance.
pub const WEIGHT_SUM_TOL: f64 = 1e-10;
/// Relative tolerance for merging numerically equal eigenvalues.
pub const MERGE_REL_TOL: f64 = 1e-9;

/// Finitely many atoms `(value, weight)`, values strictly decreasing, weights
/// positive and summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDistribution {
    values: Vec<f64>,
    weights: Vec<f64>,
}

impl SpectralDistribution {
    /// Sorts, merges values closer than `merge_tol` (weighted mean), drops
    /// zero-weight atoms and validates.
    pub fn from_atoms(raw: &[(f64, f64)], merge_tol: f64) -> Result<Self> {
        let mut atoms: Vec<(f64, f64)> = Vec::with_capacity(raw.len());
        for &(v, w) in raw {
            if !v.is_finite() || !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidDistribution(format!("bad atom ({v}, {w})")));
            }
            if w > 0.0 {
                atoms.push((v, w));
            }
        }
        if atoms.is_empty() {
            return Err(Error::InvalidDistribution("no atoms with positive weight".into()));
        }
        atoms.sort_by(|a, b| b.0.total_cmp(&a.0));

        let mut values = Vec::new();
        let mut weights = Vec::new();
        // each cluster is anchored at its largest value so chains of close
        // values cannot drift arbitrarily far; the mean is taken relative to
        // the anchor so singleton clusters keep their value exactly
        let (mut anchor, mut moment, mut mass) = (atoms[0].0, 0.0, 0.0);
        for &(v, w) in &atoms {
            if anchor - v > merge_tol {
                values.push(anchor + moment / mass);
                weights.push(mass);
                anchor = v;
                moment = 0.0;
                mass = 0.0;
            }
            moment += (v - anchor) * w;
            mass += w;
        }
        values.push(anchor + moment / mass);
        weights.push(mass);

        let total = kahan_sum(&weights);
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidDistribution(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        for i in 1..values.len() {
            if values[i] >= values[i - 1] {
                return Err(Error::InvalidDistribution("values not strictly decreasing".into()));
            }
        }
        Ok(SpectralDistribution { values, weights })
    }

    /// Uniform weights `1/n` on each listed eigenvalue.
    pub fn from_eigenvalues(eigs: &[f64], merge_tol: f64) -> Result<Self> {
        let w = 1.0 / eigs.len().max(1) as f64;
        let atoms: Vec<(f64, f64)> = eigs.iter().map(|&v| (v, w)).collect();
        Self::from_atoms(&atoms, merge_tol)
    }

    /// A single atom at `value`.
    pub fn point_mass(value: f64) -> Self {
        SpectralDistribution {
            values: vec![value],
            weights: vec![1.0],
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn atoms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_value(&self) -> f64 {
        self.values[0]
    }

    pub fn min_value(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn mean(&self) -> f64 {
        let terms: Vec<f64> = self.atoms().map(|(v, w)| v * w).collect();
        kahan_sum(&terms)
    }

    /// Cumulative weights `c_i` of the `i + 1` largest atoms, compensated,
    /// with the last entry pinned to exactly 1.
    pub fn cumulative(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.weights.len());
        let (mut sum, mut comp) = (0.0f64, 0.0f64);
        for &w in &self.weights {
            let y = w - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
            out.push(sum.min(1.0));
        }
        if let Some(last) = out.last_mut() {
            *last = 1.0;
        }
        out
    }

    /// Pushes the distribution forward through `f`, re-merging with `merge_tol`.
    pub fn map(&self, f: impl Fn(f64) -> f64, merge_tol: f64) -> Result<Self> {
        let atoms: Vec<(f64, f64)> = self.atoms().map(|(v, w)| (f(v), w)).collect();
        Self::from_atoms(&atoms, merge_tol)
    }

    /// `x + c`.
    pub fn shifted(&self, c: f64) -> Self {
        SpectralDistribution {
            values: self.values.iter().map(|v| v + c).collect(),
            weights: self.weights.clone(),
        }
    }

    /// `k x` for `k > 0`.
    pub fn scaled(&self, k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::BadParam(format!("scale must be positive, got {k}")));
        }
        Ok(SpectralDistribution {
            values: self.values.iter().map(|v| v * k).collect(),
            weights: self.weights.clone(),
        })
    }

    /// Positive part `max(x, 0)`.
    pub fn positive_part(&self) -> Self {
        self.clamp_map(|v| v.max(0.0))
    }

    /// Negative part `max(-x, 0)`.
    pub fn negative_part(&self) -> Self {
        self.clamp_map(|v| (-v).max(0.0))
    }

    /// `|x|`.
    pub fn abs(&self) -> Self {
        self.clamp_map(f64::abs)
    }

    fn clamp_map(&self, f: impl Fn(f64) -> f64) -> Self {
        self.map(f, 0.0).expect("pushforward of a valid distribution")
    }

    /// Total weight of atoms strictly above `s`.
    pub fn tail_weight(&self, s: f64) -> f64 {
        let terms: Vec<f64> = self.atoms().filter(|&(v, _)| v > s).map(|(_, w)| w).collect();
        kahan_sum(&terms).min(1.0)
    }
}

pub(crate) fn kahan_sum(xs: &[f64]) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for &x in xs {
        let y = x - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Generalized t-th value: `lambda_i` for `t` in `[c_{i-1}, c_i)`.
pub fn lambda_t(d: &SpectralDistribution, t: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&t) {
        return Err(Error::Domain(t));
    }
    let c = d.cumulative();
    let idx = c.partition_point(|&ci| ci <= t);
    Ok(d.values[idx.min(d.len() - 1)])
}

pub(crate) fn merge_tol_for(scale: f64) -> f64 {
    MERGE_REL_TOL * scale.max(1.0)
}

/// Eigenvalue distribution of `a` under the normalized trace.
pub fn spectral_distribution(a: &HermitianOperator) -> Result<SpectralDistribution> {
    let eigs = eigenvalues(a)?;
    let scale = eigs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    SpectralDistribution::from_eigenvalues(&eigs, merge_tol_for(scale))
}

/// Distribution of `|x| = (x* x)^{1/2}` for any square matrix. The singular
/// values are read off the dilation `[[0, x], [x*, 0]]`, whose spectrum is
/// `±sigma_i`; this avoids squaring the condition number. Orders above half
/// the dimension cap fall back to `x* x`.
pub fn abs_distribution(x: &Matrix) -> Result<SpectralDistribution> {
    let n = x.dim();
    let sigmas: Vec<f64> = if 2 * n <= super::matrix::MAX_DIM {
        let dilation = Matrix::from_fn(2 * n, |i, j| match (i < n, j < n) {
            (true, false) => x[(i, j - n)],
            (false, true) => x[(j, i - n)].conj(),
            _ => Default::default(),
        });
        let eigs = eigenvalues(&HermitianOperator::from_hermitian_unchecked(dilation))?;
        eigs[..n].iter().map(|v| v.max(0.0)).collect()
    } else {
        let gram = HermitianOperator::new(&x.adjoint() * x)?;
        eigenvalues(&gram)?.into_iter().map(|v| v.max(0.0).sqrt()).collect()
    };
    let scale = sigmas.first().copied().unwrap_or(0.0);
    SpectralDistribution::from_eigenvalues(&sigmas, merge_tol_for(scale))
}

/// Generalized singular value `lambda_t(|x|)`.
pub fn mu_t(x: &Matrix, t: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&t) {
        return Err(Error::Domain(t));
    }
    lambda_t(&abs_distribution(x)?, t)
}

/// `f(a)`: same eigenframe, eigenvalues mapped through `f`.
pub fn functional_calculus(a: &HermitianOperator, f: impl Fn(f64) -> f64) -> Result<HermitianOperator> {
    if a.matrix().is_diagonal() {
        let diag: Vec<f64> = (0..a.dim()).map(|i| f(a.matrix()[(i, i)].re)).collect();
        return HermitianOperator::diagonal(&diag);
    }
    Ok(eigen_decompose(a)?.reconstruct_with(f))
}

/// `(a_+, a_-)` with `a = a_+ - a_-` and `a_+ a_- = 0`.
pub fn positive_negative_parts(a: &HermitianOperator) -> Result<(HermitianOperator, HermitianOperator)> {
    if a.matrix().is_diagonal() {
        let d: Vec<f64> = (0..a.dim()).map(|i| a.matrix()[(i, i)].re).collect();
        let plus: Vec<f64> = d.iter().map(|v| v.max(0.0)).collect();
        let minus: Vec<f64> = d.iter().map(|v| (-v).max(0.0)).collect();
        return Ok((
            HermitianOperator::diagonal(&plus)?,
            HermitianOperator::diagonal(&minus)?,
        ));
    }
    let dec = eigen_decompose(a)?;
    let plus: Vec<f64> = dec.values.iter().map(|v| v.max(0.0)).collect();
    let minus: Vec<f64> = dec.values.iter().map(|v| (-v).max(0.0)).collect();
    Ok((
        HermitianOperator::from_hermitian_unchecked(weighted_outer_sum(&dec.vectors, &plus)),
        HermitianOperator::from_hermitian_unchecked(weighted_outer_sum(&dec.vectors, &minus)),
    ))
}

/// Largest eigenvalue modulus.
pub fn operator_norm(a: &HermitianOperator) -> Result<f64> {
    Ok(eigenvalues(a)?.iter().fold(0.0f64, |m, v| m.max(v.abs())))
}

pub fn normalized_trace(a: &HermitianOperator) -> f64 {
    a.normalized_trace()
}

fn projection_where(a: &HermitianOperator, keep: impl Fn(f64, f64) -> bool) -> Result<HermitianOperator> {
    let dec = eigen_decompose(a)?;
    let scale = dec.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = merge_tol_for(scale);
    let w: Vec<f64> = dec
        .values
        .iter()
        .map(|&v| if keep(v, tol) { 1.0 } else { 0.0 })
        .collect();
    Ok(HermitianOperator::from_hermitian_unchecked(weighted_outer_sum(
        &dec.vectors,
        &w,
    )))
}

/// Projection onto the eigenspaces with eigenvalue in `(lo, inf)`.
pub fn spectral_projection(a: &HermitianOperator, lo: f64) -> Result<HermitianOperator> {
    projection_where(a, |v, tol| v > lo + tol)
}

/// Projection onto the eigenspaces with eigenvalue in `[lo, inf)`.
pub fn spectral_projection_closed(a: &HermitianOperator, lo: f64) -> Result<HermitianOperator> {
    projection_where(a, |v, tol| v >= lo - tol)
}

/// Kronecker product `a ⊗ b`.
pub fn tensor_product(a: &HermitianOperator, b: &HermitianOperator) -> Result<HermitianOperator> {
    a.tensor(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(atoms: &[(f64, f64)]) -> SpectralDistribution {
        SpectralDistribution::from_atoms(atoms, 0.0).unwrap()
    }

    #[test]
    fn identity_distribution() {
        let d = spectral_distribution(&HermitianOperator::identity(4).unwrap()).unwrap();
        assert_eq!(d, SpectralDistribution::point_mass(1.0));
    }

    #[test]
    fn diagonal_distribution() {
        let d = spectral_distribution(&HermitianOperator::diagonal(&[1.0, 1.0, 0.0, 0.0]).unwrap()).unwrap();
        assert_eq!(d.values(), &[1.0, 0.0]);
        assert_eq!(d.weights(), &[0.5, 0.5]);
    }

    #[test]
    fn rejects_bad_weights() {
        assert!(SpectralDistribution::from_atoms(&[(1.0, 0.5)], 0.0).is_err());
        assert!(SpectralDistribution::from_atoms(&[(1.0, -0.5), (0.0, 1.5)], 0.0).is_err());
        assert!(SpectralDistribution::from_atoms(&[(f64::NAN, 1.0)], 0.0).is_err());
    }

    #[test]
    fn merging() {
        let d = SpectralDistribution::from_atoms(&[(1.0, 0.25), (1.0 + 1e-12, 0.25), (0.0, 0.5)], 1e-9).unwrap();
        assert_eq!(d.len(), 2);
        assert!((d.weights()[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn lambda_steps() {
        let d = dist(&[(2.0, 0.5), (0.0, 0.5)]);
        assert_eq!(lambda_t(&d, 0.25).unwrap(), 2.0);
        assert_eq!(lambda_t(&d, 0.5).unwrap(), 0.0);
        assert_eq!(lambda_t(&d, 0.0).unwrap(), 2.0);
        assert!(matches!(lambda_t(&d, 1.0), Err(Error::Domain(_))));
        assert!(matches!(lambda_t(&d, -0.1), Err(Error::Domain(_))));
        let coin = dist(&[(1.0, 0.25), (0.5, 0.5), (0.0, 0.25)]);
        assert_eq!(lambda_t(&coin, 0.3).unwrap(), 0.5);
    }

    #[test]
    fn unitary_singular_values() {
        let y = Matrix::from_real(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        for t in [0.0, 0.3, 0.99] {
            assert!((mu_t(&y, t).unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn square_of_pauli() {
        let y = HermitianOperator::from_real(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let sq = functional_calculus(&y, |x| x * x).unwrap();
        assert!((sq.matrix() - &Matrix::identity(2)).max_abs() < 1e-14);
    }

    #[test]
    fn parts_of_diagonal() {
        let a = HermitianOperator::diagonal(&[1.0, -2.0]).unwrap();
        let (p, m) = positive_negative_parts(&a).unwrap();
        assert_eq!(p, HermitianOperator::diagonal(&[1.0, 0.0]).unwrap());
        assert_eq!(m, HermitianOperator::diagonal(&[0.0, 2.0]).unwrap());
    }

    #[test]
    fn norm_trace_projection() {
        let a = HermitianOperator::diagonal(&[1.0, -3.0]).unwrap();
        assert_eq!(operator_norm(&a).unwrap(), 3.0);
        let p = HermitianOperator::diagonal(&[1.0, 0.0]).unwrap();
        assert_eq!(normalized_trace(&p), 0.5);
        let b = HermitianOperator::diagonal(&[2.0, 1.0, 0.0]).unwrap();
        let e = spectral_projection(&b, 0.5).unwrap();
        assert!((e.matrix() - &Matrix::diagonal(&[1.0, 1.0, 0.0])).max_abs() < 1e-15);
        let closed = spectral_projection_closed(&b, 1.0).unwrap();
        assert!((closed.matrix() - &Matrix::diagonal(&[1.0, 1.0, 0.0])).max_abs() < 1e-15);
        let open = spectral_projection(&b, 1.0).unwrap();
        assert!((open.matrix() - &Matrix::diagonal(&[1.0, 0.0, 0.0])).max_abs() < 1e-15);
    }

    #[test]
    fn tensor_with_identity() {
        let p = HermitianOperator::diagonal(&[1.0, 0.0]).unwrap();
        let i2 = HermitianOperator::identity(2).unwrap();
        let d = spectral_distribution(&tensor_product(&p, &i2).unwrap()).unwrap();
        assert_eq!(d.values(), &[1.0, 0.0]);
        assert_eq!(d.weights(), &[0.5, 0.5]);
    }

    #[test]
    fn cumulative_ends_at_one() {
        let d = dist(&[(3.0, 0.1), (2.0, 0.2), (1.0, 0.7)]);
        let c = d.cumulative();
        assert_eq!(*c.last().unwrap(), 1.0);
        assert!((c[0] - 0.1).abs() < 1e-16 && (c[1] - 0.3).abs() < 1e-16);
    }
}
