//! Operator sequences for the law-of-large-numbers experiments: tensor
//! coin tosses, anticommuting self-adjoint unitaries and their periodic
//! variants.

use crate::error::{Error, Result};
use crate::spectra::{operator_norm, HermitianOperator, Matrix, SpectralDistribution};
use crate::trace::{alpha_norm, phi_translatable};
use crate::weights::WeightFunction;

/// Largest `n` for the analytic coin-toss distribution.
pub const COIN_TOSS_CAP: usize = 8192;
/// Above this `n` binomial weights are computed in log space.
pub const PASCAL_LIMIT: usize = 1024;
/// Largest number of `M_2` tensor factors for explicit matrices.
pub const MAX_FACTORS: usize = 12;
/// Explicit projection families stop here (each member is a dense matrix).
pub const MAX_PROJECTION_FACTORS: usize = 8;

/// A sequence with an analytic law for the average `s_n / n`.
pub trait SumModel {
    fn average_distribution(&self, n: usize) -> Result<SpectralDistribution>;
    /// `sup_i ||a_i||`.
    fn norm_bound(&self) -> f64;
    fn max_n(&self) -> usize;
}

/// `a_i = scale * p_i + offset * I` for independent projections `p_i` of
/// trace one half.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoinTossModel {
    scale: f64,
    offset: f64,
}

impl CoinTossModel {
    pub fn new(scale: f64, offset: f64) -> Result<Self> {
        if scale == 0.0 || !scale.is_finite() || !offset.is_finite() {
            return Err(Error::BadParam(format!(
                "coin-toss transform needs a finite nonzero scale, got ({scale}, {offset})"
            )));
        }
        Ok(CoinTossModel { scale, offset })
    }

    /// `a_i = p_i`.
    pub fn projections() -> Self {
        CoinTossModel {
            scale: 1.0,
            offset: 0.0,
        }
    }

    /// `a_i = -p_i`.
    pub fn negated() -> Self {
        CoinTossModel {
            scale: -1.0,
            offset: 0.0,
        }
    }

    /// `a_i = 2 p_i - I`.
    pub fn reflections() -> Self {
        CoinTossModel {
            scale: 2.0,
            offset: -1.0,
        }
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn apply(&self, x: f64) -> f64 {
        self.scale * x + self.offset
    }

    /// Law of `s_n` itself: atoms `scale (n - j) + n offset`.
    pub fn sum_distribution(&self, n: usize) -> Result<SpectralDistribution> {
        let w = binomial_weights(n)?;
        let nf = n as f64;
        let atoms: Vec<(f64, f64)> = (0..=n)
            .map(|j| (self.scale * (n - j) as f64 + nf * self.offset, w[j]))
            .collect();
        SpectralDistribution::from_atoms(&atoms, 0.0)
    }

    /// Law of a product of `k` distinct members: `(scale + offset)^j offset^(k - j)`
    /// with weight `C(k, j) / 2^k`.
    pub fn product_distribution(&self, k: usize) -> Result<SpectralDistribution> {
        let w = binomial_weights(k)?;
        let hi = self.scale + self.offset;
        let atoms: Vec<(f64, f64)> = (0..=k)
            .map(|j| (hi.powi(j as i32) * self.offset.powi((k - j) as i32), w[k - j]))
            .collect();
        SpectralDistribution::from_atoms(&atoms, 0.0)
    }
}

impl SumModel for CoinTossModel {
    fn average_distribution(&self, n: usize) -> Result<SpectralDistribution> {
        coin_toss_average_distribution(self, n)
    }

    fn norm_bound(&self) -> f64 {
        (self.scale + self.offset).abs().max(self.offset.abs())
    }

    fn max_n(&self) -> usize {
        COIN_TOSS_CAP
    }
}

/// `C(n, j) / 2^n` for `j = 0..=n`.
pub fn binomial_weights(n: usize) -> Result<Vec<f64>> {
    if n > COIN_TOSS_CAP {
        return Err(Error::Overflow { n, max: COIN_TOSS_CAP });
    }
    if n <= PASCAL_LIMIT {
        let mut row = vec![0.0; n + 1];
        row[0] = 1.0;
        for m in 1..=n {
            for j in (1..=m).rev() {
                row[j] = 0.5 * (row[j] + row[j - 1]);
            }
            row[0] *= 0.5;
        }
        return Ok(row);
    }
    // log C(n, j) relative to the central term, accumulated outward from
    // the mode with compensation, then normalized by a compensated sum
    let mid = n / 2;
    let mut logs = vec![0.0; n + 1];
    let (mut acc, mut comp) = (0.0f64, 0.0f64);
    for j in mid..n {
        let y = ((n - j) as f64 / (j + 1) as f64).ln() - comp;
        let t = acc + y;
        comp = (t - acc) - y;
        acc = t;
        logs[j + 1] = acc;
    }
    let (mut acc, mut comp) = (0.0f64, 0.0f64);
    for j in (1..=mid).rev() {
        let y = (j as f64 / (n - j + 1) as f64).ln() - comp;
        let t = acc + y;
        comp = (t - acc) - y;
        acc = t;
        logs[j - 1] = acc;
    }
    let raw: Vec<f64> = logs.iter().map(|l| l.exp()).collect();
    let total = crate::spectra::distribution::kahan_sum(&raw);
    Ok(raw.into_iter().map(|r| r / total).collect())
}

/// Law of `s_n / n`: atoms `scale (n - j) / n + offset` with weight
/// `C(n, j) / 2^n`. Underflowed weights are dropped.
pub fn coin_toss_average_distribution(m: &CoinTossModel, n: usize) -> Result<SpectralDistribution> {
    if n == 0 {
        return Err(Error::BadParam("n must be at least 1".into()));
    }
    let w = binomial_weights(n)?;
    let nf = n as f64;
    let atoms: Vec<(f64, f64)> = (0..=n).map(|j| (m.apply((n - j) as f64 / nf), w[j])).collect();
    SpectralDistribution::from_atoms(&atoms, 0.0)
}

fn check_factors(n: usize, max: usize) -> Result<()> {
    if n == 0 || n > max {
        return Err(Error::DimensionOverflow {
            dim: 1usize.checked_shl(n as u32).unwrap_or(usize::MAX),
            max: 1 << max,
        });
    }
    Ok(())
}

/// `p_1 + ... + p_n` on `2^n` dimensions, where `p_i` is `diag(1, 0)` in the
/// `i`-th tensor factor. Built directly as a diagonal.
pub fn coin_toss_matrix(n: usize) -> Result<HermitianOperator> {
    check_factors(n, MAX_FACTORS)?;
    let dim = 1usize << n;
    let diag: Vec<f64> = (0..dim).map(|b| (n as u32 - (b as u32).count_ones()) as f64).collect();
    HermitianOperator::diagonal(&diag)
}

fn kron_chain(factors: &[&Matrix]) -> Result<Matrix> {
    let mut out = factors[0].clone();
    for f in &factors[1..] {
        out = out.kron(f)?;
    }
    Ok(out)
}

fn pauli_x() -> Matrix {
    Matrix::diagonal(&[1.0, -1.0])
}

fn pauli_y() -> Matrix {
    Matrix::from_real(2, &[0.0, 1.0, 1.0, 0.0]).expect("2x2")
}

/// The projections `p_i = I ⊗ .. ⊗ diag(1, 0) ⊗ .. ⊗ I` via explicit
/// Kronecker products.
pub fn coin_toss_projections(n: usize) -> Result<Vec<HermitianOperator>> {
    check_factors(n, MAX_PROJECTION_FACTORS)?;
    let e0 = Matrix::diagonal(&[1.0, 0.0]);
    let id = Matrix::identity(2);
    (0..n)
        .map(|i| {
            let factors: Vec<&Matrix> = (0..n).map(|j| if j == i { &e0 } else { &id }).collect();
            HermitianOperator::new(kron_chain(&factors)?)
        })
        .collect()
}

/// Self-adjoint unitaries where `u_i` and `u_j` anticommute exactly when
/// `|i - j|` is a positive multiple of `period` and commute otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PowersShiftModel {
    period: usize,
}

impl PowersShiftModel {
    pub fn new(period: usize) -> Result<Self> {
        if period == 0 {
            return Err(Error::BadPeriod);
        }
        Ok(PowersShiftModel { period })
    }

    pub fn period(&self) -> usize {
        self.period
    }

    /// Sign pattern: `true` for anticommuting gaps.
    pub fn anticommutes(&self, gap: usize) -> bool {
        gap > 0 && gap.is_multiple_of(self.period)
    }

    /// Lengths `ceil((n - r) / K)` of the residue-class subsequences.
    pub fn class_lengths(&self, n: usize) -> Vec<usize> {
        (0..self.period.min(n)).map(|r| (n - r).div_ceil(self.period)).collect()
    }

    /// `u_0, ..., u_{n-1}`. Residue class `r` lives on its own block of
    /// tensor factors, where it is the chain `y ⊗ .. ⊗ y ⊗ x ⊗ I ..`.
    pub fn unitaries(&self, n: usize) -> Result<Vec<HermitianOperator>> {
        check_factors(n, MAX_FACTORS)?;
        (0..n).map(|i| self.unitary(i, n)).collect()
    }

    /// The member `u_i` of the family on `n` factors.
    pub fn unitary(&self, i: usize, n: usize) -> Result<HermitianOperator> {
        check_factors(n, MAX_FACTORS)?;
        if i >= n {
            return Err(Error::BadOrder { k: i, n });
        }
        let lengths = self.class_lengths(n);
        let (r, pos) = (i % self.period, i / self.period);
        let start: usize = lengths[..r].iter().sum();
        let active = start + pos;
        let (x, y, id) = (pauli_x(), pauli_y(), Matrix::identity(2));
        let factors: Vec<&Matrix> = (0..n)
            .map(|f| {
                if f >= start && f < active {
                    &y
                } else if f == active {
                    &x
                } else {
                    &id
                }
            })
            .collect();
        HermitianOperator::new(kron_chain(&factors)?)
    }

    /// `s_n = u_0 + ... + u_{n-1}`, building one member at a time.
    pub fn sum_matrix(&self, n: usize) -> Result<HermitianOperator> {
        let mut acc = self.unitary(0, n)?;
        for i in 1..n {
            acc = &acc + &self.unitary(i, n)?;
        }
        Ok(acc)
    }
}

impl SumModel for PowersShiftModel {
    /// The classes act on disjoint factors, so `s_n` is a sum of commuting
    /// independent terms with spectra `±sqrt(m_r)`.
    fn average_distribution(&self, n: usize) -> Result<SpectralDistribution> {
        if n == 0 {
            return Err(Error::BadParam("n must be at least 1".into()));
        }
        let roots: Vec<f64> = self.class_lengths(n).iter().map(|&m| (m as f64).sqrt()).collect();
        let classes = roots.len();
        if classes > 20 {
            return Err(Error::Overflow { n: classes, max: 20 });
        }
        let w = 0.5f64.powi(classes as i32);
        let nf = n as f64;
        let atoms: Vec<(f64, f64)> = (0..1usize << classes)
            .map(|signs| {
                let v: f64 = roots
                    .iter()
                    .enumerate()
                    .map(|(r, s)| if signs >> r & 1 == 1 { -s } else { *s })
                    .sum();
                (v / nf, w)
            })
            .collect();
        SpectralDistribution::from_atoms(&atoms, 1e-12)
    }

    fn norm_bound(&self) -> f64 {
        1.0
    }

    fn max_n(&self) -> usize {
        usize::MAX
    }
}

/// The anticommuting family (`period = 1`) as explicit matrices.
pub fn powers_unitaries(n: usize) -> Result<Vec<HermitianOperator>> {
    PowersShiftModel { period: 1 }.unitaries(n)
}

/// `||s_n / n||`, tagged with whether it is exact or an upper bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormValue {
    pub value: f64,
    pub exact: bool,
}

/// `n^{-1/2}` for period 1; for larger periods the subsequence bound
/// `(1/n) sum_r sqrt(m_r)` with `m_r = ceil((n - r) / K)`.
pub fn powers_average_norm(period: usize, n: usize) -> Result<NormValue> {
    let model = PowersShiftModel::new(period)?;
    if n == 0 {
        return Err(Error::BadParam("n must be at least 1".into()));
    }
    if period == 1 {
        return Ok(NormValue {
            value: 1.0 / (n as f64).sqrt(),
            exact: true,
        });
    }
    let total: f64 = model.class_lengths(n).iter().map(|&m| (m as f64).sqrt()).sum();
    Ok(NormValue {
        value: total / n as f64,
        exact: false,
    })
}

/// `phi((s_n / sqrt n)^k)`: the normalized sum is a self-adjoint unitary
/// with spectrum `{1, -1}` in equal proportion.
pub fn powers_clt_moment(w: &WeightFunction, k: u32) -> Result<f64> {
    if k == 0 {
        return Err(Error::BadParam("moment order must be at least 1".into()));
    }
    w.require_continuous()?;
    let u = SpectralDistribution::from_atoms(&[(1.0, 0.5), (-1.0, 0.5)], 0.0)?;
    phi_translatable(w, &u.map(|x| x.powi(k as i32), 0.0)?)
}

/// `||U_{2n} - U_n||` from explicit matrices and the analytic value
/// `sqrt(2 - sqrt 2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapValue {
    pub matrix: f64,
    pub analytic: f64,
}

pub fn powers_nonconvergence_gap(n: usize) -> Result<GapValue> {
    check_factors(2 * n, MAX_FACTORS)?;
    let model = PowersShiftModel { period: 1 };
    let (a, b) = (
        1.0 / (2.0 * n as f64).sqrt() - 1.0 / (n as f64).sqrt(),
        1.0 / (2.0 * n as f64).sqrt(),
    );
    let mut diff = model.unitary(0, 2 * n)?.scale(a);
    for i in 1..2 * n {
        diff = &diff + &model.unitary(i, 2 * n)?.scale(if i < n { a } else { b });
    }
    Ok(GapValue {
        matrix: operator_norm(&diff)?,
        analytic: (2.0 - 2f64.sqrt()).sqrt(),
    })
}

/// The tensor-shift endomorphism acting on a coin-toss sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftModel {
    pub base: CoinTossModel,
}

/// `x_n = phi_alpha(|s_n|^k)^{1/k}` for `n = 1..=n_max`, from the law of
/// the unnormalized sum.
pub fn fekete_sequence(sm: &ShiftModel, w: &WeightFunction, k: u32, n_max: usize) -> Result<Vec<f64>> {
    w.require_concave()?;
    if k == 0 {
        return Err(Error::BadParam("exponent must be at least 1".into()));
    }
    (1..=n_max)
        .map(|n| alpha_norm(w, k as f64, &sm.base.sum_distribution(n)?))
        .collect()
}
