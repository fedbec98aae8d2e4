//! Moment sequences of averages, their bound envelopes and the
//! finite-`n` form of the upper and lower limit bounds.

use crate::error::{Error, Result};
use crate::models::{powers_average_norm, CoinTossModel, PowersShiftModel, SumModel};
use crate::spectra::{operator_norm, HermitianOperator, SpectralDistribution};
use crate::trace::phi_translatable;
use crate::weights::WeightFunction;

/// Slack used by report verdicts.
pub const VERDICT_TOL: f64 = 1e-9;
/// Slack used by the independence predicates.
pub const INDEPENDENCE_TOL: f64 = 1e-9;
/// Largest family accepted by [`independence_check`].
pub const MAX_FAMILY: usize = 8;

/// Bounds `lower <= liminf` and `limsup <= upper` for the `k`-th moment.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundEnvelope {
    pub k: u32,
    pub upper: f64,
    pub lower: f64,
    /// Which construction produced the bounds.
    pub source: String,
}

/// The concave and convex members of `{w, dual(w)}`.
fn concave_convex_pair(w: &WeightFunction) -> Result<(WeightFunction, WeightFunction)> {
    let dual = w.dual()?;
    if w.shape().is_concave() {
        Ok((w.clone(), dual))
    } else if w.shape().is_convex() {
        Ok((dual, w.clone()))
    } else {
        Err(Error::Shape {
            name: w.name().to_string(),
            required: "concave or convex",
        })
    }
}

/// Evaluates the concave weight of `{w, dual(w)}` on the product of `k`
/// distinct members for the upper bound, and the convex one for the lower.
pub fn envelope(model: &CoinTossModel, w: &WeightFunction, k: u32) -> Result<BoundEnvelope> {
    if k == 0 {
        return Err(Error::BadParam("moment order must be at least 1".into()));
    }
    let (concave, convex) = concave_convex_pair(w)?;
    let product = model.product_distribution(k as usize)?;
    Ok(BoundEnvelope {
        k,
        upper: phi_translatable(&concave, &product)?,
        lower: phi_translatable(&convex, &product)?,
        source: format!(
            "product of {k} distinct terms of {}p{:+}I under {} / {}",
            model.scale(),
            model.offset(),
            concave.name(),
            convex.name()
        ),
    })
}

/// One cell of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub n: Option<u64>,
    pub k: u32,
    pub weight: String,
    pub value: f64,
    pub upper_bound: Option<f64>,
    pub lower_bound: Option<f64>,
    pub finite_n_bound: Option<f64>,
    pub verdict: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExperimentReport {
    pub rows: Vec<ReportRow>,
}

impl ExperimentReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.verdict)
    }

    pub fn violations(&self) -> usize {
        self.rows.iter().filter(|r| !r.verdict).count()
    }
}

/// `phi^t((s_n / n)^k)` for each `n`.
pub fn moment_sequence(model: &impl SumModel, w: &WeightFunction, k: u32, n_list: &[usize]) -> Result<Vec<f64>> {
    n_list.iter().map(|&n| moment(model, w, k, n)).collect()
}

fn moment(model: &impl SumModel, w: &WeightFunction, k: u32, n: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::BadParam("moment order must be at least 1".into()));
    }
    let d = model.average_distribution(n)?;
    phi_translatable(w, &d.map(|x| x.powi(k as i32), 0.0)?)
}

/// `n! / ((n - k)! n^k)`, the share of index tuples with distinct entries.
pub fn distinct_tuple_ratio(k: u32, n: usize) -> f64 {
    let nf = n as f64;
    (0..k as usize).map(|j| (n as f64 - j as f64).max(0.0) / nf).product()
}

/// `n! / (n - k)!` as an exact integer, `None` on overflow.
pub fn distinct_tuple_count(k: u32, n: usize) -> Option<u128> {
    (0..k as u128).try_fold(1u128, |acc, j| acc.checked_mul((n as u128).checked_sub(j)?))
}

fn check_order(k: u32, n: usize) -> Result<()> {
    if k == 0 || k as usize > n {
        return Err(Error::BadOrder { k: k as usize, n });
    }
    Ok(())
}

/// `r C(k) + (1 - r) K^k` with `r` the distinct-tuple ratio.
pub fn finite_n_bound(w: &WeightFunction, c_k: f64, k_norm: f64, k: u32, n: usize) -> Result<f64> {
    w.require_concave()?;
    check_order(k, n)?;
    let r = distinct_tuple_ratio(k, n);
    Ok(r * c_k + (1.0 - r) * k_norm.powi(k as i32))
}

/// Mirror image for convex weights: `r C^(k) - (1 - r) K^k`.
pub fn finite_n_lower_bound(c_hat_k: f64, k_norm: f64, k: u32, n: usize) -> Result<f64> {
    check_order(k, n)?;
    let r = distinct_tuple_ratio(k, n);
    Ok(r * c_hat_k - (1.0 - r) * k_norm.powi(k as i32))
}

/// Moments of a coin-toss model with their envelope and finite-`n` bounds.
/// The verdict requires the value to sit between the finite-`n` lower and
/// upper bounds; for `n < k` only `|value| <= K^k` is checked.
pub fn moment_report(
    model: &CoinTossModel,
    w: &WeightFunction,
    ks: &[u32],
    n_list: &[usize],
) -> Result<ExperimentReport> {
    let mut rows = Vec::new();
    let k_norm = model.norm_bound();
    for &k in ks {
        let env = match concave_convex_pair(w) {
            Ok(_) => Some(envelope(model, w, k)?),
            Err(Error::Shape { .. }) => None,
            Err(e) => return Err(e),
        };
        for &n in n_list {
            let value = moment(model, w, k, n)?;
            let trivial = k_norm.powi(k as i32);
            let (upper, lower, finite, verdict) = match &env {
                Some(env) if k as usize <= n => {
                    let r = distinct_tuple_ratio(k, n);
                    let hi = r * env.upper + (1.0 - r) * trivial;
                    let lo = r * env.lower - (1.0 - r) * trivial;
                    let ok = value <= hi + VERDICT_TOL && value >= lo - VERDICT_TOL;
                    (Some(env.upper), Some(env.lower), Some(hi), ok)
                }
                Some(env) => (
                    Some(env.upper),
                    Some(env.lower),
                    None,
                    value.abs() <= trivial + VERDICT_TOL,
                ),
                None => (None, None, None, value.abs() <= trivial + VERDICT_TOL),
            };
            rows.push(ReportRow {
                n: Some(n as u64),
                k,
                weight: w.name().to_string(),
                value,
                upper_bound: upper,
                lower_bound: lower,
                finite_n_bound: finite,
                verdict,
            });
        }
    }
    Ok(ExperimentReport { rows })
}

/// Largest `n` for which [`powers_report`] measures norms on explicit
/// matrices.
pub const POWERS_MATRIX_LIMIT: usize = 10;

/// `||(s_n / n)^k||` for a Powers family against the norm bound, plus
/// `phi((s_n / n)^k)` rows when a weight is given. Norms come from explicit
/// matrices up to [`POWERS_MATRIX_LIMIT`] and from the analytic law above.
/// Period 1 must match `n^{-k/2}` exactly; longer periods must stay below
/// the subsequence bound.
pub fn powers_report(
    model: &PowersShiftModel,
    w: Option<&WeightFunction>,
    ks: &[u32],
    n_list: &[usize],
) -> Result<ExperimentReport> {
    if ks.contains(&0) {
        return Err(Error::BadParam("moment order must be at least 1".into()));
    }
    let norms: Vec<f64> = n_list
        .iter()
        .map(|&n| {
            if n <= POWERS_MATRIX_LIMIT {
                Ok(operator_norm(&model.sum_matrix(n)?)? / n as f64)
            } else {
                let d = model.average_distribution(n)?;
                Ok(d.max_value().abs().max(d.min_value().abs()))
            }
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for &k in ks {
        for (&n, norm) in n_list.iter().zip(&norms) {
            let bound = powers_average_norm(model.period(), n)?;
            let upper = bound.value.powi(k as i32);
            let value = norm.powi(k as i32);
            let verdict = if bound.exact {
                (value - upper).abs() <= VERDICT_TOL
            } else {
                value <= upper + VERDICT_TOL
            };
            rows.push(ReportRow {
                n: Some(n as u64),
                k,
                weight: "norm".into(),
                value,
                upper_bound: Some(upper),
                lower_bound: None,
                finite_n_bound: None,
                verdict,
            });
            if let Some(w) = w {
                let value = moment(model, w, k, n)?;
                rows.push(ReportRow {
                    n: Some(n as u64),
                    k,
                    weight: w.name().to_string(),
                    value,
                    upper_bound: Some(upper),
                    lower_bound: Some(-upper),
                    finite_n_bound: None,
                    verdict: value.abs() <= upper + VERDICT_TOL,
                });
            }
        }
    }
    Ok(ExperimentReport { rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndependenceKind {
    Independent,
    Sub,
    Super,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndependenceViolation {
    pub indices: Vec<usize>,
    /// `phi(Re(a_{i_1} ... a_{i_m}))`.
    pub lhs: f64,
    /// `prod phi(a_{i_j})`.
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndependenceReport {
    pub tuples_checked: usize,
    pub violation: Option<IndependenceViolation>,
}

impl IndependenceReport {
    pub fn holds(&self) -> bool {
        self.violation.is_none()
    }
}

/// Tests the product rule over every ordered tuple of distinct indices of
/// length `2..=max_order`, stopping at the first violation.
pub fn independence_check(
    family: &[HermitianOperator],
    w: &WeightFunction,
    kind: IndependenceKind,
    max_order: usize,
) -> Result<IndependenceReport> {
    if family.is_empty() || family.len() > MAX_FAMILY {
        return Err(Error::BadParam(format!(
            "family size must be 1..={MAX_FAMILY}, got {}",
            family.len()
        )));
    }
    let dim = family[0].dim();
    if let Some(bad) = family.iter().find(|a| a.dim() != dim) {
        return Err(Error::DimensionMismatch {
            left: dim,
            right: bad.dim(),
        });
    }
    let singles: Vec<f64> = family.iter().map(|a| phi_translatable(w, a)).collect::<Result<_>>()?;
    let mut checked = 0;
    let mut stack: Vec<usize> = Vec::new();
    let violation = visit_tuples(family.len(), max_order.min(family.len()), &mut stack, &mut |idx| {
        let mut prod = family[idx[0]].matrix().clone();
        for &i in &idx[1..] {
            prod = &prod * family[i].matrix();
        }
        let lhs = phi_translatable(w, &prod.real_part())?;
        let rhs: f64 = idx.iter().map(|&i| singles[i]).product();
        checked += 1;
        let bad = match kind {
            IndependenceKind::Independent => (lhs - rhs).abs() > INDEPENDENCE_TOL,
            IndependenceKind::Sub => lhs > rhs + INDEPENDENCE_TOL,
            IndependenceKind::Super => lhs < rhs - INDEPENDENCE_TOL,
        };
        Ok(bad.then(|| IndependenceViolation {
            indices: idx.to_vec(),
            lhs,
            rhs,
        }))
    })?;
    Ok(IndependenceReport {
        tuples_checked: checked,
        violation,
    })
}

type TupleVisitor<'a> = dyn FnMut(&[usize]) -> Result<Option<IndependenceViolation>> + 'a;

fn visit_tuples(
    size: usize,
    max_order: usize,
    stack: &mut Vec<usize>,
    f: &mut TupleVisitor<'_>,
) -> Result<Option<IndependenceViolation>> {
    if stack.len() >= 2 {
        if let Some(v) = f(stack)? {
            return Ok(Some(v));
        }
    }
    if stack.len() == max_order {
        return Ok(None);
    }
    for i in 0..size {
        if stack.contains(&i) {
            continue;
        }
        stack.push(i);
        let found = visit_tuples(size, max_order, stack, f)?;
        stack.pop();
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

/// Min and max over the last `ceil(tail_fraction * len)` values.
pub fn tail_interval(values: &[f64], tail_fraction: f64) -> Result<(f64, f64)> {
    if values.is_empty() {
        return Err(Error::EmptySequence);
    }
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(Error::BadFraction(tail_fraction));
    }
    let take = ((tail_fraction * values.len() as f64).ceil() as usize).clamp(1, values.len());
    let tail = &values[values.len() - take..];
    let lo = tail.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((lo, hi))
}

/// Share of the sequence used for tail estimates in
/// [`absolutely_monotone_check`].
pub const TAIL_FRACTION: f64 = 0.25;

#[derive(Debug, Clone, PartialEq)]
pub struct AbsolutelyMonotoneReport {
    /// `(n, phi(f(s_n / n)))`.
    pub values: Vec<(usize, f64)>,
    /// `phi(a_1)`.
    pub single_value: f64,
    /// `f(phi(a_1))`, the limit-superior bound.
    pub bound: f64,
    pub tail: (f64, f64),
    pub holds: bool,
}

/// `f(x) = sum_j coeffs[j] x^(j+1)`.
pub fn power_series(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| (acc + c) * x)
}

/// Evaluates `phi(f(s_n / n))` along `n_list` for `f` with non-negative
/// coefficients and compares the tail against `f(phi(a_1))`.
pub fn absolutely_monotone_check(
    model: &CoinTossModel,
    w: &WeightFunction,
    coeffs: &[f64],
    n_list: &[usize],
) -> Result<AbsolutelyMonotoneReport> {
    w.require_concave()?;
    if let Some((index, &value)) = coeffs.iter().enumerate().find(|(_, c)| **c < 0.0 || !c.is_finite()) {
        return Err(Error::NegativeCoefficient { index, value });
    }
    if model.offset() < 0.0 || model.scale() + model.offset() < 0.0 {
        return Err(Error::BadParam("the model must be positive".into()));
    }
    let single_value = phi_translatable(w, &model.average_distribution(1)?)?;
    let bound = power_series(coeffs, single_value);
    let values: Vec<(usize, f64)> = n_list
        .iter()
        .map(|&n| {
            let d: SpectralDistribution = model.average_distribution(n)?;
            Ok((n, phi_translatable(w, &d.map(|x| power_series(coeffs, x), 0.0)?)?))
        })
        .collect::<Result<_>>()?;
    let seq: Vec<f64> = values.iter().map(|v| v.1).collect();
    let tail = tail_interval(&seq, TAIL_FRACTION)?;
    Ok(AbsolutelyMonotoneReport {
        values,
        single_value,
        bound,
        tail,
        holds: tail.1 <= bound + VERDICT_TOL,
    })
}
