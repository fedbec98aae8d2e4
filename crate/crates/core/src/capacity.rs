//! Monotone set functions on finite ground sets and their Choquet integrals.
//!
//! Subsets of `{0, .., N-1}` are encoded as bitmasks, so a capacity on `N`
//! points stores `2^N` values indexed by mask.

use std::sync::Arc;

use crate::error::{Error, Result};

pub const MAX_GROUND_SIZE: usize = 20;

/// A monotone measure on a finite ground set.
#[derive(Debug, Clone)]
pub struct Capacity {
    ground_size: usize,
    values: Arc<Vec<f64>>,
    // Values of the capacity this one was dualized from; lets the dual of a
    // dual hand back the original bits instead of `m - (m - v)`.
    dual_source: Option<Arc<Vec<f64>>>,
}

impl PartialEq for Capacity {
    fn eq(&self, other: &Self) -> bool {
        self.ground_size == other.ground_size && self.values == other.values
    }
}

impl Capacity {
    /// Validated constructor. `values[mask]` is the capacity of the subset
    /// whose members are the set bits of `mask`.
    pub fn new(ground_size: usize, values: Vec<f64>) -> Result<Self> {
        if ground_size == 0 {
            return Err(Error::WrongValueCount {
                expected: 2,
                found: values.len(),
            });
        }
        if ground_size > MAX_GROUND_SIZE {
            return Err(Error::GroundSetTooLarge(ground_size));
        }
        let expected = 1usize << ground_size;
        if values.len() != expected {
            return Err(Error::WrongValueCount {
                expected,
                found: values.len(),
            });
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        if values[0] != 0.0 {
            return Err(Error::NonzeroEmptySet(values[0]));
        }
        // single-point extensions are enough: inclusion chains are transitive
        for mask in 0..expected {
            for bit in 0..ground_size {
                let sup = mask | (1 << bit);
                if sup != mask && values[mask] > values[sup] {
                    return Err(Error::MonotonicityViolation {
                        subset: mask,
                        superset: sup,
                        subset_value: values[mask],
                        superset_value: values[sup],
                    });
                }
            }
        }
        Ok(Self {
            ground_size,
            values: Arc::new(values),
            dual_source: None,
        })
    }

    /// Additive capacity `A -> sum of point masses`.
    pub fn additive(masses: &[f64]) -> Result<Self> {
        let n = masses.len();
        if n > MAX_GROUND_SIZE {
            return Err(Error::GroundSetTooLarge(n));
        }
        let values = (0..1usize << n)
            .map(|mask| (0..n).filter(|i| mask >> i & 1 == 1).map(|i| masses[i]).sum())
            .collect();
        Self::new(n, values)
    }

    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    pub fn full_mask(&self) -> usize {
        (1 << self.ground_size) - 1
    }

    pub fn value(&self, mask: usize) -> f64 {
        self.values[mask]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `mu(X)`.
    pub fn total(&self) -> f64 {
        self.values[self.full_mask()]
    }

    /// The dual capacity `B -> mu(X) - mu(X \ B)`.
    pub fn dual(&self) -> Capacity {
        if let Some(source) = &self.dual_source {
            return Capacity {
                ground_size: self.ground_size,
                values: Arc::clone(source),
                dual_source: Some(Arc::clone(&self.values)),
            };
        }
        let full = self.full_mask();
        let total = self.total();
        let values: Vec<f64> = (0..=full).map(|b| total - self.values[full ^ b]).collect();
        Capacity {
            ground_size: self.ground_size,
            values: Arc::new(values),
            dual_source: Some(Arc::clone(&self.values)),
        }
    }
}

/// Free-function form of [`Capacity::new`].
pub fn make_capacity(ground_size: usize, subset_values: Vec<f64>) -> Result<Capacity> {
    Capacity::new(ground_size, subset_values)
}

pub fn dual_capacity(mu: &Capacity) -> Capacity {
    mu.dual()
}

/// A real function on the ground set, one value per point.
#[derive(Debug, Clone, PartialEq)]
pub struct SimpleFunction {
    values: Vec<f64>,
}

impl SimpleFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `(|f| + f) / 2`
    pub fn positive_part(&self) -> SimpleFunction {
        SimpleFunction {
            values: self.values.iter().map(|v| v.max(0.0)).collect(),
        }
    }

    /// `(|f| - f) / 2`
    pub fn negative_part(&self) -> SimpleFunction {
        SimpleFunction {
            values: self.values.iter().map(|v| (-v).max(0.0)).collect(),
        }
    }

    pub fn shifted(&self, c: f64) -> SimpleFunction {
        SimpleFunction {
            values: self.values.iter().map(|v| v + c).collect(),
        }
    }

    pub fn scaled(&self, k: f64) -> SimpleFunction {
        SimpleFunction {
            values: self.values.iter().map(|v| v * k).collect(),
        }
    }

    fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

fn check_size(f: &SimpleFunction, mu: &Capacity) -> Result<()> {
    if f.len() != mu.ground_size() {
        return Err(Error::SizeMismatch {
            expected: mu.ground_size(),
            found: f.len(),
        });
    }
    Ok(())
}

/// Choquet integral of a non-negative function via the sorted-threshold sum
/// `sum_i (a_(i) - a_(i+1)) mu(B_i) + a_(N) mu(B_N)`, where `a_(1) >= a_(2) >= ..`
/// and `B_i` collects the points carrying the `i` largest values.
pub fn choquet_integral(f: &SimpleFunction, mu: &Capacity) -> Result<f64> {
    check_size(f, mu)?;
    if let Some((index, &value)) = f.values().iter().enumerate().find(|(_, v)| **v < 0.0) {
        return Err(Error::NegativeFunction { index, value });
    }
    Ok(sorted_threshold_sum(f.values(), mu))
}

pub(crate) fn sorted_threshold_sum(values: &[f64], mu: &Capacity) -> f64 {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    // descending, ties by point index
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]).then(i.cmp(&j)));
    threshold_sum_in_order(values, mu, &order)
}

pub(crate) fn threshold_sum_in_order(values: &[f64], mu: &Capacity, order: &[usize]) -> f64 {
    let mut mask = 0usize;
    let mut total = 0.0;
    for (pos, &i) in order.iter().enumerate() {
        mask |= 1 << i;
        let next = order.get(pos + 1).map_or(0.0, |&j| values[j]);
        total += (values[i] - next) * mu.value(mask);
    }
    total
}

/// `C(f+) - C(f-)`.
pub fn symmetric_choquet(f: &SimpleFunction, mu: &Capacity) -> Result<f64> {
    check_size(f, mu)?;
    Ok(sorted_threshold_sum(f.positive_part().values(), mu) - sorted_threshold_sum(f.negative_part().values(), mu))
}

/// `C(f+) - C_dual(f-)`.
pub fn antisymmetric_choquet(f: &SimpleFunction, mu: &Capacity) -> Result<f64> {
    check_size(f, mu)?;
    let dual = mu.dual();
    Ok(sorted_threshold_sum(f.positive_part().values(), mu) - sorted_threshold_sum(f.negative_part().values(), &dual))
}

/// `C(f - b) + b mu(X)` with `b = min f`; the value does not depend on the
/// lower bound chosen.
pub fn translatable_choquet(f: &SimpleFunction, mu: &Capacity) -> Result<f64> {
    check_size(f, mu)?;
    if f.is_empty() {
        return Ok(0.0);
    }
    translatable_with_bound(f, mu, f.min())
}

/// Translatable integral evaluated with an explicit lower bound `b <= min f`.
pub fn translatable_with_bound(f: &SimpleFunction, mu: &Capacity, b: f64) -> Result<f64> {
    check_size(f, mu)?;
    let shifted: Vec<f64> = f.values().iter().map(|v| (v - b).max(0.0)).collect();
    Ok(sorted_threshold_sum(&shifted, mu) + b * mu.total())
}

/// `(f(s) - f(t)) (g(s) - g(t)) >= 0` for every pair of points.
pub fn is_comonotone(f: &SimpleFunction, g: &SimpleFunction) -> Result<bool> {
    if f.len() != g.len() {
        return Err(Error::SizeMismatch {
            expected: f.len(),
            found: g.len(),
        });
    }
    let (a, b) = (f.values(), g.values());
    for s in 0..a.len() {
        for t in s + 1..a.len() {
            if (a[s] - a[t]) * (b[s] - b[t]) < 0.0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair_capacity() -> Capacity {
        Capacity::new(2, vec![0.0, 0.6, 0.6, 1.0]).unwrap()
    }

    fn sf(v: &[f64]) -> SimpleFunction {
        SimpleFunction::new(v.to_vec()).unwrap()
    }

    #[test]
    fn smallest_normalized_capacity() {
        let mu = Capacity::new(1, vec![0.0, 1.0]).unwrap();
        assert_eq!(mu.total(), 1.0);
    }

    #[test]
    fn rejects_non_monotone() {
        let err = Capacity::new(2, vec![0.0, 0.7, 0.3, 0.5]).unwrap_err();
        match err {
            Error::MonotonicityViolation { subset, superset, .. } => {
                assert_eq!(subset, 0b01);
                assert_eq!(superset, 0b11);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_nonzero_empty_set() {
        assert_eq!(
            Capacity::new(1, vec![0.1, 1.0]).unwrap_err(),
            Error::NonzeroEmptySet(0.1)
        );
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(matches!(
            Capacity::new(2, vec![0.0, 1.0]),
            Err(Error::WrongValueCount { expected: 4, found: 2 })
        ));
        assert!(matches!(Capacity::new(21, vec![]), Err(Error::GroundSetTooLarge(21))));
    }

    #[test]
    fn dual_of_non_additive_pair() {
        let dual = pair_capacity().dual();
        let expected = [0.0, 0.4, 0.4, 1.0];
        for (got, want) in dual.values().iter().zip(expected) {
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn additive_capacity_is_self_dual() {
        let mu = Capacity::additive(&[0.5, 0.5]).unwrap();
        assert_eq!(mu.dual(), mu);
    }

    #[test]
    fn dual_is_bitwise_involution() {
        let mu = Capacity::new(2, vec![0.0, 0.1, 0.3, 0.7]).unwrap();
        let back = mu.dual().dual();
        assert_eq!(back.values(), mu.values());
    }

    #[test]
    fn choquet_examples() {
        let mu = pair_capacity();
        assert!((choquet_integral(&sf(&[1.0, 0.0]), &mu).unwrap() - 0.6).abs() < 1e-15);
        assert!((choquet_integral(&sf(&[1.0, 1.0]), &mu).unwrap() - 1.0).abs() < 1e-15);
        assert!((choquet_integral(&sf(&[2.5, 2.5]), &mu).unwrap() - 2.5).abs() < 1e-15);
    }

    #[test]
    fn choquet_rejects_negative() {
        assert!(matches!(
            choquet_integral(&sf(&[-1.0, 0.0]), &pair_capacity()),
            Err(Error::NegativeFunction { index: 0, .. })
        ));
    }

    #[test]
    fn signed_extensions_on_negative_point() {
        let mu = pair_capacity();
        let f = sf(&[-1.0, 0.0]);
        let anti = antisymmetric_choquet(&f, &mu).unwrap();
        let trans = translatable_choquet(&f, &mu).unwrap();
        let sym = symmetric_choquet(&f, &mu).unwrap();
        assert!((anti + 0.4).abs() < 1e-12);
        assert!((trans + 0.4).abs() < 1e-12);
        assert!((sym + 0.6).abs() < 1e-12);
    }

    #[test]
    fn extensions_agree_on_non_negative() {
        let mu = pair_capacity();
        let f = sf(&[0.3, 0.9]);
        let c = choquet_integral(&f, &mu).unwrap();
        for v in [
            symmetric_choquet(&f, &mu).unwrap(),
            antisymmetric_choquet(&f, &mu).unwrap(),
            translatable_choquet(&f, &mu).unwrap(),
        ] {
            assert!((v - c).abs() < 1e-12);
        }
    }

    #[test]
    fn translatable_ignores_bound_choice() {
        let mu = pair_capacity();
        let f = sf(&[-0.3, 1.2]);
        let a = translatable_with_bound(&f, &mu, -0.3).unwrap();
        let b = translatable_with_bound(&f, &mu, -5.0).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn comonotone_examples() {
        let f = sf(&[1.0, 2.0]);
        assert!(is_comonotone(&f, &f).unwrap());
        assert!(is_comonotone(&f, &sf(&[3.0, 3.0])).unwrap());
        assert!(!is_comonotone(&f, &sf(&[2.0, 1.0])).unwrap());
        assert!(is_comonotone(&f, &sf(&[1.0])).is_err());
    }

    #[test]
    fn integral_is_tie_order_invariant() {
        let mu = Capacity::new(3, vec![0.0, 0.2, 0.5, 0.6, 0.3, 0.5, 0.9, 1.0]).unwrap();
        let values = [0.4, 0.1, 0.4];
        let reference = sorted_threshold_sum(&values, &mu);
        // both orderings of the tied points 0 and 2 are valid descending sorts
        let swapped = threshold_sum_in_order(&values, &mu, &[2, 0, 1]);
        assert!((swapped - reference).abs() < 1e-15);
    }
}
