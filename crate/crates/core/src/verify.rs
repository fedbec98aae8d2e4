//! Randomized property suites, one named check per invariant.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::capacity::{
    antisymmetric_choquet, choquet_integral, is_comonotone, sorted_threshold_sum, threshold_sum_in_order,
    translatable_choquet, translatable_with_bound, Capacity, SimpleFunction,
};
use crate::error::Result;
use crate::lln::{envelope, finite_n_bound, finite_n_lower_bound, moment_sequence, tail_interval};
use crate::models::{
    coin_toss_average_distribution, coin_toss_matrix, coin_toss_projections, fekete_sequence, powers_clt_moment,
    CoinTossModel, PowersShiftModel, ShiftModel, SumModel,
};
use crate::spectra::{
    eigen_decompose, eigenvalues, functional_calculus, mu_t, operator_norm, sample_with, spectral_distribution,
    unitary_from_generator, HermitianOperator, Matrix, SampleKind, SpectralDistribution,
};
use crate::trace::{alpha_norm, chebyshev_check, phi_antisymmetric, phi_positive, phi_translatable};
use crate::weights::{classify_shape, stieltjes_increment, WeightFunction, VALIDATION_GRID};

/// Default number of random trials per property.
pub const DEFAULT_TRIALS: usize = 1000;
/// Default tolerance for the randomized suites.
pub const TOL: f64 = 1e-9;

type Check = std::result::Result<(), String>;
type PropertyFn = fn(&mut ChaCha8Rng, usize) -> Check;

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyOutcome {
    pub name: &'static str,
    pub passed: bool,
    /// First counterexample or error, empty on success.
    pub detail: String,
}

fn lift<T>(r: Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn ensure(cond: bool, detail: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(detail())
    }
}

const PROPERTIES: &[(&str, PropertyFn)] = &[
    ("capacity.monotonicity", capacity_monotonicity),
    ("capacity.comonotone_additivity", capacity_comonotone_additivity),
    ("capacity.positive_homogeneity", capacity_positive_homogeneity),
    ("capacity.translatability", capacity_translatability),
    ("capacity.bound_independence", capacity_bound_independence),
    (
        "capacity.antisymmetric_equals_translatable",
        capacity_antisymmetric_equals_translatable,
    ),
    ("capacity.tie_invariance", capacity_tie_invariance),
    ("capacity.dual_involution", capacity_dual_involution),
    ("weights.dual_involution", weights_dual_involution),
    ("weights.dual_flips_shape", weights_dual_flips_shape),
    ("weights.dual_sandwich", weights_dual_sandwich),
    ("weights.partition_additivity", weights_partition_additivity),
    ("spectra.eigen_residual", spectra_eigen_residual),
    ("spectra.mu_monotone", spectra_mu_monotone),
    ("spectra.mu_subadditive", spectra_mu_subadditive),
    ("spectra.mu_product", spectra_mu_product),
    ("spectra.mu_adjoint", spectra_mu_adjoint),
    ("spectra.mu_unitary_invariance", spectra_mu_unitary_invariance),
    ("spectra.mu_lipschitz", spectra_mu_lipschitz),
    ("spectra.mu_functional_calculus", spectra_mu_functional_calculus),
    ("spectra.merge_invariance", spectra_merge_invariance),
    ("spectra.tensor_trace", spectra_tensor_trace),
    ("trace.positive_homogeneity", trace_positive_homogeneity),
    ("trace.translatability", trace_translatability),
    ("trace.monotonicity", trace_monotonicity),
    ("trace.unitary_invariance", trace_unitary_invariance),
    ("trace.triangle_concave", trace_triangle_concave),
    ("trace.lipschitz", trace_lipschitz),
    ("trace.dual_antisymmetry", trace_dual_antisymmetry),
    ("trace.norm_bound", trace_norm_bound),
    ("trace.superadditive_convex", trace_superadditive_convex),
    ("trace.dual_below_concave", trace_dual_below_concave),
    (
        "trace.antisymmetric_equals_translatable",
        trace_antisymmetric_equals_translatable,
    ),
    ("trace.layer_cake", trace_layer_cake),
    ("trace.increasing_decomposition", trace_increasing_decomposition),
    ("trace.alpha_norm_triangle", trace_alpha_norm_triangle),
    ("trace.chebyshev", trace_chebyshev),
    ("models.bridge", models_bridge),
    ("models.anticommutation_closure", models_anticommutation_closure),
    ("models.normalized_sum_unitary", models_normalized_sum_unitary),
    ("models.clt_moment_matrix", models_clt_moment_matrix),
    ("models.projection_independence", models_projection_independence),
    ("models.fekete_subadditivity", models_fekete_subadditivity),
    ("lln.finite_n_upper", lln_finite_n_upper),
    ("lln.finite_n_lower", lln_finite_n_lower),
    ("lln.convex_tail_lower", lln_convex_tail_lower),
    ("lln.linear_limit", lln_linear_limit),
    ("lln.dual_sandwich", lln_dual_sandwich),
];

/// Names of every property, in run order.
pub fn property_names() -> Vec<&'static str> {
    PROPERTIES.iter().map(|(n, _)| *n).collect()
}

/// Runs one property by name, `None` if unknown.
pub fn run_property(name: &str, seed: u64, trials: usize) -> Option<PropertyOutcome> {
    PROPERTIES
        .iter()
        .enumerate()
        .find(|(_, (n, _))| *n == name)
        .map(|(i, (n, f))| run_one(i, n, *f, seed, trials))
}

fn run_one(index: usize, name: &'static str, f: PropertyFn, seed: u64, trials: usize) -> PropertyOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    match f(&mut rng, trials) {
        Ok(()) => PropertyOutcome {
            name,
            passed: true,
            detail: String::new(),
        },
        Err(detail) => PropertyOutcome {
            name,
            passed: false,
            detail,
        },
    }
}

/// Runs every property. Each gets its own stream derived from `seed`.
pub fn run_all(seed: u64, trials: usize) -> Vec<PropertyOutcome> {
    PROPERTIES
        .iter()
        .enumerate()
        .map(|(i, (n, f))| run_one(i, n, *f, seed, trials))
        .collect()
}

// generators

/// A random monotone capacity: each subset adds a non-negative increment to
/// the largest value among its one-point removals.
pub fn random_capacity<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Capacity {
    let mut values = vec![0.0; 1 << n];
    for mask in 1usize..1 << n {
        let base = (0..n)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| values[mask & !(1 << i)])
            .fold(0.0, f64::max);
        values[mask] = base + rng.random::<f64>();
    }
    Capacity::new(n, values).expect("monotone by construction")
}

fn random_values<R: Rng + ?Sized>(rng: &mut R, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

fn random_simple<R: Rng + ?Sized>(rng: &mut R, n: usize, lo: f64, hi: f64) -> SimpleFunction {
    let mut v = random_values(rng, n, lo, hi);
    // repeated values exercise tie handling
    if n > 1 && rng.random_bool(0.3) {
        v[1] = v[0];
    }
    SimpleFunction::new(v).expect("finite")
}

fn concave_weights() -> Vec<WeightFunction> {
    vec![
        WeightFunction::sqrt(),
        WeightFunction::identity(),
        WeightFunction::power(0.3).expect("valid"),
        WeightFunction::square().dual().expect("continuous"),
    ]
}

fn convex_weights() -> Vec<WeightFunction> {
    vec![
        WeightFunction::square(),
        WeightFunction::identity(),
        WeightFunction::power(2.5).expect("valid"),
        WeightFunction::sqrt().dual().expect("continuous"),
    ]
}

fn extension_weights() -> Vec<WeightFunction> {
    let mut w = concave_weights();
    w.extend(convex_weights());
    w
}

fn pick<'a, R: Rng + ?Sized, T>(rng: &mut R, xs: &'a [T]) -> &'a T {
    &xs[rng.random_range(0..xs.len())]
}

fn dim<R: Rng + ?Sized>(rng: &mut R) -> usize {
    rng.random_range(1..=8)
}

fn hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> std::result::Result<HermitianOperator, String> {
    let a = lift(sample_with(rng, SampleKind::Hermitian, n))?;
    Ok(a.scale(rng.random_range(0.1..3.0)))
}

fn positive<R: Rng + ?Sized>(rng: &mut R, n: usize) -> std::result::Result<HermitianOperator, String> {
    lift(sample_with(rng, SampleKind::Positive, n))
}

fn any_hermitian<R: Rng + ?Sized>(rng: &mut R) -> std::result::Result<HermitianOperator, String> {
    let n = dim(rng);
    hermitian(rng, n)
}

fn small_hermitian<R: Rng + ?Sized>(rng: &mut R) -> std::result::Result<HermitianOperator, String> {
    let n = rng.random_range(1..=4);
    hermitian(rng, n)
}

fn any_positive<R: Rng + ?Sized>(rng: &mut R) -> std::result::Result<HermitianOperator, String> {
    let n = dim(rng);
    positive(rng, n)
}

fn unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> std::result::Result<Matrix, String> {
    let h = lift(sample_with(rng, SampleKind::Unitary, n))?;
    lift(unitary_from_generator(&h))
}

fn conjugate(u: &Matrix, a: &HermitianOperator) -> std::result::Result<HermitianOperator, String> {
    lift(HermitianOperator::new(&(u * a.matrix()) * &u.adjoint()))
}

fn t_sample<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random_range(0.0..1.0)
}

// capacity

fn capacity_monotonicity(rng: &mut ChaCha8Rng, trials: usize) -> Check {
    for _ in 0..trials {
        let n = rng.random_range(1..=6);
        let mu = random_capacity(rng, n);
        let f = random_values(rng, n, 0.0, 2.0);
        let g: Vec<f64> = f.iter().map(|x| x + rng.random_range(0.0..1.0)).collect();
        let cf = lift(choquet_integral(&SimpleFunction::new(f.clone()).unwrap(), &mu))?;
        let cg = lift(choquet_integral(&SimpleFunction::new(g.clone()).unwrap(), &mu))?;
        ensure(cf <= cg + 1e-12, || format!("f={f:?} g={g:?}: {cf} > {cg}"))?;
    }
    Ok(())
}

fn capacity_comonotone_additivity(rng: &mut ChaCha8Rng, trials: usize) -> Check {
    for _ in 0..trials {
        let n = rng.random_range(1..=6);
        let mu = random_capacity(rng, n);
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        let mut f = vec![0.0; n];
        let mut g = vec![0.0; n];
        let (mut fv, mut gv) = (0.0, 0.0);
        for &i in &order {
            fv += rng.random_range(0.0..1.0);
            gv += rng.random_range(0.0..1.0);
            f[i] = fv;
            g[i] = gv;
        }
        let (sf, sg) = (
            SimpleFunction::new(f.clone()).unwrap(),
            SimpleFunction::new(g.clone()).unwrap(),
        );
        ensure(lift(is_comonotone(&sf, &sg))?, || {
            format!("generator not comonotone: {f:?} {g:?}")
        })?;
        let sum = SimpleFunction::new(f.iter().zip(&g).map(|(a, b)| a + b).collect()).unwrap();
        let lhs = lift(choquet_integral(&sum, &mu))?;
        let rhs = lift(choquet_integral(&sf, &mu))? + lift(choquet_integral(&sg, &mu))?;
        ensure((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0), || {
            format!("f={f:?} g={g:?}: {lhs} vs {rhs}")
        })?;
    }
    Ok(())
}

fn capacity_positive_homogeneity(rng: &mut ChaCha8Rng, trials: usize) -> Check {
    for _ in 0..trials {
        let n = rng.random_range(1..=6);
        let mu = random_capacity(rng, n);
        let f = random_simple(rng, n, 0.0, 2.0);
        let k = rng.random_range(0.0..5.0);
        let lhs = lift(choquet_integral(&f.scaled(k), &mu))?;
        let rhs = k * lift(choquet_integral(&f, &mu))?;
        ensure((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0), || {
            format!("k={k}: {lhs} vs {rhs}")
        })?;
    }
    Ok(())
}

fn capacity_translatability(rng: &mut ChaCha8Rng, trials: usize) -> Check {
    for _ in 0..trials {
        let n = rng.random_range(1..=6);
        let mu = random_capacity(rng, n);
        let f = random_simple(rng, n, -2.0, 2.0);
        let c = rng.random_range(-3.0..3.0);
        let lhs = lift(translatable_choquet(&f.shifted(c), &mu))?;
        let rhs = lift(translatable_choquet(&f, &mu))? + c * mu.total();
        ensure(
            (lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs() + c.abs() * mu.total()),
            || format!("c={c}: {lhs} vs {rhs}"),
        )?;
    }
    Ok(())
}

fn capacity_bound_independence(rng: &mut ChaCha8Rng, trials: usize) -> Check {
    for _ in 0..trials {
        let n = rng.random_range(1..=6);
        let mu = random_capacity(rng, n);
        let f = random_simple(rng, n, -2.0, 2.0);
        let min = f.values().iter().copied().fold(f64::INFINITY, f64::min);
        let a = lift(translatable_with_bound(&f, &mu, min))?;
        let b = lift(translatable_with_bound(&f, &mu, min - rng.random_range(0.0..4.0)))?;
        ensure((a - b).abs() <= 1e-12 * (1.0 + mu.total() * 6.0), || {
            format!("{a} vs {b}")
        })?;
    }
    Ok(())
}

fn capacity_antisymmetric_equals_translatable(rng: &mut ChaCha8Rng, trials: usize) -> Check {
    for _ in 0..trials {
        let n = rng.random_range(1..=6);
        let mu = random_capacity(rng, n);
        let f = random_simple(rng, n, -2.0, 2.0);
        let a = lift(antisymmetric_choquet(&f, &mu))?;
        let t = lift(translatable_choquet(&f, &mu))?;
        ensure((a - t).abs() <= 1e-12 * (1.0 + mu.total() * 2.0), || {
            format!("{a} vs {t}")
        })?;
    }
    Ok(())
}

fn capacity_tie_invariance(rng: &mut ChaCha8Rng, trials: usize) -> Check {
    for _ in 0..trials {
        let n = rng.random_range(2..=6);
        let mu = random_capacity(rng, n);
        let levels = random_values(rng, 2, 0.0, 2.0);
        let f: Vec<f64> = (0..n).map(|_| *pick(rng, &levels)).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        order.sort_by(|&i, &j| f[j].total_cmp(&f[i]));
        let reference = sorted_threshold_sum(&f, &mu);
        let shuffled = threshold_sum_in_order(&f, &mu, &order);
        ensure((reference - shuffled).abs() <= 1e-12 * reference.abs().max(1.0), || {
            format!("f={f:?} order={order:?}: {reference} vs {shuffled}")
        })?;
    }
    Ok(())
}

fn capacity_dual_involution(rng: &mut ChaCha8Rng, trials: usize) -> Check {
    for _ in 0..trials.min(200) {
        let n = rng.random_range(1..=6);
        let mu = random_capacity(rng, n);
        let back = mu.dual().dual();
        ensure(back.values() == mu.values(), || "double dual differs".into())?;
        let fresh = Capacity::new(n, mu.dual().values().to_vec()).map_err(|e| e.to_string())?;
        ensure(
            fresh.values().iter().zip(mu.dual().values()).all(|(a, b)| a == b),
            || "dual is not a valid capacity".into(),
        )?;
    }
    Ok(())
}

// weights

fn weights_dual_involution(rng: &mut ChaCha8Rng, _trials: usize) -> Check {
    let mut ws = extension_weights();
    ws.push(lift(WeightFunction::power(rng.random_range(0.1..4.0)))?);
    for w in &ws {
        let dd = lift(w.dual().and_then(|d| d.dual()))?;
        for i in 0..VALIDATION_GRID {
            let t = i as f64 / (VALIDATION_GRID - 1) as f64;
            ensure((dd.at(t) - w.at(t)).abs() <= 1e-15, || format!("{} at {t}", w.name()))?;
        }
    }
    Ok(())
}

fn weights_dual_flips_shape(rng: &mut ChaCha8Rng, _trials: usize) -> Check {
    let p = rng.random_range(0.1..4.0);
    let custom = lift(WeightFunction::custom("custom-power", move |t: f64| t.powf(p)))?;
    for w in [WeightFunction::sqrt(), WeightFunction::square(), custom] {
        let d = lift(w.dual())?;
        let (s, ds) = (classify_shape(&w, VALIDATION_GRID), classify_shape(&d, VALIDATION_GRID));
        ensure(s.flipped() == ds, || format!("{}: {s} vs dual {ds}", w.name()))?;
        ensure(d.shape() == w.shape().flipped(), || format!("{}: metadata", w.name()))?;
    }
    Ok(())
}

fn weights_dual_sandwich(_rng: &mut ChaCha8Rng, _trials: usize) -> Check {
    for (ws, concave) in [(concave_weights(), true), (convex_weights(), false)] {
        for w in &ws {
            let d = lift(w.dual())?;
            for i in 0..VALIDATION_GRID {
                let t = i as f64 / (VALIDATION_GRID - 1) as f64;
                let ok = if concave {
                    d.at(t) <= w.at(t) + 1e-15
                } else {
                    d.at(t) + 1e-15 >= w.at(t)
                };
                ensure(ok, || format!("{} at {t}", w.name()))?;
            }
        }
    }
    Ok(())
}

fn weights_partition_additivity(rng: &mut ChaCha8Rng, trials: usize) -> Check {
    for _ in 0..trials {
        let w = pick(rng, &extension_weights()).clone();
        let count = rng.random_range(0..10);
        let mut cuts = random_values(rng, count, 0.0, 1.0);
        cuts.push(0.0);
        cuts.push(1.0);
        cuts.sort_by(f64::total_cmp);
        let mut total = 0.0;
        for pair in cuts.windows(2) {
            let inc = lift(stieltjes_increment(&w, pair[0], pair[1]))?;
            ensure(inc >= 0.0, || format!("{}: negative increment", w.name()))?;
            total += inc;
        }
        ensure((total - 1.0).abs() <= 1e-12, || format!("{}: sum {total}", w.name()))?;
    }
    Ok(())
}

// spectra

fn spectra_eigen_residual(rng: &mut ChaCha8Rng, trials: usize) -> Check {
    for _ in 0..trials {
        let n = dim(rng);
        let a = hermitian(rng, n)?;
        let dec = lift(eigen_decompose(&a))?;
        let norm = lift(operator_norm(&a))?;
        for k in 0..n {
            let mut r2 = 0.0;
            for i in 0..n {
                let av: crate::spectra::C64 = (0..n).map(|j| a.matrix()[(i, j)] * dec.vectors[(j, k)]).sum();
                r2 += (av - dec.vectors[(i, k)] * dec.values[k]).norm_sqr();
            }
            ensure(r2.sqrt() <= 1e-9 * norm.max(1.0), || format!("residual {}", r2.sqrt()))?;
        }
        let gram = &dec.vectors.adjoint() * &dec.vectors;
        ensure((&gram - &Matrix::identity(n)).max_abs() <= 1e-10, || {
            "frame not orthonormal".into()
        })?;
        ensure(dec.values.windows(2).all(|p| p[0] >= p[1]), || "not descending".into())?;
    }
    Ok(())
}

fn spectra_mu_monotone(rng: &mut ChaCha8Rng, trials: usize) -> Check {
    for _ in 0..trials {
        let n = dim(rng);
        let a = positive(rng, n)?;
        let b = &a + &positive(rng, n)?;
        let t = t_sample(rng);
        let (ma, mb) = (lift(mu_t(a.matrix(), t))?, lift(mu_t(b.matrix(), t))?);
        ensure(ma <= mb + TOL, || format!("t={t}: {ma} > {mb}"))?;
    }
    Ok(())
}

fn spectra_mu_subadditive(rng: &mut ChaCha8Rng, trials: usize) -> Check {
    for _ in 0..trials {
        let n = dim(rng);
        let a = crate::spectra::gaussian_matrix(rng, n);
        let b = crate::spectra::gaussian_matrix(rng, n);
        let s = t_sample(rng);
        let t = rng.random_range(0.0..1.0 - s);
        let lhs = lift(mu_t(&(&a + &b), s + t))?;
        let rhs = lift(mu_t(&a, s))? + lift(mu_t(&b, t))?;
        ensure(lhs <= rhs + TOL, || format!("s={s} t={t}: {lhs} > {rhs}"))?;
    }
    Ok(())
}

fn spectra_mu_product(rng: &mut ChaCha8Rng, trials: usize) -> Check {
    for _ in 0..trials {
        let n = dim(rng);
        let a = crate::spectra::gaussian_matrix(rng, n);
        let b = crate::spectra::gaussian_matrix(rng, n);
        let c = crate::spectra::gaussian_matrix(rng, n);
        let t = t_sample(rng);
        let lhs = lift(mu_t(&(&(&a * &b) * &c), t))?;
        let rhs = lift(mu_t(&a, 0.0))? * lift(mu_t(&b, t))? * lift(mu_t(&c, 0.0))?;
        ensure(lhs <= rhs * (1.0 + TOL) + TOL, || format!("t={t}: {lhs} > {rhs}"))?;
    }
    Ok(())
}

fn spectra_mu_adjoint(rng: &mut ChaCha8Rng, trials: usize) -> Check {
    for _ in 0..trials {
        let n = dim(rng);
        let a = crate::spectra::gaussian_matrix(rng, n);
        let t = t_sample(rng);
        let (x, y) = (lift(mu_t(&a, t))?, lift(mu_t(&a.adjoint(), t))?);
        ensure((x - y).abs() <= TOL, || format!("t={t}: {x} vs {y}"))?;
    }
    Ok(())
}

fn spectra_mu_unitary_invariance(rng: &mut ChaCha8Rng, trials: usize) -> Check {
    for _ in 0..trials {
        let n = dim(rng);
        let a = hermitian(rng, n)?;
        let u = unitary(rng, n)?;
        let t = t_sample(rng);
        let (x, y) = (lift(mu_t(a.matrix(), t))?, lift(mu_t(conjugate(&u, &a)?.matrix(), t))?);
        ensure((x - y).abs() <= TOL, || format!("t={t}: {x} vs {y}"))?;
    }
    Ok(())
}

fn spectra_mu_lipschitz(rng: &mut ChaCha8Rng, trials: usize) -> Check {
    for _ in 0..trials {
        let n = dim(rng);
        let a = crate::spectra::gaussian_matrix(rng, n);
        let b = &a + &crate::spectra::gaussian_matrix(rng, n).scale_real(rng.random_range(0.0..1.0));
        let t = t_sample(rng);
        let gap = (lift(mu_t(&a, t))? - lift(mu_t(&b, t))?).abs();
        let dist = lift(mu_t(&(&a - &b), 0.0))?;
        ensure(gap <= dist + TOL, || format!("t={t}: {gap} > {dist}"))?;
    }
    Ok(())
}

fn spectra_mu_functional_calculus(rng: &mut ChaCha8Rng, trials: usize) -> Check {
    let fs: [fn(f64) -> f64; 3] = [|x| x * x, f64::sqrt, |x| x / (1.0 + x)];
    for _ in 0..trials {
        let n = dim(rng);
        let a = positive(rng, n)?;
        let f = *pick(rng, &fs);
        let fa = lift(functional_calculus(&a, |x| f(x.max(0.0))))?;
        let t = t_sample(rng);
        let lhs = lift(mu_t(fa.matrix(), t))?;
        let rhs = f(lift(mu_t(a.matrix(), t))?);
        ensure((lhs - rhs).abs() <= TOL, || format!("t={t}: {lhs} vs {rhs}"))?;
    }
    Ok(())
}

fn spectra_merge_invariance(rng: &mut ChaCha8Rng, trials: usize) -> Check {
    for _ in 0..trials {
        let n = dim(rng);
        // repeated eigenvalues via a projection-valued spectrum
        let p = lift(sample_with(rng, SampleKind::Projection, n))?;
        let a = &p.scale(rng.random_range(0.5..2.0)) + &hermitian(rng, n)?.scale(1e-11);
        let eigs = lift(eigenvalues(&a))?;
        let merged = lift(spectral_distribution(&a))?;
        let split = lift(SpectralDistribution::from_eigenvalues(&eigs, 0.0))?;
        let w = pick(rng, &extension_weights()).clone();
        let (x, y) = (
            lift(phi_translatable(&w, &merged))?,
            lift(phi_translatable(&w, &split))?,
        );
        ensure((x - y).abs() <= TOL, || format!("{}: {x} vs {y}", w.name()))?;
    }
    Ok(())
}

fn spectra_tensor_trace(rng: &mut ChaCha8Rng, trials: usize) -> Check {
    for _ in 0..trials {
        let a = small_hermitian(rng)?;
        let b = small_hermitian(rng)?;
        let ab = lift(a.tensor(&b))?;
        let lhs = ab.normalized_trace();
        let rhs = a.normalized_trace() * b.normalized_trace();
        ensure((lhs - rhs).abs() <= 1e-12, || format!("{lhs} vs {rhs}"))?;
    }
    Ok(())
}

// trace

fn trace_positive_homogeneity(rng: &mut ChaCha8Rng, trials: usize) -> Check {
    for _ in 0..trials {
        let a = any_hermitian(rng)?;
        let w = pick(rng, &extension_weights()).clone();
        let k = rng.random_range(0.0..4.0);
        let lhs = lift(phi_translatable(&w, &a.scale(k)))?;
        let rhs = k * lift(phi_translatable(&w, &a))?;
        ensure((lhs - rhs).abs() <= TOL, || format!("k={k}: {lhs} vs {rhs}"))?;
    }
    Ok(())
}

fn trace_translatability(rng: &mut ChaCha8Rng, trials: usize) -> Check {
    for _ in 0..trials {
        let a = any_hermitian(rng)?;
        let w = pick(rng, &extension_weights()).clone();
        let c = rng.random_range(-5.0..5.0);
        let lhs = lift(phi_translatable(&w, &a.shift(c)))?;
        let rhs = lift(phi_translatable(&w, &a))? + c;
        ensure((lhs - rhs).abs() <= TOL, || format!("c={c}: {lhs} vs {rhs}"))?;
    }
    Ok(())
}

fn trace_monotonicity(rng: &mut ChaCha8Rng, trials: usize) -> Check {
    for _ in 0..trials {
        let n = dim(rng);
        let a = hermitian(rng, n)?;
        let b = &a + &positive(rng, n)?;
        let w = pick(rng, &extension_weights()).clone();
        let (x, y) = (lift(phi_translatable(&w, &a))?, lift(phi_translatable(&w, &b))?);
        ensure(x <= y + TOL, || format!("{}: {x} > {y}", w.name()))?;
    }
    Ok(())
}

fn trace_unitary_invariance(rng: &mut ChaCha8Rng, trials: usize) -> Check {
    for _ in 0..trials {
        let n = dim(rng);
        let a = hermitian(rng, n)?;
        let u = unitary(rng, n)?;
        let w = pick(rng, &extension_weights()).clone();
        let (x, y) = (
            lift(phi_translatable(&w, &a))?,
            lift(phi_translatable(&w, &conjugate(&u, &a)?))?,
        );
        ensure((x - y).abs() <= TOL, || format!("{}: {x} vs {y}", w.name()))?;
    }
    Ok(())
}

fn trace_triangle_concave(rng: &mut ChaCha8Rng, trials: usize) -> Check {
    for _ in 0..trials {
        let n = dim(rng);
        let (a, b) = (hermitian(rng, n)?, hermitian(rng, n)?);
        let w = pick(rng, &concave_weights()).clone();
        let lhs = lift(phi_translatable(&w, &(&a + &b)))?;
        let rhs = lift(phi_translatable(&w, &a))? + lift(phi_translatable(&w, &b))?;
        ensure(lhs <= rhs + TOL, || format!("{}: {lhs} > {rhs}", w.name()))?;
    }
    Ok(())
}

fn trace_superadditive_convex(rng: &mut ChaCha8Rng, trials: usize) -> Check {
    for _ in 0..trials {
        let n = dim(rng);
        let (a, b) = (hermitian(rng, n)?, hermitian(rng, n)?);
        let w = pick(rng, &convex_weights()).clone();
        let lhs = lift(phi_translatable(&w, &(&a + &b)))?;
        let rhs = lift(phi_translatable(&w, &a))? + lift(phi_translatable(&w, &b))?;
        ensure(lhs + TOL >= rhs, || format!("{}: {lhs} < {rhs}", w.name()))?;
    }
    Ok(())
}

fn trace_lipschitz(rng: &mut ChaCha8Rng, trials: usize) -> Check {
    for _ in 0..trials {
        let n = dim(rng);
        let (a, b) = (hermitian(rng, n)?, hermitian(rng, n)?);
        let w = pick(rng, &extension_weights()).clone();
        let gap = (lift(phi_translatable(&w, &a))? - lift(phi_translatable(&w, &b))?).abs();
        let dist = lift(operator_norm(&(&a - &b)))?;
        ensure(gap <= dist + TOL, || format!("{}: {gap} > {dist}", w.name()))?;
    }
    Ok(())
}

fn trace_dual_antisymmetry(rng: &mut ChaCha8Rng, trials: usize) -> Check {
    for _ in 0..trials {
        let a = any_hermitian(rng)?;
        let w = pick(rng, &extension_weights()).clone();
        let dual = lift(w.dual())?;
        let lhs = lift(phi_antisymmetric(&w, &(-&a)))?;
        let rhs = -lift(phi_antisymmetric(&dual, &a))?;
        ensure((lhs - rhs).abs() <= TOL, || format!("{}: {lhs} vs {rhs}", w.name()))?;
    }
    Ok(())
}

fn trace_norm_bound(rng: &mut ChaCha8Rng, trials: usize) -> Check {
    for _ in 0..trials {
        let a = any_hermitian(rng)?;
        let w = pick(rng, &extension_weights()).clone();
        let v = lift(phi_translatable(&w, &a))?;
        let norm = lift(operator_norm(&a))?;
        ensure(v.abs() <= norm + 1e-10, || format!("{}: |{v}| > {norm}", w.name()))?;
    }
    Ok(())
}

fn trace_dual_below_concave(rng: &mut ChaCha8Rng, trials: usize) -> Check {
    for _ in 0..trials {
        let a = any_hermitian(rng)?;
        let w = pick(rng, &concave_weights()).clone();
        let dual = lift(w.dual())?;
        let (lo, hi) = (lift(phi_translatable(&dual, &a))?, lift(phi_translatable(&w, &a))?);
        ensure(lo <= hi + TOL, || format!("{}: {lo} > {hi}", w.name()))?;
    }
    Ok(())
}

fn trace_antisymmetric_equals_translatable(rng: &mut ChaCha8Rng, trials: usize) -> Check {
    for _ in 0..trials {
        let a = any_hermitian(rng)?;
        let w = pick(rng, &extension_weights()).clone();
        let (x, y) = (lift(phi_antisymmetric(&w, &a))?, lift(phi_translatable(&w, &a))?);
        ensure((x - y).abs() <= 1e-10, || format!("{}: {x} vs {y}", w.name()))?;
    }
    Ok(())
}

/// `int_0^inf alpha(tau(e_(s, inf)(a))) ds` over the exact step function.
fn layer_cake(w: &WeightFunction, eigs: &[f64]) -> f64 {
    let mut asc: Vec<f64> = eigs.iter().map(|v| v.max(0.0)).collect();
    asc.sort_by(f64::total_cmp);
    let n = asc.len() as f64;
    let mut total = 0.0;
    let mut prev = 0.0;
    for (i, &v) in asc.iter().enumerate() {
        // on (prev, v) exactly the eigenvalues from index i up exceed s
        total += (v - prev) * w.at((asc.len() - i) as f64 / n);
        prev = v;
    }
    total
}

fn trace_layer_cake(rng: &mut ChaCha8Rng, trials: usize) -> Check {
    let mut ws = extension_weights();
    ws.push(WeightFunction::supnorm());
    for _ in 0..trials {
        let a = any_positive(rng)?;
        let w = pick(rng, &ws).clone();
        let eigs = lift(eigenvalues(&a))?;
        let x = lift(phi_positive(&w, &a))?;
        let y = layer_cake(&w, &eigs);
        ensure((x - y).abs() <= 1e-10, || format!("{}: {x} vs {y}", w.name()))?;
    }
    Ok(())
}

fn trace_increasing_decomposition(rng: &mut ChaCha8Rng, trials: usize) -> Check {
    for _ in 0..trials {
        let a = any_positive(rng)?;
        let w = pick(rng, &extension_weights()).clone();
        let d = lift(spectral_distribution(&a))?;
        let c = rng.random_range(0.0..d.max_value().max(1e-3));
        let low = lift(d.map(|x| x.min(c), 0.0))?;
        let high = lift(d.map(|x| (x - c).max(0.0), 0.0))?;
        let whole = lift(phi_positive(&w, &d))?;
        let parts = lift(phi_positive(&w, &low))? + lift(phi_positive(&w, &high))?;
        ensure((whole - parts).abs() <= TOL, || {
            format!("{}: {whole} vs {parts}", w.name())
        })?;
    }
    Ok(())
}

fn trace_alpha_norm_triangle(rng: &mut ChaCha8Rng, trials: usize) -> Check {
    for _ in 0..trials {
        let n = dim(rng);
        let a = crate::spectra::gaussian_matrix(rng, n);
        let b = crate::spectra::gaussian_matrix(rng, n);
        let w = pick(rng, &concave_weights()).clone();
        let p = rng.random_range(1.0..4.0);
        let lhs = lift(alpha_norm(&w, p, &(&a + &b)))?;
        let rhs = lift(alpha_norm(&w, p, &a))? + lift(alpha_norm(&w, p, &b))?;
        ensure(lhs <= rhs + TOL, || format!("{} p={p}: {lhs} > {rhs}", w.name()))?;
    }
    Ok(())
}

fn trace_chebyshev(rng: &mut ChaCha8Rng, trials: usize) -> Check {
    for _ in 0..trials {
        let a = any_positive(rng)?;
        let w = pick(rng, &extension_weights()).clone();
        let eigs = lift(eigenvalues(&a))?;
        let k = *pick(rng, &eigs);
        if k <= 0.0 {
            continue;
        }
        let r = lift(chebyshev_check(&w, &a, |x| x * x, k))?;
        ensure(r.holds, || format!("{} k={k}: {} > {}", w.name(), r.lhs, r.rhs))?;
    }
    Ok(())
}

// models

fn models_bridge(_rng: &mut ChaCha8Rng, _trials: usize) -> Check {
    let m = CoinTossModel::projections();
    for n in 1..=12 {
        let analytic = lift(coin_toss_average_distribution(&m, n))?;
        let explicit = lift(spectral_distribution(&lift(coin_toss_matrix(n))?))?;
        compare_scaled(&analytic, &explicit, n)?;
    }
    for n in 1..=6 {
        let ps = lift(coin_toss_projections(n))?;
        let sum = ps[1..].iter().fold(ps[0].clone(), |acc, p| &acc + p);
        let analytic = lift(coin_toss_average_distribution(&m, n))?;
        compare_scaled(&analytic, &lift(spectral_distribution(&sum))?, n)?;
    }
    Ok(())
}

fn compare_scaled(avg: &SpectralDistribution, sum: &SpectralDistribution, n: usize) -> Check {
    ensure(avg.len() == sum.len(), || format!("n={n}: atom counts differ"))?;
    for ((v, w), (sv, sw)) in avg.atoms().zip(sum.atoms()) {
        ensure((v * n as f64 - sv).abs() <= 1e-9 && (w - sw).abs() <= 1e-9, || {
            format!("n={n}: ({v}, {w}) vs ({sv}, {sw})")
        })?;
    }
    Ok(())
}

fn models_anticommutation_closure(rng: &mut ChaCha8Rng, trials: usize) -> Check {
    for _ in 0..trials.min(100) {
        let n = rng.random_range(1..=6);
        let family = lift(crate::models::powers_unitaries(n))?;
        let coeffs = random_values(rng, n, -2.0, 2.0);
        let mut s = family[0].scale(coeffs[0]);
        for (u, c) in family.iter().zip(&coeffs).skip(1) {
            s = &s + &u.scale(*c);
        }
        let sq = s.matrix() * s.matrix();
        let target = Matrix::identity(1 << n).scale_real(coeffs.iter().map(|c| c * c).sum());
        ensure((&sq - &target).max_abs() <= TOL, || format!("n={n}"))?;
    }
    Ok(())
}

fn models_normalized_sum_unitary(_rng: &mut ChaCha8Rng, _trials: usize) -> Check {
    let m = lift(PowersShiftModel::new(1))?;
    for n in 1..=8 {
        let s = lift(m.sum_matrix(n))?.scale(1.0 / (n as f64).sqrt());
        let sq = s.matrix() * s.matrix();
        ensure((&sq - &Matrix::identity(1 << n)).max_abs() <= 1e-10, || {
            format!("n={n}")
        })?;
        let d = lift(m.average_distribution(n))?;
        ensure((d.max_value() * (n as f64).sqrt() - 1.0).abs() <= 1e-12, || {
            format!("analytic n={n}")
        })?;
    }
    Ok(())
}

fn models_clt_moment_matrix(_rng: &mut ChaCha8Rng, _trials: usize) -> Check {
    let m = lift(PowersShiftModel::new(1))?;
    for n in 1..=6 {
        let s = lift(m.sum_matrix(n))?.scale(1.0 / (n as f64).sqrt());
        for w in [
            WeightFunction::sqrt(),
            WeightFunction::identity(),
            WeightFunction::square(),
        ] {
            let mut power = s.clone();
            for k in 1..=4u32 {
                if k > 1 {
                    power = lift(HermitianOperator::new(power.matrix() * s.matrix()))?;
                }
                let x = lift(phi_translatable(&w, &power))?;
                let y = lift(powers_clt_moment(&w, k))?;
                ensure((x - y).abs() <= 1e-12, || {
                    format!("{} n={n} k={k}: {x} vs {y}", w.name())
                })?;
            }
        }
    }
    Ok(())
}

fn models_projection_independence(_rng: &mut ChaCha8Rng, _trials: usize) -> Check {
    let ps = lift(coin_toss_projections(6))?;
    let mut ws = extension_weights();
    ws.push(WeightFunction::supnorm());
    ws.push(lift(WeightFunction::kyfan(0.25))?);
    let idx_sets: [&[usize]; 4] = [&[0, 3], &[5, 1, 2], &[4, 0, 3, 1], &[2, 5]];
    for w in &ws {
        for idx in idx_sets {
            let mut prod = ps[idx[0]].matrix().clone();
            for &i in &idx[1..] {
                prod = &prod * ps[i].matrix();
            }
            let tr = prod.normalized_trace().re;
            let m = idx.len() as i32;
            ensure((tr - 0.5f64.powi(m)).abs() <= 1e-15, || format!("trace of {idx:?}"))?;
            let lhs = lift(phi_positive(w, &prod.real_part()))?;
            let single = lift(phi_positive(w, &ps[0]))?;
            ensure((lhs - w.at(tr)).abs() <= 1e-12, || {
                format!("{} {idx:?}: {lhs} vs alpha(tau)", w.name())
            })?;
            // power weights are multiplicative, so the trace factors
            if w.name().starts_with("power") || w.name() == "sqrt" || w.name() == "square" || w.name() == "identity" {
                let rhs = single.powi(m);
                ensure((lhs - rhs).abs() <= 1e-12, || {
                    format!("{} {idx:?}: {lhs} vs {rhs}", w.name())
                })?;
            }
        }
    }
    Ok(())
}

fn models_fekete_subadditivity(_rng: &mut ChaCha8Rng, _trials: usize) -> Check {
    let sm = ShiftModel {
        base: CoinTossModel::projections(),
    };
    for k in 1..=3 {
        let x = lift(fekete_sequence(&sm, &WeightFunction::sqrt(), k, 64))?;
        for n in 1..64 {
            for m in 1..=64 - n {
                ensure(x[n + m - 1] <= x[n - 1] + x[m - 1] + 1e-9, || {
                    format!("k={k} n={n} m={m}")
                })?;
            }
        }
        let ratios: Vec<f64> = x.iter().enumerate().map(|(i, v)| v / (i + 1) as f64).collect();
        let inf = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        let tail_min = ratios[48..].iter().copied().fold(f64::INFINITY, f64::min);
        ensure(tail_min <= inf + 1e-9, || {
            format!("k={k}: infimum {inf} not reached in tail ({tail_min})")
        })?;
        let mut j = 1;
        while 2 * j <= 64 {
            let (a, b) = (x[j - 1] / j as f64, x[2 * j - 1] / (2 * j) as f64);
            ensure(b <= a + 1e-9, || format!("k={k}: x_n/n rises at n={j}"))?;
            j *= 2;
        }
    }
    Ok(())
}

// lln

fn signed_models() -> [CoinTossModel; 3] {
    [
        CoinTossModel::projections(),
        CoinTossModel::negated(),
        CoinTossModel::reflections(),
    ]
}

fn lln_finite_n_upper(_rng: &mut ChaCha8Rng, _trials: usize) -> Check {
    let w = WeightFunction::sqrt();
    let ns: Vec<usize> = (1..=64).collect();
    for model in signed_models() {
        for k in 1..=4u32 {
            let env = lift(envelope(&model, &w, k))?;
            let values = lift(moment_sequence(&model, &w, k, &ns))?;
            for (&n, &v) in ns.iter().zip(&values).filter(|(&n, _)| n >= k as usize) {
                let bound = lift(finite_n_bound(&w, env.upper, model.norm_bound(), k, n))?;
                ensure(v <= bound + TOL, || format!("{model:?} k={k} n={n}: {v} > {bound}"))?;
            }
        }
    }
    Ok(())
}

fn lln_finite_n_lower(_rng: &mut ChaCha8Rng, _trials: usize) -> Check {
    let w = lift(WeightFunction::sqrt().dual())?;
    let ns: Vec<usize> = (1..=64).collect();
    for model in signed_models() {
        for k in 1..=4u32 {
            let env = lift(envelope(&model, &w, k))?;
            let values = lift(moment_sequence(&model, &w, k, &ns))?;
            for (&n, &v) in ns.iter().zip(&values).filter(|(&n, _)| n >= k as usize) {
                let bound = lift(finite_n_lower_bound(env.lower, model.norm_bound(), k, n))?;
                ensure(v + TOL >= bound, || format!("{model:?} k={k} n={n}: {v} < {bound}"))?;
            }
        }
    }
    Ok(())
}

fn geometric_grid() -> Vec<usize> {
    (1..=12).map(|j| 1usize << j).collect()
}

fn lln_convex_tail_lower(_rng: &mut ChaCha8Rng, _trials: usize) -> Check {
    let w = lift(WeightFunction::sqrt().dual())?;
    for model in signed_models() {
        for k in 1..=4u32 {
            let env = lift(envelope(&model, &w, k))?;
            let values = lift(moment_sequence(&model, &w, k, &geometric_grid()))?;
            let (lo, _) = lift(tail_interval(&values, 0.25))?;
            ensure(lo + TOL >= env.lower, || {
                format!("{model:?} k={k}: {lo} < {}", env.lower)
            })?;
        }
    }
    Ok(())
}

fn lln_linear_limit(_rng: &mut ChaCha8Rng, _trials: usize) -> Check {
    let w = WeightFunction::identity();
    for k in 1..=3u32 {
        let v = lift(moment_sequence(&CoinTossModel::projections(), &w, k, &[4096]))?[0];
        let target = 0.5f64.powi(k as i32);
        ensure((v - target).abs() <= 0.02, || format!("k={k}: {v} vs {target}"))?;
    }
    Ok(())
}

fn lln_dual_sandwich(_rng: &mut ChaCha8Rng, _trials: usize) -> Check {
    let w = WeightFunction::sqrt();
    let dual = lift(w.dual())?;
    let ns: Vec<usize> = (1..=64).chain(geometric_grid()).collect();
    for model in signed_models() {
        for k in 1..=4u32 {
            let hi = lift(moment_sequence(&model, &w, k, &ns))?;
            let lo = lift(moment_sequence(&model, &dual, k, &ns))?;
            for ((n, a), b) in ns.iter().zip(&lo).zip(&hi) {
                ensure(a <= &(b + TOL), || format!("{model:?} k={k} n={n}: {a} > {b}"))?;
            }
        }
    }
    Ok(())
}
