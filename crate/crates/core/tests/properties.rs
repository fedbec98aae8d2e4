use nltrace::capacity::{
    antisymmetric_choquet, choquet_integral, symmetric_choquet, translatable_choquet, SimpleFunction,
};
use nltrace::models::{binomial_weights, coin_toss_average_distribution, CoinTossModel, PowersShiftModel, SumModel};
use nltrace::spectra::{lambda_t, sample, spectral_distribution, SampleKind, SpectralDistribution};
use nltrace::trace::{phi_antisymmetric, phi_symmetric, phi_translatable};
use nltrace::verify::{random_capacity, run_all};
use nltrace::weights::{dual_weight, parse_weight, stieltjes_increment};
use nltrace::WeightFunction;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn weight() -> impl Strategy<Value = WeightFunction> {
    prop_oneof![
        Just(WeightFunction::sqrt()),
        Just(WeightFunction::square()),
        Just(WeightFunction::identity()),
        (0.05f64..5.0).prop_map(|p| WeightFunction::power(p).unwrap()),
        Just(WeightFunction::sqrt().dual().unwrap()),
    ]
}

fn values(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0f64..5.0, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn capacity_extensions(seed in any::<u64>(), f in (1usize..=6).prop_flat_map(values), c in -3.0f64..3.0) {
        let mu = random_capacity(&mut ChaCha8Rng::seed_from_u64(seed), f.len());
        let sf = SimpleFunction::new(f.clone()).unwrap();
        let t = translatable_choquet(&sf, &mu).unwrap();
        let a = antisymmetric_choquet(&sf, &mu).unwrap();
        prop_assert!((t - a).abs() <= 1e-12 * (1.0 + mu.total() * 5.0));
        let shifted = translatable_choquet(&sf.shifted(c), &mu).unwrap();
        prop_assert!((shifted - t - c * mu.total()).abs() <= 1e-11 * (1.0 + mu.total() * 8.0));
        // symmetric is odd
        let s = symmetric_choquet(&sf, &mu).unwrap();
        let s_neg = symmetric_choquet(&sf.scaled(-1.0), &mu).unwrap();
        prop_assert!((s + s_neg).abs() <= 1e-12 * (1.0 + mu.total() * 5.0));
        if f.iter().all(|&v| v >= 0.0) {
            prop_assert!((choquet_integral(&sf, &mu).unwrap() - t).abs() <= 1e-12 * (1.0 + mu.total() * 5.0));
        }
    }

    #[test]
    fn additive_capacity_is_linear(masses in prop::collection::vec(0.0f64..2.0, 1..=6), seed in any::<u64>()) {
        let mu = nltrace::Capacity::additive(&masses).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f: Vec<f64> = (0..masses.len()).map(|_| rand::Rng::random_range(&mut rng, -2.0..2.0)).collect();
        let expected: f64 = f.iter().zip(&masses).map(|(a, b)| a * b).sum();
        let got = translatable_choquet(&SimpleFunction::new(f).unwrap(), &mu).unwrap();
        prop_assert!((got - expected).abs() <= 1e-12);
    }

    #[test]
    fn dual_weight_is_an_involution(w in weight(), t in 0.0f64..=1.0) {
        let dd = dual_weight(&dual_weight(&w).unwrap()).unwrap();
        prop_assert!((dd.at(t) - w.at(t)).abs() <= 1e-15);
    }

    #[test]
    fn stieltjes_increments_telescope(w in weight(), a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let mid = 0.5 * (lo + hi);
        let whole = stieltjes_increment(&w, lo, hi).unwrap();
        let parts = stieltjes_increment(&w, lo, mid).unwrap() + stieltjes_increment(&w, mid, hi).unwrap();
        prop_assert!((whole - parts).abs() <= 1e-14);
    }

    #[test]
    fn lambda_is_non_increasing(seed in any::<u64>(), dim in 1usize..=8, s in 0.0f64..1.0, t in 0.0f64..1.0) {
        let d = spectral_distribution(&sample(SampleKind::Hermitian, dim, seed).unwrap()).unwrap();
        let (lo, hi) = if s <= t { (s, t) } else { (t, s) };
        prop_assert!(lambda_t(&d, lo).unwrap() >= lambda_t(&d, hi).unwrap());
    }

    #[test]
    fn signed_extensions_agree_on_positive(seed in any::<u64>(), dim in 1usize..=8, w in weight()) {
        let a = sample(SampleKind::Positive, dim, seed).unwrap();
        let t = phi_translatable(&w, &a).unwrap();
        prop_assert!((phi_symmetric(&w, &a).unwrap() - t).abs() <= 1e-12);
        prop_assert!((phi_antisymmetric(&w, &a).unwrap() - t).abs() <= 1e-12);
    }

    #[test]
    fn merged_atoms_give_same_trace(raw in prop::collection::vec((-3.0f64..3.0, 0.01f64..1.0), 1..12), w in weight()) {
        let total: f64 = raw.iter().map(|a| a.1).sum();
        let mut atoms: Vec<(f64, f64)> = raw.iter().map(|&(v, m)| (v, m / total)).collect();
        // duplicate every atom as two halves
        let split: Vec<(f64, f64)> = atoms.iter().flat_map(|&(v, m)| [(v, m / 2.0), (v, m / 2.0)]).collect();
        let merged = SpectralDistribution::from_atoms(&split, 0.0).unwrap();
        atoms.sort_by(|a, b| b.0.total_cmp(&a.0));
        let direct = SpectralDistribution::from_atoms(&atoms, 0.0).unwrap();
        let (x, y) = (phi_translatable(&w, &merged).unwrap(), phi_translatable(&w, &direct).unwrap());
        prop_assert!((x - y).abs() <= 1e-12);
    }

    #[test]
    fn binomial_weights_are_a_law(n in 1usize..=3000) {
        let w = binomial_weights(n).unwrap();
        let sum: f64 = w.iter().sum();
        prop_assert!((sum - 1.0).abs() <= 1e-12);
        prop_assert!(w.iter().all(|&x| x >= 0.0));
        let mean: f64 = w.iter().enumerate().map(|(j, x)| j as f64 * x).sum();
        prop_assert!((mean - n as f64 / 2.0).abs() <= 1e-9 * n as f64);
    }

    #[test]
    fn linear_trace_of_average_is_mean(n in 1usize..=2000, scale in -3.0f64..3.0, offset in -2.0f64..2.0) {
        prop_assume!(scale.abs() > 1e-3);
        let m = CoinTossModel::new(scale, offset).unwrap();
        let d = coin_toss_average_distribution(&m, n).unwrap();
        let v = phi_translatable(&WeightFunction::identity(), &d).unwrap();
        prop_assert!((v - (scale / 2.0 + offset)).abs() <= 1e-10 * (1.0 + scale.abs() + offset.abs()));
    }

    #[test]
    fn periodic_average_norm_is_attained(period in 1usize..=6, n in 1usize..=200) {
        let m = PowersShiftModel::new(period).unwrap();
        let d = m.average_distribution(n).unwrap();
        let bound: f64 = m.class_lengths(n).iter().map(|&c| (c as f64).sqrt()).sum::<f64>() / n as f64;
        prop_assert!((d.max_value() - bound).abs() <= 1e-12);
        prop_assert!((d.min_value() + bound).abs() <= 1e-12);
    }
}

#[test]
fn weight_strings() {
    for (s, name) in [
        ("sqrt", "sqrt"),
        ("power:0.5", "power:0.5"),
        ("kyfan:0.25", "kyfan:0.25"),
        ("supnorm", "supnorm"),
    ] {
        assert_eq!(parse_weight(s).unwrap().name(), name);
    }
    for bad in ["", "power", "power:-1", "kyfan:2", "cube", "power:x"] {
        assert!(parse_weight(bad).is_err(), "{bad}");
    }
}

#[test]
fn full_property_suite() {
    let outcomes = run_all(42, 200);
    let failed: Vec<_> = outcomes.iter().filter(|o| !o.passed).collect();
    assert!(failed.is_empty(), "{failed:?}");
}
