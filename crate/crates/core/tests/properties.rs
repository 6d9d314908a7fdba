//! Invariants that hold for every valid parameter set.

use lomaxmix_core::math::chi_square_sf;
use lomaxmix_core::{fit_mixture, CountSample, FitConfig, LomaxComponent, MixtureModel};
use proptest::prelude::*;

fn component() -> impl Strategy<Value = (f64, f64, f64)> {
    (0.05f64..1.0, -2.0f64..2.0, -1.0f64..1.0)
        .prop_map(|(w, lb, lv)| (w, 10f64.powf(lb), 10f64.powf(lv)))
}

fn mixture() -> impl Strategy<Value = MixtureModel> {
    prop::collection::vec(component(), 1..=4).prop_map(|parts| {
        let comps = parts
            .into_iter()
            .map(|(w, b, v)| LomaxComponent::new(w, b, v).unwrap())
            .collect();
        MixtureModel::normalized(comps).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn mass_closes(model in mixture()) {
        prop_assert_eq!(model.ccdf(1).unwrap(), 1.0);
        let head: f64 = (1..=10_000u64).map(|k| model.pmf(k).unwrap()).sum();
        let total = head + model.ccdf(10_001).unwrap();
        prop_assert!((total - 1.0).abs() < 1e-9, "total {}", total);
    }

    #[test]
    fn pmf_telescopes_from_ccdf(model in mixture(), k in 1u64..100_000) {
        let p = model.pmf(k).unwrap();
        let diff = model.ccdf(k).unwrap() - model.ccdf(k + 1).unwrap();
        prop_assert!((p - diff).abs() <= 1e-12 * model.ccdf(k).unwrap());
    }

    #[test]
    fn tails_are_monotone(model in mixture(), k in 1u64..1_000_000) {
        prop_assert!(model.ccdf(k + 1).unwrap() <= model.ccdf(k).unwrap());
        prop_assert!(model.pmf(k + 1).unwrap() <= model.pmf(k).unwrap());
    }

    #[test]
    fn log_pmf_agrees_with_pmf(model in mixture(), k in 1u64..1_000_000) {
        let p = model.pmf(k).unwrap();
        prop_assert!((model.log_pmf(k).unwrap() - p.ln()).abs() < 1e-12 * p.ln().abs().max(1.0));
    }

    #[test]
    fn zero_weight_component_changes_nothing((b, v) in (0.01f64..100.0, 0.1f64..10.0),
                                             (b2, v2) in (0.01f64..100.0, 0.1f64..10.0),
                                             k in 1u64..10_000) {
        let single = MixtureModel::single(b, v).unwrap();
        let padded = MixtureModel::new(vec![
            LomaxComponent::new(1.0, b, v).unwrap(),
            LomaxComponent::new(0.0, b2, v2).unwrap(),
        ]).unwrap();
        let (p1, p2) = (single.pmf(k).unwrap(), padded.pmf(k).unwrap());
        prop_assert!((p1 - p2).abs() <= 1e-15 * p1);
    }

    #[test]
    fn duplicated_component_is_the_same_law((b, v) in (0.01f64..100.0, 0.1f64..10.0),
                                            w in 0.01f64..0.99,
                                            k in 1u64..10_000) {
        let single = MixtureModel::single(b, v).unwrap();
        let split = MixtureModel::new(vec![
            LomaxComponent::new(w, b, v).unwrap(),
            LomaxComponent::new(1.0 - w, b, v).unwrap(),
        ]).unwrap();
        let (p1, p2) = (single.pmf(k).unwrap(), split.pmf(k).unwrap());
        prop_assert!((p1 - p2).abs() <= 1e-15 * p1);
    }

    #[test]
    fn single_component_is_completely_monotone(b in 0.01f64..100.0, v in 0.1f64..10.0) {
        let c = LomaxComponent::new(1.0, b, v).unwrap();
        let mut row: Vec<f64> = (1..=1005u64).map(|k| c.pmf(k).unwrap()).collect();
        for order in 1..=4 {
            row = row.windows(2).map(|w| w[0] - w[1]).collect();
            // repeated p_k - p_{k+1} gives (-Δ)^n p, which must stay >= 0
            for (i, d) in row.iter().enumerate() {
                prop_assert!(*d >= -1e-12, "order {} k {}: {}", order, i + 1, d);
            }
        }
    }

    #[test]
    fn canonical_order_ignores_input_order(model in mixture()) {
        let mut reversed: Vec<_> = model.components().to_vec();
        reversed.reverse();
        let again = MixtureModel::new(reversed).unwrap();
        prop_assert_eq!(again, model);
    }

    #[test]
    fn chi_square_sf_is_monotone(dof in 1usize..40, a in 0.0f64..200.0, b in 0.0f64..200.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let p_lo = chi_square_sf(lo, dof as f64).unwrap();
        let p_hi = chi_square_sf(hi, dof as f64).unwrap();
        prop_assert!(p_hi <= p_lo + 1e-15);
        prop_assert!((0.0..=1.0).contains(&p_lo));
    }

    #[test]
    fn binned_statistic_ignores_sample_representation(values in prop::collection::vec(1u64..40, 30..200)) {
        let model = MixtureModel::single(3.0, 1.5).unwrap();
        let from_values = CountSample::from_values(values.iter().copied()).unwrap();
        let mut pairs: Vec<(u64, u64)> = values.iter().map(|&k| (k, 1)).collect();
        pairs.reverse();
        let from_pairs = CountSample::from_weighted(pairs).unwrap();
        prop_assert_eq!(&from_values, &from_pairs);
        let a = lomaxmix_core::chi_square_test(&model, &from_values, 0, 0.05);
        let b = lomaxmix_core::chi_square_test(&model, &from_pairs, 0, 0.05);
        prop_assert_eq!(a, b);
    }
}

#[test]
fn invalid_component_is_rejected_by_deserializer() {
    use serde::de::value::{Error, MapDeserializer};
    use serde::Deserialize;
    let de: MapDeserializer<_, Error> =
        MapDeserializer::new(vec![("weight", 0.5), ("scale", -1.0), ("shape", 2.0)].into_iter());
    assert!(LomaxComponent::deserialize(de).is_err());
}

#[test]
fn fits_are_deterministic_and_permutation_invariant() {
    let values: Vec<u64> = (0..400u64).map(|i| 1 + (i * 7919 % 97) * (i % 5)).collect();
    let forward = CountSample::from_values(values.iter().copied()).unwrap();
    let backward = CountSample::from_values(values.iter().rev().copied()).unwrap();
    let config = FitConfig {
        starts: 4,
        seed: 11,
        ..FitConfig::default()
    };
    let a = fit_mixture(&forward, 2, &config).unwrap();
    let b = fit_mixture(&forward, 2, &config).unwrap();
    let c = fit_mixture(&backward, 2, &config).unwrap();
    assert_eq!(a, b);
    assert_eq!(a, c);
}
