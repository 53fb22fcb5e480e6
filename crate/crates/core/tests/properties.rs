mod common;

use nonlocal::boxes::{
    bell_algebraic_max, bell_det_max, bell_value, enumerate_deterministic, local_box, quantum_box, validate_ns,
    CorrelationBox, DeterministicStrategy, Scenario,
};
use nonlocal::bounds::{close_pair, confusing_outcome, sample_realization, theorem1_pipeline, universal_fod_bound};
use nonlocal::decomp::{bell_bound_from_fod, cf_exact, fod_exact};
use nonlocal::matlin::{eig_hermitian, partial_trace, trace_norm, Keep};
use nonlocal::rti::{classical_sharp_example, fuchs_van_de_graaf, sample_rti_instance, verify_rti};
use nonlocal::states::{
    ensemble_average, rng_from_seed, sample_density, sample_density_with, sample_povm, sample_povm_with, steer,
    trace_distance, truncate_ensemble, DensityMatrix,
};
use proptest::prelude::*;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn small_scenario() -> impl Strategy<Value = Scenario> {
    (1usize..=3, 1usize..=2, 2usize..=3, 2usize..=3).prop_map(|(na, nb, k, l)| {
        Scenario::uniform(na, nb, k, l).expect("valid scenario")
    })
}

/// Mixture of a local box and a quantum box on a random two-qubit state.
fn random_ns_box(sc: &Scenario, seed: u64) -> CorrelationBox {
    let (local, _) = common::random_local_box(sc, seed);
    let mut rng = rng_from_seed(seed ^ 0x9e37);
    let rho = sample_density_with(4, 1 + (seed % 4) as usize, &mut rng).unwrap();
    let alice: Vec<_> = sc.outcomes_a().iter().map(|&k| sample_povm_with(2, k, &mut rng).unwrap()).collect();
    let bob: Vec<_> = sc.outcomes_b().iter().map(|&l| sample_povm_with(2, l, &mut rng).unwrap()).collect();
    let q = quantum_box(&rho, &alice, &bob).unwrap();
    let w = (seed % 7) as f64 / 6.0;
    CorrelationBox::mixture(&[w, 1.0 - w], &[local, q]).unwrap()
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn eigendecomposition_reconstructs(dim in 1usize..=6, seed in any::<u64>()) {
        let rho = sample_density(dim, dim, seed).unwrap();
        let e = eig_hermitian(rho.matrix()).unwrap();
        prop_assert!(e.reconstruct().max_abs_diff(rho.matrix()) < 1e-10);
        prop_assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn trace_distance_is_a_metric(dim in 2usize..=4, s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>()) {
        let a = sample_density(dim, 1 + (s1 % dim as u64) as usize, s1).unwrap();
        let b = sample_density(dim, 1 + (s2 % dim as u64) as usize, s2).unwrap();
        let c = sample_density(dim, dim, s3).unwrap();
        let ab = trace_distance(&a, &b).unwrap();
        prop_assert!((0.0..=2.0 + 1e-10).contains(&ab));
        prop_assert!((ab - trace_distance(&b, &a).unwrap()).abs() < 1e-10);
        prop_assert!(ab <= trace_distance(&a, &c).unwrap() + trace_distance(&c, &b).unwrap() + 1e-10);
        prop_assert!(trace_distance(&a, &a).unwrap() < 1e-10);
    }

    #[test]
    fn fidelity_brackets_trace_distance(dim in 2usize..=5, s1 in any::<u64>(), s2 in any::<u64>()) {
        let a = sample_density(dim, 1 + (s1 % dim as u64) as usize, s1).unwrap();
        let b = sample_density(dim, 1 + (s2 % dim as u64) as usize, s2).unwrap();
        let r = fuchs_van_de_graaf(&a, &b).unwrap();
        prop_assert!(r.pass, "slack {}", r.slack);
        prop_assert!((0.0..=1.0).contains(&r.fidelity));
    }

    #[test]
    fn steering_preserves_the_reduced_state(da in 2usize..=3, db in 2usize..=3, l in 2usize..=4, seed in any::<u64>()) {
        let rho = sample_density(da * db, 1 + (seed % (da * db) as u64) as usize, seed).unwrap();
        let povm = sample_povm(db, l, seed ^ 1).unwrap();
        let s = steer(&rho, &povm).unwrap();
        let avg = ensemble_average(&s.ensemble).unwrap();
        let reduced = partial_trace(rho.matrix(), da, db, Keep::A).unwrap();
        prop_assert!(avg.matrix().max_abs_diff(&reduced) < 1e-9);
    }

    #[test]
    fn close_pair_and_truncation_bounds(seed in any::<u64>(), frac in 0.0f64..1.0) {
        let r = sample_realization(seed).unwrap();
        let xi = steer(&r.rho_ab, &r.bob[0]).unwrap().ensemble;
        let xi2 = steer(&r.rho_ab, &r.bob[1]).unwrap().ensemble;
        let pair = close_pair(&xi, &xi2).unwrap();
        prop_assert!(pair.distance <= 2.0 - pair.epsilon + 1e-9);
        let heaviest = |e: &nonlocal::states::Ensemble| e.weights().iter().copied().fold(0.0, f64::max);
        let t = frac * heaviest(&xi).min(heaviest(&xi2));
        let t1 = truncate_ensemble(&xi, t).unwrap();
        let t2 = truncate_ensemble(&xi2, t).unwrap();
        let lhs = trace_distance(&t1.ensemble.average().unwrap(), &t2.ensemble.average().unwrap()).unwrap();
        prop_assert!(lhs <= 2.0 * t1.delta.max(t2.delta) / (1.0 - t1.delta.min(t2.delta)) + 1e-9);
    }

    #[test]
    fn confusing_outcome_exists(dim in 2usize..=4, k in 1usize..=5, s1 in any::<u64>(), s2 in any::<u64>()) {
        let rho = sample_density(dim, 1 + (s1 % dim as u64) as usize, s1).unwrap();
        let sigma = sample_density(dim, 1 + (s2 % dim as u64) as usize, s2).unwrap();
        let povm = sample_povm(dim, k, s1 ^ s2).unwrap();
        let c = confusing_outcome(&rho, &sigma, &povm).unwrap();
        prop_assert!(c.prob_rho >= c.epsilon - 1e-10 && c.prob_sigma >= c.epsilon - 1e-10);
    }

    #[test]
    fn rti_general_and_commuting(dim in 2usize..=4, l in 1usize..=4, seed in any::<u64>()) {
        let general = verify_rti(&sample_rti_instance(dim, l, seed, false).unwrap(), false).unwrap();
        prop_assert!(general.pass, "slack {}", general.slack);
        let commuting = verify_rti(&sample_rti_instance(dim, l, seed, true).unwrap(), true).unwrap();
        prop_assert!(commuting.pass, "slack {}", commuting.slack);
    }

    #[test]
    fn classical_example_is_sharp(l in 1usize..=6, t in 0.0f64..=1.0) {
        let eps = t * 2.0 / l as f64;
        let w = classical_sharp_example(l, eps).unwrap();
        prop_assert!((w.mixture_distance() - (2.0 - l as f64 * eps)).abs() < 1e-12);
        for d in w.component_distances() {
            prop_assert!(d >= 2.0 - eps - 1e-12);
        }
    }

    #[test]
    fn local_boxes_are_non_signalling(sc in small_scenario(), seed in any::<u64>()) {
        let (p, _) = common::random_local_box(&sc, seed);
        prop_assert!(validate_ns(&p).pass);
        let json = p.to_json_string().unwrap();
        let back = CorrelationBox::from_json_str(&json).unwrap();
        prop_assert!(back.max_abs_diff(&p) == 0.0);
    }

    #[test]
    fn fod_cf_ordering(sc in small_scenario(), seed in any::<u64>()) {
        let p = random_ns_box(&sc, seed);
        let fod = fod_exact(&p).unwrap().value;
        let cf = cf_exact(&p).unwrap().value;
        prop_assert!(fod >= -1e-12 && fod <= cf + 1e-9 && cf <= 1.0 + 1e-12, "fod {} cf {}", fod, cf);
        prop_assert!((fod - common::fod_oracle(&p)).abs() < 1e-9);
    }

    #[test]
    fn decomposition_reconstructs(sc in small_scenario(), seed in any::<u64>()) {
        let p = random_ns_box(&sc, seed);
        let cf = cf_exact(&p).unwrap();
        prop_assert!(cf.decomposition.reconstruction_error(&p).unwrap() < 1e-7);
        if let Some(x) = &cf.decomposition.residual {
            prop_assert!(validate_ns(x).pass);
        }
        prop_assert!(cf.decomposition.coefficients.iter().all(|&c| c >= 0.0));
    }

    #[test]
    fn fod_bell_bound_is_sound(sc in small_scenario(), seed in any::<u64>()) {
        let p = random_ns_box(&sc, seed);
        let s = common::random_functional(&sc, seed ^ 0x51);
        let alg = bell_algebraic_max(&s);
        let det = bell_det_max(&s).unwrap();
        prop_assert!(det <= alg + 1e-12);
        let value = bell_value(&s, &p).unwrap();
        prop_assert!(value <= alg + 1e-9);
        let fod = fod_exact(&p).unwrap().value;
        prop_assert!(value <= bell_bound_from_fod(alg, det, fod).unwrap() + 1e-9);
        let cf = cf_exact(&p).unwrap().value.clamp(0.0, 1.0);
        prop_assert!(value <= bell_bound_from_fod(alg, det, cf).unwrap() + 1e-7);
    }

    #[test]
    fn cf_is_invariant_under_relabelling(seed in any::<u64>(), swap_x: bool, swap_a: bool, swap_b: bool) {
        let p = common::random_chsh_box(seed);
        let q = CorrelationBox::from_fn(p.scenario().clone(), |a, b, x, y| {
            let x2 = if swap_x { 1 - x } else { x };
            let a2 = if swap_a && x2 == 0 { 1 - a } else { a };
            let b2 = if swap_b { 1 - b } else { b };
            p.get(a2, b2, x2, y)
        }).unwrap();
        let cp = cf_exact(&p).unwrap().value;
        let cq = cf_exact(&q).unwrap().value;
        prop_assert!((cp - cq).abs() < 1e-9);
        prop_assert!((cp - common::cf_closed_form_chsh(&p)).abs() < 1e-9);
    }

    #[test]
    fn quantum_boxes_respect_the_universal_bound(seed in any::<u64>()) {
        let r = sample_realization(seed).unwrap();
        let p = quantum_box(&r.rho_ab, &r.alice, &r.bob).unwrap();
        prop_assert!(validate_ns(&p).pass);
        let trace = theorem1_pipeline(&r.rho_ab, &r.bob[0], &r.bob[1], &r.alice).unwrap();
        prop_assert!(trace.consistent);
        let k = r.alice.iter().map(|a| a.len()).max().unwrap();
        let bound = universal_fod_bound(k, r.bob[0].len(), r.bob[1].len()).unwrap();
        prop_assert!(fod_exact(&p).unwrap().value >= bound.theorem_form - 1e-12);
    }
}

proptest! {
    #![proptest_config(config(256))]

    #[test]
    fn strategy_index_round_trips(sc in small_scenario(), raw in any::<u64>()) {
        let index = raw as u128 % sc.strategy_count();
        let s = DeterministicStrategy::from_index(&sc, index).unwrap();
        prop_assert_eq!(&enumerate_deterministic(&sc).unwrap()[index as usize], &s);
        let p = local_box(&[(s.clone(), 1.0)], &sc).unwrap();
        prop_assert_eq!(fod_exact(&p).unwrap().value, 1.0);
    }

    #[test]
    fn trace_norm_of_state_difference_is_bounded(dim in 1usize..=5, s1 in any::<u64>()) {
        let a = sample_density(dim, dim, s1).unwrap();
        let b = DensityMatrix::maximally_mixed(dim);
        let d = trace_norm(&(a.matrix() - b.matrix())).unwrap();
        prop_assert!(d <= 2.0 + 1e-10);
    }
}
