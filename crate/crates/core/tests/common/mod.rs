//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use nonlocal::boxes::{
    bell_value, deterministic_box, enumerate_deterministic, pr_box_variants, validate_ns, BellFunctional,
    CorrelationBox, Scenario,
};
use nonlocal::states::{rng_from_seed, sample_probability_vector_with};
use rand::Rng;

/// The eight CHSH expressions `sum_xy (-1)^(s_xy) E_xy` with an odd number of
/// minus signs, in probability form.
pub fn chsh_variants() -> Vec<BellFunctional> {
    let mut out = Vec::new();
    for signs in 0u32..16 {
        if signs.count_ones() % 2 == 1 {
            out.push(
                BellFunctional::from_fn(Scenario::chsh(), |a, b, x, y| {
                    let flip = (signs >> (2 * x + y)) & 1;
                    if (a ^ b) as u32 ^ flip == 0 {
                        1.0
                    } else {
                        -1.0
                    }
                })
                .unwrap(),
            );
        }
    }
    out
}

/// Largest value of any CHSH expression on the box.
pub fn max_chsh(p: &CorrelationBox) -> f64 {
    chsh_variants().iter().map(|s| bell_value(s, p).unwrap()).fold(f64::NEG_INFINITY, f64::max)
}

/// Classical fraction of a two-input, two-output NS box by exhaustive feasibility:
/// for each PR relabelling, the interval of weights `w` for which
/// `P - w PR` lies in `(1 - w)` times the local polytope, where locality is
/// entrywise positivity plus all eight CHSH inequalities.
pub fn cf_oracle_chsh(p: &CorrelationBox) -> f64 {
    let variants = chsh_variants();
    // Each constraint is g(w) >= 0 with g affine in w.
    let constraints = |z: &dyn Fn(f64) -> Vec<f64>| -> Vec<(f64, f64)> {
        let sc = Scenario::chsh();
        let at = |w: f64| {
            let z = z(w);
            let mut g: Vec<f64> = z.clone();
            let zbox_value = |s: &BellFunctional| -> f64 {
                sc.cells().map(|(a, b, x, y)| s.get(a, b, x, y) * z[sc.index(a, b, x, y)]).sum()
            };
            for s in &variants {
                g.push(2.0 * (1.0 - w) - zbox_value(s));
            }
            g
        };
        let g0 = at(0.0);
        let g1 = at(1.0);
        g0.iter().zip(&g1).map(|(a, b)| (*a, b - a)).collect()
    };
    let mut best_w = f64::INFINITY;
    for pr in pr_box_variants() {
        let z = |w: f64| -> Vec<f64> { p.as_slice().iter().zip(pr.as_slice()).map(|(a, b)| a - w * b).collect() };
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for (a, b) in constraints(&z) {
            // a + b w >= 0
            if b.abs() < 1e-15 {
                if a < -1e-12 {
                    lo = f64::INFINITY;
                }
            } else if b > 0.0 {
                lo = lo.max(-a / b);
            } else {
                hi = hi.min(-a / b);
            }
        }
        if lo <= hi + 1e-12 {
            best_w = best_w.min(lo);
        }
    }
    1.0 - best_w
}

/// Closed form for the same quantity: `1 - max(0, (max CHSH - 2) / 2)`.
pub fn cf_closed_form_chsh(p: &CorrelationBox) -> f64 {
    1.0 - ((max_chsh(p) - 2.0) / 2.0).max(0.0)
}

/// Fraction of determinism by direct search: for each deterministic box,
/// bisect on the largest `c` for which `(P - c D) / (1 - c)` is a valid NS box.
pub fn fod_oracle(p: &CorrelationBox) -> f64 {
    let sc = p.scenario();
    let mut best: f64 = 0.0;
    for s in enumerate_deterministic(sc).unwrap() {
        let d = deterministic_box(&s, sc).unwrap();
        let feasible = |c: f64| {
            let x: Vec<f64> = p
                .as_slice()
                .iter()
                .zip(d.as_slice())
                .map(|(a, b)| (a - c * b) / (1.0 - c))
                .collect();
            CorrelationBox::new(sc.clone(), x).map(|bx| validate_ns(&bx).pass).unwrap_or(false)
        };
        if !feasible(0.0) {
            continue;
        }
        if feasible(1.0 - 1e-13) {
            return 1.0;
        }
        let (mut lo, mut hi) = (0.0, 1.0 - 1e-13);
        for _ in 0..64 {
            let mid = 0.5 * (lo + hi);
            if feasible(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        best = best.max(lo);
    }
    best
}

/// Random NS box in the CHSH scenario: a mixture of deterministic boxes and
/// PR relabellings, with the PR part present about two times in three.
pub fn random_chsh_box(seed: u64) -> CorrelationBox {
    let mut rng = rng_from_seed(seed);
    let sc = Scenario::chsh();
    let mut extremes: Vec<CorrelationBox> = enumerate_deterministic(&sc)
        .unwrap()
        .iter()
        .map(|s| deterministic_box(s, &sc).unwrap())
        .collect();
    extremes.extend(pr_box_variants());
    let count = rng.random_range(1..=6);
    let picks: Vec<usize> = (0..count)
        .map(|i| {
            if i == 0 && rng.random_range(0..3) > 0 {
                16 + rng.random_range(0..8)
            } else {
                rng.random_range(0..extremes.len())
            }
        })
        .collect();
    let weights = sample_probability_vector_with(count, &mut rng);
    let chosen: Vec<CorrelationBox> = picks.iter().map(|&i| extremes[i].clone()).collect();
    CorrelationBox::mixture(&weights, &chosen).unwrap()
}

/// Random NS box with `n_a` x `n_b` inputs and the given outcome counts:
/// a random local part mixed with a random quantum-free NS part built by
/// averaging relabelled product distributions.
pub fn random_local_box(sc: &Scenario, seed: u64) -> (CorrelationBox, Vec<f64>) {
    let mut rng = rng_from_seed(seed);
    let strategies = enumerate_deterministic(sc).unwrap();
    let count = rng.random_range(1..=4.min(strategies.len()));
    let weights = sample_probability_vector_with(count, &mut rng);
    let pairs: Vec<_> = (0..count)
        .map(|i| (strategies[rng.random_range(0..strategies.len())].clone(), weights[i]))
        .collect();
    (nonlocal::boxes::local_box(&pairs, sc).unwrap(), weights)
}

/// Random Bell functional with coefficients in [-1, 1].
pub fn random_functional(sc: &Scenario, seed: u64) -> BellFunctional {
    let mut rng = rng_from_seed(seed);
    BellFunctional::from_fn(sc.clone(), |_, _, _, _| rng.random_range(-1.0..1.0)).unwrap()
}
