//! Lower bounds on the deterministic content of quantum boxes.
//!
//! The chain runs: steer Alice's side with both of Bob's measurements,
//! drop light ensemble elements, find a close pair of conditional states,
//! then find an Alice outcome that is likely on both. The resulting joint
//! probability floor is the fraction of determinism guaranteed for any
//! quantum box with two Bob inputs.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::boxes::{quantum_box, DeterministicStrategy};
use crate::decomp::{bell_bound_from_fod, deterministic_weight, fod_exact};
use crate::error::{Error, Result};
use crate::states::{
    derive_seed, rng_from_seed, sample_density_with, sample_povm_with, steer, trace_distance,
    truncate_ensemble, DensityMatrix, Ensemble, Povm,
};

/// Slack on recorded inequalities in a pipeline trace.
pub const TRACE_TOL: f64 = 1e-8;
/// Slack on outcome-probability floors.
pub const FLOOR_TOL: f64 = 1e-10;
/// Slack on the close-pair distance.
pub const PAIR_TOL: f64 = 1e-9;

/// An outcome likely under both states.
#[derive(Clone, Debug, Serialize)]
pub struct ConfusingOutcome {
    pub r0: usize,
    /// `(2 - ||rho - sigma||) / (2k)`.
    pub epsilon: f64,
    pub prob_rho: f64,
    pub prob_sigma: f64,
}

/// Smallest outcome `r0` with `Tr(X_r0 rho)` and `Tr(X_r0 sigma)` both at
/// least `(2 - ||rho - sigma||) / (2k)`.
pub fn confusing_outcome(rho: &DensityMatrix, sigma: &DensityMatrix, povm: &Povm) -> Result<ConfusingOutcome> {
    let k = povm.len();
    let epsilon = ((2.0 - trace_distance(rho, sigma)?) / (2.0 * k as f64)).max(0.0);
    let pr = povm.probabilities(rho)?;
    let ps = povm.probabilities(sigma)?;
    (0..k)
        .find(|&r| pr[r] >= epsilon - FLOOR_TOL && ps[r] >= epsilon - FLOOR_TOL)
        .map(|r0| ConfusingOutcome {
            r0,
            epsilon,
            prob_rho: pr[r0],
            prob_sigma: ps[r0],
        })
        .ok_or_else(|| Error::Invariant(format!("no outcome reaches the floor {epsilon:.3e}")))
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosePair {
    pub i0: usize,
    pub j0: usize,
    pub distance: f64,
    /// `((2 - x) / 2)^2 / (l1 l2)`.
    pub epsilon: f64,
    /// Distance bound between the ensemble averages that was used.
    pub x: f64,
    /// Measured distance between the ensemble averages.
    pub measured_x: f64,
}

/// Closest pair across two ensembles, with `x` the distance of their averages.
pub fn close_pair(xi: &Ensemble, xi_prime: &Ensemble) -> Result<ClosePair> {
    let measured = trace_distance(&xi.average()?, &xi_prime.average()?)?;
    close_pair_with_x(xi, xi_prime, measured)
}

/// As [`close_pair`], with a caller-supplied upper bound `x` on the distance
/// of the averages.
pub fn close_pair_with_x(xi: &Ensemble, xi_prime: &Ensemble, x: f64) -> Result<ClosePair> {
    let measured_x = trace_distance(&xi.average()?, &xi_prime.average()?)?;
    if x < measured_x - PAIR_TOL {
        return Err(Error::InvalidArgument(format!(
            "supplied x = {x} is below the measured average distance {measured_x}"
        )));
    }
    if x >= 2.0 {
        return Err(Error::Vacuous(format!("average distance bound {x} >= 2")));
    }
    let epsilon = ((2.0 - x) / 2.0).powi(2) / (xi.len() * xi_prime.len()) as f64;
    let mut best = (0, 0, f64::INFINITY);
    for (i, rho) in xi.states().iter().enumerate() {
        for (j, sigma) in xi_prime.states().iter().enumerate() {
            let d = trace_distance(rho, sigma)?;
            if d < best.2 {
                best = (i, j, d);
            }
        }
    }
    Ok(ClosePair {
        i0: best.0,
        j0: best.1,
        distance: best.2,
        epsilon,
        x,
        measured_x,
    })
}

/// `max_{r,i,j} min{p_i Tr(X_r rho_i), q_j Tr(X_r sigma_j)}`.
pub fn fod_witness_c0(xi: &Ensemble, xi_prime: &Ensemble, povm: &Povm) -> Result<f64> {
    let a: Vec<Vec<f64>> = xi
        .states()
        .iter()
        .zip(xi.weights())
        .map(|(s, w)| Ok(povm.probabilities(s)?.into_iter().map(|p| w * p).collect()))
        .collect::<Result<_>>()?;
    let b: Vec<Vec<f64>> = xi_prime
        .states()
        .iter()
        .zip(xi_prime.weights())
        .map(|(s, w)| Ok(povm.probabilities(s)?.into_iter().map(|p| w * p).collect()))
        .collect::<Result<_>>()?;
    let mut best: f64 = 0.0;
    for r in 0..povm.len() {
        let max_a = a.iter().map(|v| v[r]).fold(0.0, f64::max);
        let max_b = b.iter().map(|v| v[r]).fold(0.0, f64::max);
        best = best.max(max_a.min(max_b));
    }
    Ok(best)
}

/// `((mu - 2) / (mu - 1))^2 / mu`.
pub fn mu_objective(mu: f64) -> f64 {
    ((mu - 2.0) / (mu - 1.0)).powi(2) / mu
}

#[derive(Clone, Debug, Serialize)]
pub struct MuOptimum {
    /// `(5 + sqrt 17) / 2`.
    pub mu0: f64,
    pub fmax: f64,
    /// Argmax located by golden-section search on `(2, 50]`.
    pub golden_mu0: f64,
    pub golden_fmax: f64,
}

/// `ln f(a) - ln f(b)` without cancellation when `a` and `b` are close.
fn log_objective_difference(a: f64, b: f64) -> f64 {
    let h = a - b;
    2.0 * (h / (b - 2.0)).ln_1p() - 2.0 * (h / (b - 1.0)).ln_1p() - (h / b).ln_1p()
}

fn golden_section_argmax(mut lo: f64, mut hi: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    while hi - lo > 1e-13 {
        if log_objective_difference(c, d) > 0.0 {
            hi = d;
            d = c;
            c = hi - inv_phi * (hi - lo);
        } else {
            lo = c;
            c = d;
            d = lo + inv_phi * (hi - lo);
        }
    }
    0.5 * (lo + hi)
}

pub fn optimize_mu() -> MuOptimum {
    let mu0 = (5.0 + 17f64.sqrt()) / 2.0;
    let golden_mu0 = golden_section_argmax(2.0 + 1e-9, 50.0);
    MuOptimum {
        mu0,
        fmax: mu_objective(mu0),
        golden_mu0,
        golden_fmax: mu_objective(golden_mu0),
    }
}

/// `((mu - 2) / (l (mu - 1)))^2`.
pub fn epsilon_from_mu(mu: f64, l: usize) -> Result<f64> {
    if !(mu > 2.0) {
        return Err(Error::InvalidArgument(format!("mu = {mu} must exceed 2")));
    }
    if l == 0 {
        return Err(Error::InvalidArgument("l must be >= 1".into()));
    }
    Ok(((mu - 2.0) / (l as f64 * (mu - 1.0))).powi(2))
}

#[derive(Clone, Debug, Serialize)]
pub struct UniversalBound {
    pub k: usize,
    pub l1: usize,
    pub l2: usize,
    pub l: usize,
    /// `fmax / (2k l l1 l2)`.
    pub theorem_form: f64,
    /// `fmax / (2k l^3)`.
    pub proof_form: f64,
}

pub fn universal_fod_bound(k: usize, l1: usize, l2: usize) -> Result<UniversalBound> {
    if k == 0 || l1 == 0 || l2 == 0 {
        return Err(Error::InvalidArgument("k, l1, l2 must be >= 1".into()));
    }
    let fmax = optimize_mu().fmax;
    let l = l1.max(l2);
    let two_k = 2.0 * k as f64;
    Ok(UniversalBound {
        k,
        l1,
        l2,
        l,
        theorem_form: fmax / (two_k * (l * l1 * l2) as f64),
        proof_form: fmax / (two_k * (l * l * l) as f64),
    })
}

/// `fmax / (2k l^2)`: the value that reproduces the worked example's
/// `7.0875e-3`, one factor of `l` larger than the general formula.
pub fn worked_example_form(k: usize, l: usize) -> f64 {
    optimize_mu().fmax / (2.0 * k as f64 * (l * l) as f64)
}

/// Inequality recorded in a pipeline trace, in `lhs <= rhs` form.
#[derive(Clone, Debug, Serialize)]
pub struct TraceCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub pass: bool,
}

impl TraceCheck {
    fn le(name: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            lhs,
            rhs,
            slack: rhs - lhs,
            pass: lhs <= rhs + tol,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConfusingStep {
    pub x: usize,
    pub r0: usize,
    pub epsilon: f64,
    pub prob_rho: f64,
    pub prob_sigma: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineTrace {
    pub k: usize,
    pub l1: usize,
    pub l2: usize,
    pub l: usize,
    pub mu0: f64,
    pub truncation_threshold: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub kept1: usize,
    pub kept2: usize,
    /// Measured distance between the truncated averages.
    pub truncated_average_distance: f64,
    /// `2 max(delta) / (1 - min(delta))`.
    pub truncation_bound: f64,
    /// `2 / (mu0 - 1)`, the distance bound fed to the close-pair step.
    pub x: f64,
    /// Bob outcomes of the close pair.
    pub i0: usize,
    pub j0: usize,
    pub pair_distance: f64,
    pub pair_epsilon: f64,
    pub confusing: Vec<ConfusingStep>,
    /// `pair_epsilon / (2k l mu0)`.
    pub c: f64,
    pub theorem_form: f64,
    pub proof_form: f64,
    /// Strategy read off the trace: Alice answers `r0(x)`, Bob answers `i0`, `j0`.
    pub strategy: DeterministicStrategy,
    /// `min_{x,y} p(d_A(x), d_B(y) | x, y)` on the realized box.
    pub realized_joint_min: f64,
    pub checks: Vec<TraceCheck>,
    pub consistent: bool,
    pub vacuous: bool,
}

/// Runs the bound chain on a quantum realization with two Bob inputs.
pub fn theorem1_pipeline(
    rho_ab: &DensityMatrix,
    bob_y: &Povm,
    bob_y_prime: &Povm,
    alice_povms: &[Povm],
) -> Result<PipelineTrace> {
    if alice_povms.is_empty() {
        return Err(Error::InvalidArgument("need at least one Alice POVM".into()));
    }
    let mu = optimize_mu();
    let k = alice_povms.iter().map(Povm::len).max().expect("nonempty");
    let (l1, l2) = (bob_y.len(), bob_y_prime.len());
    let l = l1.max(l2);
    let bound = universal_fod_bound(k, l1, l2)?;
    let realized = quantum_box(rho_ab, alice_povms, &[bob_y.clone(), bob_y_prime.clone()])?;

    let s1 = steer(rho_ab, bob_y)?;
    let s2 = steer(rho_ab, bob_y_prime)?;
    let threshold = 1.0 / (l as f64 * mu.mu0);
    let (t1, t2) = match (truncate_ensemble(&s1.ensemble, threshold), truncate_ensemble(&s2.ensemble, threshold)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(Error::EmptyTruncation { .. }), _) | (_, Err(Error::EmptyTruncation { .. })) => {
            return Ok(vacuous_trace(k, l1, l2, mu.mu0, threshold, &bound, alice_povms.len()));
        }
        (Err(e), _) | (_, Err(e)) => return Err(e),
    };
    let mut checks = Vec::new();

    let truncated_average_distance = trace_distance(&t1.ensemble.average()?, &t2.ensemble.average()?)?;
    let truncation_bound = 2.0 * t1.delta.max(t2.delta) / (1.0 - t1.delta.min(t2.delta));
    let x = 2.0 / (mu.mu0 - 1.0);
    checks.push(TraceCheck::le("truncated averages within truncation bound", truncated_average_distance, truncation_bound, PAIR_TOL));
    checks.push(TraceCheck::le("truncation bound within 2/(mu0-1)", truncation_bound, x, 1e-12));

    let pair = close_pair_with_x(&t1.ensemble, &t2.ensemble, x.max(truncated_average_distance))?;
    checks.push(TraceCheck::le("close pair distance", pair.distance, 2.0 - pair.epsilon, PAIR_TOL));
    let rho = &t1.ensemble.states()[pair.i0];
    let sigma = &t2.ensemble.states()[pair.j0];
    // Map back: truncated index -> steering index -> Bob outcome.
    let i0 = s1.outcomes[t1.kept[pair.i0]];
    let j0 = s2.outcomes[t2.kept[pair.j0]];
    let w_rho = t1.original_weights[pair.i0];
    let w_sigma = t2.original_weights[pair.j0];
    checks.push(TraceCheck::le("kept weight above threshold (rho)", threshold, w_rho, 0.0));
    checks.push(TraceCheck::le("kept weight above threshold (sigma)", threshold, w_sigma, 0.0));

    let floor = pair.epsilon / (2.0 * k as f64);
    let mut confusing = Vec::new();
    for (xi, povm) in alice_povms.iter().enumerate() {
        let co = confusing_outcome(rho, sigma, povm)?;
        checks.push(TraceCheck::le(format!("x={xi}: floor from pair epsilon"), floor, co.epsilon, FLOOR_TOL));
        checks.push(TraceCheck::le(format!("x={xi}: Tr(X_r0 rho)"), co.epsilon, co.prob_rho, FLOOR_TOL));
        checks.push(TraceCheck::le(format!("x={xi}: Tr(X_r0 sigma)"), co.epsilon, co.prob_sigma, FLOOR_TOL));
        confusing.push(ConfusingStep {
            x: xi,
            r0: co.r0,
            epsilon: co.epsilon,
            prob_rho: co.prob_rho,
            prob_sigma: co.prob_sigma,
        });
    }

    let c = pair.epsilon / (2.0 * k as f64 * l as f64 * mu.mu0);
    checks.push(TraceCheck::le("c above the general formula", bound.theorem_form, c, 1e-12));
    let strategy = DeterministicStrategy {
        alice: confusing.iter().map(|s| s.r0).collect(),
        bob: vec![i0, j0],
    };
    let realized_joint_min = deterministic_weight(&realized, &strategy);
    checks.push(TraceCheck::le("realized joint probabilities", c, realized_joint_min, TRACE_TOL));

    let consistent = checks.iter().all(|c| c.pass);
    Ok(PipelineTrace {
        k,
        l1,
        l2,
        l,
        mu0: mu.mu0,
        truncation_threshold: threshold,
        delta1: t1.delta,
        delta2: t2.delta,
        kept1: t1.kept.len(),
        kept2: t2.kept.len(),
        truncated_average_distance,
        truncation_bound,
        x,
        i0,
        j0,
        pair_distance: pair.distance,
        pair_epsilon: pair.epsilon,
        confusing,
        c,
        theorem_form: bound.theorem_form,
        proof_form: bound.proof_form,
        strategy,
        realized_joint_min,
        checks,
        consistent,
        vacuous: false,
    })
}

fn vacuous_trace(k: usize, l1: usize, l2: usize, mu0: f64, threshold: f64, bound: &UniversalBound, n_a: usize) -> PipelineTrace {
    PipelineTrace {
        k,
        l1,
        l2,
        l: l1.max(l2),
        mu0,
        truncation_threshold: threshold,
        delta1: f64::NAN,
        delta2: f64::NAN,
        kept1: 0,
        kept2: 0,
        truncated_average_distance: f64::NAN,
        truncation_bound: f64::NAN,
        x: 2.0 / (mu0 - 1.0),
        i0: 0,
        j0: 0,
        pair_distance: f64::NAN,
        pair_epsilon: f64::NAN,
        confusing: Vec::new(),
        c: bound.theorem_form,
        theorem_form: bound.theorem_form,
        proof_form: bound.proof_form,
        strategy: DeterministicStrategy {
            alice: vec![0; n_a],
            bob: vec![0, 0],
        },
        realized_joint_min: f64::NAN,
        checks: Vec::new(),
        consistent: true,
        vacuous: true,
    }
}

/// Which deterministic-content functional the binary-Bob minimization targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BinaryBobKind {
    Fod,
    Cf,
}

/// Per-case lower-bound terms for binary Bob outcomes, with weights
/// `(p0, 1 - p0)` and `(q0, 1 - q0)` on the two steering ensembles. Row `c`
/// holds the four terms of the case in which the pair `(c / 2, c % 2)` is
/// the close one.
pub fn binary_bob_case_terms(p0: f64, q0: f64) -> [[f64; 4]; 4] {
    let p1 = 1.0 - p0;
    let q1 = 1.0 - q0;
    let a = (2.0 * q1 * (1.0 - q0 / p1)).max(0.0);
    let b = (2.0 * q0 * (1.0 - q1 / p1)).max(0.0);
    [
        [p0 / 4.0, a, 0.0, b],
        [0.0, a, p0 / 4.0, b],
        [0.0, a, 0.0, q0 / 4.0],
        [0.0, q1 / 4.0, 0.0, b],
    ]
}

/// Guaranteed value at `(p0, q0)`: the smallest case value, with its case.
/// A case is worth its largest term (FOD) or its larger paired sum (CF).
pub fn binary_bob_objective(p0: f64, q0: f64, kind: BinaryBobKind) -> (f64, usize) {
    let terms = binary_bob_case_terms(p0, q0);
    let mut best = (f64::INFINITY, 0);
    for (case, t) in terms.iter().enumerate() {
        let v = match kind {
            BinaryBobKind::Fod => t.iter().copied().fold(0.0, f64::max),
            BinaryBobKind::Cf => (t[0] + t[1]).max(t[2] + t[3]),
        };
        if v < best.0 {
            best = (v, case);
        }
    }
    best
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct BinaryBobPoint {
    pub p0: f64,
    pub q0: f64,
    pub case: usize,
    pub value: f64,
}

fn grid_min(kind: BinaryBobKind, p_range: (f64, f64), q_range: (f64, f64), steps: usize) -> BinaryBobPoint {
    let at = |range: (f64, f64), i: usize| range.0 + (range.1 - range.0) * i as f64 / steps as f64;
    (0..=steps)
        .into_par_iter()
        .map(|i| {
            let p0 = at(p_range, i);
            (0..=steps)
                .map(|j| {
                    let q0 = at(q_range, j);
                    let (value, case) = binary_bob_objective(p0, q0, kind);
                    BinaryBobPoint { p0, q0, case, value }
                })
                .fold(None, |acc: Option<BinaryBobPoint>, pt| match acc {
                    Some(a) if a.value <= pt.value => Some(a),
                    _ => Some(pt),
                })
                .expect("nonempty row")
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(None, |acc: Option<BinaryBobPoint>, pt| match acc {
            Some(a) if a.value <= pt.value => Some(a),
            _ => Some(pt),
        })
        .expect("nonempty grid")
}

/// Minimum over `p0, q0 in [0, 1/2]`: a grid of the given step, then
/// repeated zooming around the incumbent down to a `1e-9` window.
pub fn minimize_binary_bob(kind: BinaryBobKind, step: f64) -> BinaryBobPoint {
    let steps = (0.5 / step).round().max(1.0) as usize;
    let mut best = grid_min(kind, (0.0, 0.5), (0.0, 0.5), steps);
    let mut half_width = 2.0 * 0.5 / steps as f64;
    while half_width > 1e-9 {
        let clamp = |c: f64| ((c - half_width).max(0.0), (c + half_width).min(0.5));
        let cand = grid_min(kind, clamp(best.p0), clamp(best.q0), 40);
        if cand.value < best.value {
            best = cand;
        }
        half_width /= 4.0;
    }
    best
}

#[derive(Clone, Debug, Serialize)]
pub struct BinaryBobBounds {
    pub k: usize,
    pub fod_constant: f64,
    pub cf_constant: f64,
    /// `fod_constant / (2k)`.
    pub fod_bound: f64,
    pub cf_bound: f64,
    pub fod_witness: BinaryBobPoint,
    pub cf_witness: BinaryBobPoint,
    /// Induced CHSH bounds (`beta_alg = 4`, `beta_det = 2`).
    pub chsh_fod_bell_bound: f64,
    pub chsh_cf_bell_bound: f64,
}

/// Deterministic-content floors when Bob has two binary measurements and
/// Alice's measurements have `k` outcomes.
pub fn binary_bob_bounds(k: usize) -> Result<BinaryBobBounds> {
    binary_bob_bounds_with_step(k, 1e-3)
}

pub fn binary_bob_bounds_with_step(k: usize, step: f64) -> Result<BinaryBobBounds> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be >= 1".into()));
    }
    if !(step > 0.0 && step <= 0.5) {
        return Err(Error::InvalidArgument(format!("grid step {step} outside (0, 1/2]")));
    }
    let fod = minimize_binary_bob(BinaryBobKind::Fod, step);
    let cf = minimize_binary_bob(BinaryBobKind::Cf, step);
    let two_k = 2.0 * k as f64;
    let fod_bound = fod.value / two_k;
    let cf_bound = cf.value / two_k;
    Ok(BinaryBobBounds {
        k,
        fod_constant: fod.value,
        cf_constant: cf.value,
        fod_bound,
        cf_bound,
        fod_witness: fod,
        cf_witness: cf,
        chsh_fod_bell_bound: bell_bound_from_fod(4.0, 2.0, fod_bound)?,
        chsh_cf_bell_bound: bell_bound_from_fod(4.0, 2.0, cf_bound)?,
    })
}

/// Count of campaign trials failing a lemma, with the tightest slack seen.
#[derive(Clone, Debug, Serialize)]
pub struct LemmaCampaign {
    pub name: String,
    pub trials: usize,
    pub failures: usize,
    pub min_slack: f64,
}

fn summarize(name: &str, slacks: Vec<Option<f64>>) -> LemmaCampaign {
    LemmaCampaign {
        name: name.to_string(),
        trials: slacks.len(),
        failures: slacks.iter().filter(|s| s.is_none()).count(),
        min_slack: slacks.iter().flatten().copied().fold(f64::INFINITY, f64::min),
    }
}

/// Random state pair and POVM, dimensions 2-4, 2-4 outcomes: the confusing
/// outcome must exist every time.
pub fn lemma1_campaign(trials: usize, seed: u64) -> Result<LemmaCampaign> {
    let slacks = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng_from_seed(derive_seed(seed, t as u64));
            let dim = rng.random_range(2..=4);
            let k = rng.random_range(2..=4);
            let r1 = rng.random_range(1..=dim);
            let r2 = rng.random_range(1..=dim);
            let rho = sample_density_with(dim, r1, &mut rng)?;
            let sigma = sample_density_with(dim, r2, &mut rng)?;
            let povm = sample_povm_with(dim, k, &mut rng)?;
            Ok(match confusing_outcome(&rho, &sigma, &povm) {
                Ok(c) => Some(c.prob_rho.min(c.prob_sigma) - c.epsilon),
                Err(Error::Invariant(_)) => None,
                Err(e) => return Err(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize("lemma1_confusing_outcome", slacks))
}

/// Random shared state, dimensions 2-3 per side, with two random Bob POVMs.
fn sample_steering_pair(rng: &mut impl Rng) -> Result<(DensityMatrix, Povm, Povm)> {
    let da = rng.random_range(2..=3);
    let db = rng.random_range(2..=3);
    let rank = rng.random_range(1..=da * db);
    let rho_ab = sample_density_with(da * db, rank, rng)?;
    let l1 = rng.random_range(2..=4);
    let l2 = rng.random_range(2..=4);
    let y = sample_povm_with(db, l1, rng)?;
    let y_prime = sample_povm_with(db, l2, rng)?;
    Ok((rho_ab, y, y_prime))
}

/// Close pair on steered ensemble pairs (equal averages).
pub fn lemma2_campaign(trials: usize, seed: u64) -> Result<LemmaCampaign> {
    let slacks = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng_from_seed(derive_seed(seed, t as u64));
            let (rho_ab, y, y_prime) = sample_steering_pair(&mut rng)?;
            let xi = steer(&rho_ab, &y)?.ensemble;
            let xi_prime = steer(&rho_ab, &y_prime)?.ensemble;
            let pair = close_pair(&xi, &xi_prime)?;
            let slack = 2.0 - pair.epsilon - pair.distance;
            Ok((slack >= -PAIR_TOL).then_some(slack))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize("lemma2_close_pair", slacks))
}

/// Truncation of steered ensemble pairs at random thresholds.
pub fn lemma3_campaign(trials: usize, seed: u64) -> Result<LemmaCampaign> {
    let slacks = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng_from_seed(derive_seed(seed, t as u64));
            let (rho_ab, y, y_prime) = sample_steering_pair(&mut rng)?;
            let xi = steer(&rho_ab, &y)?.ensemble;
            let xi_prime = steer(&rho_ab, &y_prime)?.ensemble;
            let heaviest = |e: &Ensemble| e.weights().iter().copied().fold(0.0, f64::max);
            let threshold = rng.random::<f64>() * heaviest(&xi).min(heaviest(&xi_prime));
            let t1 = truncate_ensemble(&xi, threshold)?;
            let t2 = truncate_ensemble(&xi_prime, threshold)?;
            let lhs = trace_distance(&t1.ensemble.average()?, &t2.ensemble.average()?)?;
            let rhs = 2.0 * t1.delta.max(t2.delta) / (1.0 - t1.delta.min(t2.delta));
            let slack = rhs - lhs;
            Ok((slack >= -PAIR_TOL).then_some(slack))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize("lemma3_truncation", slacks))
}

/// Shared state plus measurements for the bound chain.
#[derive(Clone, Debug)]
pub struct Realization {
    pub rho_ab: DensityMatrix,
    pub bob: [Povm; 2],
    pub alice: Vec<Povm>,
}

/// Random realization: local dimensions 2-3, two binary Alice POVMs, Bob
/// POVMs with 2-3 outcomes.
pub fn sample_realization(seed: u64) -> Result<Realization> {
    let mut rng = rng_from_seed(seed);
    let da = rng.random_range(2..=3);
    let db = rng.random_range(2..=3);
    let rank = rng.random_range(1..=da * db);
    let rho_ab = sample_density_with(da * db, rank, &mut rng)?;
    let l1 = rng.random_range(2..=3);
    let l2 = rng.random_range(2..=3);
    let bob = [sample_povm_with(db, l1, &mut rng)?, sample_povm_with(db, l2, &mut rng)?];
    let alice = vec![sample_povm_with(da, 2, &mut rng)?, sample_povm_with(da, 2, &mut rng)?];
    Ok(Realization { rho_ab, bob, alice })
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineCampaign {
    pub trials: usize,
    pub inconsistent: usize,
    pub vacuous: usize,
    /// Smallest `c - theorem_form`.
    pub min_c_margin: f64,
    /// Smallest `fod_exact(P) - c`.
    pub min_fod_margin: f64,
    /// Smallest `fod_witness_c0 - c` over Alice inputs.
    pub min_witness_margin: f64,
}

/// Bound chain on random realizations, checked against the exact FOD of the
/// realized box and the ensemble witness value.
pub fn pipeline_campaign(trials: usize, seed: u64) -> Result<PipelineCampaign> {
    let rows = (0..trials)
        .into_par_iter()
        .map(|t| {
            let r = sample_realization(derive_seed(seed, t as u64))?;
            let trace = theorem1_pipeline(&r.rho_ab, &r.bob[0], &r.bob[1], &r.alice)?;
            let p = quantum_box(&r.rho_ab, &r.alice, &r.bob)?;
            let fod = fod_exact(&p)?.value;
            let xi = steer(&r.rho_ab, &r.bob[0])?.ensemble;
            let xi_prime = steer(&r.rho_ab, &r.bob[1])?.ensemble;
            let mut witness = f64::INFINITY;
            for povm in &r.alice {
                witness = witness.min(fod_witness_c0(&xi, &xi_prime, povm)?);
            }
            Ok((trace.consistent, trace.vacuous, trace.c - trace.theorem_form, fod - trace.c, witness - trace.c))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PipelineCampaign {
        trials,
        inconsistent: rows.iter().filter(|r| !r.0).count(),
        vacuous: rows.iter().filter(|r| r.1).count(),
        min_c_margin: rows.iter().map(|r| r.2).fold(f64::INFINITY, f64::min),
        min_fod_margin: rows.iter().map(|r| r.3).fold(f64::INFINITY, f64::min),
        min_witness_margin: rows.iter().map(|r| r.4).fold(f64::INFINITY, f64::min),
    })
}

/// Singlet with computational and Hadamard-basis measurements on both sides.
pub fn singlet_zx_realization() -> Realization {
    let z = Povm::computational(2);
    let x = Povm::qubit_spin(std::f64::consts::FRAC_PI_2);
    Realization {
        rho_ab: DensityMatrix::singlet(),
        bob: [z.clone(), x.clone()],
        alice: vec![z, x],
    }
}
