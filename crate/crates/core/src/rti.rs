//! Reverse triangle inequality.
//!
//! If every `rho_i` satisfies `||rho_i - sigma|| >= 2 - eps`, then any mixture
//! `rho = sum_i p_i rho_i` satisfies `||rho - sigma|| >= 2 - 2 sqrt(l eps)`,
//! improving to `2 - l eps` when all the states commute. The square-root
//! dependence is attained for `l = 2` by a 2x2 family padded to unit trace.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matlin::{self, ComplexMatrix};
use crate::states::{
    check_probability_vector, derive_seed, fidelity, rng_from_seed, sample_density_with,
    sample_probability_vector_with, sample_unitary_with, trace_distance, DensityMatrix,
    SubnormalizedState,
};

/// Tolerance for a stated epsilon to count as a certificate.
pub const CERTIFICATE_TOL: f64 = 1e-9;
/// A verification passes when `lhs >= bound - RTI_SLACK`.
pub const RTI_SLACK: f64 = 1e-8;
/// Max commutator entry for states to count as commuting.
pub const COMMUTATOR_TOL: f64 = 1e-9;

/// `2 - 2 sqrt(l eps)`; negative values mean the bound is vacuous.
pub fn rti_general_bound(l: usize, eps: f64) -> f64 {
    2.0 - 2.0 * (l as f64 * eps).sqrt()
}

/// `2 - l eps`, valid for commuting states.
pub fn rti_commuting_bound(l: usize, eps: f64) -> f64 {
    2.0 - l as f64 * eps
}

/// States `rho_1..rho_l` far from `sigma`, mixing weights and a closeness
/// certificate `eps` with `||rho_i - sigma|| >= 2 - eps` for every `i`.
#[derive(Clone, Debug)]
pub struct RtiInstance {
    sigma: DensityMatrix,
    rhos: Vec<DensityMatrix>,
    weights: Vec<f64>,
    epsilon: f64,
}

impl RtiInstance {
    pub fn new(sigma: DensityMatrix, rhos: Vec<DensityMatrix>, weights: Vec<f64>, epsilon: f64) -> Result<Self> {
        if rhos.is_empty() || rhos.len() != weights.len() {
            return Err(Error::DimensionMismatch {
                expected: rhos.len(),
                found: weights.len(),
            });
        }
        check_probability_vector(&weights)?;
        if !(epsilon >= 0.0) {
            return Err(Error::InvalidArgument(format!("epsilon {epsilon} must be >= 0")));
        }
        let instance = Self {
            sigma,
            rhos,
            weights,
            epsilon,
        };
        let tight = instance.tight_epsilon()?;
        if tight > epsilon + CERTIFICATE_TOL {
            return Err(Error::InvalidCertificate {
                stated: epsilon,
                tight,
            });
        }
        Ok(instance)
    }

    /// Instance whose certificate is the smallest valid epsilon.
    pub fn with_tight_epsilon(sigma: DensityMatrix, rhos: Vec<DensityMatrix>, weights: Vec<f64>) -> Result<Self> {
        let mut instance = Self::new(sigma, rhos, weights, 2.0)?;
        instance.epsilon = instance.tight_epsilon()?;
        Ok(instance)
    }

    /// `max(0, 2 - min_i ||rho_i - sigma||)`.
    pub fn tight_epsilon(&self) -> Result<f64> {
        let mut min_distance = f64::INFINITY;
        for rho in &self.rhos {
            min_distance = min_distance.min(trace_distance(rho, &self.sigma)?);
        }
        Ok((2.0 - min_distance).max(0.0))
    }

    pub fn l(&self) -> usize {
        self.rhos.len()
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn sigma(&self) -> &DensityMatrix {
        &self.sigma
    }

    pub fn rhos(&self) -> &[DensityMatrix] {
        &self.rhos
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn mixture(&self) -> Result<DensityMatrix> {
        DensityMatrix::mixture(&self.weights, &self.rhos)
    }

    /// Largest commutator entry over all pairs drawn from `{sigma, rho_i}`.
    pub fn max_commutator(&self) -> Result<f64> {
        let all: Vec<&DensityMatrix> = std::iter::once(&self.sigma).chain(&self.rhos).collect();
        let mut worst: f64 = 0.0;
        for i in 0..all.len() {
            for j in (i + 1)..all.len() {
                worst = worst.max(all[i].matrix().commutator(all[j].matrix())?.max_abs());
            }
        }
        Ok(worst)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    General,
    Commuting,
}

#[derive(Clone, Debug, Serialize)]
pub struct RtiReport {
    pub kind: BoundKind,
    /// `||sum_i p_i rho_i - sigma||`.
    pub lhs: f64,
    pub bound: f64,
    /// Tight certificate derived from the instance.
    pub epsilon: f64,
    pub stated_epsilon: f64,
    pub l: usize,
    pub pass: bool,
    /// `lhs - bound`.
    pub slack: f64,
    /// The bound is negative and says nothing.
    pub vacuous: bool,
}

/// Checks the general (or, with `commuting`, the commuting) bound on an instance.
pub fn verify_rti(instance: &RtiInstance, commuting: bool) -> Result<RtiReport> {
    if commuting {
        let deviation = instance.max_commutator()?;
        if deviation > COMMUTATOR_TOL {
            return Err(Error::NotCommuting { deviation });
        }
    }
    let epsilon = instance.tight_epsilon()?;
    if epsilon > instance.epsilon + CERTIFICATE_TOL {
        return Err(Error::InvalidCertificate {
            stated: instance.epsilon,
            tight: epsilon,
        });
    }
    let lhs = trace_distance(&instance.mixture()?, &instance.sigma)?;
    let l = instance.l();
    let (kind, bound) = if commuting {
        (BoundKind::Commuting, rti_commuting_bound(l, epsilon))
    } else {
        (BoundKind::General, rti_general_bound(l, epsilon))
    };
    let slack = lhs - bound;
    Ok(RtiReport {
        kind,
        lhs,
        bound,
        epsilon,
        stated_epsilon: instance.epsilon,
        l,
        pass: slack >= -RTI_SLACK,
        slack,
        vacuous: bound < 0.0,
    })
}

/// `Tr A + Tr B - ||A - B||`, which equals `2 - ||A - B||` on states.
pub fn gap(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    a.check_same_dim(b)?;
    Ok(a.trace().re + b.trace().re - matlin::trace_norm(&(a - b))?)
}

/// The 2x2 family `sigma = diag(0, r)`,
/// `rho_± = [[1 - r, ±sqrt(r(1-r))], [±sqrt(r(1-r)), r]]`.
#[derive(Clone, Debug)]
pub struct ExtremalFamily {
    pub r: f64,
    pub rho_plus: SubnormalizedState,
    pub rho_minus: SubnormalizedState,
    pub sigma: SubnormalizedState,
}

impl ExtremalFamily {
    /// `1 + r - sqrt(1 + 2r - 3r^2)`, evaluated without cancellation.
    pub fn epsilon(&self) -> f64 {
        let r = self.r;
        let root = (1.0 + 2.0 * r - 3.0 * r * r).max(0.0).sqrt();
        4.0 * r * r / (1.0 + r + root)
    }

    /// Gap of the equal mixture against `sigma`, which is `2r`.
    pub fn mixture_gap(&self) -> f64 {
        2.0 * self.r
    }

    pub fn mixture(&self) -> Result<SubnormalizedState> {
        SubnormalizedState::new(&self.rho_plus.matrix().scale(0.5) + &self.rho_minus.matrix().scale(0.5))
    }
}

pub fn extremal_family(r: f64) -> Result<ExtremalFamily> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::InvalidArgument(format!("r = {r} outside [0, 1]")));
    }
    let off = (r * (1.0 - r)).sqrt();
    let rho = |sign: f64| {
        SubnormalizedState::new(ComplexMatrix::from_real_rows(&[vec![1.0 - r, sign * off], vec![sign * off, r]])?)
    };
    Ok(ExtremalFamily {
        r,
        rho_plus: rho(1.0)?,
        rho_minus: rho(-1.0)?,
        sigma: SubnormalizedState::new(ComplexMatrix::diag(&[0.0, r]))?,
    })
}

/// Pads two subnormalized matrices into unit-trace states two dimensions up,
/// putting each trace deficit on its own diagonal slot:
/// `rho -> diag(rho, 1 - Tr rho, 0)`, `sigma -> diag(sigma, 0, 1 - Tr sigma)`.
pub fn embed_subnormalized(
    rho: &SubnormalizedState,
    sigma: &SubnormalizedState,
) -> Result<(DensityMatrix, DensityMatrix)> {
    rho.matrix().check_same_dim(sigma.matrix())?;
    let n = rho.dim();
    let pad = |m: &ComplexMatrix, slot: usize, deficit: f64| {
        let mut out = ComplexMatrix::zeros(n + 2);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = m[(i, j)];
            }
        }
        out[(n + slot, n + slot)] = num_complex::Complex64::new(deficit.max(0.0), 0.0);
        out
    };
    Ok((
        DensityMatrix::new(pad(rho.matrix(), 0, 1.0 - rho.trace()))?,
        DensityMatrix::new(pad(sigma.matrix(), 1, 1.0 - sigma.trace()))?,
    ))
}

/// Classical witness showing `2 - l eps` cannot be improved: on `l + 1`
/// points, `h = (eps/2, ..., eps/2, 1 - l eps/2)` and `g_i` is the point mass
/// at `i`, mixed uniformly.
#[derive(Clone, Debug, Serialize)]
pub struct ClassicalWitness {
    pub h: Vec<f64>,
    pub g: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl ClassicalWitness {
    pub fn mixture(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.h.len()];
        for (w, g) in self.weights.iter().zip(&self.g) {
            for (o, x) in out.iter_mut().zip(g) {
                *o += w * x;
            }
        }
        out
    }

    pub fn component_distances(&self) -> Vec<f64> {
        self.g.iter().map(|g| l1_distance(g, &self.h)).collect()
    }

    pub fn mixture_distance(&self) -> f64 {
        l1_distance(&self.mixture(), &self.h)
    }
}

pub fn classical_sharp_example(l: usize, eps: f64) -> Result<ClassicalWitness> {
    if l == 0 {
        return Err(Error::InvalidArgument("l must be >= 1".into()));
    }
    if !(eps >= 0.0) || eps > 2.0 / l as f64 {
        return Err(Error::InvalidArgument(format!(
            "eps = {eps} outside [0, 2/l] for l = {l}"
        )));
    }
    let mut h = vec![eps / 2.0; l + 1];
    h[l] = 1.0 - l as f64 * eps / 2.0;
    let g = (0..l)
        .map(|i| {
            let mut g = vec![0.0; l + 1];
            g[i] = 1.0;
            g
        })
        .collect();
    Ok(ClassicalWitness {
        h,
        g,
        weights: vec![1.0 / l as f64; l],
    })
}

pub fn l1_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

#[derive(Clone, Debug, Serialize)]
pub struct InequalityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
    /// `rhs - lhs` for `lhs <= rhs` checks.
    pub slack: f64,
}

/// Concavity trace inequality `Tr sqrt(sum_i A_i) <= sum_i Tr sqrt(A_i)`.
pub fn rotfeld_check(list: &[ComplexMatrix]) -> Result<InequalityReport> {
    let first = list
        .first()
        .ok_or_else(|| Error::InvalidArgument("rotfeld_check needs at least one matrix".into()))?;
    let mut sum = ComplexMatrix::zeros(first.dim());
    let mut rhs = 0.0;
    for a in list {
        a.check_same_dim(first)?;
        rhs += matlin::trace_sqrt(a)?;
        sum = &sum + a;
    }
    let lhs = matlin::trace_sqrt(&sum)?;
    let slack = rhs - lhs;
    Ok(InequalityReport {
        lhs,
        rhs,
        pass: slack >= -RTI_SLACK,
        slack,
    })
}

/// Both sides of `1 - F <= ||sigma - tau|| / 2 <= sqrt(1 - F^2)`.
#[derive(Clone, Debug, Serialize)]
pub struct FidelityBoundsReport {
    pub fidelity: f64,
    pub half_distance: f64,
    pub lower: f64,
    pub upper: f64,
    pub pass: bool,
    pub slack: f64,
}

pub fn fuchs_van_de_graaf(sigma: &DensityMatrix, tau: &DensityMatrix) -> Result<FidelityBoundsReport> {
    let f = fidelity(sigma, tau)?;
    let half_distance = trace_distance(sigma, tau)? / 2.0;
    let lower = 1.0 - f;
    let upper = (1.0 - f * f).max(0.0).sqrt();
    let slack = (half_distance - lower).min(upper - half_distance);
    Ok(FidelityBoundsReport {
        fidelity: f,
        half_distance,
        lower,
        upper,
        pass: slack >= -RTI_SLACK,
        slack,
    })
}

/// Random instance with `l` states in dimension `dim`.
///
/// Instances cycle through three shapes so that campaigns exercise the
/// non-vacuous regime: generic mixed states, states nearly orthogonal to
/// `sigma`, and pure states tilted slightly towards a pure `sigma`. With
/// `commuting`, everything is diagonal in the computational basis.
pub fn sample_rti_instance(dim: usize, l: usize, seed: u64, commuting: bool) -> Result<RtiInstance> {
    if dim < 2 || l == 0 {
        return Err(Error::InvalidArgument(format!("need dim >= 2 and l >= 1, got {dim}, {l}")));
    }
    let mut rng = rng_from_seed(seed);
    let shape = seed % 3;
    let weights = sample_probability_vector_with(l, &mut rng);
    let (sigma, rhos) = if commuting {
        sample_classical_family(dim, l, shape, &mut rng)?
    } else {
        sample_quantum_family(dim, l, shape, &mut rng)?
    };
    RtiInstance::with_tight_epsilon(sigma, rhos, weights)
}

fn sample_classical_family(
    dim: usize,
    l: usize,
    shape: u64,
    rng: &mut impl Rng,
) -> Result<(DensityMatrix, Vec<DensityMatrix>)> {
    let noisy = |base: Vec<f64>, leak: f64, noise: Vec<f64>| -> Result<DensityMatrix> {
        DensityMatrix::diagonal(
            &base
                .iter()
                .zip(&noise)
                .map(|(b, n)| (1.0 - leak) * b + leak * n)
                .collect::<Vec<_>>(),
        )
    };
    match shape {
        0 => {
            let sigma = DensityMatrix::diagonal(&sample_probability_vector_with(dim, rng))?;
            let rhos = (0..l)
                .map(|_| DensityMatrix::diagonal(&sample_probability_vector_with(dim, rng)))
                .collect::<Result<_>>()?;
            Ok((sigma, rhos))
        }
        _ => {
            // sigma concentrated on coordinate 0, rho_i on the rest.
            let leak_scale = if shape == 1 { 0.2 } else { 0.02 };
            let mut base = vec![0.0; dim];
            base[0] = 1.0;
            let leak = leak_scale * rng.random::<f64>();
            let sigma = noisy(base, leak, sample_probability_vector_with(dim, rng))?;
            let rhos = (0..l)
                .map(|_| {
                    let mut base = sample_probability_vector_with(dim - 1, rng);
                    base.insert(0, 0.0);
                    let leak = leak_scale * rng.random::<f64>();
                    noisy(base, leak, sample_probability_vector_with(dim, rng))
                })
                .collect::<Result<_>>()?;
            Ok((sigma, rhos))
        }
    }
}

fn sample_quantum_family(
    dim: usize,
    l: usize,
    shape: u64,
    rng: &mut impl Rng,
) -> Result<(DensityMatrix, Vec<DensityMatrix>)> {
    match shape {
        0 => {
            let rank = rng.random_range(1..=dim);
            let sigma = sample_density_with(dim, rank, rng)?;
            let rhos = (0..l)
                .map(|_| {
                    let rank = rng.random_range(1..=dim);
                    sample_density_with(dim, rank, rng)
                })
                .collect::<Result<_>>()?;
            Ok((sigma, rhos))
        }
        1 => {
            // sigma near the first basis vector of a random frame, rho_i near
            // its orthogonal complement.
            let u = sample_unitary_with(dim, rng)?;
            let rotate = |m: &ComplexMatrix| &(&u * m) * &u.adjoint();
            let leak = 0.2 * rng.random::<f64>();
            let mut sigma_base = vec![0.0; dim];
            sigma_base[0] = 1.0;
            let noise = sample_density_with(dim, dim, rng)?;
            let sigma = DensityMatrix::new(
                &rotate(&ComplexMatrix::diag(&sigma_base)).scale(1.0 - leak) + &noise.matrix().scale(leak),
            )?;
            let rhos = (0..l)
                .map(|_| {
                    let inner = sample_density_with(dim - 1, rng.random_range(1..=dim - 1), rng)?;
                    let mut padded = ComplexMatrix::zeros(dim);
                    for i in 0..dim - 1 {
                        for j in 0..dim - 1 {
                            padded[(i + 1, j + 1)] = inner.matrix()[(i, j)];
                        }
                    }
                    let leak = 0.2 * rng.random::<f64>();
                    let noise = sample_density_with(dim, dim, rng)?;
                    DensityMatrix::new(&rotate(&padded).scale(1.0 - leak) + &noise.matrix().scale(leak))
                })
                .collect::<Result<_>>()?;
            Ok((sigma, rhos))
        }
        _ => {
            // Pure sigma = |e_0>, rho_i = pure states cos t |v_i> + sin t |e_0>
            // with v_i orthogonal to e_0, in a random frame.
            let u = sample_unitary_with(dim, rng)?;
            let column = |v: &[num_complex::Complex64]| -> Vec<num_complex::Complex64> {
                (0..dim).map(|i| (0..dim).map(|k| u[(i, k)] * v[k]).sum()).collect()
            };
            let mut e0 = vec![num_complex::Complex64::new(0.0, 0.0); dim];
            e0[0] = num_complex::Complex64::new(1.0, 0.0);
            let sigma = DensityMatrix::pure(&column(&e0))?;
            let rhos = (0..l)
                .map(|_| {
                    let t = 0.3 * rng.random::<f64>();
                    let mut v: Vec<num_complex::Complex64> = (0..dim)
                        .map(|i| {
                            if i == 0 {
                                num_complex::Complex64::new(0.0, 0.0)
                            } else {
                                num_complex::Complex64::new(
                                    rng.random::<f64>() - 0.5,
                                    rng.random::<f64>() - 0.5,
                                )
                            }
                        })
                        .collect();
                    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                    v.iter_mut().for_each(|z| *z *= t.cos() / norm);
                    v[0] = num_complex::Complex64::new(t.sin(), 0.0);
                    DensityMatrix::pure(&column(&v))
                })
                .collect::<Result<_>>()?;
            Ok((sigma, rhos))
        }
    }
}

/// Aggregate of one (dimension, l) cell of a randomized campaign.
#[derive(Clone, Debug, Serialize)]
pub struct CampaignCell {
    pub kind: BoundKind,
    pub dim: usize,
    pub l: usize,
    pub trials: usize,
    pub violations: usize,
    pub vacuous: usize,
    pub min_slack: f64,
    /// Smallest slack among trials with a non-vacuous bound.
    pub min_slack_nonvacuous: Option<f64>,
    pub worst_trial: usize,
}

/// Runs `trials` random instances for every `(dim, l)` pair. Trial seeds
/// are derived from `seed`, so the result does not depend on thread count.
pub fn rti_campaign(dims: &[usize], ls: &[usize], trials: usize, seed: u64, commuting: bool) -> Result<Vec<CampaignCell>> {
    let mut cells = Vec::new();
    for &dim in dims {
        for &l in ls {
            let cell_seed = derive_seed(seed, ((dim as u64) << 32) | l as u64 | if commuting { 1 << 63 } else { 0 });
            let reports: Vec<RtiReport> = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let instance = sample_rti_instance(dim, l, derive_seed(cell_seed, t as u64), commuting)?;
                    verify_rti(&instance, commuting)
                })
                .collect::<Result<_>>()?;
            let (worst_trial, min_slack) = reports
                .iter()
                .enumerate()
                .map(|(i, r)| (i, r.slack))
                .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
            let min_slack_nonvacuous = reports
                .iter()
                .filter(|r| !r.vacuous)
                .map(|r| r.slack)
                .fold(None, |acc: Option<f64>, s| Some(acc.map_or(s, |a| a.min(s))));
            cells.push(CampaignCell {
                kind: if commuting { BoundKind::Commuting } else { BoundKind::General },
                dim,
                l,
                trials,
                violations: reports.iter().filter(|r| !r.pass).count(),
                vacuous: reports.iter().filter(|r| r.vacuous).count(),
                min_slack,
                min_slack_nonvacuous,
                worst_trial,
            });
        }
    }
    Ok(cells)
}

/// One point of the extremal-family grid.
#[derive(Clone, Debug, Serialize)]
pub struct TightnessPoint {
    pub r: f64,
    pub epsilon: f64,
    /// Measured `2 - ||rho~_i - sigma~||` for both family members.
    pub component_gaps: [f64; 2],
    /// Measured `||(rho~_1 + rho~_2)/2 - sigma~||`.
    pub mixture_distance: f64,
    /// `2 - sqrt(2 eps)`.
    pub sqrt_bound: f64,
    /// `sqrt(2 eps) / (2r)`, tending to 1 as `r -> 0`.
    pub ratio: f64,
    pub holds: bool,
}

pub fn tightness_point(r: f64) -> Result<TightnessPoint> {
    let family = extremal_family(r)?;
    let (rho_plus, sigma) = embed_subnormalized(&family.rho_plus, &family.sigma)?;
    let (rho_minus, _) = embed_subnormalized(&family.rho_minus, &family.sigma)?;
    let mixture = DensityMatrix::mixture(&[0.5, 0.5], &[rho_plus.clone(), rho_minus.clone()])?;
    let epsilon = family.epsilon();
    let mixture_distance = trace_distance(&mixture, &sigma)?;
    let sqrt_bound = 2.0 - (2.0 * epsilon).sqrt();
    Ok(TightnessPoint {
        r,
        epsilon,
        component_gaps: [
            2.0 - trace_distance(&rho_plus, &sigma)?,
            2.0 - trace_distance(&rho_minus, &sigma)?,
        ],
        mixture_distance,
        sqrt_bound,
        ratio: if r > 0.0 { (2.0 * epsilon).sqrt() / (2.0 * r) } else { 1.0 },
        holds: mixture_distance <= sqrt_bound + CERTIFICATE_TOL,
    })
}

/// `r = 0.05, 0.10, ..., 0.95`.
pub fn default_tightness_grid() -> Vec<f64> {
    (1..=19).map(|i| i as f64 * 0.05).collect()
}

/// Rotfel'd check on random PSD lists of length 1-5 in dimensions 2-6.
pub fn rotfeld_campaign(trials: usize, seed: u64) -> Result<Vec<InequalityReport>> {
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng_from_seed(derive_seed(seed, t as u64));
            let dim = rng.random_range(2..=6);
            let len = rng.random_range(1..=5);
            let list = (0..len)
                .map(|_| {
                    let rank = rng.random_range(1..=dim);
                    let scale = 0.1 + 2.0 * rng.random::<f64>();
                    Ok(sample_density_with(dim, rank, &mut rng)?.matrix().scale(scale))
                })
                .collect::<Result<Vec<_>>>()?;
            rotfeld_check(&list)
        })
        .collect()
}

/// Fuchs-van de Graaf check on random state pairs in dimensions 2-6.
pub fn fidelity_bounds_campaign(trials: usize, seed: u64) -> Result<Vec<FidelityBoundsReport>> {
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng_from_seed(derive_seed(seed, t as u64));
            let dim = rng.random_range(2..=6);
            let r1 = rng.random_range(1..=dim);
            let r2 = rng.random_range(1..=dim);
            let sigma = sample_density_with(dim, r1, &mut rng)?;
            let tau = sample_density_with(dim, r2, &mut rng)?;
            fuchs_van_de_graaf(&sigma, &tau)
        })
        .collect()
}
