//! Quantum states, measurements and ensembles.
//!
//! The distance convention throughout is the unnormalized trace norm, so two
//! states are at distance 2 exactly when their supports are orthogonal.

use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matlin::{self, eig_hermitian, partial_trace, psd_function, tensor, ComplexMatrix, Keep, PSD_TOL};

/// Allowed deviation of a state's trace from 1.
pub const TRACE_TOL: f64 = 1e-10;
/// Max-entry tolerance of `sum_r X_r - I` for a POVM.
pub const POVM_TOL: f64 = 1e-9;
/// Steering outcomes lighter than this are dropped.
pub const STEER_DROP_WEIGHT: f64 = 1e-12;
/// Tolerance on ensemble weights summing to one.
pub const WEIGHT_TOL: f64 = 1e-10;
/// Eigenvalues below this fraction of the largest count as zero in [`fidelity`].
pub const FIDELITY_NOISE_FLOOR: f64 = 1e-13;

fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    Ok(eig_hermitian(m)?.eigenvalues.first().copied().unwrap_or(0.0))
}

fn check_psd(m: &ComplexMatrix) -> Result<()> {
    let min = min_eigenvalue(m)?;
    if min < -PSD_TOL {
        return Err(Error::NotPsd { min_eigenvalue: min });
    }
    Ok(())
}

/// Hermitian, positive semi-definite, unit-trace matrix.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        matrix.ensure_hermitian()?;
        let matrix = matrix.hermitian_part();
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidTrace {
                trace,
                expected: "1",
            });
        }
        check_psd(&matrix)?;
        Ok(Self { matrix })
    }

    /// `|psi><psi|` for the normalized `psi`.
    pub fn pure(ket: &[Complex64]) -> Result<Self> {
        let norm = ket.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidArgument("zero state vector".into()));
        }
        let psi: Vec<Complex64> = ket.iter().map(|z| z / norm).collect();
        Self::new(ComplexMatrix::outer(&psi, &psi)?)
    }

    /// Computational basis projector `|i><i|`.
    pub fn basis(dim: usize, i: usize) -> Result<Self> {
        if i >= dim {
            return Err(Error::InvalidArgument(format!("basis index {i} out of range for dim {dim}")));
        }
        let mut diag = vec![0.0; dim];
        diag[i] = 1.0;
        Self::diagonal(&diag)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale(1.0 / dim as f64),
        }
    }

    /// Two-qubit singlet `(|01> - |10>)/sqrt 2`.
    pub fn singlet() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let ket = [
            Complex64::new(0.0, 0.0),
            Complex64::new(h, 0.0),
            Complex64::new(-h, 0.0),
            Complex64::new(0.0, 0.0),
        ];
        Self::pure(&ket).expect("unit ket")
    }

    /// Classical state with the given probability vector on its diagonal.
    pub fn diagonal(probabilities: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::diag(probabilities))
    }

    /// `sum_i w_i rho_i`.
    pub fn mixture(weights: &[f64], states: &[DensityMatrix]) -> Result<Self> {
        Ensemble::new(weights.to_vec(), states.to_vec())?.average()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// `Re Tr(op * rho)`.
    pub fn expectation(&self, op: &ComplexMatrix) -> Result<f64> {
        Ok(op.trace_product(&self.matrix)?.re)
    }

    pub fn commutes_with(&self, other: &DensityMatrix, tol: f64) -> Result<bool> {
        Ok(self.matrix.commutator(&other.matrix)?.max_abs() <= tol)
    }
}

/// Hermitian PSD matrix with trace in `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct SubnormalizedState {
    matrix: ComplexMatrix,
}

impl SubnormalizedState {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        matrix.ensure_hermitian()?;
        let matrix = matrix.hermitian_part();
        let trace = matrix.trace().re;
        if !(-TRACE_TOL..=1.0 + TRACE_TOL).contains(&trace) {
            return Err(Error::InvalidTrace {
                trace,
                expected: "in [0, 1]",
            });
        }
        check_psd(&matrix)?;
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }
}

impl From<DensityMatrix> for SubnormalizedState {
    fn from(rho: DensityMatrix) -> Self {
        Self { matrix: rho.matrix }
    }
}

/// Finite family of PSD operators summing to the identity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Povm {
    dim: usize,
    elements: Vec<ComplexMatrix>,
}

impl Povm {
    pub fn new(elements: Vec<ComplexMatrix>) -> Result<Self> {
        let first = elements
            .first()
            .ok_or_else(|| Error::InvalidArgument("POVM needs at least one element".into()))?;
        let dim = first.dim();
        let mut sum = ComplexMatrix::zeros(dim);
        let mut cleaned = Vec::with_capacity(elements.len());
        for e in &elements {
            e.check_same_dim(first)?;
            e.ensure_hermitian()?;
            let e = e.hermitian_part();
            check_psd(&e)?;
            sum = &sum + &e;
            cleaned.push(e);
        }
        let deviation = sum.max_abs_diff(&ComplexMatrix::identity(dim));
        if deviation > POVM_TOL {
            return Err(Error::IncompletePovm { deviation });
        }
        Ok(Self {
            dim,
            elements: cleaned,
        })
    }

    /// Single-outcome measurement `{I}`.
    pub fn trivial(dim: usize) -> Self {
        Self {
            dim,
            elements: vec![ComplexMatrix::identity(dim)],
        }
    }

    /// Measurement in the computational basis.
    pub fn computational(dim: usize) -> Self {
        Self {
            dim,
            elements: (0..dim)
                .map(|i| {
                    let mut d = vec![0.0; dim];
                    d[i] = 1.0;
                    ComplexMatrix::diag(&d)
                })
                .collect(),
        }
    }

    /// Rank-one projectors onto the given (orthonormal) vectors.
    pub fn projective(basis: &[Vec<Complex64>]) -> Result<Self> {
        let elements = basis
            .iter()
            .map(|v| ComplexMatrix::outer(v, v))
            .collect::<Result<Vec<_>>>()?;
        Self::new(elements)
    }

    /// Qubit spin measurement along the direction at angle `theta` from the
    /// z axis in the x-z plane: `{(I + n.sigma)/2, (I - n.sigma)/2}`.
    pub fn qubit_spin(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        let plus = ComplexMatrix::from_real_rows(&[
            vec![(1.0 + c) / 2.0, s / 2.0],
            vec![s / 2.0, (1.0 - c) / 2.0],
        ])
        .expect("2x2 rows");
        let minus = &ComplexMatrix::identity(2) - &plus;
        Self {
            dim: 2,
            elements: vec![plus, minus],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of outcomes.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    /// Outcome probabilities `Tr(X_r rho)`.
    pub fn probabilities(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        self.elements.iter().map(|x| rho.expectation(x)).collect()
    }
}

/// Weighted family of states on one space.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Ensemble {
    weights: Vec<f64>,
    states: Vec<DensityMatrix>,
}

impl Ensemble {
    pub fn new(weights: Vec<f64>, states: Vec<DensityMatrix>) -> Result<Self> {
        if weights.len() != states.len() {
            return Err(Error::DimensionMismatch {
                expected: weights.len(),
                found: states.len(),
            });
        }
        if states.is_empty() {
            return Err(Error::InvalidWeights("empty ensemble".into()));
        }
        check_probability_vector(&weights)?;
        let dim = states[0].dim();
        if let Some(bad) = states.iter().find(|s| s.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        Ok(Self { weights, states })
    }

    pub fn single(state: DensityMatrix) -> Self {
        Self {
            weights: vec![1.0],
            states: vec![state],
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    /// `sum_i p_i rho_i`, unnormalized weights included.
    fn weighted_sum(&self) -> ComplexMatrix {
        self.weights
            .iter()
            .zip(&self.states)
            .fold(ComplexMatrix::zeros(self.dim()), |acc, (&w, s)| &acc + &s.matrix.scale(w))
    }

    pub fn average(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(self.weighted_sum())
    }
}

/// Checks nonnegativity and unit sum within [`WEIGHT_TOL`].
pub fn check_probability_vector(weights: &[f64]) -> Result<()> {
    if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| !(**w >= 0.0) || !w.is_finite()) {
        return Err(Error::InvalidWeights(format!("weight {i} is {w}")));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > WEIGHT_TOL {
        return Err(Error::InvalidWeights(format!("weights sum to {total}")));
    }
    Ok(())
}

/// Unnormalized trace distance `||rho - sigma||_1`, in `[0, 2]`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    rho.matrix.check_same_dim(&sigma.matrix)?;
    matlin::trace_norm(&(&rho.matrix - &sigma.matrix))
}

/// Fidelity `Tr sqrt(sqrt(sigma) tau sqrt(sigma))`.
pub fn fidelity(sigma: &DensityMatrix, tau: &DensityMatrix) -> Result<f64> {
    sigma.matrix.check_same_dim(&tau.matrix)?;
    let floor = |l: f64, scale: f64| {
        if l <= FIDELITY_NOISE_FLOOR * scale {
            0.0
        } else {
            l.sqrt()
        }
    };
    let eig = matlin::eig_hermitian(&sigma.matrix)?;
    let scale = eig.eigenvalues.last().copied().unwrap_or(0.0).abs();
    let root = eig.map(|l| floor(l, scale));
    let inner = (&(&root * &tau.matrix) * &root).hermitian_part();
    let eig = matlin::eig_hermitian(&inner)?;
    let scale = eig.eigenvalues.last().copied().unwrap_or(0.0).abs();
    Ok(eig.eigenvalues.iter().map(|&l| floor(l, scale)).sum::<f64>().min(1.0))
}

/// Optimal error probability for discriminating two equiprobable states.
pub fn helstrom_error(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    Ok(0.5 - 0.25 * trace_distance(rho, sigma)?)
}

/// Result of Bob measuring his half of a shared state.
#[derive(Clone, Debug, Serialize)]
pub struct Steering {
    /// Conditional states at Alice with their outcome probabilities.
    pub ensemble: Ensemble,
    /// Bob outcome index of each ensemble element.
    pub outcomes: Vec<usize>,
    /// Bob outcomes whose probability fell below [`STEER_DROP_WEIGHT`].
    pub dropped: Vec<usize>,
}

/// Ensemble prepared at A when B measures `bob_povm` on `rho_ab`.
///
/// `p(b) rho_b = Tr_B((I ⊗ N_b) rho_AB)`.
pub fn steer(rho_ab: &DensityMatrix, bob_povm: &Povm) -> Result<Steering> {
    let dim_b = bob_povm.dim();
    if dim_b == 0 || !rho_ab.dim().is_multiple_of(dim_b) {
        return Err(Error::DimensionMismatch {
            expected: dim_b,
            found: rho_ab.dim(),
        });
    }
    let dim_a = rho_ab.dim() / dim_b;
    let id_a = ComplexMatrix::identity(dim_a);

    let mut weights = Vec::new();
    let mut states = Vec::new();
    let mut outcomes = Vec::new();
    let mut dropped = Vec::new();
    for (b, n_b) in bob_povm.elements().iter().enumerate() {
        let lifted = &tensor(&id_a, n_b) * rho_ab.matrix();
        let conditional = partial_trace(&lifted, dim_a, dim_b, Keep::A)?.hermitian_part();
        let weight = conditional.trace().re;
        if weight < STEER_DROP_WEIGHT {
            dropped.push(b);
            continue;
        }
        weights.push(weight);
        states.push(DensityMatrix::new(conditional.scale(1.0 / weight))?);
        outcomes.push(b);
    }
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    Ok(Steering {
        ensemble: Ensemble::new(weights, states)?,
        outcomes,
        dropped,
    })
}

pub fn ensemble_average(ensemble: &Ensemble) -> Result<DensityMatrix> {
    ensemble.average()
}

/// An ensemble restricted to its heaviest elements.
#[derive(Clone, Debug, Serialize)]
pub struct Truncation {
    /// Kept elements, sorted by nonincreasing original weight, renormalized.
    pub ensemble: Ensemble,
    /// Discarded probability mass.
    pub delta: f64,
    /// Original indices of the kept elements, in the order of `ensemble`.
    pub kept: Vec<usize>,
    /// Original (unnormalized) weights of the kept elements.
    pub original_weights: Vec<f64>,
}

/// Keeps the elements with weight strictly above `min_weight`.
pub fn truncate_ensemble(ensemble: &Ensemble, min_weight: f64) -> Result<Truncation> {
    if !(min_weight >= 0.0) {
        return Err(Error::InvalidArgument(format!("min_weight {min_weight} must be >= 0")));
    }
    let mut order: Vec<usize> = (0..ensemble.len()).collect();
    order.sort_by(|&i, &j| ensemble.weights[j].total_cmp(&ensemble.weights[i]));
    let kept: Vec<usize> = order
        .into_iter()
        .filter(|&i| ensemble.weights[i] > min_weight)
        .collect();
    if kept.is_empty() {
        return Err(Error::EmptyTruncation { min_weight });
    }
    let original_weights: Vec<f64> = kept.iter().map(|&i| ensemble.weights[i]).collect();
    let kept_mass: f64 = original_weights.iter().sum();
    let delta: f64 = (0..ensemble.len())
        .filter(|i| !kept.contains(i))
        .map(|i| ensemble.weights[i])
        .fold(0.0, |acc, w| acc + w);
    let weights = original_weights.iter().map(|w| w / kept_mass).collect();
    let states = kept.iter().map(|&i| ensemble.states[i].clone()).collect();
    Ok(Truncation {
        ensemble: Ensemble::new(weights, states)?,
        delta,
        kept,
        original_weights,
    })
}

/// Deterministic generator for a seed.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Per-trial seed derived from a master seed; distinct indices give
/// independent ChaCha streams.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng.next_u64()
}

fn complex_normal(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// `G G^dagger` for a `dim x cols` complex Gaussian `G`.
fn wishart(dim: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g: Vec<Complex64> = (0..dim * cols).map(|_| complex_normal(rng)).collect();
    ComplexMatrix::from_fn(dim, |i, j| {
        (0..cols).map(|k| g[i * cols + k] * g[j * cols + k].conj()).sum()
    })
}

/// Ginibre-induced random state of the given rank.
pub fn sample_density(dim: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    sample_density_with(dim, rank, &mut rng_from_seed(seed))
}

pub fn sample_density_with(dim: usize, rank: usize, rng: &mut impl Rng) -> Result<DensityMatrix> {
    if rank == 0 || rank > dim {
        return Err(Error::InvalidArgument(format!("rank {rank} outside [1, {dim}]")));
    }
    let w = wishart(dim, rank, rng);
    let t = w.trace().re;
    DensityMatrix::new(w.scale(1.0 / t))
}

/// Random POVM with `k` outcomes: `X_r = S^{-1/2} A_r S^{-1/2}` where the
/// `A_r` are Wishart matrices and `S = sum_r A_r`.
pub fn sample_povm(dim: usize, k: usize, seed: u64) -> Result<Povm> {
    sample_povm_with(dim, k, &mut rng_from_seed(seed))
}

pub fn sample_povm_with(dim: usize, k: usize, rng: &mut impl Rng) -> Result<Povm> {
    if k == 0 {
        return Err(Error::InvalidArgument("POVM needs k >= 1".into()));
    }
    if k == 1 {
        return Ok(Povm::trivial(dim));
    }
    let parts: Vec<ComplexMatrix> = (0..k).map(|_| wishart(dim, dim, rng)).collect();
    let total = parts.iter().fold(ComplexMatrix::zeros(dim), |acc, a| &acc + a);
    let inv_root = psd_function(&total, |l| if l > 0.0 { 1.0 / l.sqrt() } else { 0.0 })?;
    let elements = parts
        .iter()
        .map(|a| (&(&inv_root * a) * &inv_root).hermitian_part())
        .collect();
    Povm::new(elements)
}

/// Random unitary from the eigenvectors of a GUE matrix.
pub fn sample_unitary_with(dim: usize, rng: &mut impl Rng) -> Result<ComplexMatrix> {
    let g = ComplexMatrix::from_fn(dim, |_, _| complex_normal(rng));
    Ok(eig_hermitian(&(&g + &g.adjoint()))?.eigenvectors)
}

/// Uniform sample from the probability simplex of the given size.
pub fn sample_probability_vector_with(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}
