//! Bipartite boxes `p(a, b | x, y)`, deterministic strategies and Bell functionals.
//!
//! A box is stored densely in `(x, y, a, b)` order, padded to the largest
//! outcome count on each side. Padded cells are structurally zero.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matlin;
use crate::states::{DensityMatrix, Povm};

/// Entries may stray below 0 or above 1 by this much.
pub const ENTRY_TOL: f64 = 1e-12;
/// Per-(x, y) normalization tolerance.
pub const NORMALIZATION_TOL: f64 = 1e-9;
/// Marginal independence tolerance.
pub const NS_TOL: f64 = 1e-9;
/// Default cap on the number of deterministic strategies to enumerate.
pub const ENUMERATION_BUDGET: u128 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ScenarioFile", into = "ScenarioFile")]
pub struct Scenario {
    outcomes_a: Vec<usize>,
    outcomes_b: Vec<usize>,
    max_a: usize,
    max_b: usize,
}

#[derive(Serialize, Deserialize)]
struct ScenarioFile {
    #[serde(rename = "nA")]
    n_a: usize,
    #[serde(rename = "nB")]
    n_b: usize,
    #[serde(rename = "outcomesA")]
    outcomes_a: Vec<usize>,
    #[serde(rename = "outcomesB")]
    outcomes_b: Vec<usize>,
}

impl TryFrom<ScenarioFile> for Scenario {
    type Error = Error;

    fn try_from(f: ScenarioFile) -> Result<Self> {
        if f.outcomes_a.len() != f.n_a || f.outcomes_b.len() != f.n_b {
            return Err(Error::InvalidScenario(format!(
                "nA = {}, nB = {} but {} and {} outcome counts given",
                f.n_a,
                f.n_b,
                f.outcomes_a.len(),
                f.outcomes_b.len()
            )));
        }
        Scenario::new(f.outcomes_a, f.outcomes_b)
    }
}

impl From<Scenario> for ScenarioFile {
    fn from(s: Scenario) -> Self {
        Self {
            n_a: s.outcomes_a.len(),
            n_b: s.outcomes_b.len(),
            outcomes_a: s.outcomes_a,
            outcomes_b: s.outcomes_b,
        }
    }
}

impl Scenario {
    /// Outcome counts per input on each side.
    pub fn new(outcomes_a: Vec<usize>, outcomes_b: Vec<usize>) -> Result<Self> {
        if outcomes_a.is_empty() || outcomes_b.is_empty() {
            return Err(Error::InvalidScenario("each side needs at least one input".into()));
        }
        if outcomes_a.iter().chain(&outcomes_b).any(|&k| k == 0) {
            return Err(Error::InvalidScenario("outcome counts must be >= 1".into()));
        }
        let max_a = *outcomes_a.iter().max().expect("nonempty");
        let max_b = *outcomes_b.iter().max().expect("nonempty");
        Ok(Self {
            outcomes_a,
            outcomes_b,
            max_a,
            max_b,
        })
    }

    pub fn uniform(n_a: usize, n_b: usize, k: usize, l: usize) -> Result<Self> {
        Self::new(vec![k; n_a], vec![l; n_b])
    }

    /// Two binary inputs and outputs per side.
    pub fn chsh() -> Self {
        Self::uniform(2, 2, 2, 2).expect("valid")
    }

    pub fn n_a(&self) -> usize {
        self.outcomes_a.len()
    }

    pub fn n_b(&self) -> usize {
        self.outcomes_b.len()
    }

    pub fn outcomes_a(&self) -> &[usize] {
        &self.outcomes_a
    }

    pub fn outcomes_b(&self) -> &[usize] {
        &self.outcomes_b
    }

    pub fn max_outcomes_a(&self) -> usize {
        self.max_a
    }

    pub fn max_outcomes_b(&self) -> usize {
        self.max_b
    }

    pub fn is_chsh(&self) -> bool {
        *self == Self::chsh()
    }

    /// Length of the dense `(x, y, a, b)` tensor.
    pub fn len(&self) -> usize {
        self.n_a() * self.n_b() * self.max_a * self.max_b
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index(&self, a: usize, b: usize, x: usize, y: usize) -> usize {
        ((x * self.n_b() + y) * self.max_a + a) * self.max_b + b
    }

    pub fn is_valid_cell(&self, a: usize, b: usize, x: usize, y: usize) -> bool {
        x < self.n_a() && y < self.n_b() && a < self.outcomes_a[x] && b < self.outcomes_b[y]
    }

    /// Valid cells as `(a, b, x, y)` in storage order.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize, usize, usize)> + '_ {
        (0..self.n_a()).flat_map(move |x| {
            (0..self.n_b()).flat_map(move |y| {
                (0..self.outcomes_a[x]).flat_map(move |a| (0..self.outcomes_b[y]).map(move |b| (a, b, x, y)))
            })
        })
    }

    /// `prod_x k_x * prod_y l_y`, saturating.
    pub fn strategy_count(&self) -> u128 {
        self.outcomes_a
            .iter()
            .chain(&self.outcomes_b)
            .fold(1u128, |acc, &k| acc.saturating_mul(k as u128))
    }
}

/// Outcome chosen for every input on each side.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DeterministicStrategy {
    pub alice: Vec<usize>,
    pub bob: Vec<usize>,
}

impl DeterministicStrategy {
    pub fn validate(&self, sc: &Scenario) -> Result<()> {
        if self.alice.len() != sc.n_a() || self.bob.len() != sc.n_b() {
            return Err(Error::InvalidArgument(format!(
                "strategy covers {}x{} inputs, scenario has {}x{}",
                self.alice.len(),
                self.bob.len(),
                sc.n_a(),
                sc.n_b()
            )));
        }
        for (x, (&a, &k)) in self.alice.iter().zip(sc.outcomes_a()).enumerate() {
            if a >= k {
                return Err(Error::InvalidArgument(format!("d_A({x}) = {a} but input {x} has {k} outcomes")));
            }
        }
        for (y, (&b, &l)) in self.bob.iter().zip(sc.outcomes_b()).enumerate() {
            if b >= l {
                return Err(Error::InvalidArgument(format!("d_B({y}) = {b} but input {y} has {l} outcomes")));
            }
        }
        Ok(())
    }

    /// Strategy at position `index` of the lexicographic order.
    pub fn from_index(sc: &Scenario, mut index: u128) -> Result<Self> {
        let total = sc.strategy_count();
        if index >= total {
            return Err(Error::InvalidArgument(format!("strategy index {index} >= {total}")));
        }
        let radices: Vec<usize> = sc.outcomes_a().iter().chain(sc.outcomes_b()).copied().collect();
        let mut digits = vec![0; radices.len()];
        for (d, &r) in digits.iter_mut().zip(&radices).rev() {
            *d = (index % r as u128) as usize;
            index /= r as u128;
        }
        let bob = digits.split_off(sc.n_a());
        Ok(Self { alice: digits, bob })
    }
}

impl fmt::Display for DeterministicStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A{:?} B{:?}", self.alice, self.bob)
    }
}

/// Every deterministic strategy, in lexicographic order of
/// `(d_A(0), .., d_A(n-1), d_B(0), .., d_B(m-1))`.
pub fn enumerate_deterministic(sc: &Scenario) -> Result<Vec<DeterministicStrategy>> {
    enumerate_deterministic_with_budget(sc, ENUMERATION_BUDGET)
}

pub fn enumerate_deterministic_with_budget(sc: &Scenario, budget: u128) -> Result<Vec<DeterministicStrategy>> {
    let required = sc.strategy_count();
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    (0..required).map(|i| DeterministicStrategy::from_index(sc, i)).collect()
}

/// A family of conditional distributions `p(a, b | x, y)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TensorFile", into = "TensorFile")]
pub struct CorrelationBox {
    scenario: Scenario,
    p: Vec<f64>,
}

/// On-disk layout shared by boxes and functionals: ragged arrays in
/// `(x, y, a, b)` order under `"p"` or `"s"`.
#[derive(Serialize, Deserialize)]
struct TensorFile {
    scenario: Scenario,
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<Vec<Vec<Vec<Vec<f64>>>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    s: Option<Vec<Vec<Vec<Vec<f64>>>>>,
}

fn dense_from_ragged(sc: &Scenario, ragged: &[Vec<Vec<Vec<f64>>>], name: &str) -> Result<Vec<f64>> {
    let shape_err = |what: String| Error::InvalidBox {
        location: name.to_string(),
        reason: what,
    };
    if ragged.len() != sc.n_a() {
        return Err(shape_err(format!("{} Alice inputs, scenario has {}", ragged.len(), sc.n_a())));
    }
    let mut dense = vec![0.0; sc.len()];
    for (x, per_y) in ragged.iter().enumerate() {
        if per_y.len() != sc.n_b() {
            return Err(shape_err(format!("x={x}: {} Bob inputs, scenario has {}", per_y.len(), sc.n_b())));
        }
        for (y, per_a) in per_y.iter().enumerate() {
            if per_a.len() != sc.outcomes_a()[x] {
                return Err(shape_err(format!("x={x}, y={y}: {} Alice outcomes", per_a.len())));
            }
            for (a, per_b) in per_a.iter().enumerate() {
                if per_b.len() != sc.outcomes_b()[y] {
                    return Err(shape_err(format!("x={x}, y={y}, a={a}: {} Bob outcomes", per_b.len())));
                }
                for (b, &v) in per_b.iter().enumerate() {
                    dense[sc.index(a, b, x, y)] = v;
                }
            }
        }
    }
    Ok(dense)
}

fn ragged_from_dense(sc: &Scenario, dense: &[f64]) -> Vec<Vec<Vec<Vec<f64>>>> {
    (0..sc.n_a())
        .map(|x| {
            (0..sc.n_b())
                .map(|y| {
                    (0..sc.outcomes_a()[x])
                        .map(|a| (0..sc.outcomes_b()[y]).map(|b| dense[sc.index(a, b, x, y)]).collect())
                        .collect()
                })
                .collect()
        })
        .collect()
}

impl TryFrom<TensorFile> for CorrelationBox {
    type Error = Error;

    fn try_from(f: TensorFile) -> Result<Self> {
        let ragged = f.p.or(f.s).ok_or_else(|| Error::InvalidBox {
            location: "p".into(),
            reason: "missing probability array".into(),
        })?;
        let dense = dense_from_ragged(&f.scenario, &ragged, "p")?;
        CorrelationBox::new(f.scenario, dense)
    }
}

impl From<CorrelationBox> for TensorFile {
    fn from(b: CorrelationBox) -> Self {
        Self {
            p: Some(ragged_from_dense(&b.scenario, &b.p)),
            s: None,
            scenario: b.scenario,
        }
    }
}

impl CorrelationBox {
    /// Validates entries and per-(x, y) normalization. Padded cells must be zero.
    pub fn new(scenario: Scenario, p: Vec<f64>) -> Result<Self> {
        if p.len() != scenario.len() {
            return Err(Error::DimensionMismatch {
                expected: scenario.len(),
                found: p.len(),
            });
        }
        for x in 0..scenario.n_a() {
            for y in 0..scenario.n_b() {
                let mut total = 0.0;
                for a in 0..scenario.max_outcomes_a() {
                    for b in 0..scenario.max_outcomes_b() {
                        let v = p[scenario.index(a, b, x, y)];
                        let location = format!("p({a},{b}|{x},{y})");
                        if !scenario.is_valid_cell(a, b, x, y) {
                            if v != 0.0 {
                                return Err(Error::InvalidBox {
                                    location,
                                    reason: format!("padded cell holds {v}"),
                                });
                            }
                            continue;
                        }
                        if !v.is_finite() || !(-ENTRY_TOL..=1.0 + ENTRY_TOL).contains(&v) {
                            return Err(Error::InvalidBox {
                                location,
                                reason: format!("entry {v} outside [0, 1]"),
                            });
                        }
                        total += v;
                    }
                }
                if (total - 1.0).abs() > NORMALIZATION_TOL {
                    return Err(Error::InvalidBox {
                        location: format!("(x={x}, y={y})"),
                        reason: format!("probabilities sum to {total}"),
                    });
                }
            }
        }
        Ok(Self { scenario, p })
    }

    /// Builds a box from `f(a, b, x, y)` on valid cells.
    pub fn from_fn(scenario: Scenario, mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> Result<Self> {
        let mut p = vec![0.0; scenario.len()];
        for (a, b, x, y) in scenario.cells().collect::<Vec<_>>() {
            p[scenario.index(a, b, x, y)] = f(a, b, x, y);
        }
        Self::new(scenario, p)
    }

    /// Uniform distribution over outcomes for every input pair.
    pub fn maximally_mixed(scenario: Scenario) -> Self {
        let sc = scenario.clone();
        Self::from_fn(scenario, |_, _, x, y| 1.0 / (sc.outcomes_a()[x] * sc.outcomes_b()[y]) as f64)
            .expect("uniform distribution is valid")
    }

    /// `sum_i w_i P_i` over boxes sharing a scenario.
    pub fn mixture(weights: &[f64], boxes: &[CorrelationBox]) -> Result<Self> {
        if weights.len() != boxes.len() || boxes.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: boxes.len(),
                found: weights.len(),
            });
        }
        crate::states::check_probability_vector(weights)?;
        let sc = boxes[0].scenario.clone();
        let mut p = vec![0.0; sc.len()];
        for (w, bx) in weights.iter().zip(boxes) {
            if bx.scenario != sc {
                return Err(Error::InvalidScenario("mixture of boxes from different scenarios".into()));
            }
            for (acc, v) in p.iter_mut().zip(&bx.p) {
                *acc += w * v;
            }
        }
        Self::new(sc, p)
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn get(&self, a: usize, b: usize, x: usize, y: usize) -> f64 {
        self.p[self.scenario.index(a, b, x, y)]
    }

    /// Dense `(x, y, a, b)` storage including padded zeros.
    pub fn as_slice(&self) -> &[f64] {
        &self.p
    }

    /// `p(a | x, y) = sum_b p(a, b | x, y)`.
    pub fn marginal_a(&self, a: usize, x: usize, y: usize) -> f64 {
        (0..self.scenario.outcomes_b()[y]).map(|b| self.get(a, b, x, y)).sum()
    }

    /// `p(b | x, y) = sum_a p(a, b | x, y)`.
    pub fn marginal_b(&self, b: usize, x: usize, y: usize) -> f64 {
        (0..self.scenario.outcomes_a()[x]).map(|a| self.get(a, b, x, y)).sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.p.iter().zip(&other.p).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }
}

/// Outcome of a non-signalling check.
#[derive(Clone, Debug, Serialize)]
pub struct NsReport {
    pub pass: bool,
    /// Largest marginal discrepancy found.
    pub worst_violation: f64,
    /// Human-readable location of the worst discrepancy, if any is nonzero.
    pub location: Option<String>,
}

/// Checks that Alice's marginal does not depend on `y` and Bob's does not depend on `x`.
pub fn validate_ns(p: &CorrelationBox) -> NsReport {
    let sc = p.scenario();
    let mut worst = 0.0;
    let mut location = None;
    for x in 0..sc.n_a() {
        for a in 0..sc.outcomes_a()[x] {
            let reference = p.marginal_a(a, x, 0);
            for y in 1..sc.n_b() {
                let d = (p.marginal_a(a, x, y) - reference).abs();
                if d > worst {
                    worst = d;
                    location = Some(format!("Alice marginal p(a={a}|x={x}) differs between y=0 and y={y}"));
                }
            }
        }
    }
    for y in 0..sc.n_b() {
        for b in 0..sc.outcomes_b()[y] {
            let reference = p.marginal_b(b, 0, y);
            for x in 1..sc.n_a() {
                let d = (p.marginal_b(b, x, y) - reference).abs();
                if d > worst {
                    worst = d;
                    location = Some(format!("Bob marginal p(b={b}|y={y}) differs between x=0 and x={x}"));
                }
            }
        }
    }
    NsReport {
        pass: worst <= NS_TOL,
        worst_violation: worst,
        location,
    }
}

/// Errors with [`Error::Signalling`] unless the box is non-signalling.
pub fn require_ns(p: &CorrelationBox) -> Result<()> {
    let report = validate_ns(p);
    if report.pass {
        Ok(())
    } else {
        Err(Error::Signalling(format!(
            "{} (by {:.3e})",
            report.location.unwrap_or_default(),
            report.worst_violation
        )))
    }
}

/// `p(a, b | x, y) = [a = d_A(x)] [b = d_B(y)]`.
pub fn deterministic_box(s: &DeterministicStrategy, sc: &Scenario) -> Result<CorrelationBox> {
    s.validate(sc)?;
    CorrelationBox::from_fn(sc.clone(), |a, b, x, y| {
        if a == s.alice[x] && b == s.bob[y] {
            1.0
        } else {
            0.0
        }
    })
}

/// `p(a, b | x, y) = Tr((M^x_a (x) N^y_b) rho_AB)`.
pub fn quantum_box(rho_ab: &DensityMatrix, alice_povms: &[Povm], bob_povms: &[Povm]) -> Result<CorrelationBox> {
    if alice_povms.is_empty() || bob_povms.is_empty() {
        return Err(Error::InvalidScenario("each side needs at least one POVM".into()));
    }
    let dim_a = alice_povms[0].dim();
    let dim_b = bob_povms[0].dim();
    for m in alice_povms {
        if m.dim() != dim_a {
            return Err(Error::DimensionMismatch {
                expected: dim_a,
                found: m.dim(),
            });
        }
    }
    for n in bob_povms {
        if n.dim() != dim_b {
            return Err(Error::DimensionMismatch {
                expected: dim_b,
                found: n.dim(),
            });
        }
    }
    if rho_ab.dim() != dim_a * dim_b {
        return Err(Error::DimensionMismatch {
            expected: dim_a * dim_b,
            found: rho_ab.dim(),
        });
    }
    let sc = Scenario::new(
        alice_povms.iter().map(Povm::len).collect(),
        bob_povms.iter().map(Povm::len).collect(),
    )?;
    let mut p = vec![0.0; sc.len()];
    for (x, m) in alice_povms.iter().enumerate() {
        for (y, n) in bob_povms.iter().enumerate() {
            for (a, ma) in m.elements().iter().enumerate() {
                for (b, nb) in n.elements().iter().enumerate() {
                    let op = matlin::tensor(ma, nb);
                    p[sc.index(a, b, x, y)] = rho_ab.matrix().trace_product(&op)?.re;
                }
            }
        }
    }
    CorrelationBox::new(sc, p)
}

/// Convex combination `sum_i w_i D_i` of deterministic boxes.
pub fn local_box(weighted: &[(DeterministicStrategy, f64)], sc: &Scenario) -> Result<CorrelationBox> {
    if weighted.is_empty() {
        return Err(Error::InvalidWeights("no strategies given".into()));
    }
    let weights: Vec<f64> = weighted.iter().map(|(_, w)| *w).collect();
    crate::states::check_probability_vector(&weights)?;
    let mut p = vec![0.0; sc.len()];
    for (s, w) in weighted {
        s.validate(sc)?;
        for x in 0..sc.n_a() {
            for y in 0..sc.n_b() {
                p[sc.index(s.alice[x], s.bob[y], x, y)] += w;
            }
        }
    }
    CorrelationBox::new(sc.clone(), p)
}

/// `p(a, b | x, y) = 1/2` if `a xor b = xy`, else 0.
pub fn pr_box(sc: &Scenario) -> Result<CorrelationBox> {
    pr_box_variant(sc, 0, 0, 0)
}

/// PR box relabelled to `a xor b = xy xor alpha x xor beta y xor gamma`.
pub fn pr_box_variant(sc: &Scenario, alpha: usize, beta: usize, gamma: usize) -> Result<CorrelationBox> {
    if !sc.is_chsh() {
        return Err(Error::InvalidScenario(
            "PR box needs two binary inputs and outputs per side".into(),
        ));
    }
    if alpha > 1 || beta > 1 || gamma > 1 {
        return Err(Error::InvalidArgument("PR relabelling bits must be 0 or 1".into()));
    }
    CorrelationBox::from_fn(sc.clone(), |a, b, x, y| {
        if (a ^ b) == ((x & y) ^ (alpha & x) ^ (beta & y) ^ gamma) {
            0.5
        } else {
            0.0
        }
    })
}

/// The 8 PR-box relabellings, indexed `4 alpha + 2 beta + gamma`.
pub fn pr_box_variants() -> Vec<CorrelationBox> {
    let sc = Scenario::chsh();
    (0..8)
        .map(|k| pr_box_variant(&sc, k >> 2, (k >> 1) & 1, k & 1).expect("CHSH scenario"))
        .collect()
}

/// Singlet with measurement angles reaching `2 sqrt 2` on [`BellFunctional::chsh`].
pub fn tsirelson_box() -> CorrelationBox {
    use std::f64::consts::PI;
    let alice = [Povm::qubit_spin(0.0), Povm::qubit_spin(PI / 2.0)];
    let bob = [Povm::qubit_spin(5.0 * PI / 4.0), Povm::qubit_spin(3.0 * PI / 4.0)];
    quantum_box(&DensityMatrix::singlet(), &alice, &bob).expect("qubit POVMs on a two-qubit state")
}

/// Coefficients `s(a, b | x, y)` of a linear Bell expression.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TensorFile", into = "TensorFile")]
pub struct BellFunctional {
    scenario: Scenario,
    s: Vec<f64>,
}

impl TryFrom<TensorFile> for BellFunctional {
    type Error = Error;

    fn try_from(f: TensorFile) -> Result<Self> {
        let ragged = f.s.or(f.p).ok_or_else(|| Error::InvalidBox {
            location: "s".into(),
            reason: "missing coefficient array".into(),
        })?;
        let dense = dense_from_ragged(&f.scenario, &ragged, "s")?;
        BellFunctional::new(f.scenario, dense)
    }
}

impl From<BellFunctional> for TensorFile {
    fn from(f: BellFunctional) -> Self {
        Self {
            p: None,
            s: Some(ragged_from_dense(&f.scenario, &f.s)),
            scenario: f.scenario,
        }
    }
}

impl BellFunctional {
    pub fn new(scenario: Scenario, s: Vec<f64>) -> Result<Self> {
        if s.len() != scenario.len() {
            return Err(Error::DimensionMismatch {
                expected: scenario.len(),
                found: s.len(),
            });
        }
        if let Some(i) = s.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("coefficient {i} is not finite")));
        }
        Ok(Self { scenario, s })
    }

    pub fn from_fn(scenario: Scenario, mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> Result<Self> {
        let mut s = vec![0.0; scenario.len()];
        for (a, b, x, y) in scenario.cells().collect::<Vec<_>>() {
            s[scenario.index(a, b, x, y)] = f(a, b, x, y);
        }
        Self::new(scenario, s)
    }

    /// `s(a, b | x, y) = (-1)^(a xor b) (-1)^(xy)`, so that the value on a box is
    /// `E00 + E01 + E10 - E11`.
    pub fn chsh() -> Self {
        Self::from_fn(Scenario::chsh(), |a, b, x, y| {
            if (a ^ b ^ (x & y)) == 0 {
                1.0
            } else {
                -1.0
            }
        })
        .expect("finite")
    }

    pub fn zero(scenario: Scenario) -> Self {
        let n = scenario.len();
        Self::new(scenario, vec![0.0; n]).expect("finite")
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn get(&self, a: usize, b: usize, x: usize, y: usize) -> f64 {
        self.s[self.scenario.index(a, b, x, y)]
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }
}

/// `sum s(a, b | x, y) p(a, b | x, y)`.
pub fn bell_value(s: &BellFunctional, p: &CorrelationBox) -> Result<f64> {
    if s.scenario != p.scenario {
        return Err(Error::InvalidScenario("functional and box scenarios differ".into()));
    }
    Ok(s.s.iter().zip(&p.p).map(|(a, b)| a * b).sum())
}

/// `sum_{x,y} max_{a,b} s(a, b | x, y)`: the maximum over all normalized
/// conditional distributions, signalling ones included.
pub fn bell_algebraic_max(s: &BellFunctional) -> f64 {
    let sc = &s.scenario;
    let mut total = 0.0;
    for x in 0..sc.n_a() {
        for y in 0..sc.n_b() {
            let mut best = f64::NEG_INFINITY;
            for a in 0..sc.outcomes_a()[x] {
                for b in 0..sc.outcomes_b()[y] {
                    best = best.max(s.get(a, b, x, y));
                }
            }
            total += best;
        }
    }
    total
}

/// Value of the functional on a deterministic strategy.
pub fn bell_value_deterministic(s: &BellFunctional, d: &DeterministicStrategy) -> f64 {
    let sc = &s.scenario;
    (0..sc.n_a())
        .flat_map(|x| (0..sc.n_b()).map(move |y| (x, y)))
        .map(|(x, y)| s.get(d.alice[x], d.bob[y], x, y))
        .sum()
}

/// Maximum over deterministic strategies, with the first maximizer.
pub fn bell_det_max_with_strategy(s: &BellFunctional) -> Result<(f64, DeterministicStrategy)> {
    let mut best: Option<(f64, DeterministicStrategy)> = None;
    for d in enumerate_deterministic(&s.scenario)? {
        let v = bell_value_deterministic(s, &d);
        if best.as_ref().is_none_or(|(b, _)| v > *b) {
            best = Some((v, d));
        }
    }
    Ok(best.expect("at least one strategy"))
}

pub fn bell_det_max(s: &BellFunctional) -> Result<f64> {
    Ok(bell_det_max_with_strategy(s)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn signalling_box() -> CorrelationBox {
        // Alice outputs y.
        CorrelationBox::from_fn(Scenario::chsh(), |a, b, _, y| if a == y && b == 0 { 1.0 } else { 0.0 }).unwrap()
    }

    #[test]
    fn scenario_rejects_zero_counts() {
        assert!(Scenario::new(vec![], vec![2]).is_err());
        assert!(Scenario::new(vec![2, 0], vec![2]).is_err());
        let sc = Scenario::new(vec![3, 2], vec![2]).unwrap();
        assert_eq!(sc.len(), 2 * 3 * 2);
        assert_eq!(sc.cells().count(), 3 * 2 + 2 * 2);
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_deterministic(&Scenario::chsh()).unwrap().len(), 16);
        assert_eq!(enumerate_deterministic(&Scenario::uniform(1, 1, 3, 2).unwrap()).unwrap().len(), 6);
        assert_eq!(enumerate_deterministic(&Scenario::uniform(2, 3, 2, 2).unwrap()).unwrap().len(), 32);
        let big = Scenario::uniform(10, 10, 2, 2).unwrap();
        match enumerate_deterministic(&big) {
            Err(Error::BudgetExceeded { required, .. }) => assert_eq!(required, 1 << 20),
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn enumeration_is_lexicographic_and_unique() {
        let sc = Scenario::new(vec![2, 3], vec![2]).unwrap();
        let all = enumerate_deterministic(&sc).unwrap();
        assert_eq!(all.len(), 12);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(all[0].alice, vec![0, 0]);
        assert_eq!(all[1].bob, vec![1]);
        assert_eq!(all[11].alice, vec![1, 2]);
    }

    #[test]
    fn deterministic_boxes() {
        let sc = Scenario::chsh();
        let zero = DeterministicStrategy {
            alice: vec![0, 0],
            bob: vec![0, 0],
        };
        let d = deterministic_box(&zero, &sc).unwrap();
        for x in 0..2 {
            for y in 0..2 {
                assert_eq!(d.get(0, 0, x, y), 1.0);
            }
        }
        for s in enumerate_deterministic(&sc).unwrap() {
            assert!(validate_ns(&deterministic_box(&s, &sc).unwrap()).pass);
        }
        let bad = DeterministicStrategy {
            alice: vec![0, 2],
            bob: vec![0, 0],
        };
        assert!(deterministic_box(&bad, &sc).is_err());
    }

    #[test]
    fn ns_validation() {
        let pr = pr_box(&Scenario::chsh()).unwrap();
        assert!(validate_ns(&pr).pass);
        let report = validate_ns(&signalling_box());
        assert!(!report.pass);
        assert!((report.worst_violation - 1.0).abs() < 1e-15);
        assert!(report.location.unwrap().contains("Alice"));
        assert!(matches!(require_ns(&signalling_box()), Err(Error::Signalling(_))));
    }

    #[test]
    fn box_validation_rejects_bad_entries() {
        let sc = Scenario::chsh();
        let mut p = CorrelationBox::maximally_mixed(sc.clone()).as_slice().to_vec();
        p[0] = 0.3;
        assert!(matches!(CorrelationBox::new(sc.clone(), p.clone()), Err(Error::InvalidBox { .. })));
        p[0] = -0.25;
        p[1] = 0.75;
        assert!(CorrelationBox::new(sc, p).is_err());
        let ragged = Scenario::new(vec![2, 1], vec![2]).unwrap();
        let mut q = vec![0.0; ragged.len()];
        q[ragged.index(0, 0, 0, 0)] = 1.0;
        q[ragged.index(0, 0, 1, 0)] = 0.5;
        q[ragged.index(1, 0, 1, 0)] = 0.5;
        assert!(CorrelationBox::new(ragged, q).is_err());
    }

    #[test]
    fn pr_box_properties() {
        let sc = Scenario::chsh();
        let pr = pr_box(&sc).unwrap();
        for x in 0..2 {
            for y in 0..2 {
                for o in 0..2 {
                    assert_eq!(pr.marginal_a(o, x, y), 0.5);
                    assert_eq!(pr.marginal_b(o, x, y), 0.5);
                }
            }
        }
        assert_eq!(bell_value(&BellFunctional::chsh(), &pr).unwrap(), 4.0);
        assert!(pr_box(&Scenario::uniform(2, 2, 3, 2).unwrap()).is_err());
        for v in pr_box_variants() {
            assert!(validate_ns(&v).pass);
        }
    }

    #[test]
    fn quantum_boxes() {
        let product = DensityMatrix::maximally_mixed(4);
        let z = Povm::computational(2);
        let x = Povm::qubit_spin(std::f64::consts::FRAC_PI_2);
        let q = quantum_box(&product, &[z.clone(), x.clone()], &[z.clone(), x]).unwrap();
        assert!(q.as_slice().iter().all(|v| (v - 0.25).abs() < 1e-12));

        let t = tsirelson_box();
        assert!(validate_ns(&t).pass);
        let v = bell_value(&BellFunctional::chsh(), &t).unwrap();
        assert!((v - 2.0 * 2f64.sqrt()).abs() < 1e-6, "CHSH value {v}");

        assert!(quantum_box(&DensityMatrix::maximally_mixed(3), std::slice::from_ref(&z), std::slice::from_ref(&z)).is_err());
    }

    #[test]
    fn local_boxes() {
        let sc = Scenario::chsh();
        let all = enumerate_deterministic(&sc).unwrap();
        let single = local_box(&[(all[5].clone(), 1.0)], &sc).unwrap();
        assert_eq!(single, deterministic_box(&all[5], &sc).unwrap());
        let uniform: Vec<_> = all.iter().map(|s| (s.clone(), 1.0 / 16.0)).collect();
        let mixed = local_box(&uniform, &sc).unwrap();
        assert!(mixed.max_abs_diff(&CorrelationBox::maximally_mixed(sc.clone())) < 1e-15);
        assert!(local_box(&[(all[0].clone(), -0.5), (all[1].clone(), 1.5)], &sc).is_err());
    }

    #[test]
    fn bell_values_and_maxima() {
        let chsh = BellFunctional::chsh();
        let sc = Scenario::chsh();
        assert_eq!(bell_value(&BellFunctional::zero(sc.clone()), &pr_box(&sc).unwrap()).unwrap(), 0.0);
        assert!(bell_value(&chsh, &CorrelationBox::maximally_mixed(sc.clone())).unwrap().abs() < 1e-15);
        assert_eq!(bell_algebraic_max(&chsh), 4.0);
        assert_eq!(bell_det_max(&chsh).unwrap(), 2.0);
        assert_eq!(bell_algebraic_max(&BellFunctional::zero(sc.clone())), 0.0);
        assert_eq!(bell_det_max(&BellFunctional::zero(sc.clone())).unwrap(), 0.0);

        let single = BellFunctional::from_fn(sc.clone(), |a, b, x, y| if (a, b, x, y) == (1, 0, 1, 0) { 3.0 } else { 0.0 }).unwrap();
        assert_eq!(bell_algebraic_max(&single), 3.0);

        // Flipping Alice's outcome sign on x = 0 negates E00 and E01.
        let flipped = BellFunctional::from_fn(sc.clone(), |a, b, x, y| {
            let s = chsh.get(a, b, x, y);
            if x == 0 { -s } else { s }
        })
        .unwrap();
        assert_eq!(bell_det_max(&flipped).unwrap(), 2.0);
        // Negating a single correlator is not a relabelling and reaches 4.
        let single_flip = BellFunctional::from_fn(sc.clone(), |a, b, x, y| {
            let s = chsh.get(a, b, x, y);
            if (x, y) == (0, 1) { -s } else { s }
        })
        .unwrap();
        assert_eq!(bell_det_max(&single_flip).unwrap(), 4.0);
        let other = Scenario::uniform(2, 2, 3, 2).unwrap();
        assert!(bell_value(&chsh, &CorrelationBox::maximally_mixed(other)).is_err());
    }

    #[test]
    fn json_round_trip() {
        let pr = pr_box(&Scenario::chsh()).unwrap();
        let text = pr.to_json_string().unwrap();
        assert!(text.contains("\"nA\"") && text.contains("\"p\""));
        assert_eq!(CorrelationBox::from_json_str(&text).unwrap(), pr);

        let chsh = BellFunctional::chsh();
        let text = chsh.to_json_string().unwrap();
        assert!(text.contains("\"s\"") && !text.contains("\"p\""));
        assert_eq!(BellFunctional::from_json_str(&text).unwrap(), chsh);

        let ragged = r#"{"scenario":{"nA":1,"nB":2,"outcomesA":[3],"outcomesB":[1,2]},
            "p":[[[[0.5],[0.25],[0.25]],[[0.25,0.25],[0.25,0.0],[0.25,0.0]]]]}"#;
        let bx = CorrelationBox::from_json_str(ragged).unwrap();
        assert_eq!(bx.get(2, 0, 0, 1), 0.25);
        let bad = r#"{"scenario":{"nA":1,"nB":1,"outcomesA":[2],"outcomesB":[2]},"p":[[[[0.5,0.5],[0.5,0.5]]]]}"#;
        assert!(CorrelationBox::from_json_str(bad).is_err());
        let mismatch = r#"{"scenario":{"nA":2,"nB":1,"outcomesA":[2],"outcomesB":[2]},"p":[]}"#;
        assert!(CorrelationBox::from_json_str(mismatch).is_err());
    }
}
