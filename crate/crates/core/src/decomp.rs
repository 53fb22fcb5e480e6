//! Deterministic content of boxes: fraction of determinism, classical
//! fraction, and the Bell bound that follows from either.

use rayon::prelude::*;
use serde::Serialize;

use crate::boxes::{deterministic_box, enumerate_deterministic, require_ns, CorrelationBox, DeterministicStrategy};
use crate::error::{Error, Result};

/// Pivot, feasibility and optimality tolerance of the simplex solver.
pub const LP_TOL: f64 = 1e-9;
/// Below this remaining weight the residual box of a decomposition is dropped.
pub const RESIDUAL_CUTOFF: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

/// `maximize c.x` subject to row constraints and `x >= 0`.
#[derive(Clone, Debug, Serialize)]
pub struct LinearProgram {
    objective: Vec<f64>,
    rows: Vec<Vec<f64>>,
    senses: Vec<Sense>,
    rhs: Vec<f64>,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        Self {
            objective,
            rows: Vec::new(),
            senses: Vec::new(),
            rhs: Vec::new(),
        }
    }

    pub fn add_constraint(&mut self, coefficients: Vec<f64>, sense: Sense, rhs: f64) -> Result<&mut Self> {
        if coefficients.len() != self.objective.len() {
            return Err(Error::DimensionMismatch {
                expected: self.objective.len(),
                found: coefficients.len(),
            });
        }
        if !rhs.is_finite() || coefficients.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite LP coefficient".into()));
        }
        self.rows.push(coefficients);
        self.senses.push(sense);
        self.rhs.push(rhs);
        Ok(self)
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    /// Largest violation of any row or sign constraint at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst = x.iter().map(|v| (-v).max(0.0)).fold(0.0, f64::max);
        for ((row, sense), rhs) in self.rows.iter().zip(&self.senses).zip(&self.rhs) {
            let lhs: f64 = row.iter().zip(x).map(|(a, b)| a * b).sum();
            let v = match sense {
                Sense::Le => lhs - rhs,
                Sense::Ge => rhs - lhs,
                Sense::Eq => (lhs - rhs).abs(),
            };
            worst = worst.max(v);
        }
        worst
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LpSolution {
    pub optimum: f64,
    pub x: Vec<f64>,
    pub iterations: usize,
}

struct Tableau {
    /// `m` rows of `cols + 1` entries; the last is the right-hand side.
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    cols: usize,
    iterations: usize,
    budget: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.t[r][c];
        for v in self.t[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[c] = 0.0;
            }
        }
        self.basis[r] = c;
    }

    fn reduced_costs(&self, cost: &[f64], allowed: &[bool]) -> Vec<f64> {
        (0..self.cols)
            .map(|j| {
                if !allowed[j] {
                    return 0.0;
                }
                cost[j] - self.t.iter().zip(&self.basis).map(|(row, &b)| cost[b] * row[j]).sum::<f64>()
            })
            .collect()
    }

    /// Primal simplex with Bland's rule, maximizing `cost . x`.
    fn optimize(&mut self, cost: &[f64], allowed: &[bool]) -> Result<()> {
        loop {
            let reduced = self.reduced_costs(cost, allowed);
            let Some(enter) = (0..self.cols).find(|&j| allowed[j] && reduced[j] > LP_TOL) else {
                return Ok(());
            };
            if self.iterations >= self.budget {
                return Err(Error::IterationLimit { budget: self.budget });
            }
            let rhs = self.cols;
            let mut leave: Option<(usize, f64)> = None;
            for (i, row) in self.t.iter().enumerate() {
                if row[enter] > LP_TOL {
                    let ratio = row[rhs] / row[enter];
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - LP_TOL || (ratio <= lr + LP_TOL && self.basis[i] < self.basis[li]) {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = leave else {
                return Err(Error::Unbounded { column: enter });
            };
            self.pivot(r, enter);
            self.iterations += 1;
        }
    }

    fn value(&self, cost: &[f64]) -> f64 {
        self.t.iter().zip(&self.basis).map(|(row, &b)| cost[b] * row[self.cols]).sum()
    }
}

/// Two-phase dense primal simplex with Bland's anti-cycling rule.
pub fn simplex_solve(lp: &LinearProgram) -> Result<LpSolution> {
    let n = lp.num_vars();
    let m = lp.num_rows();
    // Normalize to nonnegative right-hand sides.
    let mut rows = lp.rows.clone();
    let mut senses = lp.senses.clone();
    let mut rhs = lp.rhs.clone();
    for i in 0..m {
        if rhs[i] < 0.0 {
            rows[i].iter_mut().for_each(|v| *v = -*v);
            rhs[i] = -rhs[i];
            senses[i] = match senses[i] {
                Sense::Le => Sense::Ge,
                Sense::Ge => Sense::Le,
                Sense::Eq => Sense::Eq,
            };
        }
    }
    let n_slack = senses.iter().filter(|s| **s != Sense::Eq).count();
    let n_art = senses.iter().filter(|s| **s != Sense::Le).count();
    let cols = n + n_slack + n_art;
    let mut t = vec![vec![0.0; cols + 1]; m];
    let mut basis = vec![0; m];
    let mut is_art = vec![false; cols];
    let (mut next_slack, mut next_art) = (n, n + n_slack);
    for i in 0..m {
        t[i][..n].copy_from_slice(&rows[i]);
        t[i][cols] = rhs[i];
        match senses[i] {
            Sense::Le => {
                t[i][next_slack] = 1.0;
                basis[i] = next_slack;
                next_slack += 1;
            }
            Sense::Ge => {
                t[i][next_slack] = -1.0;
                next_slack += 1;
                t[i][next_art] = 1.0;
                is_art[next_art] = true;
                basis[i] = next_art;
                next_art += 1;
            }
            Sense::Eq => {
                t[i][next_art] = 1.0;
                is_art[next_art] = true;
                basis[i] = next_art;
                next_art += 1;
            }
        }
    }
    let mut tab = Tableau {
        t,
        basis,
        cols,
        iterations: 0,
        budget: 10 * (m + cols).max(1),
    };

    if n_art > 0 {
        let cost: Vec<f64> = is_art.iter().map(|&a| if a { -1.0 } else { 0.0 }).collect();
        tab.optimize(&cost, &vec![true; cols])?;
        let residual = -tab.value(&cost);
        if residual > LP_TOL * (1.0 + rhs.iter().map(|v| v.abs()).fold(0.0, f64::max)) {
            return Err(Error::Infeasible { residual });
        }
        // Pivot zero-level artificials out of the basis; drop redundant rows.
        let mut i = 0;
        while i < tab.t.len() {
            if is_art[tab.basis[i]] {
                if let Some(j) = (0..cols).find(|&j| !is_art[j] && tab.t[i][j].abs() > LP_TOL) {
                    tab.pivot(i, j);
                    i += 1;
                } else {
                    tab.t.remove(i);
                    tab.basis.remove(i);
                }
            } else {
                i += 1;
            }
        }
    }

    let mut cost = vec![0.0; cols];
    cost[..n].copy_from_slice(&lp.objective);
    let allowed: Vec<bool> = is_art.iter().map(|a| !a).collect();
    tab.optimize(&cost, &allowed)?;

    let reduced = tab.reduced_costs(&cost, &allowed);
    if let Some(j) = (0..cols).find(|&j| allowed[j] && reduced[j] > LP_TOL) {
        return Err(Error::Invariant(format!("reduced cost {} > 0 at column {j} after termination", reduced[j])));
    }
    let mut x = vec![0.0; n];
    for (row, &b) in tab.t.iter().zip(&tab.basis) {
        if b < n {
            x[b] = row[cols].max(0.0);
        }
    }
    let optimum = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(LpSolution {
        optimum,
        x,
        iterations: tab.iterations,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FodResult {
    pub value: f64,
    pub strategy: DeterministicStrategy,
}

/// `min_{x,y} p(d_A(x), d_B(y) | x, y)`: the largest `c` with `P - c D >= 0`.
pub fn deterministic_weight(p: &CorrelationBox, s: &DeterministicStrategy) -> f64 {
    let sc = p.scenario();
    let mut best = f64::INFINITY;
    for x in 0..sc.n_a() {
        for y in 0..sc.n_b() {
            best = best.min(p.get(s.alice[x], s.bob[y], x, y));
        }
    }
    best.max(0.0)
}

/// Fraction of determinism: `max_D min_{x,y} p(d_A(x), d_B(y) | x, y)`.
/// Ties go to the lexicographically first strategy.
pub fn fod_exact(p: &CorrelationBox) -> Result<FodResult> {
    require_ns(p)?;
    let strategies = enumerate_deterministic(p.scenario())?;
    let (index, value) = strategies
        .par_iter()
        .enumerate()
        .map(|(i, s)| (i, deterministic_weight(p, s)))
        .reduce(
            || (usize::MAX, f64::NEG_INFINITY),
            |a, b| {
                if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) {
                    b
                } else {
                    a
                }
            },
        );
    Ok(FodResult {
        value,
        strategy: strategies[index].clone(),
    })
}

/// `P = (1 - sum c_i) X + sum c_i D_i`.
#[derive(Clone, Debug, Serialize)]
pub struct Decomposition {
    pub strategies: Vec<DeterministicStrategy>,
    pub coefficients: Vec<f64>,
    pub total_weight: f64,
    /// Absent when the deterministic part carries all the weight.
    pub residual: Option<CorrelationBox>,
}

impl Decomposition {
    /// Dense tensor of `(1 - sum c_i) X + sum c_i D_i`.
    pub fn reconstruct(&self, like: &CorrelationBox) -> Result<Vec<f64>> {
        let sc = like.scenario();
        let mut out = vec![0.0; sc.len()];
        if let Some(x) = &self.residual {
            for (o, v) in out.iter_mut().zip(x.as_slice()) {
                *o += (1.0 - self.total_weight) * v;
            }
        }
        for (s, c) in self.strategies.iter().zip(&self.coefficients) {
            for (o, v) in out.iter_mut().zip(deterministic_box(s, sc)?.as_slice()) {
                *o += c * v;
            }
        }
        Ok(out)
    }

    pub fn reconstruction_error(&self, p: &CorrelationBox) -> Result<f64> {
        Ok(self
            .reconstruct(p)?
            .iter()
            .zip(p.as_slice())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CfResult {
    pub value: f64,
    pub decomposition: Decomposition,
}

/// Classical fraction: `max sum c_i` with `sum c_i D_i <= P` cellwise,
/// `c >= 0` and `sum c_i <= 1`.
pub fn cf_exact(p: &CorrelationBox) -> Result<CfResult> {
    require_ns(p)?;
    let sc = p.scenario();
    let strategies = enumerate_deterministic(sc)?;
    let n = strategies.len();
    let mut lp = LinearProgram::new(vec![1.0; n]);
    let cells: Vec<_> = sc.cells().collect();
    for &(a, b, x, y) in &cells {
        let row = strategies
            .iter()
            .map(|s| if s.alice[x] == a && s.bob[y] == b { 1.0 } else { 0.0 })
            .collect();
        lp.add_constraint(row, Sense::Le, p.get(a, b, x, y).max(0.0))?;
    }
    lp.add_constraint(vec![1.0; n], Sense::Le, 1.0)?;
    let solution = simplex_solve(&lp).map_err(|e| match e {
        Error::Infeasible { .. } | Error::Unbounded { .. } => {
            Error::Invariant(format!("classical-fraction LP failed on a valid box: {e}"))
        }
        other => other,
    })?;

    let mut chosen = Vec::new();
    let mut coefficients = Vec::new();
    for (s, &c) in strategies.iter().zip(&solution.x) {
        if c > 0.0 {
            chosen.push(s.clone());
            coefficients.push(c);
        }
    }
    let total_weight: f64 = coefficients.iter().sum::<f64>().min(1.0);
    let residual = if 1.0 - total_weight > RESIDUAL_CUTOFF {
        let mut rest = p.as_slice().to_vec();
        for (s, c) in chosen.iter().zip(&coefficients) {
            for x in 0..sc.n_a() {
                for y in 0..sc.n_b() {
                    rest[sc.index(s.alice[x], s.bob[y], x, y)] -= c;
                }
            }
        }
        for x in 0..sc.n_a() {
            for y in 0..sc.n_b() {
                let idx: Vec<usize> = (0..sc.outcomes_a()[x])
                    .flat_map(|a| (0..sc.outcomes_b()[y]).map(move |b| (a, b)))
                    .map(|(a, b)| sc.index(a, b, x, y))
                    .collect();
                idx.iter().for_each(|&i| rest[i] = rest[i].max(0.0));
                let total: f64 = idx.iter().map(|&i| rest[i]).sum();
                idx.iter().for_each(|&i| rest[i] /= total);
            }
        }
        Some(CorrelationBox::new(sc.clone(), rest)?)
    } else {
        None
    };
    Ok(CfResult {
        value: solution.optimum.min(1.0),
        decomposition: Decomposition {
            strategies: chosen,
            coefficients,
            total_weight,
            residual,
        },
    })
}

/// `beta_alg - c (beta_alg - beta_det)`.
pub fn bell_bound_from_fod(beta_alg: f64, beta_det: f64, c: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&c) {
        return Err(Error::InvalidArgument(format!("deterministic fraction {c} outside [0, 1]")));
    }
    if beta_det > beta_alg {
        return Err(Error::InvalidArgument(format!(
            "deterministic maximum {beta_det} exceeds algebraic maximum {beta_alg}"
        )));
    }
    Ok(beta_alg - c * (beta_alg - beta_det))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxes::{local_box, pr_box, tsirelson_box, validate_ns, Scenario};
    use crate::states::{rng_from_seed, sample_probability_vector_with};
    use rand::Rng;

    fn lp(objective: &[f64], rows: &[(&[f64], Sense, f64)]) -> LinearProgram {
        let mut lp = LinearProgram::new(objective.to_vec());
        for (r, s, b) in rows {
            lp.add_constraint(r.to_vec(), *s, *b).unwrap();
        }
        lp
    }

    #[test]
    fn simplex_examples() {
        let s = simplex_solve(&lp(&[1.0], &[(&[1.0], Sense::Le, 3.0)])).unwrap();
        assert!((s.optimum - 3.0).abs() < 1e-12);
        let s = simplex_solve(&lp(&[1.0, 1.0], &[(&[1.0, 1.0], Sense::Le, 1.0)])).unwrap();
        assert!((s.optimum - 1.0).abs() < 1e-12);
        let s = simplex_solve(&lp(
            &[-1.0, -1.0],
            &[(&[1.0, 2.0], Sense::Ge, 2.0), (&[1.0, -1.0], Sense::Eq, 0.5)],
        ))
        .unwrap();
        // x = y + 0.5, x + 2y >= 2 -> y = 0.5, x = 1.
        assert!((s.optimum + 1.5).abs() < 1e-12);
        assert!((s.x[0] - 1.0).abs() < 1e-12 && (s.x[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn simplex_reports_failures() {
        assert!(matches!(
            simplex_solve(&lp(&[1.0], &[(&[1.0], Sense::Ge, 1.0)])),
            Err(Error::Unbounded { .. })
        ));
        assert!(matches!(
            simplex_solve(&lp(&[1.0], &[(&[1.0], Sense::Le, 1.0), (&[1.0], Sense::Ge, 2.0)])),
            Err(Error::Infeasible { .. })
        ));
        // Negative right-hand side flips the row.
        let s = simplex_solve(&lp(&[-1.0], &[(&[-1.0], Sense::Le, -2.0)])).unwrap();
        assert!((s.optimum + 2.0).abs() < 1e-12);
    }

    /// Solves a dense square system by Gaussian elimination with partial pivoting.
    fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
        let n = b.len();
        for col in 0..n {
            let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
            if a[piv][col].abs() < 1e-10 {
                return None;
            }
            a.swap(col, piv);
            b.swap(col, piv);
            for r in 0..n {
                if r != col {
                    let f = a[r][col] / a[col][col];
                    for c in col..n {
                        a[r][c] -= f * a[col][c];
                    }
                    b[r] -= f * b[col];
                }
            }
        }
        Some((0..n).map(|i| b[i] / a[i][i]).collect())
    }

    /// Best objective over all vertices of `{x >= 0, A x <= b}`.
    fn brute_force_vertices(objective: &[f64], a: &[Vec<f64>], b: &[f64]) -> f64 {
        let n = objective.len();
        let mut all_rows: Vec<(Vec<f64>, f64)> = a.iter().cloned().zip(b.iter().copied()).collect();
        for i in 0..n {
            let mut e = vec![0.0; n];
            e[i] = -1.0;
            all_rows.push((e, 0.0));
        }
        let mut best = f64::NEG_INFINITY;
        let total = all_rows.len();
        let mut subset: Vec<usize> = (0..n).collect();
        loop {
            let m: Vec<Vec<f64>> = subset.iter().map(|&i| all_rows[i].0.clone()).collect();
            let r: Vec<f64> = subset.iter().map(|&i| all_rows[i].1).collect();
            if let Some(x) = solve_square(m, r) {
                let feasible = all_rows
                    .iter()
                    .all(|(row, rhs)| row.iter().zip(&x).map(|(p, q)| p * q).sum::<f64>() <= rhs + 1e-9);
                if feasible {
                    best = best.max(objective.iter().zip(&x).map(|(p, q)| p * q).sum());
                }
            }
            // Next combination.
            let mut k = n;
            while k > 0 && subset[k - 1] == total - n + k - 1 {
                k -= 1;
            }
            if k == 0 {
                return best;
            }
            subset[k - 1] += 1;
            for j in k..n {
                subset[j] = subset[j - 1] + 1;
            }
        }
    }

    #[test]
    fn simplex_matches_vertex_enumeration() {
        let mut rng = rng_from_seed(11);
        for _ in 0..200 {
            let n = rng.random_range(2..=4);
            let m = rng.random_range(2..=6);
            let objective: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let mut a: Vec<Vec<f64>> = (0..m).map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
            // Keep the region bounded.
            a.push(vec![1.0; n]);
            let b: Vec<f64> = (0..=m).map(|_| rng.random_range(0.1..2.0)).collect();
            let mut program = LinearProgram::new(objective.clone());
            for (row, rhs) in a.iter().zip(&b) {
                program.add_constraint(row.clone(), Sense::Le, *rhs).unwrap();
            }
            let s = simplex_solve(&program).unwrap();
            assert!(program.max_violation(&s.x) < 1e-9);
            let oracle = brute_force_vertices(&objective, &a, &b);
            assert!((s.optimum - oracle).abs() < 1e-7, "simplex {} vs vertices {oracle}", s.optimum);
        }
    }

    #[test]
    fn cf_matches_vertex_enumeration_on_tiny_scenario() {
        // Two binary inputs for Alice, one for Bob: 8 strategies, C(17, 8) vertex candidates.
        let sc = Scenario::uniform(2, 1, 2, 2).unwrap();
        let strategies = enumerate_deterministic(&sc).unwrap();
        let mut rng = rng_from_seed(3);
        for _ in 0..5 {
            let w = sample_probability_vector_with(strategies.len(), &mut rng);
            let pairs: Vec<_> = strategies.iter().cloned().zip(w).collect();
            let p = local_box(&pairs, &sc).unwrap();
            let mut a = Vec::new();
            let mut b = Vec::new();
            for (pa, pb, x, y) in sc.cells() {
                a.push(
                    strategies
                        .iter()
                        .map(|s| if s.alice[x] == pa && s.bob[y] == pb { 1.0 } else { 0.0 })
                        .collect(),
                );
                b.push(p.get(pa, pb, x, y));
            }
            a.push(vec![1.0; strategies.len()]);
            b.push(1.0);
            let oracle = brute_force_vertices(&vec![1.0; strategies.len()], &a, &b);
            let cf = cf_exact(&p).unwrap();
            assert!((cf.value - oracle).abs() < 1e-7);
            assert!((cf.value - 1.0).abs() < 1e-7);
        }
    }

    /// Largest `c` for which `(P - c D)/(1 - c)` is a valid box, by bisection.
    fn fod_by_feasibility(p: &CorrelationBox) -> f64 {
        let sc = p.scenario();
        let mut best: f64 = 0.0;
        for s in enumerate_deterministic(sc).unwrap() {
            let d = deterministic_box(&s, sc).unwrap();
            let feasible = |c: f64| {
                let x: Vec<f64> = p.as_slice().iter().zip(d.as_slice()).map(|(a, b)| (a - c * b) / (1.0 - c)).collect();
                match CorrelationBox::new(sc.clone(), x) {
                    Ok(bx) => validate_ns(&bx).pass,
                    Err(_) => false,
                }
            };
            let (mut lo, mut hi) = (0.0, 1.0 - 1e-12);
            if feasible(hi) {
                best = best.max(hi);
                continue;
            }
            if !feasible(lo) {
                continue;
            }
            for _ in 0..60 {
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

    #[test]
    fn fod_examples() {
        let sc = Scenario::chsh();
        assert!((fod_exact(&CorrelationBox::maximally_mixed(sc.clone())).unwrap().value - 0.25).abs() < 1e-15);
        assert_eq!(fod_exact(&pr_box(&sc).unwrap()).unwrap().value, 0.0);
        for s in enumerate_deterministic(&sc).unwrap() {
            let r = fod_exact(&deterministic_box(&s, &sc).unwrap()).unwrap();
            assert_eq!(r.value, 1.0);
            assert_eq!(r.strategy, s);
        }
    }

    #[test]
    fn fod_reduction_matches_feasibility_search() {
        let sc = Scenario::chsh();
        let mut boxes = vec![tsirelson_box(), CorrelationBox::maximally_mixed(sc.clone())];
        let strategies = enumerate_deterministic(&sc).unwrap();
        let mut rng = rng_from_seed(8);
        for _ in 0..10 {
            let w = sample_probability_vector_with(4, &mut rng);
            let picks: Vec<_> = (0..4).map(|i| (strategies[rng.random_range(0..16)].clone(), w[i])).collect();
            let local = local_box(&picks, &sc).unwrap();
            let t = rng.random::<f64>();
            boxes.push(CorrelationBox::mixture(&[t, 1.0 - t], &[local, pr_box(&sc).unwrap()]).unwrap());
        }
        for p in &boxes {
            let exact = fod_exact(p).unwrap().value;
            let oracle = fod_by_feasibility(p);
            assert!((exact - oracle).abs() < 1e-9, "fod {exact} vs feasibility {oracle}");
        }
    }

    #[test]
    fn fod_rejects_signalling() {
        let sig = CorrelationBox::from_fn(Scenario::chsh(), |a, b, _, y| if a == y && b == 0 { 1.0 } else { 0.0 }).unwrap();
        assert!(matches!(fod_exact(&sig), Err(Error::Signalling(_))));
        assert!(matches!(cf_exact(&sig), Err(Error::Signalling(_))));
    }

    #[test]
    fn cf_examples() {
        let sc = Scenario::chsh();
        let d = deterministic_box(&enumerate_deterministic(&sc).unwrap()[6], &sc).unwrap();
        let r = cf_exact(&d).unwrap();
        assert!((r.value - 1.0).abs() < 1e-9);
        assert!(r.decomposition.residual.is_none());
        assert!(r.decomposition.reconstruction_error(&d).unwrap() < 1e-8);

        let pr = pr_box(&sc).unwrap();
        let r = cf_exact(&pr).unwrap();
        assert!(r.value.abs() < 1e-9);
        assert!(r.decomposition.reconstruction_error(&pr).unwrap() < 1e-8);

        let mixed = CorrelationBox::maximally_mixed(sc);
        let r = cf_exact(&mixed).unwrap();
        assert!((r.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn cf_of_noisy_pr_box() {
        // v PR + (1 - v) I/4 has CHSH value 4v, so its local weight is 1 - max(0, 2v - 1).
        let sc = Scenario::chsh();
        for v in [0.3, 0.5, 0.6, 0.75, 0.9] {
            let p = CorrelationBox::mixture(&[v, 1.0 - v], &[pr_box(&sc).unwrap(), CorrelationBox::maximally_mixed(sc.clone())]).unwrap();
            let r = cf_exact(&p).unwrap();
            let expected = 1.0 - (2.0 * v - 1.0).max(0.0);
            assert!((r.value - expected).abs() < 1e-8, "v = {v}: {} vs {expected}", r.value);
            let fod = fod_exact(&p).unwrap().value;
            assert!(fod <= r.value + 1e-8);
            assert!(r.decomposition.reconstruction_error(&p).unwrap() < 1e-8);
            if let Some(x) = &r.decomposition.residual {
                assert!(validate_ns(x).pass);
            }
        }
    }

    #[test]
    fn bell_bound_examples() {
        assert!((bell_bound_from_fod(4.0, 2.0, 3.5438e-3).unwrap() - 3.9929).abs() < 5e-5);
        assert_eq!(bell_bound_from_fod(4.0, 2.0, 0.25).unwrap(), 3.5);
        assert_eq!(bell_bound_from_fod(7.0, 3.0, 0.0).unwrap(), 7.0);
        assert!(bell_bound_from_fod(4.0, 2.0, 1.5).is_err());
        assert!(bell_bound_from_fod(4.0, 2.0, -0.1).is_err());
        assert!(bell_bound_from_fod(2.0, 4.0, 0.1).is_err());
    }
}
