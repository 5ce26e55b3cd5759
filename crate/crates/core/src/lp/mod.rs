//! Two-phase revised simplex over any [`Scalar`], exact for [`Rational`].
//!
//! Problems are in standard equality form:
//! minimize `c·x` subject to `A x = b`, `x ≥ 0`.
//!
//! Pivoting follows Bland's rule throughout (smallest-index entering column
//! with negative reduced cost, smallest-index leaving variable among ratio
//! ties), so results are reproducible bit for bit. Redundant rows are left to
//! phase 1: their artificial variables stay basic at level zero.
//!
//! [`Rational`]: crate::scalar::Rational

mod certify;
pub mod linalg;

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet, VecDeque};

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("basis {0:?} is not an optimal basis of this program")]
    InvalidBasis(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram<T> {
    matrix: Vec<Vec<T>>,
    rhs: Vec<T>,
    objective: Vec<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimalSolution<T> {
    pub value: T,
    pub point: Vec<T>,
    /// Basic original columns, ascending.
    pub basis: Vec<usize>,
}

impl<T: Scalar> OptimalSolution<T> {
    /// Columns with a nonzero value.
    pub fn support(&self) -> BTreeSet<usize> {
        self.point.iter().enumerate().filter(|(_, v)| !v.is_negligible()).map(|(j, _)| j).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpSolution<T> {
    Optimal(OptimalSolution<T>),
    Infeasible,
    Unbounded,
}

impl<T> LpSolution<T> {
    pub fn status(&self) -> LpStatus {
        match self {
            LpSolution::Optimal(_) => LpStatus::Optimal,
            LpSolution::Infeasible => LpStatus::Infeasible,
            LpSolution::Unbounded => LpStatus::Unbounded,
        }
    }

    pub fn optimal(&self) -> Option<&OptimalSolution<T>> {
        match self {
            LpSolution::Optimal(s) => Some(s),
            _ => None,
        }
    }

    pub fn into_optimal(self) -> Option<OptimalSolution<T>> {
        match self {
            LpSolution::Optimal(s) => Some(s),
            _ => None,
        }
    }
}

impl<T: Scalar> LinearProgram<T> {
    pub fn new(matrix: Vec<Vec<T>>, rhs: Vec<T>, objective: Vec<T>) -> Result<Self, LpError> {
        let m = matrix.len();
        if m == 0 {
            return Err(LpError::DimensionMismatch("no constraint rows".into()));
        }
        let n = objective.len();
        if n == 0 {
            return Err(LpError::DimensionMismatch("no variables".into()));
        }
        if rhs.len() != m {
            return Err(LpError::DimensionMismatch(format!("{} rows but {} rhs entries", m, rhs.len())));
        }
        if let Some((i, row)) = matrix.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(LpError::DimensionMismatch(format!(
                "row {i} has {} entries, objective has {n}",
                row.len()
            )));
        }
        Ok(Self { matrix, rhs, objective })
    }

    pub fn rows(&self) -> usize {
        self.matrix.len()
    }

    pub fn cols(&self) -> usize {
        self.objective.len()
    }

    pub fn matrix(&self) -> &[Vec<T>] {
        &self.matrix
    }

    pub fn rhs(&self) -> &[T] {
        &self.rhs
    }

    pub fn objective(&self) -> &[T] {
        &self.objective
    }

    pub fn objective_value(&self, x: &[T]) -> T {
        let mut total = T::zero();
        for (c, v) in self.objective.iter().zip(x) {
            if !c.is_zero() && !v.is_zero() {
                total += &c.mul_ref(v);
            }
        }
        total
    }

    /// `A x − b`.
    pub fn residual(&self, x: &[T]) -> Vec<T> {
        self.matrix
            .iter()
            .zip(&self.rhs)
            .map(|(row, b)| {
                let ax = row.iter().zip(x).fold(T::zero(), |acc, (a, v)| acc.add_ref(&a.mul_ref(v)));
                ax.sub_ref(b)
            })
            .collect()
    }

    /// Reduced costs `c − Aᵀy` with `y` solving `B_ᵀ y = c_B`, computed by
    /// elimination rather than from a simplex tableau. `None` if the system
    /// is inconsistent, i.e. `basis` is not a basis of the row space.
    pub fn reduced_costs(&self, basis: &[usize]) -> Option<Vec<T>> {
        let m = self.rows();
        let bt: Vec<Vec<T>> =
            basis.iter().map(|&j| (0..m).map(|i| self.matrix[i][j].clone()).collect()).collect();
        let cb: Vec<T> = basis.iter().map(|&j| self.objective[j].clone()).collect();
        let y = linalg::solve_consistent(&bt, &cb, m)?;
        Some(
            (0..self.cols())
                .map(|j| {
                    let aty = (0..m).fold(T::zero(), |acc, i| acc.add_ref(&self.matrix[i][j].mul_ref(&y[i])));
                    self.objective[j].sub_ref(&aty)
                })
                .collect(),
        )
    }
}

/// Revised-simplex state: explicit `B⁻¹` over the sign-normalized system.
#[derive(Clone)]
struct Simplex<'a, T> {
    lp: &'a LinearProgram<T>,
    /// Sparse columns of the row-normalized matrix.
    cols: Vec<Vec<(usize, T)>>,
    binv: Vec<Vec<T>>,
    /// Variable per row; `n + r` is the artificial of row `r`.
    basis: Vec<usize>,
    xb: Vec<T>,
    is_basic: Vec<bool>,
    /// Most negative reduced cost instead of Bland's smallest index, until
    /// `dantzig_budget` pivots have been spent.
    dantzig_budget: usize,
}

#[derive(Clone, Copy)]
enum Phase {
    One,
    Two,
}

enum Outcome {
    Optimal,
    Unbounded,
}

impl<'a, T: Scalar> Simplex<'a, T> {
    /// All-artificial starting basis.
    fn new(lp: &'a LinearProgram<T>) -> Self {
        let (m, n) = (lp.rows(), lp.cols());
        let flip: Vec<bool> = lp.rhs.iter().map(|b| b.is_negative_tol()).collect();
        let cols = (0..n)
            .map(|j| {
                (0..m)
                    .filter(|&i| !lp.matrix[i][j].is_zero())
                    .map(|i| {
                        let v = &lp.matrix[i][j];
                        (i, if flip[i] { -v.clone() } else { v.clone() })
                    })
                    .collect()
            })
            .collect();
        let xb = lp.rhs.iter().zip(&flip).map(|(b, &f)| if f { -b.clone() } else { b.clone() }).collect();
        let binv = (0..m)
            .map(|i| (0..m).map(|k| if i == k { T::one() } else { T::zero() }).collect())
            .collect();
        Self { lp, cols, binv, basis: (n..n + m).collect(), xb, is_basic: vec![false; n], dantzig_budget: 0 }
    }

    fn n(&self) -> usize {
        self.lp.cols()
    }

    fn cost(&self, var: usize, phase: Phase) -> T {
        let n = self.n();
        match phase {
            Phase::One => {
                if var >= n {
                    T::one()
                } else {
                    T::zero()
                }
            }
            Phase::Two => {
                if var >= n {
                    T::zero()
                } else {
                    self.lp.objective[var].clone()
                }
            }
        }
    }

    fn duals(&self, phase: Phase) -> Vec<T> {
        let m = self.binv.len();
        let mut y = vec![T::zero(); m];
        for (i, &var) in self.basis.iter().enumerate() {
            let c = self.cost(var, phase);
            if c.is_zero() {
                continue;
            }
            for (yk, bik) in y.iter_mut().zip(&self.binv[i]) {
                if !bik.is_zero() {
                    *yk += &c.mul_ref(bik);
                }
            }
        }
        y
    }

    fn reduced_cost(&self, j: usize, y: &[T], phase: Phase) -> T {
        let mut d = self.cost(j, phase);
        for (r, v) in &self.cols[j] {
            if !y[*r].is_zero() {
                d -= &y[*r].mul_ref(v);
            }
        }
        d
    }

    /// `B⁻¹ a_j` for an original column.
    fn column(&self, j: usize) -> Vec<T> {
        self.binv
            .iter()
            .map(|row| {
                self.cols[j].iter().fold(T::zero(), |acc, (r, v)| {
                    if row[*r].is_zero() {
                        acc
                    } else {
                        acc.add_ref(&row[*r].mul_ref(v))
                    }
                })
            })
            .collect()
    }

    fn pivot(&mut self, r: usize, j: usize, alpha: &[T]) {
        let piv = alpha[r].clone();
        for v in self.binv[r].iter_mut() {
            if !v.is_zero() {
                *v /= &piv;
            }
        }
        self.xb[r] /= &piv;
        let (pivot_row, pivot_x) = (self.binv[r].clone(), self.xb[r].clone());
        for (i, a) in alpha.iter().enumerate() {
            if i == r || a.is_zero() {
                continue;
            }
            for (dst, src) in self.binv[i].iter_mut().zip(&pivot_row) {
                if !src.is_zero() {
                    *dst -= &a.mul_ref(src);
                }
            }
            if !pivot_x.is_zero() {
                self.xb[i] -= &a.mul_ref(&pivot_x);
            }
        }
        let n = self.n();
        if self.basis[r] < n {
            self.is_basic[self.basis[r]] = false;
        }
        self.basis[r] = j;
        self.is_basic[j] = true;
    }

    /// Bland leaving row among rows with `alpha > 0`.
    fn ratio_test(&self, alpha: &[T]) -> Option<usize> {
        let mut best: Option<(usize, T)> = None;
        for (i, a) in alpha.iter().enumerate() {
            if !a.is_positive_tol() {
                continue;
            }
            let ratio = self.xb[i].div_ref(a);
            best = match best {
                None => Some((i, ratio)),
                Some((bi, br)) => match ratio.cmp_tol(&br) {
                    Ordering::Less => Some((i, ratio)),
                    Ordering::Equal if self.basis[i] < self.basis[bi] => Some((i, ratio)),
                    _ => Some((bi, br)),
                },
            };
        }
        best.map(|(i, _)| i)
    }

    fn entering(&self, phase: Phase) -> Option<usize> {
        let y = self.duals(phase);
        let mut candidates = (0..self.n())
            .filter(|&j| !self.is_basic[j])
            .map(|j| (j, self.reduced_cost(j, &y, phase)))
            .filter(|(_, d)| d.is_negative_tol());
        if self.dantzig_budget == 0 {
            return candidates.next().map(|(j, _)| j);
        }
        candidates.fold(None, |best: Option<(usize, T)>, (j, d)| match best {
            Some((_, ref bd)) if *bd <= d => best,
            _ => Some((j, d)),
        })
        .map(|(j, _)| j)
    }

    fn run(&mut self, phase: Phase) -> Outcome {
        while let Some(j) = self.entering(phase) {
            self.dantzig_budget = self.dantzig_budget.saturating_sub(1);
            let alpha = self.column(j);
            let Some(r) = self.ratio_test(&alpha) else {
                return Outcome::Unbounded;
            };
            self.pivot(r, j, &alpha);
        }
        Outcome::Optimal
    }

    fn artificial_sum(&self) -> T {
        let n = self.n();
        self.basis
            .iter()
            .zip(&self.xb)
            .filter(|(&v, _)| v >= n)
            .fold(T::zero(), |acc, (_, x)| acc.add_ref(x))
    }

    /// Pivots zero-level artificials out wherever an original column allows.
    fn drive_out_artificials(&mut self) {
        let n = self.n();
        for r in 0..self.basis.len() {
            if self.basis[r] < n {
                continue;
            }
            let candidate =
                (0..n).filter(|&j| !self.is_basic[j]).find(|&j| !self.row_entry(r, j).is_negligible());
            if let Some(j) = candidate {
                let alpha = self.column(j);
                self.pivot(r, j, &alpha);
            }
        }
    }

    fn row_entry(&self, r: usize, j: usize) -> T {
        self.cols[j].iter().fold(T::zero(), |acc, (k, v)| acc.add_ref(&self.binv[r][*k].mul_ref(v)))
    }

    fn solution(&self) -> OptimalSolution<T> {
        let n = self.n();
        let mut point = vec![T::zero(); n];
        let mut basis = Vec::new();
        for (&var, x) in self.basis.iter().zip(&self.xb) {
            if var < n {
                point[var] = x.clone();
                basis.push(var);
            }
        }
        basis.sort_unstable();
        let value = self.lp.objective_value(&point);
        OptimalSolution { value, point, basis }
    }

    fn basis_key(&self) -> Vec<usize> {
        let mut k = self.basis.clone();
        k.sort_unstable();
        k
    }

    /// Rebuilds the state for a known basis of original columns.
    fn from_basis(lp: &'a LinearProgram<T>, basis: &[usize]) -> Result<Self, LpError> {
        let bad = || LpError::InvalidBasis(basis.to_vec());
        let mut s = Self::new(lp);
        let n = lp.cols();
        for &j in basis {
            if j >= n || s.is_basic[j] {
                return Err(bad());
            }
            let alpha = s.column(j);
            let r = (0..s.basis.len())
                .find(|&r| s.basis[r] >= n && !alpha[r].is_negligible())
                .ok_or_else(bad)?;
            s.pivot(r, j, &alpha);
        }
        if s.xb.iter().any(|x| x.is_negative_tol()) {
            return Err(bad());
        }
        // Remaining artificials must sit on redundant rows.
        for r in 0..s.basis.len() {
            if s.basis[r] >= n
                && (!s.xb[r].is_negligible() || (0..n).any(|j| !s.row_entry(r, j).is_negligible()))
            {
                return Err(bad());
            }
        }
        if s.entering(Phase::Two).is_some() {
            return Err(bad());
        }
        Ok(s)
    }
}

/// Exact programs first try the optimal basis of a floating-point copy and
/// keep it only if it certifies exactly; otherwise the exact two-phase run
/// decides.
pub fn solve<T: Scalar>(lp: &LinearProgram<T>) -> LpSolution<T> {
    if T::EXACT {
        if let Some(sol) = float_guided(lp) {
            return LpSolution::Optimal(sol);
        }
    }
    solve_two_phase(lp)
}

fn float_guided<T: Scalar>(lp: &LinearProgram<T>) -> Option<OptimalSolution<T>> {
    let to_f64 = |v: &T| if v.is_zero() { 0.0 } else if v.is_one() { 1.0 } else { v.to_f64_lossy() };
    let approx = LinearProgram {
        matrix: lp.matrix.iter().map(|row| row.iter().map(to_f64).collect()).collect(),
        rhs: lp.rhs.iter().map(to_f64).collect(),
        objective: lp.objective.iter().map(to_f64).collect(),
    };
    let budget = 20 * (approx.rows() + approx.cols());
    let guess = solve_two_phase_with(&approx, budget).into_optimal()?;
    certify::certify(lp, &guess.basis)
}

fn solve_two_phase<T: Scalar>(lp: &LinearProgram<T>) -> LpSolution<T> {
    solve_two_phase_with(lp, 0)
}

fn solve_two_phase_with<T: Scalar>(lp: &LinearProgram<T>, dantzig_budget: usize) -> LpSolution<T> {
    let mut s = Simplex::new(lp);
    s.dantzig_budget = dantzig_budget;
    s.run(Phase::One);
    if s.artificial_sum().is_positive_tol() {
        return LpSolution::Infeasible;
    }
    s.drive_out_artificials();
    match s.run(Phase::Two) {
        Outcome::Optimal => LpSolution::Optimal(s.solution()),
        Outcome::Unbounded => LpSolution::Unbounded,
    }
}

/// How [`find_alternative_vertex_with`] ranks candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlternativeSearch {
    /// Keep searching for a support disjoint from the known one, falling
    /// back to the first merely different support.
    pub prefer_disjoint: bool,
    /// Cap on optimal bases visited.
    pub max_bases: usize,
}

impl Default for AlternativeSearch {
    fn default() -> Self {
        Self { prefer_disjoint: false, max_bases: 5_000 }
    }
}

/// Another optimal basic solution whose support differs from `known`.
pub fn find_alternative_vertex<T: Scalar>(
    lp: &LinearProgram<T>,
    known: &OptimalSolution<T>,
) -> Result<Option<OptimalSolution<T>>, LpError> {
    find_alternative_vertex_with(lp, known, AlternativeSearch::default())
}

/// Breadth-first walk over optimal bases, pivoting only on columns with zero
/// reduced cost (which keeps every visited basis optimal).
pub fn find_alternative_vertex_with<T: Scalar>(
    lp: &LinearProgram<T>,
    known: &OptimalSolution<T>,
    search: AlternativeSearch,
) -> Result<Option<OptimalSolution<T>>, LpError> {
    if known.point.len() != lp.cols() {
        return Err(LpError::DimensionMismatch(format!(
            "solution has {} entries, program has {} columns",
            known.point.len(),
            lp.cols()
        )));
    }
    let start = Simplex::from_basis(lp, &known.basis)?;
    let known_support = known.support();
    let n = lp.cols();

    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    seen.insert(start.basis_key());
    let mut queue = VecDeque::from([start]);
    let mut fallback: Option<OptimalSolution<T>> = None;

    while let Some(state) = queue.pop_front() {
        let y = state.duals(Phase::Two);
        for j in 0..n {
            if state.is_basic[j] || !state.reduced_cost(j, &y, Phase::Two).is_negligible() {
                continue;
            }
            let alpha = state.column(j);
            let Some(r0) = state.ratio_test(&alpha) else {
                continue;
            };
            let min_ratio = state.xb[r0].div_ref(&alpha[r0]);
            let tied = (0..alpha.len()).filter(|&i| {
                alpha[i].is_positive_tol() && state.xb[i].div_ref(&alpha[i]).approx_eq(&min_ratio)
            });
            for r in tied {
                let mut next = state.clone();
                next.pivot(r, j, &alpha);
                if !seen.insert(next.basis_key()) {
                    continue;
                }
                let sol = next.solution();
                let support = sol.support();
                if support != known_support {
                    if !search.prefer_disjoint || support.is_disjoint(&known_support) {
                        return Ok(Some(sol));
                    }
                    if fallback.is_none() {
                        fallback = Some(sol);
                    }
                }
                if seen.len() >= search.max_bases {
                    return Ok(fallback);
                }
                queue.push_back(next);
            }
        }
    }
    Ok(fallback)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64) -> Rational {
        Rational::ratio(n, 1)
    }

    fn lp(a: Vec<Vec<i64>>, b: Vec<i64>, c: Vec<i64>) -> LinearProgram<Rational> {
        LinearProgram::new(
            a.into_iter().map(|r| r.into_iter().map(q).collect()).collect(),
            b.into_iter().map(q).collect(),
            c.into_iter().map(q).collect(),
        )
        .unwrap()
    }

    #[test]
    fn single_variable() {
        let sol = solve(&lp(vec![vec![1]], vec![1], vec![1]));
        let opt = sol.optimal().unwrap();
        assert_eq!(opt.value, q(1));
        assert_eq!(opt.point, vec![q(1)]);
        assert_eq!(opt.basis, vec![0]);
    }

    #[test]
    fn infeasible_pair() {
        let sol = solve(&lp(vec![vec![1, 1], vec![1, -1]], vec![1, 3], vec![0, 0]));
        assert_eq!(sol.status(), LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_ray() {
        // min -x1 s.t. x1 - x2 = 1
        let sol = solve(&lp(vec![vec![1, -1]], vec![1], vec![-1, 0]));
        assert_eq!(sol.status(), LpStatus::Unbounded);
    }

    #[test]
    fn redundant_rows_and_negative_rhs() {
        // x1 + x2 = 2 stated twice, once negated; min x1 + 2 x2.
        let p = lp(vec![vec![1, 1], vec![-1, -1], vec![2, 2]], vec![2, -2, 4], vec![1, 2]);
        let opt = solve(&p).into_optimal().unwrap();
        assert_eq!(opt.value, q(2));
        assert_eq!(opt.point, vec![q(2), q(0)]);
        assert!(p.residual(&opt.point).iter().all(|r| *r == q(0)));
        let d = p.reduced_costs(&opt.basis).unwrap();
        assert!(d.iter().all(|v| *v >= q(0)));
    }

    #[test]
    fn dimension_errors() {
        assert!(matches!(
            LinearProgram::new(vec![vec![q(1)]], vec![q(1), q(2)], vec![q(0)]),
            Err(LpError::DimensionMismatch(_))
        ));
        assert!(matches!(
            LinearProgram::<Rational>::new(vec![], vec![], vec![q(0)]),
            Err(LpError::DimensionMismatch(_))
        ));
        assert!(matches!(
            LinearProgram::new(vec![vec![q(1), q(2)]], vec![q(1)], vec![q(0)]),
            Err(LpError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn single_point_has_no_alternative() {
        let p = lp(vec![vec![1, 0], vec![0, 1]], vec![1, 2], vec![1, 1]);
        let opt = solve(&p).into_optimal().unwrap();
        assert_eq!(find_alternative_vertex(&p, &opt).unwrap(), None);
    }

    #[test]
    fn finds_other_vertex_of_optimal_edge() {
        // x1 + x2 + x3 = 1, min x3: optimal edge between e1 and e2.
        let p = lp(vec![vec![1, 1, 1]], vec![1], vec![0, 0, 1]);
        let opt = solve(&p).into_optimal().unwrap();
        let alt = find_alternative_vertex(&p, &opt).unwrap().unwrap();
        assert_eq!(alt.value, opt.value);
        assert_ne!(alt.support(), opt.support());
        assert!(p.residual(&alt.point).iter().all(|r| *r == q(0)));
    }

    #[test]
    fn rejects_non_optimal_basis() {
        let p = lp(vec![vec![1, 1, 1]], vec![1], vec![0, 0, 1]);
        let fake = OptimalSolution { value: q(1), point: vec![q(0), q(0), q(1)], basis: vec![2] };
        assert!(matches!(find_alternative_vertex(&p, &fake), Err(LpError::InvalidBasis(_))));
    }

    #[test]
    fn float_instantiation() {
        let p = LinearProgram::new(
            vec![vec![1.0, 1.0, 1.0], vec![1.0, -1.0, 0.0]],
            vec![1.0, 0.5],
            vec![1.0, 2.0, 3.0],
        )
        .unwrap();
        let opt = solve(&p).into_optimal().unwrap();
        assert!((opt.value - 1.25_f64).abs() < 1e-12);
    }
}
