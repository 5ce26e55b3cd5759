//! Exact optimality check for a candidate basis.
//!
//! The program is scaled to integers (positive factor per row and one for
//! the objective) and both the primal and the dual basic systems are solved
//! by fraction-free Gauss-Jordan elimination. The result is accepted only if
//! the full certificate verifies: `A x = b`, `x ≥ 0`, `B^T y = c_B` and
//! `c − A^T y ≥ 0`.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{LinearProgram, OptimalSolution};
use crate::scalar::{Rational, Scalar};

struct IntegerProgram {
    a: Vec<Vec<BigInt>>,
    b: Vec<BigInt>,
    c: Vec<BigInt>,
}

fn to_rationals<T: Scalar>(xs: &[T]) -> Option<Vec<Rational>> {
    xs.iter()
        .map(|x| if x.is_zero() { Some(Rational::zero()) } else { x.to_rational() })
        .collect()
}

/// Multiplies every value by the lcm of their denominators.
fn scale(values: Vec<Rational>) -> Vec<BigInt> {
    let l = values
        .iter()
        .filter(|v| !v.denom().is_one())
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    values
        .into_iter()
        .map(|v| {
            if v.is_zero() {
                BigInt::zero()
            } else if v.denom().is_one() && l.is_one() {
                v.numer().clone()
            } else {
                v.numer() * (&l / v.denom())
            }
        })
        .collect()
}

fn integerize<T: Scalar>(lp: &LinearProgram<T>) -> Option<IntegerProgram> {
    let mut a = Vec::with_capacity(lp.rows());
    let mut b = Vec::with_capacity(lp.rows());
    for (row, rhs) in lp.matrix().iter().zip(lp.rhs()) {
        let mut values = to_rationals(row)?;
        values.push(rhs.to_rational()?);
        let mut scaled = scale(values);
        b.push(scaled.pop().expect("rhs present"));
        a.push(scaled);
    }
    Some(IntegerProgram { a, b, c: scale(to_rationals(lp.objective())?) })
}

/// Eliminates the first `k` columns of `rows` (each row carries one extra
/// right-hand-side entry), choosing pivot rows in order. Returns the final
/// pivot `det`, the pivot row of each column and the scaled solution `X`
/// with `x = X / det`; `None` when the columns are dependent.
fn gauss_jordan(mut rows: Vec<Vec<BigInt>>, k: usize) -> Option<(BigInt, Vec<usize>, Vec<BigInt>)> {
    let mut prev = BigInt::one();
    let mut used = vec![false; rows.len()];
    let mut pivot_rows = Vec::with_capacity(k);
    for p in 0..k {
        let r = (0..rows.len()).find(|&i| !used[i] && !rows[i][p].is_zero())?;
        used[r] = true;
        pivot_rows.push(r);
        let pivot_row = rows[r].clone();
        let piv = pivot_row[p].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let factor = row[p].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                let eliminates = !factor.is_zero() && !pv.is_zero();
                if v.is_zero() && !eliminates {
                    continue;
                }
                let mut t = &piv * &*v;
                if eliminates {
                    t -= &factor * pv;
                }
                *v = if prev.is_one() { t } else { t / &prev };
            }
        }
        prev = piv;
    }
    let solution = pivot_rows.iter().map(|&r| rows[r][k].clone()).collect();
    Some((prev, pivot_rows, solution))
}

fn sign_of_ratio(num: &BigInt, den: &BigInt) -> Ordering {
    (num.signum() * den.signum()).cmp(&BigInt::zero())
}

/// The optimal solution at `basis`, if `basis` is exactly optimal.
pub(super) fn certify<T: Scalar>(lp: &LinearProgram<T>, basis: &[usize]) -> Option<OptimalSolution<T>> {
    let n = lp.cols();
    if basis.iter().any(|&j| j >= n) || basis.windows(2).any(|w| w[0] >= w[1]) {
        return None;
    }
    let ip = integerize(lp)?;
    let k = basis.len();

    let primal_rows = ip
        .a
        .iter()
        .zip(&ip.b)
        .map(|(row, rhs)| basis.iter().map(|&j| row[j].clone()).chain([rhs.clone()]).collect())
        .collect();
    let (det, selected, x_num) = gauss_jordan(primal_rows, k)?;

    let dual_rows = basis
        .iter()
        .map(|&j| selected.iter().map(|&i| ip.a[i][j].clone()).chain([ip.c[j].clone()]).collect())
        .collect();
    let (dual_det, _, y_num) = gauss_jordan(dual_rows, k)?;

    if x_num.iter().any(|x| sign_of_ratio(x, &det) == Ordering::Less) {
        return None;
    }
    for (row, rhs) in ip.a.iter().zip(&ip.b) {
        let lhs = basis.iter().zip(&x_num).fold(BigInt::zero(), |acc, (&j, x)| acc + &row[j] * x);
        if lhs != rhs * &det {
            return None;
        }
    }
    for j in 0..n {
        let aty = selected.iter().zip(&y_num).fold(BigInt::zero(), |acc, (&i, y)| acc + &ip.a[i][j] * y);
        let reduced = &ip.c[j] * &dual_det - aty;
        let ok = if basis.binary_search(&j).is_ok() {
            reduced.is_zero()
        } else {
            sign_of_ratio(&reduced, &dual_det) != Ordering::Less
        };
        if !ok {
            return None;
        }
    }

    let mut point = vec![T::zero(); n];
    for (&j, x) in basis.iter().zip(&x_num) {
        point[j] = T::from_rational(&Rational::new(x.clone(), det.clone()));
    }
    let value = lp.objective_value(&point);
    Some(OptimalSolution { value, point, basis: basis.to_vec() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    #[test]
    fn gauss_jordan_matches_cramer() {
        let rows = vec![
            vec![BigInt::from(2), BigInt::from(1), BigInt::from(5)],
            vec![BigInt::from(1), BigInt::from(3), BigInt::from(10)],
        ];
        let (det, sel, x) = gauss_jordan(rows, 2).unwrap();
        assert_eq!(sel, vec![0, 1]);
        assert_eq!(det, BigInt::from(5));
        assert_eq!(x, vec![BigInt::from(5), BigInt::from(15)]);
    }

    #[test]
    fn accepts_only_optimal_bases() {
        // min x0 + 2 x1 + 0 x2  s.t.  x0 + x1 = 1/2,  x1 + x2 = 1/3.
        let lp = LinearProgram::new(
            vec![vec![q(1, 1), q(1, 1), q(0, 1)], vec![q(0, 1), q(1, 1), q(1, 1)]],
            vec![q(1, 2), q(1, 3)],
            vec![q(1, 1), q(2, 1), q(0, 1)],
        )
        .unwrap();
        let sol = certify(&lp, &[0, 2]).unwrap();
        assert_eq!(sol.point, vec![q(1, 2), q(0, 1), q(1, 3)]);
        assert_eq!(sol.value, q(1, 2));
        // Feasible (x1 = 1/3, x0 = 1/6) but not optimal.
        assert!(certify(&lp, &[0, 1]).is_none());
        // Infeasible: x1 = 1/2 forces x2 = −1/6.
        assert!(certify(&lp, &[1, 2]).is_none());
        assert!(certify(&lp, &[2, 0]).is_none());
    }
}
