//! Dense Gaussian elimination, used to re-derive certificates independently
//! of the simplex iterations.

use crate::scalar::Scalar;

/// Solves `M x = rhs` for a possibly rank-deficient but consistent system.
/// Free variables are set to zero. Returns `None` when inconsistent.
pub fn solve_consistent<T: Scalar>(matrix: &[Vec<T>], rhs: &[T], unknowns: usize) -> Option<Vec<T>> {
    let rows = matrix.len();
    let mut m: Vec<Vec<T>> = matrix
        .iter()
        .zip(rhs)
        .map(|(row, r)| {
            let mut v = row.clone();
            v.push(r.clone());
            v
        })
        .collect();

    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..unknowns {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][col].is_negligible()) else {
            continue;
        };
        m.swap(r, p);
        let piv = m[r][col].clone();
        for v in m[r].iter_mut() {
            *v /= &piv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[col].is_negligible() {
                continue;
            }
            let factor = row[col].clone();
            for (v, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *v -= &factor.mul_ref(p);
            }
        }
        pivots.push(col);
        r += 1;
    }
    if m[r..].iter().any(|row| !row[unknowns].is_negligible()) {
        return None;
    }
    let mut x = vec![T::zero(); unknowns];
    for (i, &col) in pivots.iter().enumerate() {
        x[col] = m[i][unknowns].clone();
    }
    Some(x)
}

/// Rank of a dense matrix.
pub fn rank<T: Scalar>(matrix: &[Vec<T>]) -> usize {
    let Some(cols) = matrix.first().map(Vec::len) else {
        return 0;
    };
    let mut m = matrix.to_vec();
    let mut r = 0;
    for col in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][col].is_negligible()) else {
            continue;
        };
        m.swap(r, p);
        let pivot_row = m[r].clone();
        for row in m[r + 1..].iter_mut() {
            if row[col].is_negligible() {
                continue;
            }
            let factor = row[col].div_ref(&pivot_row[col]);
            for (v, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *v -= &factor.mul_ref(p);
            }
        }
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64) -> Rational {
        Rational::ratio(n, 1)
    }

    #[test]
    fn solves_redundant_system() {
        let m = vec![vec![q(1), q(1)], vec![q(2), q(2)], vec![q(1), q(-1)]];
        let x = solve_consistent(&m, &[q(3), q(6), q(1)], 2).unwrap();
        assert_eq!(x, vec![q(2), q(1)]);
        assert!(solve_consistent(&m, &[q(3), q(7), q(1)], 2).is_none());
    }

    #[test]
    fn rank_of_dependent_rows() {
        let m = vec![vec![q(1), q(2), q(3)], vec![q(2), q(4), q(6)], vec![q(0), q(1), q(1)]];
        assert_eq!(rank(&m), 2);
    }
}
