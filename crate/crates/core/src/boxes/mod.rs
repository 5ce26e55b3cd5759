//! Two-input/two-output bipartite correlation boxes.
//!
//! A box stores `P(A,B|a,b)` as four setting columns of four outcome
//! probabilities. Setting index is `2a + b`, outcome index is `2A + B`, and
//! the flat 16-entry order is `(a,b,A,B)` with `a` most significant.
//!
//! Outcome bits map to CHSH outcomes by `x ↦ (-1)^x`.

mod deterministic;
mod format;
mod relabel;

pub use deterministic::{
    classify, enumerate_deterministic, DeterministicBox, SignalDirection, LOCAL_NAMED,
    ONE_WAY_NAMED,
};
pub use format::{box_from_json, box_from_value, box_to_json, box_to_value, BoxFormatError, BOX_FORMAT};
pub use relabel::Relabeling;

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoxError {
    #[error("negative probability at a={a}, b={b}, A={x}, B={y}")]
    NegativeEntry { a: usize, b: usize, x: usize, y: usize },
    #[error("setting column a={a}, b={b} sums to {sum} instead of 1")]
    NotNormalized { a: usize, b: usize, sum: String },
    #[error("mixture weights must be nonnegative and sum to 1 (got sum {sum})")]
    BadWeights { sum: String },
}

#[inline]
pub const fn setting_index(a: usize, b: usize) -> usize {
    2 * a + b
}

#[inline]
pub const fn outcome_index(x: usize, y: usize) -> usize {
    2 * x + y
}

/// A conditional distribution `P(A,B|a,b)` over bits.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CorrelationBox<T> {
    p: [[T; 4]; 4],
}

impl<T: Scalar> CorrelationBox<T> {
    /// Builds a box from 16 entries in `(a,b,A,B)` order.
    pub fn from_table(entries: [T; 16]) -> Result<Self, BoxError> {
        let mut it = entries.into_iter();
        let p = std::array::from_fn(|_| std::array::from_fn(|_| it.next().expect("16 entries")));
        Self::from_columns(p)
    }

    /// Builds a box from columns indexed `[2a+b][2A+B]`.
    pub fn from_columns(p: [[T; 4]; 4]) -> Result<Self, BoxError> {
        for (s, col) in p.iter().enumerate() {
            let mut sum = T::zero();
            for (o, v) in col.iter().enumerate() {
                if v.is_negative_tol() {
                    return Err(BoxError::NegativeEntry { a: s >> 1, b: s & 1, x: o >> 1, y: o & 1 });
                }
                sum += v;
            }
            if !sum.approx_eq(&T::one()) {
                return Err(BoxError::NotNormalized { a: s >> 1, b: s & 1, sum: sum.render() });
            }
        }
        Ok(Self { p })
    }

    /// Skips validation. Callers guarantee the invariants.
    pub(crate) fn from_columns_unchecked(p: [[T; 4]; 4]) -> Self {
        Self { p }
    }

    /// Maximally mixed box: every entry `1/4`.
    pub fn uniform() -> Self {
        let q = T::ratio(1, 4);
        Self { p: std::array::from_fn(|_| std::array::from_fn(|_| q.clone())) }
    }

    /// Box putting all mass on `outcomes[2a+b]` (an outcome index) per setting.
    pub fn point_masses(outcomes: [usize; 4]) -> Self {
        Self {
            p: std::array::from_fn(|s| {
                std::array::from_fn(|o| if o == outcomes[s] { T::one() } else { T::zero() })
            }),
        }
    }

    pub fn prob(&self, a: usize, b: usize, x: usize, y: usize) -> &T {
        &self.p[setting_index(a, b)][outcome_index(x, y)]
    }

    pub fn columns(&self) -> &[[T; 4]; 4] {
        &self.p
    }

    pub fn column(&self, a: usize, b: usize) -> &[T; 4] {
        &self.p[setting_index(a, b)]
    }

    /// Entries in `(a,b,A,B)` order.
    pub fn entries(&self) -> impl Iterator<Item = &T> + '_ {
        self.p.iter().flatten()
    }

    /// `E(a,b) = Σ (-1)^(A⊕B) P(A,B|a,b)`.
    pub fn correlator(&self, a: usize, b: usize) -> T {
        let col = self.column(a, b);
        let mut e = col[0].add_ref(&col[3]);
        e -= &col[1];
        e -= &col[2];
        e
    }

    /// `P(A=0|a,b)`.
    pub fn alice_zero(&self, a: usize, b: usize) -> T {
        let col = self.column(a, b);
        col[0].add_ref(&col[1])
    }

    /// `P(B=0|a,b)`.
    pub fn bob_zero(&self, a: usize, b: usize) -> T {
        let col = self.column(a, b);
        col[0].add_ref(&col[2])
    }

    /// Exact marginal equalities: Alice's marginal ignores `b`, Bob's ignores `a`.
    pub fn is_no_signaling(&self) -> bool {
        (0..2).all(|a| self.alice_zero(a, 0).approx_eq(&self.alice_zero(a, 1)))
            && (0..2).all(|b| self.bob_zero(0, b).approx_eq(&self.bob_zero(1, b)))
    }

    /// Entrywise image under `f`; no validation.
    pub fn map<U, F: FnMut(&T) -> U>(&self, mut f: F) -> CorrelationBox<U> {
        CorrelationBox { p: std::array::from_fn(|s| std::array::from_fn(|o| f(&self.p[s][o]))) }
    }

    pub fn relabel(&self, r: &Relabeling) -> Self {
        r.apply(self)
    }
}

impl<T: Scalar> Default for CorrelationBox<T> {
    fn default() -> Self {
        Self::uniform()
    }
}

/// Convex combination `Σ w_i P_i`.
pub fn mix<T: Scalar>(terms: &[(T, &CorrelationBox<T>)]) -> Result<CorrelationBox<T>, BoxError> {
    let mut total = T::zero();
    for (w, _) in terms {
        if w.is_negative_tol() {
            return Err(BoxError::BadWeights { sum: w.render() });
        }
        total += w;
    }
    if !total.approx_eq(&T::one()) {
        return Err(BoxError::BadWeights { sum: total.render() });
    }
    let mut p: [[T; 4]; 4] = std::array::from_fn(|_| std::array::from_fn(|_| T::zero()));
    for (w, b) in terms {
        if w.is_zero() {
            continue;
        }
        for (dst, src) in p.iter_mut().flatten().zip(b.entries()) {
            *dst += &w.mul_ref(src);
        }
    }
    Ok(CorrelationBox::from_columns_unchecked(p))
}
