//! Closed-form measures on a single box.

use serde::{Deserialize, Serialize};

use crate::boxes::CorrelationBox;
use crate::scalar::{serde_scalar, Scalar};

/// Index of the CHSH expression whose minus sign sits on `E(1,0)`.
pub const STANDARD_CHSH: usize = 2;

/// The four CHSH values `|Σ ±E(a,b)|`, entry `k` carrying the minus sign on
/// term `k` of `E(0,0), E(0,1), E(1,0), E(1,1)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Scalar"))]
pub struct ChshReport<T> {
    #[serde(serialize_with = "serde_scalar::serialize_seq")]
    pub values: [T; 4],
    #[serde(serialize_with = "serde_scalar::serialize")]
    pub lambda_max: T,
}

impl<T: Scalar> ChshReport<T> {
    /// `|E(0,0) + E(0,1) − E(1,0) + E(1,1)|`.
    pub fn standard(&self) -> &T {
        &self.values[STANDARD_CHSH]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Scalar"))]
pub struct SignalReport<T> {
    #[serde(rename = "s_AtoB", serialize_with = "serde_scalar::serialize")]
    pub s_a_to_b: T,
    #[serde(rename = "s_BtoA", serialize_with = "serde_scalar::serialize")]
    pub s_b_to_a: T,
    #[serde(serialize_with = "serde_scalar::serialize")]
    pub s: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnpredictabilityVariant {
    /// `max_{a,b} min_o min(P(o=0|a,b), 1 − P(o=0|a,b))`.
    #[default]
    Formula,
    /// Maximum over parties of each party's own `max_{a,b}` value.
    PerParty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Party {
    A,
    B,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Scalar"))]
pub struct UncertaintyReport<T> {
    /// `Δ_A^a` for `a = 0, 1`.
    #[serde(serialize_with = "serde_scalar::serialize_seq")]
    pub delta_a: [T; 2],
    /// `Δ_B^b` for `b = 0, 1`.
    #[serde(serialize_with = "serde_scalar::serialize_seq")]
    pub delta_b: [T; 2],
    #[serde(rename = "u_A", serialize_with = "serde_scalar::serialize")]
    pub u_a: T,
    #[serde(rename = "u_B", serialize_with = "serde_scalar::serialize")]
    pub u_b: T,
}

impl<T: Scalar> UncertaintyReport<T> {
    pub fn delta(&self, party: Party, setting: usize) -> &T {
        match party {
            Party::A => &self.delta_a[setting],
            Party::B => &self.delta_b[setting],
        }
    }

    pub fn total(&self, party: Party) -> &T {
        match party {
            Party::A => &self.u_a,
            Party::B => &self.u_b,
        }
    }
}

fn min_with_complement<T: Scalar>(p: &T) -> T {
    let c = T::one().sub_ref(p);
    T::min_of(p, &c)
}

fn max_all<T: Scalar>(xs: impl IntoIterator<Item = T>) -> T {
    xs.into_iter().fold(T::zero(), |acc, x| T::max_of(&acc, &x))
}

pub fn correlators<T: Scalar>(p: &CorrelationBox<T>) -> [T; 4] {
    std::array::from_fn(|s| p.correlator(s >> 1, s & 1))
}

pub fn chsh<T: Scalar>(p: &CorrelationBox<T>) -> ChshReport<T> {
    let e = correlators(p);
    let total = e.iter().fold(T::zero(), |acc, x| acc.add_ref(x));
    let values: [T; 4] = std::array::from_fn(|k| {
        let mut v = total.clone();
        v -= &e[k];
        v -= &e[k];
        v.abs()
    });
    let lambda_max = max_all(values.iter().cloned());
    ChshReport { values, lambda_max }
}

pub fn signal<T: Scalar>(p: &CorrelationBox<T>) -> SignalReport<T> {
    let s_a_to_b = max_all((0..2).map(|b| p.bob_zero(0, b).sub_ref(&p.bob_zero(1, b)).abs()));
    let s_b_to_a = max_all((0..2).map(|a| p.alice_zero(a, 0).sub_ref(&p.alice_zero(a, 1)).abs()));
    let s = T::max_of(&s_a_to_b, &s_b_to_a);
    SignalReport { s_a_to_b, s_b_to_a, s }
}

pub fn unpredictability<T: Scalar>(p: &CorrelationBox<T>, variant: UnpredictabilityVariant) -> T {
    let alice = |a, b| min_with_complement(&p.alice_zero(a, b));
    let bob = |a, b| min_with_complement(&p.bob_zero(a, b));
    let settings = || (0..4).map(|s| (s >> 1, s & 1));
    match variant {
        UnpredictabilityVariant::Formula => {
            max_all(settings().map(|(a, b)| T::min_of(&alice(a, b), &bob(a, b))))
        }
        UnpredictabilityVariant::PerParty => {
            let ia = max_all(settings().map(|(a, b)| alice(a, b)));
            let ib = max_all(settings().map(|(a, b)| bob(a, b)));
            T::max_of(&ia, &ib)
        }
    }
}

pub fn uncertainty<T: Scalar>(p: &CorrelationBox<T>) -> UncertaintyReport<T> {
    let delta_a: [T; 2] =
        std::array::from_fn(|a| max_all((0..2).map(|b| min_with_complement(&p.alice_zero(a, b)))));
    let delta_b: [T; 2] =
        std::array::from_fn(|b| max_all((0..2).map(|a| min_with_complement(&p.bob_zero(a, b)))));
    let u_a = delta_a[0].add_ref(&delta_a[1]);
    let u_b = delta_b[0].add_ref(&delta_b[1]);
    UncertaintyReport { delta_a, delta_b, u_a, u_b }
}

/// Deterministic LHV model exists: no signal and every CHSH value at most 2.
pub fn lhv_admissible<T: Scalar>(p: &CorrelationBox<T>) -> bool {
    if signal(p).s.is_positive_tol() {
        return false;
    }
    let two = T::two();
    chsh(p).values.iter().all(|v| v.cmp_tol(&two) != std::cmp::Ordering::Greater)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxes::{mix, DeterministicBox, LOCAL_NAMED, ONE_WAY_NAMED};
    use crate::scalar::Rational;
    use num_traits::Signed;

    fn q(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    fn named(name: &str) -> CorrelationBox<Rational> {
        DeterministicBox::by_name(name).unwrap().to_box()
    }

    fn pair(p: Rational, x: &str, y: &str) -> CorrelationBox<Rational> {
        let qq = q(1, 1) - &p;
        mix(&[(p, &named(x)), (qq, &named(y))]).unwrap()
    }

    fn pr() -> CorrelationBox<Rational> {
        pair(q(1, 2), "d0_1", "d3_1")
    }

    #[test]
    fn named_tables_hit_two_and_four() {
        for (name, _) in LOCAL_NAMED {
            assert_eq!(*chsh(&named(name)).standard(), q(2, 1), "{name}");
        }
        for (name, _) in ONE_WAY_NAMED {
            assert_eq!(*chsh(&named(name)).standard(), q(4, 1), "{name}");
        }
        let noise = chsh(&CorrelationBox::<Rational>::uniform());
        assert!(noise.values.iter().all(|v| *v == q(0, 1)));
    }

    #[test]
    fn signal_of_mixtures() {
        assert_eq!(signal(&named("d4_0")).s, q(0, 1));
        for k in 0..=10 {
            let p = q(k, 10);
            let not_p = q(1, 1) - &p;
            assert_eq!(signal(&pair(p.clone(), "d0_1", "d2_1")).s, Rational::max_of(&p, &not_p));
            assert_eq!(signal(&pair(p.clone(), "d0_1", "d3_1")).s, (&p - &not_p).abs());
        }
    }

    #[test]
    fn unpredictability_examples() {
        for v in [UnpredictabilityVariant::Formula, UnpredictabilityVariant::PerParty] {
            assert_eq!(unpredictability(&named("d6_1"), v), q(0, 1));
            assert_eq!(unpredictability(&pr(), v), q(1, 2));
        }
        let m = pair(q(1, 2), "d0_1", "d2_1");
        assert_eq!(unpredictability(&m, UnpredictabilityVariant::Formula), q(1, 2));
    }

    #[test]
    fn formula_variant_is_at_most_per_party() {
        // A deterministic, B fair coin: formula gives 0, per-party gives 1/2.
        let d = named("d0_0");
        let flipped = DeterministicBox::from_fns(|_, _| 0, |_, _| 1).to_box();
        let m = mix(&[(q(1, 2), &d), (q(1, 2), &flipped)]).unwrap();
        assert_eq!(unpredictability(&m, UnpredictabilityVariant::Formula), q(0, 1));
        assert_eq!(unpredictability(&m, UnpredictabilityVariant::PerParty), q(1, 2));
    }

    #[test]
    fn uncertainty_examples() {
        for k in 0..=5 {
            let p0 = q(k, 10);
            let u = uncertainty(&pair(p0.clone(), "d0_1", "d2_1"));
            assert_eq!(u.delta_a[0], q(0, 1));
            assert_eq!(u.delta_a[1], p0);
            assert_eq!(u.u_a, p0);
        }
        let u = uncertainty(&pr());
        assert_eq!(u.u_a, q(1, 1));
        assert_eq!(u.u_b, q(1, 1));
        for id in [0u8, 77, 138, 255] {
            let u = uncertainty(&DeterministicBox::new(id).to_box::<Rational>());
            assert_eq!((u.u_a, u.u_b), (q(0, 1), q(0, 1)));
        }
    }

    #[test]
    fn lhv_examples() {
        assert!(lhv_admissible(&CorrelationBox::<Rational>::uniform()));
        assert!(!lhv_admissible(&pr()));
        assert!(!lhv_admissible(&named("d0_1")));
        assert!(lhv_admissible(&named("d3_0")));
    }

    #[test]
    fn float_instantiation_agrees() {
        let exact = pr();
        let approx = exact.map(|v| v.to_f64_lossy());
        assert!((chsh(&approx).lambda_max - 4.0).abs() < 1e-12);
        assert!(signal(&approx).s.abs() < 1e-12);
    }
}
