use std::sync::OnceLock;

use super::CorrelationBox;
use crate::scalar::Scalar;

/// Relabeling of settings, outcomes and parties.
///
/// The relabeled box is
/// `Q(A,B|a,b) = P(A ⊕ flip_alice_out[a], B ⊕ flip_bob_out[b] | a ⊕ flip_a, b ⊕ flip_b)`,
/// preceded by the party swap `P(A,B|a,b) ↦ P(B,A|b,a)` when `swap_parties` is set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Relabeling {
    pub flip_a: bool,
    pub flip_b: bool,
    /// Alice's outcome flip, indexed by the new setting `a`.
    pub flip_alice_out: [bool; 2],
    /// Bob's outcome flip, indexed by the new setting `b`.
    pub flip_bob_out: [bool; 2],
    pub swap_parties: bool,
}

impl Relabeling {
    pub fn identity() -> Self {
        Self::default()
    }

    /// Flips both parties' outcomes for every setting.
    pub fn flip_all_outputs() -> Self {
        Self { flip_alice_out: [true; 2], flip_bob_out: [true; 2], ..Self::default() }
    }

    pub fn swap() -> Self {
        Self { swap_parties: true, ..Self::default() }
    }

    /// All 128 group elements, ordered by their 7-bit encoding.
    pub fn all() -> &'static [Relabeling] {
        static ALL: OnceLock<Vec<Relabeling>> = OnceLock::new();
        ALL.get_or_init(|| (0..128u8).map(Self::from_bits).collect())
    }

    fn from_bits(bits: u8) -> Self {
        let bit = |i: u8| bits >> i & 1 == 1;
        Self {
            flip_a: bit(0),
            flip_b: bit(1),
            flip_alice_out: [bit(2), bit(3)],
            flip_bob_out: [bit(4), bit(5)],
            swap_parties: bit(6),
        }
    }

    /// `perm[i]` is the flat `(a,b,A,B)` index of `P` that lands on index `i` of the image.
    pub fn permutation(&self) -> [usize; 16] {
        std::array::from_fn(|i| {
            let (a, b, x, y) = (i >> 3 & 1, i >> 2 & 1, i >> 1 & 1, i & 1);
            let sa = a ^ self.flip_a as usize;
            let sb = b ^ self.flip_b as usize;
            let sx = x ^ self.flip_alice_out[a] as usize;
            let sy = y ^ self.flip_bob_out[b] as usize;
            if self.swap_parties {
                (sb << 3) | (sa << 2) | (sy << 1) | sx
            } else {
                (sa << 3) | (sb << 2) | (sx << 1) | sy
            }
        })
    }

    pub fn apply<T: Scalar>(&self, p: &CorrelationBox<T>) -> CorrelationBox<T> {
        let perm = self.permutation();
        let flat: Vec<&T> = p.entries().collect();
        CorrelationBox::from_columns_unchecked(std::array::from_fn(|s| {
            std::array::from_fn(|o| flat[perm[4 * s + o]].clone())
        }))
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &Relabeling) -> Relabeling {
        let p1 = first.permutation();
        let p2 = self.permutation();
        let composed: [usize; 16] = std::array::from_fn(|i| p1[p2[i]]);
        Self::from_permutation(&composed).expect("relabelings form a group")
    }

    pub fn inverse(&self) -> Relabeling {
        let p = self.permutation();
        let mut inv = [0usize; 16];
        for (i, &src) in p.iter().enumerate() {
            inv[src] = i;
        }
        Self::from_permutation(&inv).expect("relabelings form a group")
    }

    fn from_permutation(perm: &[usize; 16]) -> Option<Relabeling> {
        Self::all().iter().copied().find(|r| r.permutation() == *perm)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxes::DeterministicBox;
    use crate::scalar::Rational;
    use std::collections::HashSet;

    #[test]
    fn group_elements_are_distinct() {
        let perms: HashSet<[usize; 16]> = Relabeling::all().iter().map(|r| r.permutation()).collect();
        assert_eq!(perms.len(), 128);
    }

    #[test]
    fn identity_is_neutral() {
        let d = DeterministicBox::by_name("d5_1").unwrap().to_box::<Rational>();
        assert_eq!(Relabeling::identity().apply(&d), d);
    }

    #[test]
    fn flipping_outputs_maps_d0_0_to_d7_0() {
        let d00 = DeterministicBox::by_name("d0_0").unwrap().to_box::<Rational>();
        let d70 = DeterministicBox::by_name("d7_0").unwrap().to_box::<Rational>();
        assert_eq!(Relabeling::flip_all_outputs().apply(&d00), d70);
    }

    #[test]
    fn inverse_and_composition() {
        let d = DeterministicBox::new(117).to_box::<Rational>();
        for r in Relabeling::all() {
            assert_eq!(r.inverse().apply(&r.apply(&d)), d);
            assert_eq!(r.after(&r.inverse()), Relabeling::identity());
        }
        let r1 = Relabeling::all()[37];
        let r2 = Relabeling::all()[90];
        assert_eq!(r2.after(&r1).apply(&d), r2.apply(&r1.apply(&d)));
    }

    #[test]
    fn swap_exchanges_response_functions() {
        let d = DeterministicBox::from_fns(|a, b| a & b, |_, b| b);
        // New Alice answers with old Bob's function of the swapped inputs.
        let expect = DeterministicBox::from_fns(|a, _| a, |a, b| a & b);
        assert_eq!(Relabeling::swap().apply(&d.to_box::<Rational>()), expect.to_box());
    }
}
