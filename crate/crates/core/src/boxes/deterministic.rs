use serde::{Deserialize, Serialize};

use super::{outcome_index, CorrelationBox};
use crate::scalar::Scalar;

/// Named local strategies `d^{λ_0}`, `λ = 0..7`, with their ids.
pub const LOCAL_NAMED: [(&str, u8); 8] = [
    ("d0_0", 0),
    ("d1_0", 48),
    ("d2_0", 10),
    ("d3_0", 202),
    ("d4_0", 53),
    ("d5_0", 245),
    ("d6_0", 207),
    ("d7_0", 255),
];

/// Named one-way strategies `d^{λ_1}`, `λ = 0..7`. The first four signal
/// from Alice to Bob, the last four from Bob to Alice.
pub const ONE_WAY_NAMED: [(&str, u8); 8] = [
    ("d0_1", 2),
    ("d1_1", 206),
    ("d2_1", 49),
    ("d3_1", 253),
    ("d4_1", 32),
    ("d5_1", 138),
    ("d6_1", 117),
    ("d7_1", 223),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalDirection {
    None,
    AtoB,
    BtoA,
    Both,
}

/// A pair of response functions `A = f(a,b)`, `B = g(a,b)`.
///
/// The id packs both truth tables as `16·f + g`, each table read with
/// `(a,b) = (0,0)` in the most significant of its four bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DeterministicBox {
    id: u8,
}

impl DeterministicBox {
    pub const fn new(id: u8) -> Self {
        Self { id }
    }

    /// Panics if either table exceeds four bits.
    pub fn from_tables(alice: u8, bob: u8) -> Self {
        assert!(alice < 16 && bob < 16, "truth tables are 4-bit");
        Self { id: (alice << 4) | bob }
    }

    /// Builds the strategy from closures over `(a, b)`.
    pub fn from_fns(f: impl Fn(usize, usize) -> usize, g: impl Fn(usize, usize) -> usize) -> Self {
        let table = |h: &dyn Fn(usize, usize) -> usize| {
            (0..4).fold(0u8, |acc, s| (acc << 1) | (h(s >> 1, s & 1) & 1) as u8)
        };
        Self::from_tables(table(&f), table(&g))
    }

    pub const fn id(self) -> u8 {
        self.id
    }

    pub const fn alice_table(self) -> u8 {
        self.id >> 4
    }

    pub const fn bob_table(self) -> u8 {
        self.id & 0x0f
    }

    pub fn alice_output(self, a: usize, b: usize) -> usize {
        ((self.alice_table() >> (3 - (2 * a + b))) & 1) as usize
    }

    pub fn bob_output(self, a: usize, b: usize) -> usize {
        ((self.bob_table() >> (3 - (2 * a + b))) & 1) as usize
    }

    /// Outcome index `2A+B` produced at setting `2a+b`.
    pub fn outcome_at(self, setting: usize) -> usize {
        let (a, b) = (setting >> 1, setting & 1);
        outcome_index(self.alice_output(a, b), self.bob_output(a, b))
    }

    pub fn alice_depends_on_b(self) -> bool {
        (0..2).any(|a| self.alice_output(a, 0) != self.alice_output(a, 1))
    }

    pub fn bob_depends_on_a(self) -> bool {
        (0..2).any(|b| self.bob_output(0, b) != self.bob_output(1, b))
    }

    pub fn direction(self) -> SignalDirection {
        match (self.bob_depends_on_a(), self.alice_depends_on_b()) {
            (false, false) => SignalDirection::None,
            (true, false) => SignalDirection::AtoB,
            (false, true) => SignalDirection::BtoA,
            (true, true) => SignalDirection::Both,
        }
    }

    /// Bits of communication needed to simulate the strategy: 0, 1 or 2.
    pub fn cost_bits(self) -> u8 {
        self.bob_depends_on_a() as u8 + self.alice_depends_on_b() as u8
    }

    pub fn is_local(self) -> bool {
        self.cost_bits() == 0
    }

    pub fn to_box<T: Scalar>(self) -> CorrelationBox<T> {
        CorrelationBox::point_masses(std::array::from_fn(|s| self.outcome_at(s)))
    }

    /// Conventional name (`d3_1`, ...) when the strategy is one of the sixteen named ones.
    pub fn name(self) -> Option<&'static str> {
        LOCAL_NAMED
            .iter()
            .chain(ONE_WAY_NAMED.iter())
            .find(|(_, id)| *id == self.id)
            .map(|(n, _)| *n)
    }

    pub fn by_name(name: &str) -> Option<Self> {
        LOCAL_NAMED
            .iter()
            .chain(ONE_WAY_NAMED.iter())
            .find(|(n, _)| *n == name)
            .map(|(_, id)| Self::new(*id))
    }
}

/// All 256 strategies in id order.
pub fn enumerate_deterministic() -> Vec<DeterministicBox> {
    (0..=255u8).map(DeterministicBox::new).collect()
}

pub fn classify(d: DeterministicBox) -> (u8, SignalDirection) {
    (d.cost_bits(), d.direction())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    /// Rows `ab = 00, 01, 10, 11`, one `AB` pair per named column.
    const LOCAL_ROWS: [&str; 4] = [
        "00 00 01 11 00 10 11 11",
        "00 00 00 10 01 11 11 11",
        "00 10 01 01 10 10 01 11",
        "00 10 00 00 11 11 01 11",
    ];
    const ONE_WAY_ROWS: [&str; 4] = [
        "00 11 00 11 00 11 00 11",
        "00 11 00 11 00 00 11 11",
        "01 01 10 10 10 01 10 01",
        "00 00 11 11 00 00 11 11",
    ];

    fn ids_from_rows(rows: [&str; 4]) -> Vec<u8> {
        let cells: Vec<Vec<&str>> = rows.iter().map(|r| r.split(' ').collect()).collect();
        (0..8)
            .map(|col| {
                let (mut f, mut g) = (0u8, 0u8);
                for row in &cells {
                    let bits = row[col].as_bytes();
                    f = (f << 1) | (bits[0] - b'0');
                    g = (g << 1) | (bits[1] - b'0');
                }
                DeterministicBox::from_tables(f, g).id()
            })
            .collect()
    }

    #[test]
    fn named_tables_match_row_patterns() {
        let local: Vec<u8> = LOCAL_NAMED.iter().map(|(_, id)| *id).collect();
        let one_way: Vec<u8> = ONE_WAY_NAMED.iter().map(|(_, id)| *id).collect();
        assert_eq!(ids_from_rows(LOCAL_ROWS), local);
        assert_eq!(ids_from_rows(ONE_WAY_ROWS), one_way);
    }

    #[test]
    fn algebraic_forms_of_first_four_one_way() {
        let cases: [(&str, DeterministicBox); 4] = [
            ("d0_1", DeterministicBox::from_fns(|_, _| 0, |a, b| a & (b ^ 1))),
            ("d3_1", DeterministicBox::from_fns(|_, _| 1, |a, b| (a & (b ^ 1)) ^ 1)),
            ("d2_1", DeterministicBox::from_fns(|a, _| a, |a, b| a & b)),
            ("d1_1", DeterministicBox::from_fns(|a, _| a ^ 1, |a, b| (a & b) ^ 1)),
        ];
        for (name, d) in cases {
            assert_eq!(DeterministicBox::by_name(name), Some(d), "{name}");
            assert_eq!(d.direction(), SignalDirection::AtoB);
        }
    }

    #[test]
    fn census() {
        let all = enumerate_deterministic();
        assert_eq!(all.len(), 256);
        let count = |dir| all.iter().filter(|d| d.direction() == dir).count();
        assert_eq!(count(SignalDirection::None), 16);
        assert_eq!(count(SignalDirection::AtoB), 48);
        assert_eq!(count(SignalDirection::BtoA), 48);
        assert_eq!(count(SignalDirection::Both), 144);
        assert_eq!(all.iter().filter(|d| d.cost_bits() >= 1).count(), 240);
    }

    #[test]
    fn classification_examples() {
        let d40 = DeterministicBox::by_name("d4_0").unwrap();
        assert_eq!(d40, DeterministicBox::from_fns(|a, _| a, |_, b| b));
        assert_eq!(classify(d40), (0, SignalDirection::None));
        let d01 = DeterministicBox::by_name("d0_1").unwrap();
        assert_eq!(classify(d01), (1, SignalDirection::AtoB));
        let swap = DeterministicBox::from_fns(|_, b| b, |a, _| a);
        assert_eq!(classify(swap), (2, SignalDirection::Both));
    }

    #[test]
    fn boxes_are_point_masses() {
        for d in enumerate_deterministic() {
            let b: CorrelationBox<Rational> = d.to_box();
            for col in b.columns() {
                assert_eq!(col.iter().filter(|v| **v == Rational::ratio(1, 1)).count(), 1);
                assert_eq!(col.iter().filter(|v| **v == Rational::ratio(0, 1)).count(), 3);
            }
        }
    }

    #[test]
    fn one_way_named_split_by_direction() {
        for (i, (name, id)) in ONE_WAY_NAMED.iter().enumerate() {
            let d = DeterministicBox::new(*id);
            let want = if i < 4 { SignalDirection::AtoB } else { SignalDirection::BtoA };
            assert_eq!(d.direction(), want, "{name}");
            assert_eq!(d.cost_bits(), 1);
        }
        for (_, id) in LOCAL_NAMED {
            assert!(DeterministicBox::new(id).is_local());
        }
    }
}
