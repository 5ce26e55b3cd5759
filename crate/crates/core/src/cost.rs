//! Communication cost: the cheapest decomposition of a box into
//! deterministic strategies, with each strategy charged its bit cost.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::boxes::{mix, CorrelationBox, DeterministicBox, LOCAL_NAMED, ONE_WAY_NAMED};
use crate::lp::{self, AlternativeSearch, LinearProgram, LpError, LpSolution, OptimalSolution};
use crate::measures::{chsh, signal};
use crate::scalar::{format_rational, Rational, Scalar};

/// Strategy family the decomposition may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisKind {
    /// All 256 deterministic strategies, costing 0, 1 or 2 bits.
    #[default]
    Full256,
    /// The eight named local and eight named one-way strategies.
    Chsh16,
}

impl BasisKind {
    pub fn strategies(self) -> Vec<DeterministicBox> {
        match self {
            BasisKind::Full256 => crate::boxes::enumerate_deterministic(),
            BasisKind::Chsh16 => LOCAL_NAMED
                .iter()
                .chain(ONE_WAY_NAMED.iter())
                .map(|(_, id)| DeterministicBox::new(*id))
                .collect(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BasisKind::Full256 => "full256",
            BasisKind::Chsh16 => "chsh16",
        }
    }
}

impl std::str::FromStr for BasisKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "full256" => Ok(BasisKind::Full256),
            "chsh16" => Ok(BasisKind::Chsh16),
            other => Err(format!("unknown basis {other:?} (expected full256 or chsh16)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CostError {
    #[error("box lies outside the hull of the {0} strategies")]
    NotInHull(&'static str),
    #[error("dimension must be at least 2, got {0}")]
    BadDimension(u32),
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// Nonnegative weights over deterministic strategies.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition<T> {
    pub weights: BTreeMap<u8, T>,
    pub basis: BasisKind,
    pub cost: T,
}

impl<T: Scalar> Decomposition<T> {
    pub fn support(&self) -> BTreeSet<u8> {
        self.weights.keys().copied().collect()
    }

    /// `Σ w_λ d^λ`.
    pub fn reconstruct(&self) -> Result<CorrelationBox<T>, crate::boxes::BoxError> {
        let boxes: Vec<(T, CorrelationBox<T>)> = self
            .weights
            .iter()
            .map(|(id, w)| (w.clone(), DeterministicBox::new(*id).to_box()))
            .collect();
        let terms: Vec<(T, &CorrelationBox<T>)> = boxes.iter().map(|(w, b)| (w.clone(), b)).collect();
        mix(&terms)
    }

    /// `Σ w_λ · cost_bits(λ)`.
    pub fn weighted_cost(&self) -> T {
        self.weights.iter().fold(T::zero(), |acc, (id, w)| {
            let bits = T::from_u8(DeterministicBox::new(*id).cost_bits()).expect("small integer");
            acc.add_ref(&w.mul_ref(&bits))
        })
    }
}

#[derive(Serialize, Deserialize)]
struct DecompositionDocument {
    basis: BasisKind,
    cost: String,
    weights: BTreeMap<u8, String>,
}

impl Decomposition<Rational> {
    /// `{"basis":..,"cost":"num/den","weights":{"<id>":"num/den",..}}`, ids ascending.
    pub fn to_json_value(&self) -> serde_json::Value {
        let doc = DecompositionDocument {
            basis: self.basis,
            cost: format_rational(&self.cost),
            weights: self.weights.iter().map(|(id, w)| (*id, format_rational(w))).collect(),
        };
        serde_json::to_value(doc).expect("decompositions serialize")
    }

    pub fn from_json_value(v: &serde_json::Value) -> Result<Self, String> {
        let doc: DecompositionDocument = serde_json::from_value(v.clone()).map_err(|e| e.to_string())?;
        let parse = |s: &str| crate::scalar::parse_rational(s).map_err(|e| e.to_string());
        Ok(Self {
            basis: doc.basis,
            cost: parse(&doc.cost)?,
            weights: doc
                .weights
                .iter()
                .map(|(id, w)| Ok((*id, parse(w)?)))
                .collect::<Result<_, String>>()?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CostReport<T> {
    pub c: T,
    pub eta: T,
    pub s: T,
    pub decomposition: Decomposition<T>,
    /// `max(0, (Λ_max − 2)/2)`.
    pub lower_bound: T,
}

/// Cost LP for one box, with the strategies behind each column.
///
/// Strategies that put mass on a zero entry of the box are dropped, as are
/// the constraint rows of zero entries; neither can carry weight.
pub struct CostProgram<T> {
    pub program: LinearProgram<T>,
    pub strategies: Vec<DeterministicBox>,
    pub basis: BasisKind,
}

pub fn cost_program<T: Scalar>(p: &CorrelationBox<T>, basis: BasisKind) -> Result<CostProgram<T>, CostError> {
    let flat: Vec<&T> = p.entries().collect();
    let live_rows: Vec<usize> = (0..16).filter(|&i| !flat[i].is_negligible()).collect();
    let strategies: Vec<DeterministicBox> = basis
        .strategies()
        .into_iter()
        .filter(|d| (0..4).all(|s| !flat[4 * s + d.outcome_at(s)].is_negligible()))
        .collect();
    if strategies.is_empty() {
        return Err(CostError::NotInHull(basis.as_str()));
    }
    let matrix = live_rows
        .iter()
        .map(|&i| {
            let (s, o) = (i / 4, i % 4);
            strategies.iter().map(|d| if d.outcome_at(s) == o { T::one() } else { T::zero() }).collect()
        })
        .collect();
    let rhs = live_rows.iter().map(|&i| flat[i].clone()).collect();
    let objective = strategies
        .iter()
        .map(|d| T::from_u8(d.cost_bits()).expect("small integer"))
        .collect();
    Ok(CostProgram { program: LinearProgram::new(matrix, rhs, objective)?, strategies, basis })
}

impl<T: Scalar> CostProgram<T> {
    pub fn decomposition(&self, sol: &OptimalSolution<T>) -> Decomposition<T> {
        let weights = sol
            .point
            .iter()
            .zip(&self.strategies)
            .filter(|(w, _)| !w.is_negligible())
            .map(|(w, d)| (d.id(), w.clone()))
            .collect();
        Decomposition { weights, basis: self.basis, cost: sol.value.clone() }
    }

    pub fn solve(&self) -> Result<OptimalSolution<T>, CostError> {
        match lp::solve(&self.program) {
            LpSolution::Optimal(sol) => Ok(sol),
            // Costs are nonnegative, so an unbounded outcome cannot occur.
            LpSolution::Infeasible | LpSolution::Unbounded => Err(CostError::NotInHull(self.basis.as_str())),
        }
    }
}

/// `max(0, (Λ_max − 2)/2)`, the cost implied by the CHSH violation alone.
pub fn chsh_lower_bound<T: Scalar>(p: &CorrelationBox<T>) -> T {
    let excess = chsh(p).lambda_max.sub_ref(&T::two()).div_ref(&T::two());
    T::max_of(&T::zero(), &excess)
}

pub fn communication_cost<T: Scalar>(
    p: &CorrelationBox<T>,
    basis: BasisKind,
) -> Result<CostReport<T>, CostError> {
    let program = cost_program(p, basis)?;
    let sol = program.solve()?;
    let decomposition = program.decomposition(&sol);
    let s = signal(p).s;
    let c = sol.value;
    Ok(CostReport { eta: c.sub_ref(&s), c, s, decomposition, lower_bound: chsh_lower_bound(p) })
}

/// `C − log₂ d`, with `C` from the full basis.
pub fn eta_star<T: Scalar>(p: &CorrelationBox<T>, d: u32) -> Result<f64, CostError> {
    if d < 2 {
        return Err(CostError::BadDimension(d));
    }
    let c = communication_cost(p, BasisKind::Full256)?.c;
    Ok(c.to_f64_lossy() - f64::from(d).log2())
}

pub type DecompositionPair<T> = (Decomposition<T>, Decomposition<T>);

/// Two optimal decompositions with different supports, preferring disjoint ones.
pub fn find_distinct_decompositions<T: Scalar>(
    p: &CorrelationBox<T>,
    basis: BasisKind,
) -> Result<Option<DecompositionPair<T>>, CostError> {
    let program = cost_program(p, basis)?;
    let first = program.solve()?;
    let search = AlternativeSearch { prefer_disjoint: true, ..AlternativeSearch::default() };
    let alt = lp::find_alternative_vertex_with(&program.program, &first, search)?;
    Ok(alt.map(|second| (program.decomposition(&first), program.decomposition(&second))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    fn named(name: &str) -> CorrelationBox<Rational> {
        DeterministicBox::by_name(name).unwrap().to_box()
    }

    fn pr() -> CorrelationBox<Rational> {
        mix(&[(q(1, 2), &named("d0_1")), (q(1, 2), &named("d3_1"))]).unwrap()
    }

    #[test]
    fn local_boxes_cost_nothing() {
        for id in 0..=255u8 {
            let d = DeterministicBox::new(id);
            let r = communication_cost(&d.to_box::<Rational>(), BasisKind::Full256).unwrap();
            assert_eq!(r.c, Rational::from_integer(d.cost_bits().into()), "id {id}");
            if d.is_local() {
                assert_eq!(r.eta, q(0, 1));
            }
        }
    }

    #[test]
    fn pr_box_costs_one_bit() {
        for basis in [BasisKind::Full256, BasisKind::Chsh16] {
            let r = communication_cost(&pr(), basis).unwrap();
            assert_eq!((r.c.clone(), r.s.clone(), r.eta.clone()), (q(1, 1), q(0, 1), q(1, 1)));
            assert_eq!(r.lower_bound, q(1, 1));
            assert_eq!(r.decomposition.reconstruct().unwrap(), pr());
            assert_eq!(r.decomposition.weighted_cost(), r.c);
        }
    }

    #[test]
    fn chsh16_rejects_boxes_outside_its_hull() {
        let two_way = DeterministicBox::from_fns(|_, b| b, |a, _| a).to_box::<Rational>();
        assert_eq!(communication_cost(&two_way, BasisKind::Chsh16), Err(CostError::NotInHull("chsh16")));
    }

    #[test]
    fn eta_star_values() {
        assert_eq!(eta_star(&pr(), 2).unwrap(), 0.0);
        assert_eq!(eta_star(&named("d0_0"), 2).unwrap(), -1.0);
        assert_eq!(eta_star(&pr(), 1), Err(CostError::BadDimension(1)));
    }

    #[test]
    fn deterministic_boxes_have_unique_decomposition() {
        for name in ["d0_0", "d5_1"] {
            assert_eq!(find_distinct_decompositions(&named(name), BasisKind::Full256).unwrap(), None);
        }
    }

    #[test]
    fn uniform_noise_has_disjoint_optimal_decompositions() {
        let noise = CorrelationBox::<Rational>::uniform();
        let (first, second) = find_distinct_decompositions(&noise, BasisKind::Full256).unwrap().unwrap();
        assert!(first.support().is_disjoint(&second.support()));
        for d in [&first, &second] {
            assert_eq!(d.cost, q(0, 1));
            assert_eq!(d.reconstruct().unwrap(), noise);
            assert!(d.support().iter().all(|&id| DeterministicBox::new(id).is_local()));
        }
    }

    #[test]
    fn isotropic_costs() {
        // v·PR + (1−v)·noise; cost max(0, 2v − 1).
        let noise = CorrelationBox::<Rational>::uniform();
        for (v, c) in [(q(1, 4), q(0, 1)), (q(1, 2), q(0, 1)), (q(3, 4), q(1, 2)), (q(1, 1), q(1, 1))] {
            let p = mix(&[(v.clone(), &pr()), (q(1, 1) - &v, &noise)]).unwrap();
            let r = communication_cost(&p, BasisKind::Full256).unwrap();
            assert_eq!(r.c, c);
            assert_eq!(r.lower_bound, c);
        }
    }

    #[test]
    fn decomposition_json_shape() {
        let r = communication_cost(&named("d5_1"), BasisKind::Full256).unwrap();
        let v = r.decomposition.to_json_value();
        assert_eq!(v.to_string(), r#"{"basis":"full256","cost":"1/1","weights":{"138":"1/1"}}"#);
        assert_eq!(Decomposition::from_json_value(&v).unwrap(), r.decomposition);
    }
}
