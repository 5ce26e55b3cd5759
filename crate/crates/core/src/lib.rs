//! Correlation boxes with two inputs and two outputs per party: CHSH
//! values, signaling, exact communication cost via linear programming,
//! unpredictability and uncertainty, plus a property-checking harness.
//!
//! The numeric core is generic over [`scalar::Scalar`]; exact rational
//! arithmetic is the default for everything that feeds a check.

pub mod boxes;
pub mod cost;
pub mod generators;
pub mod lp;
pub mod measures;
pub mod scalar;
pub mod verify;

pub use boxes::{mix, BoxError, CorrelationBox, DeterministicBox, Relabeling, SignalDirection};
pub use cost::{communication_cost, BasisKind, CostError, CostReport, Decomposition};
pub use generators::{FamilySpec, GeneratorError, RandomFamily};
pub use lp::{LinearProgram, LpSolution};
pub use scalar::{Rational, Scalar};
pub use verify::{Domain, FindingsReport, PropertyId};

pub type ExactBox = CorrelationBox<Rational>;
pub type FloatBox = CorrelationBox<f64>;
pub type Float32Box = CorrelationBox<f32>;
pub type ExactDecomposition = Decomposition<Rational>;
pub type ExactCostReport = CostReport<Rational>;
pub type ExactProgram = LinearProgram<Rational>;
pub type FloatProgram = LinearProgram<f64>;
