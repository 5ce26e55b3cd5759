//! Property checks for single boxes, seeded fuzzing over box families, and
//! the reproduction report.

use std::collections::BTreeMap;

use num_traits::Signed;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boxes::{
    box_from_value, box_to_value, enumerate_deterministic, mix, BoxFormatError, CorrelationBox, DeterministicBox,
    SignalDirection, LOCAL_NAMED, ONE_WAY_NAMED,
};
use crate::cost::{communication_cost, find_distinct_decompositions, BasisKind, CostError, Decomposition};
use crate::generators::{canonical, no_signaling_vertices, pr_variants, sample, FamilySpec, GeneratorError, RandomFamily};
use crate::measures::{chsh, signal, uncertainty, unpredictability, Party, UnpredictabilityVariant};
use crate::scalar::{format_rational, serde_rational, Rational, Scalar};

pub const FINDINGS_SCHEMA: &str = "findings-v1";
pub const REPRO_SCHEMA: &str = "repro-v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PropertyId {
    /// `s ≤ C`.
    #[serde(rename = "S_LE_C")]
    SLeC,
    /// `s + 2I ≥ C`.
    #[serde(rename = "S_2I_GE_C")]
    S2IGeC,
    /// `I ≥ η/2`.
    #[serde(rename = "I_GE_HALF_ETA")]
    IGeHalfEta,
    /// `s + 2𝒰 ≥ C`.
    #[serde(rename = "S_2U_GE_C")]
    S2UGeC,
    /// `𝒰 ≥ η/2`.
    #[serde(rename = "U_GE_HALF_ETA")]
    UGeHalfEta,
    /// `𝒰 ≥ C/2`.
    #[serde(rename = "OW_BOUND")]
    OwBound,
    #[serde(rename = "NONUNIQUE_DECOMP")]
    NonuniqueDecomp,
    #[serde(rename = "MIX_COST")]
    MixCost,
    #[serde(rename = "MIX_SIGNAL")]
    MixSignal,
}

impl PropertyId {
    pub fn as_str(self) -> &'static str {
        match self {
            PropertyId::SLeC => "S_LE_C",
            PropertyId::S2IGeC => "S_2I_GE_C",
            PropertyId::IGeHalfEta => "I_GE_HALF_ETA",
            PropertyId::S2UGeC => "S_2U_GE_C",
            PropertyId::UGeHalfEta => "U_GE_HALF_ETA",
            PropertyId::OwBound => "OW_BOUND",
            PropertyId::NonuniqueDecomp => "NONUNIQUE_DECOMP",
            PropertyId::MixCost => "MIX_COST",
            PropertyId::MixSignal => "MIX_SIGNAL",
        }
    }
}

/// Which unpredictability reading or which party a result refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Qualifier {
    None,
    Variant(UnpredictabilityVariant),
    Party(Party),
}

impl Qualifier {
    pub fn label(self) -> Option<&'static str> {
        match self {
            Qualifier::None => None,
            Qualifier::Variant(UnpredictabilityVariant::Formula) => Some("formula"),
            Qualifier::Variant(UnpredictabilityVariant::PerParty) => Some("per_party"),
            Qualifier::Party(Party::A) => Some("A"),
            Qualifier::Party(Party::B) => Some("B"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strictness {
    Asserted,
    Exploratory,
}

/// Where a box comes from, which decides which properties are asserted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    /// Mixtures of local strategies and one-way strategies from Alice to Bob.
    OnewaySlice,
    /// Mixtures of the sixteen named strategies.
    Chsh16,
    General,
}

impl Domain {
    pub fn of_family(family: RandomFamily) -> Self {
        match family {
            RandomFamily::OnewaySlice => Domain::OnewaySlice,
            RandomFamily::Chsh16Mixture => Domain::Chsh16,
            RandomFamily::General | RandomFamily::NoSignaling => Domain::General,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyResult<T> {
    pub property: PropertyId,
    pub qualifier: Qualifier,
    pub holds: bool,
    /// Nonnegative exactly when the property holds.
    pub slack: T,
    pub strictness: Strictness,
}

impl<T: Scalar> PropertyResult<T> {
    fn new(property: PropertyId, qualifier: Qualifier, slack: T, strictness: Strictness) -> Self {
        Self { property, qualifier, holds: !slack.is_negative_tol(), slack, strictness }
    }

    pub fn is_asserted_violation(&self) -> bool {
        !self.holds && self.strictness == Strictness::Asserted
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoxCheck<T> {
    pub results: Vec<PropertyResult<T>>,
    pub s: T,
    /// Cost in the full basis; every box lies in that hull.
    pub c_full: T,
    /// Cost in the sixteen-strategy basis, recorded on the chsh16 domain.
    pub c_chsh16: Option<T>,
}

impl<T: Scalar> BoxCheck<T> {
    pub fn find(&self, property: PropertyId, qualifier: Qualifier) -> Option<&PropertyResult<T>> {
        self.results.iter().find(|r| r.property == property && r.qualifier == qualifier)
    }

    pub fn first_asserted_violation(&self) -> Option<&PropertyResult<T>> {
        self.results.iter().find(|r| r.is_asserted_violation())
    }
}

fn strictness(property: PropertyId, qualifier: Qualifier, domain: Domain, no_signal: bool) -> Strictness {
    use Strictness::{Asserted, Exploratory};
    let on_slice = matches!(domain, Domain::OnewaySlice | Domain::Chsh16);
    match property {
        PropertyId::SLeC => Asserted,
        PropertyId::S2IGeC | PropertyId::IGeHalfEta if on_slice => Asserted,
        PropertyId::S2UGeC | PropertyId::UGeHalfEta => match (domain, qualifier) {
            (Domain::Chsh16, _) | (Domain::OnewaySlice, Qualifier::Party(Party::A)) => Asserted,
            _ => Exploratory,
        },
        PropertyId::OwBound if no_signal => Asserted,
        _ => Exploratory,
    }
}

/// Evaluates the cost/signal/randomness inequalities on `p`.
pub fn check_box<T: Scalar>(p: &CorrelationBox<T>, domain: Domain) -> BoxCheck<T> {
    let c = communication_cost(p, BasisKind::Full256).expect("every box lies in the full hull").c;
    let c_chsh16 = match domain {
        Domain::Chsh16 => communication_cost(p, BasisKind::Chsh16).ok().map(|r| r.c),
        _ => None,
    };
    let s = signal(p).s;
    let eta = c.sub_ref(&s);
    let half_eta = eta.mul_ref(&T::half());
    let no_signal = s.is_negligible();
    let mut results = Vec::with_capacity(11);
    let mut push = |property, qualifier, slack: T| {
        results.push(PropertyResult::new(property, qualifier, slack, strictness(property, qualifier, domain, no_signal)));
    };

    push(PropertyId::SLeC, Qualifier::None, c.sub_ref(&s));
    for variant in [UnpredictabilityVariant::Formula, UnpredictabilityVariant::PerParty] {
        let i = unpredictability(p, variant);
        let q = Qualifier::Variant(variant);
        push(PropertyId::S2IGeC, q, s.add_ref(&i.mul_ref(&T::two())).sub_ref(&c));
        push(PropertyId::IGeHalfEta, q, i.sub_ref(&half_eta));
    }
    let u = uncertainty(p);
    for party in [Party::A, Party::B] {
        let up = u.total(party);
        let q = Qualifier::Party(party);
        push(PropertyId::S2UGeC, q, s.add_ref(&up.mul_ref(&T::two())).sub_ref(&c));
        push(PropertyId::UGeHalfEta, q, up.sub_ref(&half_eta));
        push(PropertyId::OwBound, q, up.sub_ref(&c.mul_ref(&T::half())));
    }
    BoxCheck { results, s, c_full: c, c_chsh16 }
}

/// Holds when two optimal decompositions with different supports exist.
pub fn check_nonunique<T: Scalar>(p: &CorrelationBox<T>, basis: BasisKind) -> Result<PropertyResult<T>, CostError> {
    let found = find_distinct_decompositions(p, basis)?.is_some();
    let slack = if found { T::zero() } else { -T::one() };
    Ok(PropertyResult::new(PropertyId::NonuniqueDecomp, Qualifier::None, slack, Strictness::Exploratory))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyCounter {
    pub property: PropertyId,
    pub qualifier: Option<String>,
    pub checked: usize,
    pub held: usize,
    pub violated: usize,
    /// Of `checked`, how many were asserted.
    pub asserted: usize,
    pub asserted_violated: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub sample: usize,
    pub property: PropertyId,
    pub qualifier: Option<String>,
    pub strictness: Strictness,
    pub slack: String,
    #[serde(rename = "box")]
    pub box_json: serde_json::Value,
}

impl Witness {
    pub fn load(&self) -> Result<CorrelationBox<Rational>, BoxFormatError> {
        box_from_value(&self.box_json)
    }

    /// Re-runs the check on the serialized box.
    pub fn recheck(&self, domain: Domain) -> Result<Option<PropertyResult<Rational>>, BoxFormatError> {
        let check = check_box(&self.load()?, domain);
        Ok(check
            .results
            .into_iter()
            .find(|r| r.property == self.property && r.qualifier.label().map(String::from) == self.qualifier))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FindingsReport {
    pub schema: String,
    pub family: FamilySpec,
    pub seed: u64,
    pub domain: Domain,
    pub requested: usize,
    /// Boxes actually checked; smaller than `requested` after an abort.
    pub samples: usize,
    pub aborted: bool,
    pub asserted_violations: usize,
    pub per_property: Vec<PropertyCounter>,
    pub violating_witnesses: Vec<Witness>,
}

impl FindingsReport {
    pub fn counter(&self, property: PropertyId, qualifier: Qualifier) -> Option<&PropertyCounter> {
        let label = qualifier.label().map(String::from);
        self.per_property.iter().find(|c| c.property == property && c.qualifier == label)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FuzzOptions {
    /// Cap on recorded exploratory witnesses; asserted ones are always kept.
    pub max_witnesses: usize,
    /// Boxes checked in parallel before merging.
    pub chunk: usize,
}

impl Default for FuzzOptions {
    fn default() -> Self {
        Self { max_witnesses: 16, chunk: 64 }
    }
}

pub fn fuzz(family: RandomFamily, seed: u64, count: usize) -> Result<FindingsReport, GeneratorError> {
    let boxes = sample(family, seed, count)?;
    let spec = FamilySpec::Random { sub: family, seed };
    Ok(fuzz_boxes(spec, Domain::of_family(family), &boxes, FuzzOptions::default()))
}

/// Checks `boxes` in order, stopping at the first asserted violation.
pub fn fuzz_boxes(
    family: FamilySpec,
    domain: Domain,
    boxes: &[CorrelationBox<Rational>],
    options: FuzzOptions,
) -> FindingsReport {
    let seed = match &family {
        FamilySpec::Random { seed, .. } => *seed,
        _ => 0,
    };
    let mut counters: BTreeMap<(PropertyId, Qualifier), PropertyCounter> = BTreeMap::new();
    let mut witnesses = Vec::new();
    let mut exploratory_witnesses = 0;
    let mut samples = 0;
    let mut aborted = false;
    let mut asserted_violations = 0;

    'chunks: for (chunk_index, chunk) in boxes.chunks(options.chunk.max(1)).enumerate() {
        let checks: Vec<BoxCheck<Rational>> = chunk.par_iter().map(|b| check_box(b, domain)).collect();
        for (offset, (b, check)) in chunk.iter().zip(checks).enumerate() {
            let index = chunk_index * options.chunk.max(1) + offset;
            samples += 1;
            for r in &check.results {
                let counter = counters.entry((r.property, r.qualifier)).or_insert_with(|| PropertyCounter {
                    property: r.property,
                    qualifier: r.qualifier.label().map(String::from),
                    checked: 0,
                    held: 0,
                    violated: 0,
                    asserted: 0,
                    asserted_violated: 0,
                });
                counter.checked += 1;
                let asserted = r.strictness == Strictness::Asserted;
                counter.asserted += usize::from(asserted);
                if r.holds {
                    counter.held += 1;
                    continue;
                }
                counter.violated += 1;
                counter.asserted_violated += usize::from(asserted);
                let keep = if asserted {
                    asserted_violations += 1;
                    true
                } else {
                    exploratory_witnesses += 1;
                    exploratory_witnesses <= options.max_witnesses
                };
                if keep {
                    witnesses.push(Witness {
                        sample: index,
                        property: r.property,
                        qualifier: r.qualifier.label().map(String::from),
                        strictness: r.strictness,
                        slack: format_rational(&r.slack),
                        box_json: box_to_value(b),
                    });
                }
            }
            if asserted_violations > 0 {
                aborted = true;
                break 'chunks;
            }
        }
    }

    FindingsReport {
        schema: FINDINGS_SCHEMA.to_string(),
        family,
        seed,
        domain,
        requested: boxes.len(),
        samples,
        aborted,
        asserted_violations,
        per_property: counters.into_values().collect(),
        violating_witnesses: witnesses,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReproCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixtureRow {
    #[serde(with = "serde_rational")]
    pub p: Rational,
    /// `p·d^{0_1} + (1−p)·d^{2_1}`.
    #[serde(with = "serde_rational")]
    pub s_02: Rational,
    #[serde(with = "serde_rational")]
    pub c_02_chsh16: Rational,
    #[serde(with = "serde_rational")]
    pub c_02_full256: Rational,
    /// `p·d^{0_1} + (1−p)·d^{3_1}`.
    #[serde(with = "serde_rational")]
    pub s_03: Rational,
    #[serde(with = "serde_rational")]
    pub c_03_chsh16: Rational,
    #[serde(with = "serde_rational")]
    pub c_03_full256: Rational,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrPanel {
    #[serde(with = "serde_rational")]
    pub s: Rational,
    #[serde(rename = "C", with = "serde_rational")]
    pub c: Rational,
    #[serde(with = "serde_rational")]
    pub eta: Rational,
    #[serde(rename = "I_formula", with = "serde_rational")]
    pub i_formula: Rational,
    #[serde(rename = "I_per_party", with = "serde_rational")]
    pub i_per_party: Rational,
    #[serde(rename = "U_A", with = "serde_rational")]
    pub u_a: Rational,
    #[serde(rename = "U_B", with = "serde_rational")]
    pub u_b: Rational,
    #[serde(with = "serde_rational")]
    pub lambda_max: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Census {
    pub total: usize,
    pub local: usize,
    pub a_to_b: usize,
    pub b_to_a: usize,
    pub two_way: usize,
    pub no_signaling_vertices: usize,
    pub pr_variants: usize,
}

/// Where `½(d^{0_0} + d^{7_0})` and `½(d^{3_0} + d^{4_0})` differ.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelIdentityReport {
    pub lhs: serde_json::Value,
    pub rhs: serde_json::Value,
    pub holds: bool,
    /// `[a, b]` settings where the two columns differ.
    pub mismatched_settings: Vec<[usize; 2]>,
}

/// A stated value the computed quantities do not reproduce.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Discrepancy {
    pub name: String,
    pub stated: String,
    pub computed: String,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReproReport {
    pub schema: String,
    pub all_passed: bool,
    pub checks: Vec<ReproCheck>,
    pub census: Census,
    pub mixture_grid: Vec<MixtureRow>,
    pub pr_panel: PrPanel,
    pub noise_decompositions: Option<[serde_json::Value; 2]>,
    pub label_identity: LabelIdentityReport,
    pub discrepancies: Vec<Discrepancy>,
}

fn q(n: i64, d: i64) -> Rational {
    Rational::ratio(n, d)
}

fn named(name: &str) -> CorrelationBox<Rational> {
    DeterministicBox::by_name(name).expect("named strategy").to_box()
}

fn pair(p: &Rational, x: &str, y: &str) -> CorrelationBox<Rational> {
    mix(&[(p.clone(), &named(x)), (q(1, 1) - p, &named(y))]).expect("convex pair")
}

fn cost(p: &CorrelationBox<Rational>, basis: BasisKind) -> Rational {
    communication_cost(p, basis).map(|r| r.c).unwrap_or_else(|_| q(-1, 1))
}

fn label_identity() -> LabelIdentityReport {
    let lhs = pair(&q(1, 2), "d0_0", "d7_0");
    let rhs = pair(&q(1, 2), "d3_0", "d4_0");
    let mismatched_settings: Vec<[usize; 2]> = (0..4)
        .filter(|&s| lhs.columns()[s] != rhs.columns()[s])
        .map(|s| [s >> 1, s & 1])
        .collect();
    LabelIdentityReport {
        lhs: box_to_value(&lhs),
        rhs: box_to_value(&rhs),
        holds: mismatched_settings.is_empty(),
        mismatched_settings,
    }
}

/// Recomputes the tables, census, mixture grid, PR numbers and the
/// non-uniqueness witness, checking each against the stated values.
pub fn reproduce_paper() -> ReproReport {
    let mut checks = Vec::new();
    let mut check = |name: &str, passed: bool, detail: String| {
        checks.push(ReproCheck { name: name.to_string(), passed, detail });
    };

    for (name, _) in LOCAL_NAMED {
        let l = chsh(&named(name)).standard().clone();
        check(&format!("lambda {name}"), l == q(2, 1), format!("Λ = {}", format_rational(&l)));
    }
    for (name, id) in ONE_WAY_NAMED {
        let b = named(name);
        let l = chsh(&b).standard().clone();
        let s = signal(&b).s;
        let bits = DeterministicBox::new(id).cost_bits();
        check(
            &format!("one-way {name}"),
            l == q(4, 1) && s == q(1, 1) && bits == 1,
            format!("Λ = {}, s = {}, cost_bits = {bits}", format_rational(&l), format_rational(&s)),
        );
    }

    let all = enumerate_deterministic();
    let count = |dir| all.iter().filter(|d| d.direction() == dir).count();
    let vertices = no_signaling_vertices();
    let census = Census {
        total: all.len(),
        local: count(SignalDirection::None),
        a_to_b: count(SignalDirection::AtoB),
        b_to_a: count(SignalDirection::BtoA),
        two_way: count(SignalDirection::Both),
        no_signaling_vertices: vertices.len(),
        pr_variants: pr_variants().len(),
    };
    check(
        "census",
        (census.total, census.local, census.a_to_b, census.b_to_a, census.two_way) == (256, 16, 48, 48, 144),
        format!("{}/{}/{}/{}", census.local, census.a_to_b, census.b_to_a, census.two_way),
    );
    let pr_at_four = pr_variants().iter().all(|v| chsh(v).lambda_max == q(4, 1));
    check(
        "no-signaling vertices",
        census.no_signaling_vertices == 24 && census.pr_variants == 8 && pr_at_four,
        format!("{} vertices, {} PR variants", census.no_signaling_vertices, census.pr_variants),
    );

    let mut mixture_grid = Vec::new();
    for k in 0..=10 {
        let p = q(k, 10);
        let not_p = q(1, 1) - &p;
        let b02 = pair(&p, "d0_1", "d2_1");
        let b03 = pair(&p, "d0_1", "d3_1");
        let row = MixtureRow {
            s_02: signal(&b02).s,
            c_02_chsh16: cost(&b02, BasisKind::Chsh16),
            c_02_full256: cost(&b02, BasisKind::Full256),
            s_03: signal(&b03).s,
            c_03_chsh16: cost(&b03, BasisKind::Chsh16),
            c_03_full256: cost(&b03, BasisKind::Full256),
            p: p.clone(),
        };
        let one = q(1, 1);
        check(
            &format!("mixture cost p={}", format_rational(&p)),
            [&row.c_02_chsh16, &row.c_02_full256, &row.c_03_chsh16, &row.c_03_full256].iter().all(|c| **c == one),
            format!("C = {} (chsh16), {} (full256)", format_rational(&row.c_02_chsh16), format_rational(&row.c_02_full256)),
        );
        let s02 = Rational::max_of(&p, &not_p);
        let s03 = (&p - &not_p).abs();
        check(
            &format!("mixture signal p={}", format_rational(&p)),
            row.s_02 == s02 && row.s_03 == s03,
            format!("s = {}, {}", format_rational(&row.s_02), format_rational(&row.s_03)),
        );
        mixture_grid.push(row);
    }

    let pr: CorrelationBox<Rational> = canonical("pr").expect("pr");
    let pr_cost = communication_cost(&pr, BasisKind::Full256).expect("full hull");
    let u = uncertainty(&pr);
    let pr_panel = PrPanel {
        s: pr_cost.s.clone(),
        c: pr_cost.c.clone(),
        eta: pr_cost.eta.clone(),
        i_formula: unpredictability(&pr, UnpredictabilityVariant::Formula),
        i_per_party: unpredictability(&pr, UnpredictabilityVariant::PerParty),
        u_a: u.u_a.clone(),
        u_b: u.u_b.clone(),
        lambda_max: chsh(&pr).lambda_max,
    };
    let half = q(1, 2);
    check(
        "pr panel s, C, eta",
        pr_panel.s == q(0, 1) && pr_panel.c == q(1, 1) && pr_panel.eta == q(1, 1),
        format!(
            "s = {}, C = {}, η = {}",
            format_rational(&pr_panel.s),
            format_rational(&pr_panel.c),
            format_rational(&pr_panel.eta)
        ),
    );
    check(
        "pr panel I",
        pr_panel.i_formula == half && pr_panel.i_per_party == half,
        format!("I = {} (formula), {} (per party)", format_rational(&pr_panel.i_formula), format_rational(&pr_panel.i_per_party)),
    );
    let pr_check = check_box(&pr, Domain::General);
    let pr_bounds_hold = pr_check.results.iter().all(|r| r.holds);
    check("pr panel bounds hold", pr_bounds_hold, "all inequalities hold at the PR box".to_string());

    let noise = CorrelationBox::<Rational>::uniform();
    let noise_pair = find_distinct_decompositions(&noise, BasisKind::Full256).ok().flatten();
    let noise_ok = noise_pair.as_ref().is_some_and(|(a, b): &(Decomposition<Rational>, Decomposition<Rational>)| {
        a.cost == q(0, 1) && b.cost == q(0, 1) && a.support().is_disjoint(&b.support())
    });
    check(
        "noise non-uniqueness",
        noise_ok,
        match &noise_pair {
            Some((a, b)) => format!("supports {:?} and {:?}", a.support(), b.support()),
            None => "no second decomposition found".to_string(),
        },
    );

    let label_identity = label_identity();
    let mut discrepancies = Vec::new();
    if !label_identity.holds {
        discrepancies.push(Discrepancy {
            name: "local-strategy identity".to_string(),
            stated: "½(d0_0 + d7_0) = ½(d3_0 + d4_0)".to_string(),
            computed: format!("columns differ at settings {:?}", label_identity.mismatched_settings),
            note: "non-uniqueness itself is witnessed by the uniform-noise decompositions".to_string(),
        });
    }
    if pr_panel.u_a != half || pr_panel.u_b != half {
        discrepancies.push(Discrepancy {
            name: "PR uncertainty".to_string(),
            stated: "U = 1/2".to_string(),
            computed: format!("U_A = {}, U_B = {}", format_rational(&pr_panel.u_a), format_rational(&pr_panel.u_b)),
            note: "U is the sum of the two per-setting deltas, each 1/2 for the PR box; 1/2 is the lower bound eta/2"
                .to_string(),
        });
    }

    ReproReport {
        schema: REPRO_SCHEMA.to_string(),
        all_passed: checks.iter().all(|c| c.passed),
        checks,
        census,
        mixture_grid,
        pr_panel,
        noise_decompositions: noise_pair.map(|(a, b)| [a.to_json_value(), b.to_json_value()]),
        label_identity,
        discrepancies,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn find(check: &BoxCheck<Rational>, p: PropertyId, qual: Qualifier) -> PropertyResult<Rational> {
        check.find(p, qual).unwrap().clone()
    }

    const FORMULA: Qualifier = Qualifier::Variant(UnpredictabilityVariant::Formula);
    const PER_PARTY: Qualifier = Qualifier::Variant(UnpredictabilityVariant::PerParty);
    const ALICE: Qualifier = Qualifier::Party(Party::A);

    #[test]
    fn pr_box_equalities() {
        let check = check_box(&canonical::<Rational>("pr").unwrap(), Domain::General);
        for v in [FORMULA, PER_PARTY] {
            assert_eq!(find(&check, PropertyId::IGeHalfEta, v).slack, q(0, 1));
        }
        // Each per-setting delta is 1/2, so the sum exceeds C/2 = 1/2 by 1/2.
        let ow = find(&check, PropertyId::OwBound, ALICE);
        assert_eq!((ow.slack, ow.strictness), (q(1, 2), Strictness::Asserted));
    }

    #[test]
    fn equality_witnesses() {
        let b = mix(&[(q(2, 5), &named("d0_1")), (q(2, 5), &named("d3_1")), (q(1, 5), &named("d0_0"))]).unwrap();
        let check = check_box(&b, Domain::OnewaySlice);
        // Oracle: both parties output 0 with probability 3/5 at every setting,
        // so I = 2/5; Λ = 4·4/5 + 2·1/5 gives C ≥ 4/5, met by the weights; s = 0.
        assert_eq!(check.c_full, q(4, 5));
        assert_eq!(check.s, q(0, 1));
        assert_eq!(find(&check, PropertyId::IGeHalfEta, FORMULA).slack, q(0, 1));

        let b = pair(&q(0, 1), "d0_1", "d2_1");
        let check = check_box(&b, Domain::OnewaySlice);
        assert_eq!(find(&check, PropertyId::S2UGeC, ALICE).slack, q(0, 1));
    }

    #[test]
    fn uncertainty_tradeoff_on_pairs() {
        for k in 0..=5 {
            let p0 = q(k, 10);
            let check = check_box(&pair(&p0, "d0_1", "d2_1"), Domain::OnewaySlice);
            let r = find(&check, PropertyId::S2UGeC, ALICE);
            assert!(r.holds);
            assert_eq!(r.strictness, Strictness::Asserted);
        }
    }

    #[test]
    fn two_way_box_is_an_exploratory_violation() {
        let b = DeterministicBox::from_fns(|_, b| b, |a, _| a).to_box::<Rational>();
        let check = check_box(&b, Domain::General);
        let r = find(&check, PropertyId::IGeHalfEta, FORMULA);
        // I = 0, C = 2, s = 1.
        assert_eq!(r.slack, q(-1, 2));
        assert_eq!(r.strictness, Strictness::Exploratory);
        assert!(check.first_asserted_violation().is_none());
    }

    #[test]
    fn fuzz_is_deterministic() {
        let a = fuzz(RandomFamily::OnewaySlice, 3, 40).unwrap();
        assert_eq!(a, fuzz(RandomFamily::OnewaySlice, 3, 40).unwrap());
        assert_eq!(a.samples, 40);
        assert!(!a.aborted);
        for c in &a.per_property {
            assert_eq!(c.checked, c.held + c.violated);
        }
    }

    #[test]
    fn corrupted_family_aborts_with_witness() {
        let two_way = DeterministicBox::from_fns(|_, b| b, |a, _| a).to_box::<Rational>();
        let boxes = vec![named("d0_0"), two_way.clone(), named("d0_1")];
        let spec = FamilySpec::Random { sub: RandomFamily::OnewaySlice, seed: 0 };
        let report = fuzz_boxes(spec, Domain::OnewaySlice, &boxes, FuzzOptions::default());
        assert!(report.aborted);
        assert_eq!(report.samples, 2);
        let w = report.violating_witnesses.iter().find(|w| w.strictness == Strictness::Asserted).unwrap();
        assert_eq!(w.sample, 1);
        assert_eq!(w.load().unwrap(), two_way);
        assert!(!w.recheck(Domain::OnewaySlice).unwrap().unwrap().holds);
    }

    #[test]
    fn label_identity_fails_off_diagonal() {
        let r = label_identity();
        assert!(!r.holds);
        assert_eq!(r.mismatched_settings, vec![[0, 1], [1, 0]]);
    }
}
