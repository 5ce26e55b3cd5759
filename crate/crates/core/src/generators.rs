//! Named boxes, parametric families and seeded random samplers.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::boxes::{mix, CorrelationBox, DeterministicBox, Relabeling, LOCAL_NAMED, ONE_WAY_NAMED};
use crate::scalar::{serde_rational, Rational, Scalar};

/// Upper bound for the integer numerators drawn by the samplers.
pub const SAMPLE_NUMERATOR_MAX: u32 = 1 << 16;

/// `(θ_a0, θ_a1, θ_b0, θ_b1) = (0, π/2, π/4, −π/4)`.
pub const TSIRELSON_ANGLES: [f64; 4] = [
    0.0,
    std::f64::consts::FRAC_PI_2,
    std::f64::consts::FRAC_PI_4,
    -std::f64::consts::FRAC_PI_4,
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeneratorError {
    #[error("unknown canonical box {0:?}")]
    UnknownName(String),
    #[error("bad parameter: {0}")]
    BadParameter(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RandomFamily {
    /// Each setting column drawn independently.
    General,
    /// Mixtures of the 24 no-signaling vertices.
    NoSignaling,
    /// Mixtures of the sixteen named strategies.
    Chsh16Mixture,
    /// Mixtures of the eight named local strategies and the four one-way
    /// strategies signaling from Alice to Bob.
    OnewaySlice,
}

impl RandomFamily {
    pub fn as_str(self) -> &'static str {
        match self {
            RandomFamily::General => "general",
            RandomFamily::NoSignaling => "no_signaling",
            RandomFamily::Chsh16Mixture => "chsh16_mixture",
            RandomFamily::OnewaySlice => "oneway_slice",
        }
    }
}

impl std::str::FromStr for RandomFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "general" => Ok(RandomFamily::General),
            "no_signaling" => Ok(RandomFamily::NoSignaling),
            "chsh16_mixture" | "chsh16" => Ok(RandomFamily::Chsh16Mixture),
            "oneway_slice" | "oneway" => Ok(RandomFamily::OnewaySlice),
            other => Err(format!("unknown random family {other:?}")),
        }
    }
}

/// A reproducible description of where a box came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilySpec {
    Canonical {
        name: String,
    },
    Isotropic {
        #[serde(with = "serde_rational")]
        v: Rational,
    },
    Quantum {
        angles: [f64; 4],
        approx_denominator: u64,
    },
    Random {
        sub: RandomFamily,
        seed: u64,
    },
}

impl FamilySpec {
    pub fn generate(&self, count: usize) -> Result<Vec<CorrelationBox<Rational>>, GeneratorError> {
        match self {
            FamilySpec::Canonical { name } => Ok(vec![canonical(name)?; count.max(1)]),
            FamilySpec::Isotropic { v } => Ok(vec![isotropic(v)?; count.max(1)]),
            FamilySpec::Quantum { angles, approx_denominator } => {
                Ok(vec![quantum_box(*angles, *approx_denominator)?; count.max(1)])
            }
            FamilySpec::Random { sub, seed } => sample(*sub, *seed, count),
        }
    }
}

/// Every name accepted by [`canonical`].
pub fn canonical_names() -> Vec<&'static str> {
    LOCAL_NAMED
        .iter()
        .chain(ONE_WAY_NAMED.iter())
        .map(|(n, _)| *n)
        .chain(["pr", "noise"])
        .collect()
}

pub fn canonical<T: Scalar>(name: &str) -> Result<CorrelationBox<T>, GeneratorError> {
    match name {
        "pr" => Ok(pr_box()),
        "noise" => Ok(CorrelationBox::uniform()),
        _ => DeterministicBox::by_name(name)
            .map(DeterministicBox::to_box)
            .ok_or_else(|| GeneratorError::UnknownName(name.to_string())),
    }
}

/// `½ d^{0_1} + ½ d^{3_1}`: uniform marginals, `A ⊕ B = a·(b ⊕ 1)`.
pub fn pr_box<T: Scalar>() -> CorrelationBox<T> {
    let d01 = DeterministicBox::by_name("d0_1").expect("named").to_box();
    let d31 = DeterministicBox::by_name("d3_1").expect("named").to_box();
    mix(&[(T::half(), &d01), (T::half(), &d31)]).expect("weights sum to one")
}

/// `v·PR + (1−v)·noise`.
pub fn isotropic<T: Scalar>(v: &T) -> Result<CorrelationBox<T>, GeneratorError> {
    if v.is_negative_tol() || v.cmp_tol(&T::one()).is_gt() {
        return Err(GeneratorError::BadParameter(format!("visibility {} outside [0,1]", v.render())));
    }
    let pr = pr_box();
    let noise = CorrelationBox::uniform();
    Ok(mix(&[(v.clone(), &pr), (T::one().sub_ref(v), &noise)]).expect("weights sum to one"))
}

/// Closest fraction to `x` with denominator at most `max_den`.
pub fn best_rational_approximation(x: f64, max_den: u64) -> Result<Rational, GeneratorError> {
    if !x.is_finite() {
        return Err(GeneratorError::BadParameter(format!("cannot rationalize {x}")));
    }
    if max_den == 0 {
        return Err(GeneratorError::BadParameter("denominator bound must be at least 1".into()));
    }
    let exact = Rational::from_float(x).expect("finite");
    let negative = exact.is_negative();
    let target = exact.abs();
    let max_den = BigInt::from(max_den);

    // Continued-fraction convergents, then the best semiconvergent.
    let (mut p0, mut q0, mut p1, mut q1) = (BigInt::zero(), BigInt::one(), BigInt::one(), BigInt::zero());
    let mut rest = target.clone();
    loop {
        let a = rest.floor().to_integer();
        let q2 = &q0 + &a * &q1;
        if q2 > max_den {
            break;
        }
        let p2 = &p0 + &a * &p1;
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = &rest - Rational::from_integer(a);
        if frac.is_zero() {
            break;
        }
        rest = frac.recip();
    }
    // The first convergent has denominator 1, so `q1 ≥ 1` here.
    let k = (&max_den - &q0).div_floor(&q1);
    let semi = Rational::new(&p0 + &k * &p1, &q0 + &k * &q1);
    let conv = Rational::new(p1, q1);
    let best = if (&semi - &target).abs() < (&conv - &target).abs() { semi } else { conv };
    Ok(if negative { -best } else { best })
}

/// Uniform-marginal box with `E(a,b) = cos(θ_a − θ_b)`, each correlator
/// rationalized with denominator at most `max_den` before the entries
/// `¼(1 ± E)` are assembled.
pub fn quantum_box(angles: [f64; 4], max_den: u64) -> Result<CorrelationBox<Rational>, GeneratorError> {
    if max_den == 0 {
        return Err(GeneratorError::BadParameter("denominator bound must be at least 1".into()));
    }
    if angles.iter().any(|t| !t.is_finite()) {
        return Err(GeneratorError::BadParameter("angles must be finite".into()));
    }
    let one = Rational::one();
    let quarter = Rational::ratio(1, 4);
    let mut cols: [[Rational; 4]; 4] = Default::default();
    for (s, col) in cols.iter_mut().enumerate() {
        let (a, b) = (s >> 1, s & 1);
        let e = best_rational_approximation((angles[a] - angles[2 + b]).cos(), max_den)?;
        let e = Rational::min_of(&Rational::max_of(&e, &-one.clone()), &one);
        let same = &quarter * (&one + &e);
        let diff = &quarter * (&one - &e);
        *col = [same.clone(), diff.clone(), diff, same];
    }
    CorrelationBox::from_columns(cols).map_err(|e| GeneratorError::BadParameter(e.to_string()))
}

/// The eight distinct relabelings of the PR box.
pub fn pr_variants() -> &'static [CorrelationBox<Rational>] {
    static VARIANTS: OnceLock<Vec<CorrelationBox<Rational>>> = OnceLock::new();
    VARIANTS.get_or_init(|| {
        let pr = pr_box::<Rational>();
        let mut out: Vec<CorrelationBox<Rational>> = Vec::new();
        for r in Relabeling::all() {
            let b = r.apply(&pr);
            if !out.contains(&b) {
                out.push(b);
            }
        }
        out
    })
}

/// The 16 local deterministic boxes followed by the 8 PR variants.
pub fn no_signaling_vertices() -> Vec<CorrelationBox<Rational>> {
    crate::boxes::enumerate_deterministic()
        .into_iter()
        .filter(|d| d.is_local())
        .map(DeterministicBox::to_box)
        .chain(pr_variants().iter().cloned())
        .collect()
}

fn generators(family: RandomFamily) -> Vec<CorrelationBox<Rational>> {
    let named = |table: &[(&str, u8)]| -> Vec<CorrelationBox<Rational>> {
        table.iter().map(|(_, id)| DeterministicBox::new(*id).to_box()).collect()
    };
    match family {
        RandomFamily::General => Vec::new(),
        RandomFamily::NoSignaling => no_signaling_vertices(),
        RandomFamily::Chsh16Mixture => {
            let mut g = named(&LOCAL_NAMED);
            g.extend(named(&ONE_WAY_NAMED));
            g
        }
        RandomFamily::OnewaySlice => {
            let mut g = named(&LOCAL_NAMED);
            g.extend(named(&ONE_WAY_NAMED[..4]));
            g
        }
    }
}

fn normalized(raw: &[u32]) -> Vec<Rational> {
    let total: u64 = raw.iter().map(|&x| u64::from(x)).sum();
    raw.iter().map(|&x| Rational::new(BigInt::from(x), BigInt::from(total))).collect()
}

fn positive_weights(rng: &mut ChaCha8Rng, k: usize) -> Vec<Rational> {
    let raw: Vec<u32> = (0..k).map(|_| rng.gen_range(1..=SAMPLE_NUMERATOR_MAX)).collect();
    normalized(&raw)
}

fn general_box(rng: &mut ChaCha8Rng) -> CorrelationBox<Rational> {
    let cols = std::array::from_fn(|_| loop {
        let raw: [u32; 4] = std::array::from_fn(|_| rng.gen_range(0..=SAMPLE_NUMERATOR_MAX));
        if raw.iter().any(|&x| x > 0) {
            let w = normalized(&raw);
            break std::array::from_fn(|o| w[o].clone());
        }
    });
    CorrelationBox::from_columns(cols).expect("normalized columns")
}

/// Sparse mixtures half the time (1–3 generators), otherwise any support size.
fn mixture_box(rng: &mut ChaCha8Rng, gens: &[CorrelationBox<Rational>]) -> CorrelationBox<Rational> {
    let n = gens.len();
    let k = if rng.gen_bool(0.5) { rng.gen_range(1..=3.min(n)) } else { rng.gen_range(1..=n) };
    let mut picked = index::sample(rng, n, k).into_vec();
    picked.sort_unstable();
    let weights = positive_weights(rng, k);
    let terms: Vec<(Rational, &CorrelationBox<Rational>)> =
        weights.into_iter().zip(picked.iter().map(|&i| &gens[i])).collect();
    mix(&terms).expect("weights sum to one")
}

/// `count` boxes from `family`, identical for identical `(family, seed)`.
pub fn sample(family: RandomFamily, seed: u64, count: usize) -> Result<Vec<CorrelationBox<Rational>>, GeneratorError> {
    if count == 0 {
        return Err(GeneratorError::BadParameter("count must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gens = generators(family);
    Ok((0..count)
        .map(|_| match family {
            RandomFamily::General => general_box(&mut rng),
            _ => mixture_box(&mut rng, &gens),
        })
        .collect())
}

/// Float view of a rational box, for plotting.
pub fn to_f64_box(b: &CorrelationBox<Rational>) -> CorrelationBox<f64> {
    b.map(|v| v.to_f64().unwrap_or(f64::NAN))
}
