//! Analysis reports and CSV sweeps.

use boxcost::cost::{communication_cost, eta_star, BasisKind, CostError, CostReport};
use boxcost::measures::{chsh, lhv_admissible, signal, uncertainty, unpredictability, UnpredictabilityVariant};
use boxcost::scalar::{format_rational, format_significant, rational_to_decimal, Rational};
use boxcost::{boxes::box_to_value, ExactBox};
use boxcost::Scalar;
use serde_json::{json, Value};

const DECIMAL_DIGITS: usize = 12;
const ETA_STAR_DIGITS: usize = 12;

pub const CSV_COLUMNS: [&str; 8] = ["param", "lambda_max", "s", "C", "eta", "I", "U_A", "U_B"];

fn r(x: &Rational) -> Value {
    Value::String(format_rational(x))
}

fn cost_value(report: &CostReport<Rational>) -> Value {
    json!({
        "status": "optimal",
        "C": r(&report.c),
        "eta": r(&report.eta),
        "s": r(&report.s),
        "lower_bound": r(&report.lower_bound),
        "decomposition": report.decomposition.to_json_value(),
    })
}

pub struct Analysis {
    pub value: Value,
    pub text: String,
}

pub fn analyze(p: &ExactBox, dim: Option<u32>) -> Result<Analysis, CostError> {
    let ch = chsh(p);
    let sig = signal(p);
    let full = communication_cost(p, BasisKind::Full256)?;
    let small = match communication_cost(p, BasisKind::Chsh16) {
        Ok(rep) => Some(rep),
        Err(CostError::NotInHull(_)) => None,
        Err(e) => return Err(e),
    };
    let i_formula = unpredictability(p, UnpredictabilityVariant::Formula);
    let i_per_party = unpredictability(p, UnpredictabilityVariant::PerParty);
    let u = uncertainty(p);
    let lhv = lhv_admissible(p);
    let weak = i_formula.is_positive_tol() || i_per_party.is_positive_tol();
    let strong = full.eta.is_positive_tol();
    let star = dim.map(|d| eta_star(p, d)).transpose()?;

    let value = json!({
        "box": box_to_value(p),
        "chsh": serde_json::to_value(&ch).expect("serializable"),
        "signal": serde_json::to_value(&sig).expect("serializable"),
        "cost_full": cost_value(&full),
        "cost_chsh16": small.as_ref().map_or_else(|| json!({"status": "not-in-hull"}), cost_value),
        "unpredictability": {"formula": r(&i_formula), "per_party": r(&i_per_party)},
        "uncertainty": serde_json::to_value(&u).expect("serializable"),
        "flags": {
            "no_signaling": sig.s.is_negligible(),
            "lhv": lhv,
            "weakly_nonclassical": weak,
            "strongly_nonclassical": strong,
            "kochen_specker": "not-computable",
            "eta_star": match (dim, star) {
                (Some(d), Some(x)) => json!({"dim": d, "value": format_significant(x, ETA_STAR_DIGITS), "approximate": true}),
                _ => Value::Null,
            },
        },
    });

    let yes_no = |b: bool| if b { "yes" } else { "no" };
    let mut text = String::new();
    let mut line = |label: &str, v: String| text.push_str(&format!("{label:<22}{v}\n"));
    line("lambda_max", format_rational(&ch.lambda_max));
    line("chsh values", ch.values.iter().map(format_rational).collect::<Vec<_>>().join(" "));
    line(
        "signal s",
        format!(
            "{} (A->B {}, B->A {})",
            format_rational(&sig.s),
            format_rational(&sig.s_a_to_b),
            format_rational(&sig.s_b_to_a)
        ),
    );
    line("cost C (full256)", format_rational(&full.c));
    line("cost C (chsh16)", small.as_ref().map_or_else(|| "not-in-hull".to_string(), |s| format_rational(&s.c)));
    line("eta", format_rational(&full.eta));
    line("CHSH lower bound", format_rational(&full.lower_bound));
    line("I (formula)", format_rational(&i_formula));
    line("I (per party)", format_rational(&i_per_party));
    line(
        "delta A / B",
        format!(
            "{} {} / {} {}",
            format_rational(&u.delta_a[0]),
            format_rational(&u.delta_a[1]),
            format_rational(&u.delta_b[0]),
            format_rational(&u.delta_b[1])
        ),
    );
    line("U_A / U_B", format!("{} / {}", format_rational(&u.u_a), format_rational(&u.u_b)));
    line("no-signaling", yes_no(sig.s.is_negligible()).to_string());
    line("LHV admissible", yes_no(lhv).to_string());
    line("weakly nonclassical", yes_no(weak).to_string());
    line("strongly nonclassical", yes_no(strong).to_string());
    line("Kochen-Specker", "not-computable".to_string());
    if let (Some(d), Some(x)) = (dim, star) {
        line("eta* (approx)", format!("{} (d = {d})", format_significant(x, ETA_STAR_DIGITS)));
    }
    let support = full
        .decomposition
        .weights
        .iter()
        .map(|(id, w)| format!("{id}:{}", format_rational(w)))
        .collect::<Vec<_>>()
        .join(" ");
    line("decomposition", support);
    Ok(Analysis { value, text })
}

/// One CSV row: decimals for every column, then the exact values.
pub fn sweep_row(param: &Rational, p: &ExactBox) -> Result<String, CostError> {
    let ch = chsh(p);
    let cost = communication_cost(p, BasisKind::Full256)?;
    let i = unpredictability(p, UnpredictabilityVariant::Formula);
    let u = uncertainty(p);
    let values = [param, &ch.lambda_max, &cost.s, &cost.c, &cost.eta, &i, &u.u_a, &u.u_b];
    let decimals = values.iter().map(|v| rational_to_decimal(v, DECIMAL_DIGITS));
    let exact = values.iter().map(|v| format_rational(v));
    Ok(decimals.chain(exact).collect::<Vec<_>>().join(","))
}

pub fn sweep_header() -> String {
    let exact = CSV_COLUMNS.iter().map(|c| format!("{c}_exact"));
    CSV_COLUMNS.iter().map(|c| c.to_string()).chain(exact).collect::<Vec<_>>().join(",")
}
