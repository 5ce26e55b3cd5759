use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use boxcost::boxes::{box_from_json, box_to_json, mix, DeterministicBox};
use boxcost::cost::{cost_program, find_distinct_decompositions, BasisKind, CostError};
use boxcost::generators::{
    canonical, canonical_names, isotropic, quantum_box, sample, FamilySpec, RandomFamily, TSIRELSON_ANGLES,
};
use boxcost::scalar::{parse_rational, Rational};
use boxcost::verify::{fuzz, fuzz_boxes, reproduce_paper, Domain, FuzzOptions, Strictness};
use boxcost::ExactBox;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

mod report;

#[derive(Parser)]
#[command(name = "boxcost", version, about = "Exact cost, signaling and randomness analysis of 2x2 correlation boxes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Every measure and classifier flag for one box file.
    Analyze {
        path: PathBuf,
        /// Local dimension for eta* = C - log2(d).
        #[arg(long)]
        dim: Option<u32>,
        #[arg(long, conflicts_with = "text")]
        json: bool,
        #[arg(long)]
        text: bool,
    },
    /// Write box-v1 files for a named box or a family.
    Gen {
        /// A canonical name (d0_0 .. d7_1, pr, noise), isotropic, quantum or random.
        #[arg(long)]
        kind: String,
        /// Visibility for isotropic boxes, as num/den.
        #[arg(long)]
        v: Option<String>,
        /// "tsirelson" or four comma-separated angles in radians.
        #[arg(long, default_value = "tsirelson")]
        angles: String,
        /// Denominator bound for rationalized correlators.
        #[arg(long, default_value_t = 1_000_000)]
        denom: u64,
        #[arg(long, value_enum)]
        sub: Option<FamilyArg>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// File for a single box, directory for several; stdout otherwise.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Optimal decomposition into deterministic strategies.
    Decompose {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = BasisArg::Full256)]
        basis: BasisArg,
        /// Also search for an optimal decomposition with a different support.
        #[arg(long)]
        alt: bool,
    },
    /// Check the inequality suite over seeded samples of a family.
    Fuzz {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Test hook: the sampler also emits a two-way signaling box while
        /// claiming the one-way slice.
        #[arg(long, hide = true)]
        corrupt_sampler: bool,
    },
    /// Recompute the tables, census, mixture grid and PR panel.
    Repro {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Measures along a one-parameter family, as CSV.
    Sweep {
        #[arg(long, value_enum, default_value_t = SweepKind::Isotropic)]
        kind: SweepKind,
        /// The parameter runs over k/steps for k = 0..=steps.
        #[arg(long, default_value_t = 10)]
        steps: u32,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum FamilyArg {
    General,
    NoSignaling,
    Chsh16Mixture,
    OnewaySlice,
}

impl From<FamilyArg> for RandomFamily {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::General => RandomFamily::General,
            FamilyArg::NoSignaling => RandomFamily::NoSignaling,
            FamilyArg::Chsh16Mixture => RandomFamily::Chsh16Mixture,
            FamilyArg::OnewaySlice => RandomFamily::OnewaySlice,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BasisArg {
    Full256,
    Chsh16,
}

impl From<BasisArg> for BasisKind {
    fn from(b: BasisArg) -> Self {
        match b {
            BasisArg::Full256 => BasisKind::Full256,
            BasisArg::Chsh16 => BasisKind::Chsh16,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepKind {
    /// v·PR + (1−v)·noise.
    Isotropic,
    /// p·d0_1 + (1−p)·d2_1.
    Mix02,
    /// p·d0_1 + (1−p)·d3_1.
    Mix03,
}

enum Failure {
    /// Asserted property violated.
    Violation(String),
    /// Bad input or arguments.
    Usage(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Violation(_) => 1,
            Failure::Usage(_) => 2,
        }
    }
}

type CmdResult = Result<(), Failure>;

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn read_box(path: &Path) -> Result<ExactBox, Failure> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    box_from_json(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write_text(out: Option<&Path>, text: &str) -> CmdResult {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn parse_angles(s: &str) -> Result<[f64; 4], Failure> {
    if s == "tsirelson" {
        return Ok(TSIRELSON_ANGLES);
    }
    let parts: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| usage(format!("bad angle list {s:?}: {e}")))?;
    parts.try_into().map_err(|_| usage(format!("expected 4 angles, got {s:?}")))
}

fn cmd_analyze(path: &Path, dim: Option<u32>, text: bool) -> CmdResult {
    let p = read_box(path)?;
    let a = report::analyze(&p, dim).map_err(usage)?;
    let out = if text { a.text } else { pretty(&a.value) };
    write_text(None, &out)
}

#[allow(clippy::too_many_arguments)]
fn cmd_gen(
    kind: &str,
    v: Option<&str>,
    angles: &str,
    denom: u64,
    sub: Option<FamilyArg>,
    seed: u64,
    count: usize,
    out: Option<&Path>,
) -> CmdResult {
    if count == 0 {
        return Err(usage("count must be at least 1"));
    }
    let boxes: Vec<ExactBox> = match kind {
        "isotropic" => {
            let v = v.ok_or_else(|| usage("isotropic needs --v"))?;
            let v = parse_rational(v).map_err(usage)?;
            vec![isotropic(&v).map_err(usage)?; count]
        }
        "quantum" => vec![quantum_box(parse_angles(angles)?, denom).map_err(usage)?; count],
        "random" => {
            let sub = sub.ok_or_else(|| usage("random needs --sub"))?;
            sample(sub.into(), seed, count).map_err(usage)?
        }
        name => match canonical(name) {
            Ok(b) => vec![b; count],
            Err(_) => {
                return Err(usage(format!(
                    "unknown kind {name:?}; expected isotropic, quantum, random or one of {}",
                    canonical_names().join(", ")
                )))
            }
        },
    };
    match (out, boxes.len()) {
        (Some(path), 1) => write_text(Some(path), &(box_to_json(&boxes[0]) + "\n")),
        (Some(dir), _) => {
            fs::create_dir_all(dir).map_err(|e| usage(format!("{}: {e}", dir.display())))?;
            for (i, b) in boxes.iter().enumerate() {
                write_text(Some(&dir.join(format!("box-{i:05}.json"))), &(box_to_json(b) + "\n"))?;
            }
            Ok(())
        }
        (None, _) => {
            let lines: String = boxes.iter().map(|b| box_to_json(b) + "\n").collect();
            write_text(None, &lines)
        }
    }
}

fn cmd_decompose(path: &Path, basis: BasisKind, alt: bool) -> CmdResult {
    let p = read_box(path)?;
    let program = match cost_program(&p, basis) {
        Ok(prog) => prog,
        Err(CostError::NotInHull(_)) => return write_text(None, &pretty(&not_in_hull(basis))),
        Err(e) => return Err(usage(e)),
    };
    let sol = match program.solve() {
        Ok(sol) => sol,
        Err(CostError::NotInHull(_)) => return write_text(None, &pretty(&not_in_hull(basis))),
        Err(e) => return Err(usage(e)),
    };
    let mut doc = json!({
        "status": "optimal",
        "basis": basis.as_str(),
        "decomposition": program.decomposition(&sol).to_json_value(),
    });
    if alt {
        let other = find_distinct_decompositions(&p, basis).map_err(usage)?;
        doc["alternative"] = match other {
            Some((_, second)) => second.to_json_value(),
            None => json!("unique"),
        };
    }
    write_text(None, &pretty(&doc))
}

fn not_in_hull(basis: BasisKind) -> serde_json::Value {
    json!({"status": "not-in-hull", "basis": basis.as_str()})
}

fn cmd_fuzz(family: RandomFamily, seed: u64, count: usize, out: Option<&Path>, corrupt: bool) -> CmdResult {
    let report = if corrupt {
        let mut boxes = sample(family, seed, count).map_err(usage)?;
        let two_way = DeterministicBox::from_fns(|_, b| b, |a, _| a).to_box();
        boxes.insert(boxes.len() / 2, two_way);
        fuzz_boxes(FamilySpec::Random { sub: family, seed }, Domain::OnewaySlice, &boxes, FuzzOptions::default())
    } else {
        fuzz(family, seed, count).map_err(usage)?
    };
    let value = serde_json::to_value(&report).expect("reports serialize");
    write_text(out, &pretty(&value))?;

    let asserted: Vec<_> =
        report.violating_witnesses.iter().filter(|w| w.strictness == Strictness::Asserted).collect();
    if let Some(out) = out {
        let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("findings");
        let mut samples: Vec<usize> = asserted.iter().map(|w| w.sample).collect();
        samples.sort_unstable();
        samples.dedup();
        for sample in samples {
            let w = asserted.iter().find(|w| w.sample == sample).expect("sample taken from witnesses");
            let path = out.with_file_name(format!("{stem}-witness-{sample}.json"));
            write_text(Some(&path), &(box_to_json(&w.load().map_err(usage)?) + "\n"))?;
        }
    }
    match asserted.first() {
        Some(w) => Err(Failure::Violation(format!(
            "asserted property {} violated at sample {} (slack {})",
            w.property.as_str(),
            w.sample,
            w.slack
        ))),
        None => Ok(()),
    }
}

fn cmd_repro(out: Option<&Path>) -> CmdResult {
    let report = reproduce_paper();
    let value = serde_json::to_value(&report).expect("reports serialize");
    write_text(out, &pretty(&value))?;
    let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    eprintln!(
        "{} checks, {} failed, {} documented discrepancies",
        report.checks.len(),
        failed.len(),
        report.discrepancies.len()
    );
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Violation(format!("failed checks: {}", failed.join(", "))))
    }
}

fn cmd_sweep(kind: SweepKind, steps: u32, csv: Option<&Path>) -> CmdResult {
    if steps == 0 {
        return Err(usage("steps must be at least 1"));
    }
    let named = |n: &str| -> ExactBox { canonical(n).expect("named box") };
    let mut text = report::sweep_header() + "\n";
    for k in 0..=steps {
        let t = Rational::new(k.into(), steps.into());
        let rest = Rational::from_integer(1.into()) - &t;
        let p = match kind {
            SweepKind::Isotropic => isotropic(&t).map_err(usage)?,
            SweepKind::Mix02 => mix(&[(t.clone(), &named("d0_1")), (rest, &named("d2_1"))]).map_err(usage)?,
            SweepKind::Mix03 => mix(&[(t.clone(), &named("d0_1")), (rest, &named("d3_1"))]).map_err(usage)?,
        };
        text += &report::sweep_row(&t, &p).map_err(usage)?;
        text.push('\n');
    }
    write_text(csv, &text)
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Analyze { path, dim, json: _, text } => cmd_analyze(&path, dim, text),
        Command::Gen { kind, v, angles, denom, sub, seed, count, out } => {
            cmd_gen(&kind, v.as_deref(), &angles, denom, sub, seed, count, out.as_deref())
        }
        Command::Decompose { path, basis, alt } => cmd_decompose(&path, basis.into(), alt),
        Command::Fuzz { family, seed, count, out, corrupt_sampler } => {
            if count == 0 {
                return Err(usage("count must be at least 1"));
            }
            cmd_fuzz(family.into(), seed, count, out.as_deref(), corrupt_sampler)
        }
        Command::Repro { out } => cmd_repro(out.as_deref()),
        Command::Sweep { kind, steps, csv } => cmd_sweep(kind, steps, csv.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Violation(msg) | Failure::Usage(msg)) = &f;
            eprintln!("error: {msg}");
            ExitCode::from(f.code())
        }
    }
}
