//! Command-line front end for the invariant calculators: one verb per
//! decision procedure, JSON output by default, `--plain` for reading by eye.
//!
//! Exit codes: 0 success, 1 domain error (the input parsed but names
//! something the procedure rejects), 2 parse or usage error.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use stonecalc::closurealg::{
    incompatibility_witness, qk_algebra, qk_closed_set, CompletionSpec, IncompatibilityWitness,
    QkVariant,
};
use stonecalc::measure::{sigma_iso_decide, Region, TreeMeasure};
use stonecalc::ordinal::Ordinal;
use stonecalc::ordspace::{canonical_g, classify, derivative_type, type_of};
use stonecalc::posys::{load_po_json, LoadedPo, PoFile};
use stonecalc::spacecalc::{homeo_decide, realize, InvariantTuple, SpaceExpr};

#[derive(Parser)]
#[command(
    name = "stonecalc",
    version,
    about = "Symbolic invariants and decision procedures for zero-dimensional spaces"
)]
struct Cli {
    /// Print human-readable text instead of JSON.
    #[arg(long, global = true)]
    plain: bool,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Classify the space of an ordinal: class, homeomorphism type, least
    /// ordinal of the same type.
    OrdClassify { ord: String },
    /// Print only the homeomorphism type of an ordinal space.
    OrdType { ord: String },
    /// Iterated derivative of an ordinal space, as an ordinal.
    OrdDerive {
        ord: String,
        /// Number of derivative steps, itself an ordinal.
        #[arg(long, default_value = "1")]
        xi: String,
    },
    /// Complete invariant tuple of a space expression.
    SpaceInvariants { expr: String },
    /// Decide whether two space expressions are homeomorphic.
    SpaceHomeo { left: String, right: String },
    /// Split a space into a strongly uniform part and a scattered part.
    SpaceDecompose { expr: String },
    /// Construct a space expression realizing a tuple (JSON argument).
    SpaceRealize { tuple: String },
    /// Check whether a tuple (JSON argument) is realized by some space.
    TupleValidate { tuple: String },
    /// Derivative invariants of a PO system read from a JSON file.
    PoInvariants { file: PathBuf },
    /// Reduce a PO system; prints the reduced system and the quotient map.
    PoReduce { file: PathBuf },
    /// Invariants of any space carrying an extended PO system (JSON file).
    PoPredict { file: PathBuf },
    /// Decide measure-preserving pseudo-indecomposability of a region.
    MeasurePi {
        tree: String,
        /// Comma-separated list of 0/1 paths; empty path = whole space.
        #[arg(long, default_value = "")]
        region: String,
    },
    /// Decide whether two regions are measure-isomorphic.
    MeasureIso {
        left: String,
        right: String,
        #[arg(long, default_value = "")]
        region_left: String,
        #[arg(long, default_value = "")]
        region_right: String,
    },
    /// Stage sequence of the canonical closed set in the k-th ladder algebra.
    ClosureHseq {
        #[arg(long)]
        k: u64,
        #[arg(long, default_value = "prop")]
        variant: QkVariant,
        /// Number of stages to print; defaults to k+2.
        #[arg(long)]
        upto: Option<usize>,
    },
    /// Least stage separating the k-th and m-th ladder algebras.
    ClosureWitness {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        m: u64,
        #[arg(long, default_value = "prop")]
        variant: QkVariant,
    },
    /// Non-primitivity certificate for a completed measure with the given
    /// ladder components.
    ClosureReport {
        /// Either an inclusive range "1..6" or a comma list "1,2,5".
        #[arg(long)]
        components: String,
        #[arg(long, default_value = "prop")]
        variant: QkVariant,
    },
}

enum Failure {
    Parse(String),
    Domain(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Parse(_) => 2,
            Failure::Domain(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Parse(m) | Failure::Domain(m) => m,
        }
    }
}

struct Output {
    json: String,
    plain: String,
}

impl Output {
    /// Serializes straight to text so that struct fields keep their
    /// declaration order.
    fn new<T: Serialize>(t: &T, plain: String) -> Result<Output, Failure> {
        let json = serde_json::to_string(t)
            .map_err(|e| Failure::Domain(format!("cannot encode output: {e}")))?;
        Ok(Output { json, plain })
    }
}

fn parse_arg<T: std::str::FromStr>(what: &str, s: &str) -> Result<T, Failure>
where
    T::Err: std::fmt::Display,
{
    s.parse::<T>().map_err(|e| Failure::Parse(format!("{what} {s:?}: {e}")))
}

fn parse_region(s: &str) -> Result<Region, Failure> {
    let mut region = Region::new();
    for part in s.split(',') {
        let path = part.trim();
        if let Some(c) = path.chars().find(|c| *c != '0' && *c != '1') {
            return Err(Failure::Parse(format!(
                "region path {path:?}: invalid character {c:?}"
            )));
        }
        region.insert(path.to_owned());
    }
    Ok(region)
}

fn parse_components(s: &str) -> Result<Vec<u64>, Failure> {
    if let Some((lo, hi)) = s.split_once("..") {
        let lo: u64 = parse_arg("range bound", lo.trim())?;
        let hi: u64 = parse_arg("range bound", hi.trim())?;
        if lo > hi {
            return Err(Failure::Parse(format!("empty range {lo}..{hi}")));
        }
        Ok((lo..=hi).collect())
    } else {
        s.split(',').map(|t| parse_arg("component index", t.trim())).collect()
    }
}

fn read_po(path: &PathBuf) -> Result<LoadedPo, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Parse(format!("cannot read {}: {e}", path.display())))?;
    load_po_json(&text).map_err(|e| match e {
        stonecalc::posys::PoLoadError::Json(e) => Failure::Parse(format!("invalid JSON: {e}")),
        other => Failure::Domain(other.to_string()),
    })
}

/// Sorts ladder elements by numeric value (they are all decimal strings).
fn numeric_sorted(set: &BTreeSet<String>) -> Vec<String> {
    let mut v: Vec<String> = set.iter().cloned().collect();
    v.sort_by_key(|s| s.parse::<u64>().unwrap_or(u64::MAX));
    v
}

fn run(verb: &Verb) -> Result<Output, Failure> {
    match verb {
        Verb::OrdClassify { ord } => {
            let a: Ordinal = parse_arg("ordinal", ord)?;
            #[derive(Serialize)]
            struct Out {
                class: String,
                #[serde(rename = "type")]
                ty: String,
                g: String,
            }
            let out = Out {
                class: classify(&a).to_string(),
                ty: type_of(&a).to_string(),
                g: canonical_g(&a).to_string(),
            };
            let plain = format!("class: {}\ntype: {}\ng: {}", out.class, out.ty, out.g);
            Output::new(&out, plain)
        }
        Verb::OrdType { ord } => {
            let a: Ordinal = parse_arg("ordinal", ord)?;
            let ty = type_of(&a).to_string();
            Output::new(&json!({ "type": ty }), ty)
        }
        Verb::OrdDerive { ord, xi } => {
            let a: Ordinal = parse_arg("ordinal", ord)?;
            let xi: Ordinal = parse_arg("step count", xi)?;
            let d = derivative_type(&a, &xi).to_string();
            Output::new(&json!({ "derivative": d }), d)
        }
        Verb::SpaceInvariants { expr } => {
            let e: SpaceExpr = parse_arg("space expression", expr)?;
            let t = e.invariants();
            Output::new(&t, t.to_string())
        }
        Verb::SpaceHomeo { left, right } => {
            let l: SpaceExpr = parse_arg("space expression", left)?;
            let r: SpaceExpr = parse_arg("space expression", right)?;
            let yes = homeo_decide(&l, &r);
            let plain = if yes { "homeomorphic" } else { "not homeomorphic" };
            Output::new(&json!({ "homeomorphic": yes }), plain.to_owned())
        }
        Verb::SpaceDecompose { expr } => {
            let e: SpaceExpr = parse_arg("space expression", expr)?;
            let (uniform, scattered) = e.decompose();
            #[derive(Serialize)]
            struct Out {
                uniform: String,
                scattered: String,
            }
            let out = Out { uniform: uniform.to_string(), scattered: scattered.to_string() };
            let plain = format!("uniform: {}\nscattered: {}", out.uniform, out.scattered);
            Output::new(&out, plain)
        }
        Verb::SpaceRealize { tuple } => {
            let t: InvariantTuple = serde_json::from_str(tuple)
                .map_err(|e| Failure::Parse(format!("tuple JSON: {e}")))?;
            let e = realize(&t).map_err(|v| Failure::Domain(v.to_string()))?;
            let text = e.to_string();
            Output::new(&json!({ "expr": text }), text)
        }
        Verb::TupleValidate { tuple } => {
            let t: InvariantTuple = serde_json::from_str(tuple)
                .map_err(|e| Failure::Parse(format!("tuple JSON: {e}")))?;
            #[derive(Serialize)]
            struct Out {
                valid: bool,
                #[serde(skip_serializing_if = "Option::is_none")]
                clause: Option<&'static str>,
                #[serde(skip_serializing_if = "Option::is_none")]
                reason: Option<String>,
            }
            match t.validate() {
                Ok(()) => Output::new(
                    &Out { valid: true, clause: None, reason: None },
                    "valid".to_owned(),
                ),
                Err(v) => Output::new(
                    &Out {
                        valid: false,
                        clause: Some(v.clause()),
                        reason: Some(v.to_string()),
                    },
                    format!("invalid (clause {}): {v}", v.clause()),
                ),
            }
        }
        Verb::PoInvariants { file } => {
            let p = read_po(file)?;
            let inv = p.base().invariants();
            #[derive(Serialize)]
            struct Out {
                nu: usize,
                lambda: usize,
                kernel: BTreeSet<String>,
                rank: BTreeMap<String, usize>,
                layers: Vec<BTreeSet<String>>,
                p0: BTreeSet<String>,
            }
            let out = Out {
                nu: inv.nu,
                lambda: inv.lambda,
                kernel: inv.kernel.clone(),
                rank: inv.rank.clone(),
                layers: inv.layers.clone(),
                p0: inv.p0.clone(),
            };
            let mut plain = format!("nu: {}\nlambda: {}\n", inv.nu, inv.lambda);
            plain += &format!("kernel: {}\n", join(&inv.kernel));
            for (q, r) in &inv.rank {
                plain += &format!("rank {q}: {r}\n");
            }
            for (xi, layer) in inv.layers.iter().enumerate() {
                plain += &format!("layer {xi}: {}\n", join(layer));
            }
            plain += &format!("p0: {}", join(&inv.p0));
            Output::new(&out, plain)
        }
        Verb::PoReduce { file } => {
            let p = read_po(file)?;
            let (red, map) = p.base().reduce();
            #[derive(Serialize)]
            struct Out {
                system: PoFile,
                map: BTreeMap<String, String>,
            }
            let out = Out { system: red.to_file(), map };
            let mut plain = format!("elements: {}\n", out.system.elements.join(" "));
            let pairs: Vec<String> =
                out.system.lt.iter().map(|(a, b)| format!("{a}<{b}")).collect();
            plain += &format!("lt: {}\n", pairs.join(" "));
            let arrows: Vec<String> =
                out.map.iter().map(|(q, v)| format!("{q}->{v}")).collect();
            plain += &format!("map: {}", arrows.join(" "));
            Output::new(&out, plain)
        }
        Verb::PoPredict { file } => {
            let p = read_po(file)?;
            let LoadedPo::Extended(e) = p else {
                return Err(Failure::Domain(
                    "prediction needs an extended system: the file must carry L and f"
                        .to_owned(),
                ));
            };
            let t = e.predicted_invariants();
            #[derive(Serialize)]
            struct Out {
                nu: usize,
                lambda: usize,
                n: Value,
                rho: Option<usize>,
                rho_u_range: Option<(usize, usize)>,
                rho_u_excluded: Vec<usize>,
            }
            let out = Out {
                nu: t.nu,
                lambda: t.lambda,
                n: match t.n {
                    Some(n) => json!(n),
                    None => json!("-inf"),
                },
                rho: t.rho,
                rho_u_range: t.rho_u_range,
                rho_u_excluded: t.rho_u_excluded.clone(),
            };
            let mut plain = format!("nu: {}\nlambda: {}\nn: ", t.nu, t.lambda);
            match t.n {
                Some(n) => plain += &n.to_string(),
                None => plain += "-inf",
            }
            match t.rho {
                Some(r) => plain += &format!("\nrho: {r}"),
                None => plain += "\nrho: undetermined (system not reduced)",
            }
            match t.rho_u_range {
                Some((lo, hi)) => {
                    plain += &format!("\nrho_u: in {lo}..={hi}");
                    if !t.rho_u_excluded.is_empty() {
                        let ex: Vec<String> =
                            t.rho_u_excluded.iter().map(usize::to_string).collect();
                        plain += &format!(" excluding {}", ex.join(","));
                    }
                }
                None => plain += "\nrho_u: undetermined (system not reduced)",
            }
            Output::new(&out, plain)
        }
        Verb::MeasurePi { tree, region } => {
            let m: TreeMeasure = parse_arg("tree literal", tree)?;
            let region = parse_region(region)?;
            let yes =
                m.sigma_pi_decide(&region).map_err(|e| Failure::Domain(e.to_string()))?;
            let plain = if yes { "pseudo-indecomposable" } else { "splittable" };
            Output::new(&json!({ "pi": yes }), plain.to_owned())
        }
        Verb::MeasureIso { left, right, region_left, region_right } => {
            let l: TreeMeasure = parse_arg("tree literal", left)?;
            let r: TreeMeasure = parse_arg("tree literal", right)?;
            let rl = parse_region(region_left)?;
            let rr = parse_region(region_right)?;
            let yes = sigma_iso_decide(&l, &rl, &r, &rr)
                .map_err(|e| Failure::Domain(e.to_string()))?;
            let plain = if yes { "isomorphic" } else { "not isomorphic" };
            Output::new(&json!({ "iso": yes }), plain.to_owned())
        }
        Verb::ClosureHseq { k, variant, upto } => {
            let alg = qk_algebra(*k, *variant);
            let upto = upto.unwrap_or(*k as usize + 2);
            let stages = alg
                .h_sequence(&qk_closed_set(*k), upto)
                .map_err(|e| Failure::Domain(e.to_string()))?;
            let h: Vec<Vec<String>> = stages.iter().map(numeric_sorted).collect();
            let mut plain = String::new();
            for (i, stage) in h.iter().enumerate() {
                let row = if stage.is_empty() { "(empty)".to_owned() } else { stage.join(" ") };
                plain += &format!("h{}: {row}\n", i + 1);
            }
            plain.pop();
            Output::new(&json!({ "h": h }), plain)
        }
        Verb::ClosureWitness { k, m, variant } => {
            let w = incompatibility_witness(*k, *m, *variant)
                .map_err(|e| Failure::Domain(e.to_string()))?;
            #[derive(Serialize)]
            struct Out {
                witness: Option<IncompatibilityWitness>,
            }
            let plain = match &w {
                Some(w) => format!(
                    "stage {}: left {:?} ({} isolated), right {:?} ({} isolated)",
                    w.stage, w.left.kind, w.left.isolated, w.right.kind, w.right.isolated
                ),
                None => "no separating stage".to_owned(),
            };
            Output::new(&Out { witness: w }, plain)
        }
        Verb::ClosureReport { components, variant } => {
            let spec = CompletionSpec::new(parse_components(components)?, *variant);
            let report =
                spec.nonprimitivity_report().map_err(|e| Failure::Domain(e.to_string()))?;
            let mut plain = format!(
                "components: {}\n",
                report
                    .components
                    .iter()
                    .map(u64::to_string)
                    .collect::<Vec<_>>()
                    .join(" ")
            );
            plain += &format!("bad point: {}\n", report.bad_point);
            for w in &report.witnesses {
                plain += &format!(
                    "components {} and {} separate at stage {}\n",
                    w.first, w.second, w.witness.stage
                );
            }
            plain += &format!(
                "{}\n{}\n{}",
                report.case_away_from_bad_point, report.case_at_bad_point, report.conclusion
            );
            Output::new(&report, plain)
        }
    }
}

fn join(set: &BTreeSet<String>) -> String {
    if set.is_empty() {
        "(empty)".to_owned()
    } else {
        set.iter().cloned().collect::<Vec<_>>().join(" ")
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.verb) {
        Ok(out) => {
            if cli.plain {
                println!("{}", out.plain);
            } else {
                println!("{}", out.json);
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            if cli.plain {
                eprintln!("error: {}", f.message());
            } else {
                println!("{}", json!({ "error": f.message() }));
            }
            ExitCode::from(f.code())
        }
    }
}
