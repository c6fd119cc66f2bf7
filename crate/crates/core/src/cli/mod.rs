//! Command-line front end.
//!
//! Exit codes: 0 success/true, 1 property false, 2 input error, 3 unsupported.

pub mod doc;
pub mod svg;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::{json, Value};
use thiserror::Error;

use crate::hyperdual::{self, HyperError, LatticePolytope, LiftFunction, LatticeSubdivision};
use crate::kweight::{self, KWeightError, KWeighting, Stratification};
use crate::lattice::{IntMatrix, LatticeError, Rat, RatVector};
use crate::polyhedral::{self, Fan, PolyError, PolyhedralComplex};
use crate::project::{self, ProjectError, Regime, TropicalCycle};
use crate::torick::{self, ToricEngine, ToricError};

pub use doc::{parse_document, parse_document_with, serialize, Base, Document, Kind, Payload, WeightingDoc};
pub use svg::{render_svg, RenderInput, Window};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CliError {
    #[error("schema error at {path}: {reason}")]
    Schema { path: String, reason: String },
    #[error("unknown document kind {0:?}")]
    UnknownKind(String),
    #[error("unsupported schema version {0}")]
    VersionUnsupported(String),
    #[error("{0}")]
    Io(String),
    #[error("input error: {0}")]
    Input(String),
    #[error("rendering needs rank 2, got rank {0}")]
    UnsupportedRank(usize),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn schema(path: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::Schema { path: path.into(), reason: reason.into() }
    }

    /// Prefix the JSON path of an error raised inside a referenced document.
    fn nested(self, at: &str) -> Self {
        match self {
            CliError::Schema { path, reason } => CliError::Schema { path: format!("{at}->{path}"), reason },
            other => other,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Failed(_) => 1,
            CliError::UnsupportedRank(_) | CliError::Unsupported(_) => 3,
            _ => 2,
        }
    }
}

impl From<PolyError> for CliError {
    fn from(e: PolyError) -> Self {
        match e {
            PolyError::RecessionNotFan(_) | PolyError::NotFlat(_) => CliError::Unsupported(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<LatticeError> for CliError {
    fn from(e: LatticeError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<KWeightError> for CliError {
    fn from(e: KWeightError) -> Self {
        match e {
            KWeightError::Poly(p) => p.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<ToricError> for CliError {
    fn from(e: ToricError) -> Self {
        match e {
            ToricError::UnsupportedFan(_) | ToricError::RankTooLarge { .. } => CliError::Unsupported(e.to_string()),
            ToricError::IntegralityViolation(_) => CliError::Failed(e.to_string()),
            ToricError::Poly(p) => p.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<ProjectError> for CliError {
    fn from(e: ProjectError) -> Self {
        match e {
            ProjectError::UnsupportedRegime(_) => CliError::Unsupported(e.to_string()),
            ProjectError::NotACycle(_) => CliError::Failed(e.to_string()),
            ProjectError::Poly(p) => p.into(),
            ProjectError::KWeight(k) => k.into(),
            ProjectError::Toric(t) => t.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<HyperError> for CliError {
    fn from(e: HyperError) -> Self {
        match e {
            HyperError::TooLarge(_) | HyperError::UnsupportedRank(_) => CliError::Unsupported(e.to_string()),
            HyperError::AsymptoticsMismatch(_) => CliError::Failed(e.to_string()),
            HyperError::Poly(p) => p.into(),
            HyperError::Project(p) => p.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Parser, Debug)]
#[command(name = "ktrop", version, about = "Exact computations with K-weighted fans and polyhedral complexes")]
pub struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value = "text", global = true)]
    pub format: Format,
    /// Worker threads for parallel library routines (output does not depend on it).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse and validate a document.
    Validate { file: PathBuf },
    /// Star fan of a complex (or weighting) at a cell.
    Star {
        file: PathBuf,
        #[arg(long)]
        cell: String,
    },
    /// Recession fan of a complex.
    Recession { file: PathBuf },
    /// Asymptotic weights of a weighting.
    Asymptotic { file: PathBuf },
    /// Total Euler characteristic of a weighting.
    TotalChi { file: PathBuf },
    /// Canonical coarsening.
    Coarsen {
        file: PathBuf,
        /// Merge whole level sets instead of connected pieces.
        #[arg(long)]
        level_sets: bool,
    },
    /// Truncation below a dimension.
    Truncate {
        file: PathBuf,
        #[arg(long)]
        below: usize,
    },
    /// Full dimension filtration.
    Filtration { file: PathBuf },
    /// χ of a line bundle (comma-separated divisor coefficients) or of a class file.
    Chi {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true, conflicts_with = "class")]
        divisor: Option<String>,
        #[arg(long)]
        class: Option<PathBuf>,
    },
    /// Pairing matrix of a smooth complete fan.
    Pairing { file: PathBuf },
    /// K-balancing test for a weighted fan or complex.
    Balance {
        file: PathBuf,
        /// Report a witness class.
        #[arg(long)]
        witness: bool,
        /// Run the character tests on every star.
        #[arg(long)]
        character_tests: bool,
    },
    /// Pushforward weights along a projection.
    Project {
        file: PathBuf,
        #[arg(long)]
        matrix: PathBuf,
        /// K-class witnessing the weighting (selects the witness regime).
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Fiber of a projection over a point.
    Slice {
        file: PathBuf,
        #[arg(long)]
        matrix: PathBuf,
        /// Comma-separated rational coordinates.
        #[arg(long, allow_hyphen_values = true)]
        at: String,
    },
    /// Push a tropical cycle forward along a projection.
    PushCycle {
        file: PathBuf,
        #[arg(long)]
        matrix: PathBuf,
        /// Cycle dimension (defaults to the weighted dimension).
        #[arg(long)]
        dim: Option<usize>,
    },
    /// Dual hypersurface of a lattice polytope.
    Dual { file: PathBuf },
    /// Tropical hypersurface and subdivision of a lift.
    FromLift { polytope: PathBuf, lift: PathBuf },
    /// Regular subdivision types seen by bounded lifts.
    Enumerate {
        file: PathBuf,
        #[arg(long)]
        bound: u32,
    },
    /// SVG drawing of a rank-2 complex, weighting or its coarsening.
    Render {
        file: PathBuf,
        /// x0,y0,x1,y1
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
        #[arg(long)]
        coarsen: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Output of a command: a JSON report (or raw text, for SVG) plus its truth value.
pub struct Outcome {
    pub report: Report,
    pub ok: bool,
}

pub enum Report {
    Json(Value),
    Raw(String),
}

impl Outcome {
    fn yes(v: Value) -> Self {
        Outcome { report: Report::Json(v), ok: true }
    }
}

pub fn read_document(path: &Path) -> Result<Document, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let resolve = move |r: &str| std::fs::read_to_string(dir.join(r)).map_err(|e| format!("{r}: {e}"));
    parse_document_with(&text, &resolve)
}

fn expect_weighting(d: Document) -> Result<WeightingDoc, CliError> {
    match d.payload {
        Payload::Weighting(w) => Ok(w),
        _ => Err(CliError::Input(format!("expected a weighting document, got {}", d.kind().name()))),
    }
}

fn expect_fan(d: &Document) -> Result<Fan, CliError> {
    match &d.payload {
        Payload::Fan(f) => Ok(f.clone()),
        Payload::Complex(c) => Fan::from_complex(c.clone()).map_err(CliError::from),
        Payload::Weighting(w) => w.base.fan().ok_or_else(|| CliError::Input("weighting is not on a fan".into())),
        _ => Err(CliError::Input(format!("expected a fan, got {}", d.kind().name()))),
    }
}

fn expect_complex(d: &Document) -> Result<Arc<PolyhedralComplex>, CliError> {
    match &d.payload {
        Payload::Fan(f) => Ok(f.complex_arc()),
        Payload::Complex(c) => Ok(c.clone()),
        Payload::Weighting(w) => Ok(w.base.complex()),
        _ => Err(CliError::Input(format!("expected a fan or complex, got {}", d.kind().name()))),
    }
}

fn expect_matrix(path: &Path) -> Result<IntMatrix, CliError> {
    match read_document(path)?.payload {
        Payload::Projection(m) => Ok(m),
        _ => Err(CliError::Input("expected a projection document".into())),
    }
}

fn expect_polytope(path: &Path) -> Result<LatticePolytope, CliError> {
    match read_document(path)?.payload {
        Payload::Polytope(p) => Ok(p),
        _ => Err(CliError::Input("expected a polytope document".into())),
    }
}

fn weighting_doc(base: Base, weights: KWeighting) -> Value {
    serialize(&Document::new(Payload::Weighting(WeightingDoc { base, weights })))
}

fn strata_report(s: &Stratification) -> Value {
    let g = s.complex();
    let strata: Vec<Value> = (0..s.num_strata())
        .map(|i| {
            json!({
                "weight": s.weight(i).to_string(),
                "dim": s.dim(i),
                "cells": s.cells(i).iter().map(|&c| g.id(c)).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({"num_strata": s.num_strata(), "strata": strata})
}

fn cycle_report(c: &TropicalCycle) -> Value {
    let cells: serde_json::Map<String, Value> =
        c.top_cells().into_iter().map(|(id, w)| (id, Value::String(w.to_string()))).collect();
    json!({"dim": c.dim(), "cells": cells, "balanced": project::check_cycle_balanced(c).balanced})
}

fn subdivision_report(s: &LatticeSubdivision) -> Value {
    Value::Array(
        s.cells
            .iter()
            .map(|c| Value::Array(c.iter().map(|p| Value::Array(p.entries.iter().map(|x| json!(x.to_string())).collect())).collect()))
            .collect(),
    )
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.trim().parse::<T>().map_err(|_| CliError::Input(format!("bad {what} entry {p:?}"))))
        .collect()
}

fn regime_name(r: Regime) -> &'static str {
    match r {
        Regime::TopDimensional => "top-dimensional",
        Regime::UnitIndex => "unit-index",
        Regime::Witness => "witness",
    }
}

fn dispatch(cmd: &Command) -> Result<Outcome, CliError> {
    match cmd {
        Command::Validate { file } => {
            let d = read_document(file)?;
            let mut info = json!({"kind": d.kind().name(), "version": d.version});
            match &d.payload {
                Payload::Fan(f) => {
                    info["rank"] = json!(f.rank());
                    info["cones"] = json!(f.num_cones());
                    info["complete"] = json!(f.is_complete());
                    info["smooth"] = json!(f.is_smooth());
                    info["ids"] = json!(f.complex().ids());
                }
                Payload::Complex(c) => {
                    info["rank"] = json!(c.rank());
                    info["cells"] = json!(c.len());
                    info["ids"] = json!(c.ids());
                }
                Payload::Weighting(w) => {
                    info["cells"] = json!(w.weights.complex().len());
                    info["weighted_dim"] = json!(w.weights.weighted_dim());
                }
                Payload::KClass(k) => info["terms"] = json!(k.terms.len()),
                Payload::Projection(m) => info["shape"] = json!([m.rows, m.cols]),
                Payload::Polytope(p) => info["lattice_points"] = json!(p.lattice_points().len()),
                Payload::Lift(l) => info["points"] = json!(l.heights.len()),
            }
            Ok(Outcome::yes(info))
        }
        Command::Star { file, cell } => {
            let d = read_document(file)?;
            let g = expect_complex(&d)?;
            let i = g.find(cell).ok_or_else(|| CliError::Input(format!("unknown cell {cell}")))?;
            let star = polyhedral::star_fan(&g, i)?;
            if let Payload::Weighting(w) = &d.payload {
                let weights = star.origin.iter().map(|&c| w.weights.get(c).clone()).collect();
                let k = KWeighting::new(star.fan.complex_arc(), weights)?;
                return Ok(Outcome::yes(weighting_doc(Base::Fan(star.fan), k)));
            }
            Ok(Outcome::yes(serialize(&Document::new(Payload::Fan(star.fan)))))
        }
        Command::Recession { file } => {
            let g = expect_complex(&read_document(file)?)?;
            let r = polyhedral::recession_fan(&g)?;
            Ok(Outcome::yes(serialize(&Document::new(Payload::Fan(r.fan)))))
        }
        Command::Asymptotic { file } => {
            let w = expect_weighting(read_document(file)?)?;
            let (fan, k0) = kweight::asymptotic_weights(w.weights.complex(), &w.weights)?;
            Ok(Outcome::yes(weighting_doc(Base::Fan(fan), k0)))
        }
        Command::TotalChi { file } => {
            let w = expect_weighting(read_document(file)?)?;
            Ok(Outcome::yes(json!({"total_chi": kweight::total_chi(w.weights.complex(), &w.weights)?.to_string()})))
        }
        Command::Coarsen { file, level_sets } => {
            let w = expect_weighting(read_document(file)?)?;
            let s = kweight::coarsening(w.weights.complex(), &w.weights, !*level_sets)?;
            Ok(Outcome::yes(strata_report(&s)))
        }
        Command::Truncate { file, below } => {
            let w = expect_weighting(read_document(file)?)?;
            let s = kweight::truncate_below(w.weights.complex(), &w.weights, *below)?;
            Ok(Outcome::yes(strata_report(&s)))
        }
        Command::Filtration { file } => {
            let w = expect_weighting(read_document(file)?)?;
            let f = kweight::dimension_filtration(w.weights.complex(), &w.weights)?;
            Ok(Outcome::yes(json!({"levels": f.iter().map(strata_report).collect::<Vec<_>>()})))
        }
        Command::Chi { file, divisor, class } => {
            let fan = expect_fan(&read_document(file)?)?;
            let engine = ToricEngine::new(&fan)?;
            let chi = match (divisor, class) {
                (Some(d), _) => {
                    let a: Vec<BigInt> = parse_list(d, "divisor")?;
                    if a.len() != engine.nrays() {
                        return Err(CliError::Input(format!("{} coefficients for {} rays", a.len(), engine.nrays())));
                    }
                    engine.chi_line_bundle(&a)?
                }
                (None, Some(c)) => match read_document(c)?.payload {
                    Payload::KClass(k) => engine.euler_char(&k.to_class(engine.nrays())?)?,
                    _ => return Err(CliError::Input("expected a kclass document".into())),
                },
                (None, None) => engine.chi_line_bundle(&vec![BigInt::from(0); engine.nrays()])?,
            };
            Ok(Outcome::yes(json!({"chi": chi.to_string()})))
        }
        Command::Pairing { file } => {
            let fan = expect_fan(&read_document(file)?)?;
            let pm = torick::pairing_matrix(&fan)?;
            let rows: Vec<Value> = pm.entries.row_vecs().iter().map(|r| json!(r.iter().map(|x| x.to_string()).collect::<Vec<_>>())).collect();
            Ok(Outcome::yes(json!({"cones": pm.cones, "matrix": rows})))
        }
        Command::Balance { file, witness, character_tests } => {
            let w = expect_weighting(read_document(file)?)?;
            match w.base.fan() {
                Some(fan) => {
                    let engine = ToricEngine::new(&fan)?;
                    let k = KWeighting::new(fan.complex_arc(), w.weights.weights().to_vec())?;
                    let rep = engine.is_balanced_fan(&k)?;
                    let mut out = json!({"balanced": rep.balanced, "rationally_balanced": rep.rational});
                    if *witness {
                        out["witness"] = match &rep.witness {
                            Some(c) => {
                                let cls = engine.class_from_witness(c);
                                serialize(&Document::new(Payload::KClass(doc::KClassDoc::from_class(&cls))))
                            }
                            None => Value::Null,
                        };
                    }
                    let mut ok = rep.balanced;
                    if *character_tests {
                        let tests = engine.character_tests(&k)?;
                        let failing: Vec<Value> = tests
                            .iter()
                            .filter(|t| t.residual != BigInt::from(0))
                            .map(|t| json!({"cone": t.cone, "u": t.u.entries.iter().map(|x| x.to_string()).collect::<Vec<_>>(), "residual": t.residual.to_string()}))
                            .collect();
                        ok &= failing.is_empty();
                        out["character_tests"] = json!({"count": tests.len(), "failing": failing});
                    }
                    Ok(Outcome { report: Report::Json(out), ok })
                }
                None => {
                    let rep = torick::is_balanced_complex(w.weights.complex(), &w.weights)?;
                    let bad: Vec<&String> = rep.per_cell.iter().filter(|(_, b)| !b).map(|(id, _)| id).collect();
                    Ok(Outcome { report: Report::Json(json!({"balanced": rep.balanced, "unbalanced_cells": bad})), ok: rep.balanced })
                }
            }
        }
        Command::Project { file, matrix, witness } => {
            let w = expect_weighting(read_document(file)?)?;
            let pi = expect_matrix(matrix)?;
            let alpha = match witness {
                Some(p) => {
                    let fan = w.base.fan().ok_or_else(|| CliError::Input("witness regime needs a fan".into()))?;
                    match read_document(p)?.payload {
                        Payload::KClass(k) => Some(k.to_class(fan.rays().len())?),
                        _ => return Err(CliError::Input("expected a kclass document".into())),
                    }
                }
                None => None,
            };
            let g = w.weights.complex_arc();
            let push = project::pushforward_weights(&g, &w.weights, &pi, alpha.as_ref())?;
            let mut out = weighting_doc(Base::Complex(push.weights.complex_arc()), push.weights.clone());
            out["regime"] = json!(regime_name(push.regime));
            if !push.representatives.is_empty() {
                out["representatives"] = Value::Object(push.representatives.iter().map(|(id, v)| (id.clone(), json!(v.to_string()))).collect());
            }
            Ok(Outcome::yes(out))
        }
        Command::Slice { file, matrix, at } => {
            let w = expect_weighting(read_document(file)?)?;
            let pi = expect_matrix(matrix)?;
            let p = RatVector::new(parse_list::<Rat>(at, "point")?);
            let s = project::slice(&w.weights.complex_arc(), &w.weights, &pi, &p)?;
            let mut out = weighting_doc(Base::Complex(s.fiber.clone()), s.weights.clone());
            out["target_cell"] = json!(s.target_cell);
            Ok(Outcome::yes(out))
        }
        Command::PushCycle { file, matrix, dim } => {
            let w = expect_weighting(read_document(file)?)?;
            let pi = expect_matrix(matrix)?;
            let d = dim.or_else(|| w.weights.weighted_dim()).unwrap_or(0);
            let c = TropicalCycle::new(w.weights.clone(), d)?;
            let pushed = project::cycle_pushforward(&c, &pi)?;
            let rep = cycle_report(&pushed);
            let ok = rep["balanced"].as_bool().unwrap_or(false);
            Ok(Outcome { report: Report::Json(rep), ok })
        }
        Command::Dual { file } => {
            let p = expect_polytope(file)?;
            Ok(Outcome::yes(cycle_report(&hyperdual::dual_hypersurface(&p)?)))
        }
        Command::FromLift { polytope, lift } => {
            let p = expect_polytope(polytope)?;
            let h = match read_document(lift)?.payload {
                Payload::Lift(l) => LiftFunction::new(&p, l.heights)?,
                _ => return Err(CliError::Input("expected a lift document".into())),
            };
            let (c, s) = hyperdual::tropical_from_lift(&p, &h)?;
            let mut rep = cycle_report(&c);
            rep["subdivision"] = subdivision_report(&s);
            Ok(Outcome::yes(rep))
        }
        Command::Enumerate { file, bound } => {
            let p = expect_polytope(file)?;
            let types = hyperdual::enumerate_types(&p, *bound)?;
            Ok(Outcome::yes(json!({"count": types.len(), "subdivisions": types.iter().map(subdivision_report).collect::<Vec<_>>()})))
        }
        Command::Render { file, window, coarsen, output } => {
            let d = read_document(file)?;
            let win = window.as_deref().map(Window::parse).transpose()?;
            let svg = match &d.payload {
                Payload::Weighting(w) if *coarsen => {
                    let s = kweight::canonical_coarsening(w.weights.complex(), &w.weights)?;
                    render_svg(RenderInput::Strata(&s), win.as_ref())?
                }
                Payload::Weighting(w) => render_svg(RenderInput::Weighted(&w.weights), win.as_ref())?,
                _ => {
                    let g = expect_complex(&d)?;
                    render_svg(RenderInput::Complex(&g), win.as_ref())?
                }
            };
            match output {
                Some(path) => {
                    std::fs::write(path, &svg).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                    Ok(Outcome::yes(json!({"written": path.display().to_string()})))
                }
                None => Ok(Outcome { report: Report::Raw(svg), ok: true }),
            }
        }
    }
}

fn text_lines(v: &Value, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    let scalar = |v: &Value| match v {
        Value::String(s) => Some(s.clone()),
        Value::Object(m) if m.is_empty() => Some("{}".to_string()),
        Value::Array(_) | Value::Object(_) => None,
        other => Some(other.to_string()),
    };
    let inline = |v: &Value| -> Option<String> {
        match v {
            Value::Array(a) => a.iter().map(|x| scalar(x).or_else(|| inline_arr(x))).collect::<Option<Vec<_>>>().map(|xs| format!("[{}]", xs.join(", "))),
            other => scalar(other),
        }
    };
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                match inline(x) {
                    Some(s) => out.push_str(&format!("{pad}{k}: {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        text_lines(x, indent + 2, out);
                    }
                }
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                match inline(x) {
                    Some(s) => out.push_str(&format!("{pad}- {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}- [{i}]\n"));
                        text_lines(x, indent + 2, out);
                    }
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other).unwrap())),
    }
}

fn inline_arr(v: &Value) -> Option<String> {
    match v {
        Value::Array(a) => a
            .iter()
            .map(|x| match x {
                Value::String(s) => Some(s.clone()),
                Value::Array(_) => inline_arr(x),
                Value::Object(_) => None,
                other => Some(other.to_string()),
            })
            .collect::<Option<Vec<_>>>()
            .map(|xs| format!("[{}]", xs.join(", "))),
        _ => None,
    }
}

/// Runs the CLI on the given arguments; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if code == 0 { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 2;
        }
    };
    match pool.install(|| dispatch(&cli.command)) {
        Ok(o) => {
            let text = match (&o.report, cli.format) {
                (Report::Raw(s), _) => s.clone(),
                (Report::Json(v), Format::Json) => serde_json::to_string_pretty(v).expect("serializable") + "\n",
                (Report::Json(v), Format::Text) => {
                    let mut s = String::new();
                    text_lines(v, 0, &mut s);
                    s
                }
            };
            let _ = out.write_all(text.as_bytes());
            if o.ok {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = match cli.format {
                Format::Json => writeln!(err, "{}", json!({"error": e.to_string(), "exit_code": e.exit_code()})),
                Format::Text => writeln!(err, "error: {e}"),
            };
            e.exit_code()
        }
    }
}
