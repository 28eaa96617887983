//! Command-line driver.
//!
//! Exit codes: 0 when every asserted check passes, 1 when at least one
//! fails, 2 on input or usage errors. `classify` and `list` are reports and
//! exit 0 whenever their input is valid.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use thiserror::Error;

use crate::catalog::{self, CatalogError};
use crate::classify::{
    class_residuals, contact_volume, f_basis, ClassReport, ClassifyError, FBasisResiduals,
    Tolerances,
};
use crate::expr::{load_structure_def, StructureDef, StructureError};
use crate::jet::Point;
use crate::structure::{StructureEvalError, WeakAcm};
use crate::suites::{
    emit_report, run_all_suites, run_curvature_suite, run_identity_suite, run_theorem_suite,
    run_validate_suite, sample_points, CheckReport, ReportFormat, SamplePlan, Strategy,
    SuiteError,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Eval(#[from] StructureEvalError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Suite(#[from] SuiteError),
    #[error("--at has {got} coordinates, the chart has {want}")]
    PointDim { got: usize, want: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Text => ReportFormat::Text,
            Format::Json => ReportFormat::Json,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteName {
    Identity,
    Curvature,
    Theorems,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SampleStrategy {
    Halton,
    Grid,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Sample points per structure.
    #[arg(long, global = true, default_value_t = 32)]
    pub points: usize,
    #[arg(long, global = true, env = "WQCM_SEED", default_value_t = 7)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true)]
    pub tol_algebraic: Option<f64>,
    #[arg(long, global = true)]
    pub tol_deriv: Option<f64>,
    #[arg(long, global = true)]
    pub tol_curv: Option<f64>,
    /// Omit the timestamp field.
    #[arg(long, global = true)]
    pub no_timestamp: bool,
    #[arg(long, global = true, value_enum, default_value = "halton")]
    pub strategy: SampleStrategy,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Check the weak almost-contact metric axioms.
    Validate { source: String },
    /// Report which structure classes hold.
    Classify { source: String },
    /// Run an identity suite.
    Check {
        #[arg(value_enum)]
        suite: SuiteName,
        source: String,
    },
    /// Build the f-basis at a point.
    Fbasis {
        source: String,
        /// Comma-separated coordinates; defaults to the domain center.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        at: Option<Vec<f64>>,
    },
    /// Evaluate the cone structure at `(p, t)`.
    Cone {
        source: String,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        at: Option<Vec<f64>>,
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
        t: f64,
    },
    /// List the built-in structures.
    List,
}

/// Parsed command line.
#[derive(Debug, Clone, Parser)]
#[command(name = "wqcm", version, about = "Verify weak almost-contact metric structures")]
pub struct CliConfig {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

impl Common {
    pub fn tolerances(&self) -> Tolerances {
        let d = Tolerances::default();
        Tolerances {
            algebraic: self.tol_algebraic.unwrap_or(d.algebraic),
            deriv: self.tol_deriv.unwrap_or(d.deriv),
            curvature: self.tol_curv.unwrap_or(d.curvature),
        }
    }

    pub fn plan(&self) -> SamplePlan {
        SamplePlan {
            count: self.points,
            seed: self.seed,
            strategy: match self.strategy {
                SampleStrategy::Halton => Strategy::Halton,
                SampleStrategy::Grid => Strategy::Grid,
            },
        }
    }

    fn timestamp(&self) -> Option<u64> {
        if self.no_timestamp {
            return None;
        }
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .ok()
            .map(|d| d.as_secs())
    }
}

/// `builtin:<key>` or a path to a structure file.
pub fn load_source(source: &str) -> Result<StructureDef, CliError> {
    if source.starts_with("builtin:") {
        return Ok(catalog::catalog(source)?);
    }
    let bytes = std::fs::read(source).map_err(|e| CliError::Read {
        path: source.to_string(),
        source: e,
    })?;
    Ok(load_structure_def(&bytes)?)
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn vec_of(v: &DVector<f64>) -> Vec<f64> {
    v.iter().copied().collect()
}

#[derive(Debug, Serialize)]
struct ClassifyOutput<'a> {
    structure: &'a str,
    seed: u64,
    points: usize,
    tol: Tolerances,
    classes: &'a [crate::classify::ClassVerdict],
    quasi_canonical_abs_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    timestamp: Option<u64>,
}

#[derive(Debug, Serialize)]
struct FBasisOutput {
    structure: String,
    point: Vec<f64>,
    xi: Vec<f64>,
    e: Vec<Vec<f64>>,
    fe: Vec<Vec<f64>>,
    lambda: Vec<f64>,
    residuals: FBasisResiduals,
    contact_volume: f64,
    tol: f64,
    pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    timestamp: Option<u64>,
}

#[derive(Debug, Serialize)]
struct ConeOutput {
    structure: String,
    point: Vec<f64>,
    t: f64,
    j: Vec<Vec<f64>>,
    p: Vec<Vec<f64>>,
    gbar: Vec<Vec<f64>>,
    /// Largest entry of `J² + P`.
    residual: f64,
    tol: f64,
    pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    timestamp: Option<u64>,
}

#[derive(Debug, Serialize)]
struct ListRow {
    key: &'static str,
    params: &'static str,
    summary: &'static str,
}

fn json_bytes<T: Serialize>(v: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("outputs always serialize");
    s.push('\n');
    s.into_bytes()
}

fn pick_point(acm: &WeakAcm, at: &Option<Vec<f64>>) -> Result<Point, CliError> {
    match at {
        None => Ok(acm.def().domain.center()),
        Some(c) if c.len() != acm.dim() => Err(CliError::PointDim {
            got: c.len(),
            want: acm.dim(),
        }),
        Some(c) => Ok(Point::new(c.clone())),
    }
}

fn class_text(r: &ClassReport, seed: u64) -> Vec<u8> {
    let mut s = format!("structure {}  points {}  seed {}\n", r.structure, r.points, seed);
    s += &format!("{:<20} {:>11} {:>11} {:>11}  holds\n", "class", "residual", "abs", "tol");
    for c in &r.classes {
        s += &format!(
            "{:<20} {:>11.3e} {:>11.3e} {:>11.3e}  {}\n",
            c.class.name(),
            c.max_residual,
            c.max_abs_residual,
            c.tol,
            if c.pass { "yes" } else { "no" }
        );
    }
    if let Some(q) = r.quasi_canonical {
        s += &format!("quasi defect at X = Y = e1: {q:.6e}\n");
    }
    s.into_bytes()
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
    format!("[{}]", parts.join(", "))
}

/// Run one command; returns the exit code and the bytes to emit.
fn execute(cfg: &CliConfig) -> Result<(i32, Vec<u8>), CliError> {
    let c = &cfg.common;
    let tol = c.tolerances();
    let plan = c.plan();
    let format = ReportFormat::from(c.format);
    let report = |mut r: CheckReport| {
        r.timestamp = c.timestamp();
        let code = if r.failed() { EXIT_FAIL } else { EXIT_PASS };
        (code, emit_report(&r, format))
    };
    match &cfg.command {
        Command::Validate { source } => {
            let acm = WeakAcm::new(load_source(source)?);
            Ok(report(run_validate_suite(&acm, &plan, &tol)?))
        }
        Command::Check { suite, source } => {
            let acm = WeakAcm::new(load_source(source)?);
            let r = match suite {
                SuiteName::Identity => run_identity_suite(&acm, &plan, &tol)?,
                SuiteName::Curvature => run_curvature_suite(&acm, &plan, &tol)?,
                SuiteName::Theorems => run_theorem_suite(&acm, &plan, &tol)?,
                SuiteName::All => run_all_suites(&acm, &plan, &tol)?,
            };
            Ok(report(r))
        }
        Command::Classify { source } => {
            let acm = WeakAcm::new(load_source(source)?);
            let pts = sample_points(&plan, &acm.def().domain)?;
            let r = class_residuals(&acm, &pts, plan.seed, &tol)?;
            let bytes = match c.format {
                Format::Json => json_bytes(&ClassifyOutput {
                    structure: &r.structure,
                    seed: plan.seed,
                    points: r.points,
                    tol,
                    classes: &r.classes,
                    quasi_canonical_abs_residual: r.quasi_canonical,
                    timestamp: c.timestamp(),
                }),
                Format::Text => class_text(&r, plan.seed),
            };
            Ok((EXIT_PASS, bytes))
        }
        Command::Fbasis { source, at } => {
            let acm = WeakAcm::new(load_source(source)?);
            let s = acm.at(&pick_point(&acm, at)?)?;
            let b = f_basis(&s)?;
            let residuals = b.residuals(&s);
            let pass = residuals.max() < tol.deriv;
            let out = FBasisOutput {
                structure: acm.name().to_string(),
                point: s.point.coords().to_vec(),
                xi: vec_of(&b.xi),
                e: b.e.iter().map(vec_of).collect(),
                fe: b.fe.iter().map(vec_of).collect(),
                lambda: b.lambda.clone(),
                residuals,
                contact_volume: contact_volume(&s, &b),
                tol: tol.deriv,
                pass,
                timestamp: c.timestamp(),
            };
            let bytes = match c.format {
                Format::Json => json_bytes(&out),
                Format::Text => {
                    let mut t = format!("structure {}  point {}\n", out.structure, fmt_vec(&out.point));
                    t += &format!("xi   {}\n", fmt_vec(&out.xi));
                    for (i, ((e, fe), l)) in out.e.iter().zip(&out.fe).zip(&out.lambda).enumerate() {
                        t += &format!("e{}   {}  lambda {l:.12}\nfe{}  {}\n", i + 1, fmt_vec(e), i + 1, fmt_vec(fe));
                    }
                    t += &format!("contact volume {:.12}\n", out.contact_volume);
                    t += &format!("max invariant defect {:.3e} (tol {:.1e})\n", residuals.max(), out.tol);
                    t.into_bytes()
                }
            };
            Ok((if pass { EXIT_PASS } else { EXIT_FAIL }, bytes))
        }
        Command::Cone { source, at, t } => {
            let acm = WeakAcm::new(load_source(source)?);
            let s = acm.at(&pick_point(&acm, at)?)?;
            let cone = s.cone(*t);
            let pass = cone.residual.is_finite() && cone.residual < tol.algebraic;
            let out = ConeOutput {
                structure: acm.name().to_string(),
                point: s.point.coords().to_vec(),
                t: *t,
                j: rows(&cone.j),
                p: rows(&cone.p),
                gbar: rows(&cone.gbar),
                residual: cone.residual,
                tol: tol.algebraic,
                pass,
                timestamp: c.timestamp(),
            };
            let bytes = match c.format {
                Format::Json => json_bytes(&out),
                Format::Text => {
                    let d = cone.gbar.nrows() - 1;
                    format!(
                        "structure {}  point {}  t {}\n|J^2 + P| {:.3e} (tol {:.1e})\ngbar(dt, dt) {:.17e}\n",
                        out.structure,
                        fmt_vec(&out.point),
                        t,
                        cone.residual,
                        out.tol,
                        cone.gbar[(d, d)]
                    )
                    .into_bytes()
                }
            };
            Ok((if pass { EXIT_PASS } else { EXIT_FAIL }, bytes))
        }
        Command::List => {
            let all = catalog::entries();
            let bytes = match c.format {
                Format::Json => json_bytes(
                    &all.iter()
                        .map(|e| ListRow {
                            key: e.key,
                            params: e.params,
                            summary: e.summary,
                        })
                        .collect::<Vec<_>>(),
                ),
                Format::Text => all
                    .iter()
                    .map(|e| format!("{}\n    params: {}\n    {}\n", e.key, e.params, e.summary))
                    .collect::<String>()
                    .into_bytes(),
            };
            Ok((EXIT_PASS, bytes))
        }
    }
}

/// Parse `argv`, run the command, and write its output to `out` (or to
/// `--output`). Errors go to `err`.
pub fn run_cli<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match CliConfig::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
                EXIT_INPUT
            } else {
                let _ = out.write_all(text.as_bytes());
                EXIT_PASS
            };
        }
    };
    let (code, bytes) = match execute(&cfg) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "wqcm: {e}");
            return EXIT_INPUT;
        }
    };
    let written = match &cfg.common.output {
        Some(path) => std::fs::write(path, &bytes).map_err(|e| CliError::Write {
            path: path.display().to_string(),
            source: e,
        }),
        None => out.write_all(&bytes).and_then(|_| out.flush()).map_err(|e| CliError::Write {
            path: "stdout".into(),
            source: e,
        }),
    };
    if let Err(e) = written {
        let _ = writeln!(err, "wqcm: {e}");
        return EXIT_INPUT;
    }
    code
}
