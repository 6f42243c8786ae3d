//! `gframe` command line: scenario files, analysis, verification,
//! generation and reconstruction.
//!
//! Exit codes: 0 success or frame, 1 usage / schema / input error,
//! 2 not a frame, 3 verification failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::controlled::{CommutationReport, ControlPair, ControlledScenario};
use crate::error::{GFrameError, Result};
use crate::frames::{FrameBounds, FrameKind, FrameVerdict, GFrameFamily, MeasurePoint};
use crate::generators::{self, GeneratorSpec};
use crate::io::{matrix_from_rows, rows_of, to_json_string};
use crate::linalg::CMat;
use crate::module_space::ModuleVector;
use crate::operators::{ModuleOperator, PositiveInvertibleOperator};
use crate::verifier::{self, SuiteOptions};
use crate::DEFAULT_TOL;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NOT_A_FRAME: i32 = 2;
pub const EXIT_VERIFY_FAILED: i32 = 3;

pub const SCENARIO_VERSION: u32 = 1;
pub const TOL_ENV: &str = "GFRAME_TOL";

type Rows = Vec<Vec<[f64; 2]>>;

/// A control operator in a scenario file: either the string `"identity"`
/// or a `(dn)×(dn)` matrix.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum ControlSpec {
    #[default]
    Identity,
    Matrix(Rows),
}

impl Serialize for ControlSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Identity => s.serialize_str("identity"),
            Self::Matrix(rows) => rows.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for ControlSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Tag(String),
            Matrix(Rows),
        }
        match Raw::deserialize(d)
            .map_err(|_| D::Error::custom("expected \"identity\" or a matrix of [re, im] pairs"))?
        {
            Raw::Tag(t) if t == "identity" => Ok(Self::Identity),
            Raw::Tag(t) => Err(D::Error::custom(format!("unknown control \"{t}\", expected \"identity\""))),
            Raw::Matrix(rows) => Ok(Self::Matrix(rows)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSpec {
    pub weight: f64,
    pub dw: usize,
    pub lambda: Rows,
}

/// On-disk scenario schema. `lambda` is the `(d·n)×(dw·n)` right-action
/// matrix of `Λ_w`: a vector flattened to `X ∈ ℂ^{n×dn}` maps to `X·lambda`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub version: u32,
    pub n: usize,
    pub d: usize,
    pub points: Vec<PointSpec>,
    #[serde(rename = "C", default)]
    pub c: ControlSpec,
    #[serde(rename = "Cprime", default)]
    pub cprime: ControlSpec,
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> GFrameError {
    GFrameError::Schema { path: path.into(), message: message.into() }
}

fn control_spec(op: &ModuleOperator) -> ControlSpec {
    if *op == ModuleOperator::identity(op.algebra_dim(), op.domain_rank()) {
        ControlSpec::Identity
    } else {
        ControlSpec::Matrix(rows_of(op.action()))
    }
}

impl ScenarioFile {
    pub fn from_scenario(s: &ControlledScenario) -> Self {
        let fam = s.family();
        Self {
            version: SCENARIO_VERSION,
            n: fam.algebra_dim(),
            d: fam.module_rank(),
            points: fam
                .points()
                .iter()
                .map(|p| PointSpec { weight: p.weight, dw: p.codomain_rank(), lambda: rows_of(p.lambda.action()) })
                .collect(),
            c: control_spec(s.pair().c().base()),
            cprime: control_spec(s.pair().cprime().base()),
        }
    }

    /// Parses JSON, reporting the path of the first schema violation.
    pub fn parse(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            schema(path, e.into_inner().to_string())
        })
    }

    fn matrix(rows: &Rows, path: &str, shape: (usize, usize)) -> Result<CMat> {
        let m = matrix_from_rows(rows).map_err(|e| schema(path, e))?;
        if (m.nrows(), m.ncols()) != shape {
            return Err(schema(
                path,
                format!("shape {}x{} but expected {}x{}", m.nrows(), m.ncols(), shape.0, shape.1),
            ));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(schema(path, "entries must be finite"));
        }
        Ok(m)
    }

    fn control(&self, spec: &ControlSpec, path: &str, tol: f64) -> Result<PositiveInvertibleOperator> {
        let (n, d) = (self.n, self.d);
        match spec {
            ControlSpec::Identity => Ok(PositiveInvertibleOperator::identity(n, d)),
            ControlSpec::Matrix(rows) => {
                let m = Self::matrix(rows, path, (d * n, d * n))?;
                let op = ModuleOperator::new(n, d, d, m)?;
                PositiveInvertibleOperator::new(&op, tol).map_err(|e| schema(path, e.to_string()))
            }
        }
    }

    /// Validates the schema, then builds the scenario.
    pub fn into_scenario(&self, tol: f64) -> Result<ControlledScenario> {
        if self.version != SCENARIO_VERSION {
            return Err(schema("version", format!("unsupported version {}, expected {SCENARIO_VERSION}", self.version)));
        }
        if self.n == 0 {
            return Err(schema("n", "must be at least 1"));
        }
        if self.d == 0 {
            return Err(schema("d", "must be at least 1"));
        }
        if self.points.is_empty() {
            return Err(schema("points", "must be non-empty"));
        }
        let (n, d) = (self.n, self.d);
        let mut points = Vec::with_capacity(self.points.len());
        for (i, p) in self.points.iter().enumerate() {
            if !(p.weight.is_finite() && p.weight > 0.0) {
                return Err(schema(format!("points[{i}].weight"), format!("must be positive, got {}", p.weight)));
            }
            if p.dw == 0 {
                return Err(schema(format!("points[{i}].dw"), "must be at least 1"));
            }
            let m = Self::matrix(&p.lambda, &format!("points[{i}].lambda"), (d * n, p.dw * n))?;
            points.push(MeasurePoint { weight: p.weight, lambda: ModuleOperator::new(n, d, p.dw, m)? });
        }
        let family = GFrameFamily::new(n, d, points)?;
        let c = self.control(&self.c, "C", tol)?;
        let cp = self.control(&self.cprime, "Cprime", tol)?;
        let pair = ControlPair::new(c, cp, tol).map_err(|e| schema("Cprime", e.to_string()))?;
        ControlledScenario::new(family, pair, tol)
    }
}

/// Reads and validates a scenario file.
pub fn load_scenario(path: &Path, tol: f64) -> Result<ControlledScenario> {
    let text = fs::read_to_string(path)
        .map_err(|e| GFrameError::InvalidValue(format!("cannot read {}: {e}", path.display())))?;
    ScenarioFile::parse(&text)?.into_scenario(tol)
}

/// Canonical scenario-file text.
pub fn scenario_to_json(s: &ControlledScenario) -> String {
    to_json_string(&ScenarioFile::from_scenario(s))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionNumbers {
    pub frame_operator: Option<f64>,
    pub controlled_frame_operator: Option<f64>,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "Cprime")]
    pub cprime: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub verdict: FrameKind,
    pub bounds: Option<FrameBounds>,
    pub bessel_bound: Option<f64>,
    pub controlled_verdict: Option<FrameKind>,
    pub controlled_bounds: Option<FrameBounds>,
    pub controlled_bessel_bound: Option<f64>,
    pub commutation: CommutationReport,
    pub condition_numbers: ConditionNumbers,
}

fn condition(verdict: &FrameVerdict) -> Option<f64> {
    verdict.bounds.map(|b| b.upper / b.lower)
}

pub fn analyze(s: &ControlledScenario, tol: f64) -> Result<AnalysisReport> {
    let verdict = s.family().classify(tol);
    let controlled = if s.commutation().passed { Some(s.controlled_classify(tol)?) } else { None };
    Ok(AnalysisReport {
        verdict: verdict.kind,
        bounds: verdict.bounds,
        bessel_bound: verdict.bessel_bound,
        controlled_verdict: controlled.as_ref().map(|v| v.kind),
        controlled_bounds: controlled.as_ref().and_then(|v| v.bounds),
        controlled_bessel_bound: controlled.as_ref().and_then(|v| v.bessel_bound),
        commutation: s.commutation().clone(),
        condition_numbers: ConditionNumbers {
            frame_operator: condition(&verdict),
            controlled_frame_operator: controlled.as_ref().and_then(condition),
            c: s.pair().c().condition_number(),
            cprime: s.pair().cprime().condition_number(),
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionReport {
    pub error: f64,
    pub relative_error: f64,
    pub bound: f64,
    pub condition_number: f64,
    pub xhat: ModuleVector,
}

/// Batch file: either a bare array of specs or an object that may also
/// scale every upper bound (for injecting failures).
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
enum BatchFile {
    Specs(Vec<GeneratorSpec>),
    Wrapped {
        specs: Vec<GeneratorSpec>,
        #[serde(default = "one")]
        upper_bound_scale: f64,
    },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Parser)]
#[command(name = "gframe", version, about = "Controlled continuous g-frames over matrix algebras")]
struct Cli {
    /// Worker threads for verification (output does not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Relative tolerance; defaults to $GFRAME_TOL or 1e-9.
    #[arg(long)]
    tol: Option<f64>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify a scenario file and report its bounds.
    Analyze {
        path: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run the theorem checks over a batch of generator specs.
    Verify {
        #[arg(long, conflicts_with = "default", required_unless_present = "default")]
        batch: Option<PathBuf>,
        #[arg(long)]
        default: bool,
        /// Random vectors per scenario for sampled inequalities.
        #[arg(long, default_value_t = SuiteOptions::default().samples)]
        samples: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Write the scenario described by a generator spec.
    Generate {
        /// Spec as inline JSON or a path to a JSON file.
        #[arg(long)]
        spec: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reconstruct a vector through the canonical dual.
    Reconstruct {
        path: PathBuf,
        /// Vector as inline JSON {"n", "d", "blocks"} or a path to one.
        #[arg(long, conflicts_with = "random", required_unless_present = "random")]
        vector: Option<String>,
        /// Seed for a random vector.
        #[arg(long)]
        random: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
}

/// Outcome of a command: text to emit and the exit code.
struct Output {
    text: String,
    code: i32,
}

fn default_tol() -> Result<f64> {
    match std::env::var(TOL_ENV) {
        Ok(v) => v
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|t| t.is_finite() && *t > 0.0)
            .ok_or_else(|| GFrameError::InvalidValue(format!("{TOL_ENV}={v:?} is not a positive number"))),
        Err(_) => Ok(DEFAULT_TOL),
    }
}

fn resolve_tol(tol: Option<f64>) -> Result<f64> {
    match tol {
        Some(t) if t.is_finite() && t > 0.0 => Ok(t),
        Some(t) => Err(GFrameError::InvalidValue(format!("--tol must be positive, got {t}"))),
        None => default_tol(),
    }
}

fn inline_or_file(arg: &str) -> Result<String> {
    if arg.trim_start().starts_with(['{', '[']) {
        Ok(arg.to_string())
    } else {
        fs::read_to_string(arg).map_err(|e| GFrameError::InvalidValue(format!("cannot read {arg}: {e}")))
    }
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        schema(path, e.into_inner().to_string())
    })
}

fn cmd_analyze(path: &Path, tol: f64) -> Result<Output> {
    let scenario = load_scenario(path, tol)?;
    let report = analyze(&scenario, tol)?;
    let code = if report.verdict == FrameKind::Frame { EXIT_OK } else { EXIT_NOT_A_FRAME };
    Ok(Output { text: to_json_string(&report), code })
}

fn cmd_verify(batch: Option<&Path>, samples: usize, tol: f64, threads: Option<usize>) -> Result<Output> {
    let (specs, upper_bound_scale) = match batch {
        None => (generators::default_batch(), 1.0),
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| GFrameError::InvalidValue(format!("cannot read {}: {e}", path.display())))?;
            match serde_json::from_str::<BatchFile>(&text)
                .map_err(|_| schema("", "expected an array of generator specs or {\"specs\": [...]}"))?
            {
                BatchFile::Specs(s) => (s, 1.0),
                BatchFile::Wrapped { specs, upper_bound_scale } => (specs, upper_bound_scale),
            }
        }
    };
    if !(upper_bound_scale.is_finite() && upper_bound_scale > 0.0) {
        return Err(schema("upper_bound_scale", "must be positive"));
    }
    let opts = SuiteOptions { tol, samples, upper_bound_scale };
    let run = || verifier::run_suite(&specs, &opts);
    let report = match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| GFrameError::InvalidValue(format!("cannot start {t} threads: {e}")))?
            .install(run)?,
        None => run()?,
    };
    let code = if report.normative_passed() { EXIT_OK } else { EXIT_VERIFY_FAILED };
    Ok(Output { text: to_json_string(&report), code })
}

fn cmd_generate(spec: &str) -> Result<Output> {
    let spec: GeneratorSpec = parse_json(&inline_or_file(spec)?)?;
    let scenario = generators::generate(&spec)?;
    Ok(Output { text: scenario_to_json(&scenario), code: EXIT_OK })
}

fn cmd_reconstruct(path: &Path, vector: Option<&str>, random: Option<u64>, tol: f64) -> Result<Output> {
    let scenario = load_scenario(path, tol)?;
    let (n, d) = (scenario.family().algebra_dim(), scenario.family().module_rank());
    let x = match (vector, random) {
        (Some(v), _) => {
            let x: ModuleVector = parse_json(&inline_or_file(v)?)?;
            if (x.algebra_dim(), x.rank()) != (n, d) {
                return Err(GFrameError::DimensionMismatch(format!(
                    "vector lives in M_{}^{} but the scenario needs M_{n}^{d}",
                    x.algebra_dim(),
                    x.rank()
                )));
            }
            x
        }
        (None, Some(seed)) => generators::random_vectors(n, d, 1, seed).remove(0),
        (None, None) => return Err(GFrameError::InvalidValue("one of --vector or --random is required".into())),
    };
    let r = scenario.reconstruct(&x)?;
    let norm = x.norm();
    let report = ReconstructionReport {
        error: r.error,
        relative_error: if norm > 0.0 { r.error / norm } else { r.error },
        bound: r.bound,
        condition_number: if norm > 0.0 { r.bound / (1e-8 * norm) } else { f64::NAN },
        xhat: r.xhat,
    };
    Ok(Output { text: to_json_string(&report), code: EXIT_OK })
}

fn exit_code(err: &GFrameError) -> i32 {
    match err {
        GFrameError::NotAFrame { .. } => EXIT_NOT_A_FRAME,
        _ => EXIT_INPUT,
    }
}

fn emit(text: &str, out: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text)
            .map_err(|e| GFrameError::InvalidValue(format!("cannot write {}: {e}", p.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| GFrameError::InvalidValue(format!("cannot write stdout: {e}"))),
    }
}

/// Runs the CLI on `args` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let informational = matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion);
            let _ = if informational { write!(stdout, "{e}") } else { write!(stderr, "{e}") };
            return if informational { EXIT_OK } else { EXIT_INPUT };
        }
    };
    if cli.threads == Some(0) {
        let _ = writeln!(stderr, "error: --threads must be at least 1");
        return EXIT_INPUT;
    }
    let result = (|| -> Result<(Output, Option<PathBuf>)> {
        Ok(match cli.command {
            Command::Analyze { path, common } => (cmd_analyze(&path, resolve_tol(common.tol)?)?, common.out),
            Command::Verify { batch, default: _, samples, common } => {
                (cmd_verify(batch.as_deref(), samples, resolve_tol(common.tol)?, cli.threads)?, common.out)
            }
            Command::Generate { spec, out } => (cmd_generate(&spec)?, out),
            Command::Reconstruct { path, vector, random, common } => {
                (cmd_reconstruct(&path, vector.as_deref(), random, resolve_tol(common.tol)?)?, common.out)
            }
        })
    })();
    match result {
        Ok((output, out)) => match emit(&output.text, out.as_deref(), stdout) {
            Ok(()) => output.code,
            Err(e) => {
                let _ = writeln!(stderr, "error: {e}");
                EXIT_INPUT
            }
        },
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::Flavor;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("gframe").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    fn parseval_text() -> String {
        scenario_to_json(&generators::generate(&GeneratorSpec::new(3, 2, 2, 3, Flavor::Parseval)).unwrap())
    }

    #[test]
    fn scenario_round_trip_is_byte_identical() {
        for flavor in [Flavor::Commuting, Flavor::Parseval, Flavor::Generic, Flavor::BesselOnly] {
            let s = generators::generate(&GeneratorSpec::new(11, 2, 3, 4, flavor)).unwrap();
            let text = scenario_to_json(&s);
            let back = ScenarioFile::parse(&text).unwrap().into_scenario(DEFAULT_TOL).unwrap();
            assert_eq!(scenario_to_json(&back), text, "{flavor:?}");
        }
    }

    #[test]
    fn identity_controls_are_written_by_name() {
        let text = parseval_text();
        assert!(text.contains("\"C\":\"identity\""));
        assert!(text.contains("\"Cprime\":\"identity\""));
    }

    #[test]
    fn negative_weight_names_its_path() {
        let mut v: serde_json::Value = serde_json::from_str(&parseval_text()).unwrap();
        v["points"][0]["weight"] = serde_json::json!(-1.0);
        let err = ScenarioFile::parse(&v.to_string()).unwrap().into_scenario(DEFAULT_TOL).unwrap_err();
        assert!(err.to_string().contains("points[0].weight"), "{err}");
    }

    #[test]
    fn type_errors_name_their_path() {
        let mut v: serde_json::Value = serde_json::from_str(&parseval_text()).unwrap();
        v["points"][1]["dw"] = serde_json::json!("two");
        let err = ScenarioFile::parse(&v.to_string()).unwrap_err();
        assert!(err.to_string().contains("points[1].dw"), "{err}");
    }

    #[test]
    fn wrong_lambda_shape_is_a_schema_error() {
        let mut v: serde_json::Value = serde_json::from_str(&parseval_text()).unwrap();
        v["points"][0]["dw"] = serde_json::json!(7);
        let err = ScenarioFile::parse(&v.to_string()).unwrap().into_scenario(DEFAULT_TOL).unwrap_err();
        assert!(err.to_string().contains("points[0].lambda"), "{err}");
    }

    #[test]
    fn analyze_parseval_reports_unit_bounds() {
        let s = ScenarioFile::parse(&parseval_text()).unwrap().into_scenario(DEFAULT_TOL).unwrap();
        let r = analyze(&s, DEFAULT_TOL).unwrap();
        assert_eq!(r.verdict, FrameKind::Frame);
        let b = r.bounds.unwrap();
        assert!((b.lower - 1.0).abs() < 1e-12 && (b.upper - 1.0).abs() < 1e-12);
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run_str(&[]).0, EXIT_INPUT);
        assert_eq!(run_str(&["frobnicate"]).0, EXIT_INPUT);
        assert_eq!(run_str(&["verify"]).0, EXIT_INPUT);
        assert_eq!(run_str(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn invalid_flavor_exits_one() {
        let (code, _, err) = run_str(&["generate", "--spec", r#"{"seed":1,"n":1,"d":1,"m":1,"flavor":"fancy"}"#]);
        assert_eq!(code, EXIT_INPUT);
        assert!(err.contains("flavor"), "{err}");
    }

    #[test]
    fn generate_writes_to_stdout() {
        let (code, out, _) = run_str(&["generate", "--spec", r#"{"seed":3,"n":2,"d":2,"m":3,"flavor":"parseval"}"#]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(out, parseval_text());
    }
}
