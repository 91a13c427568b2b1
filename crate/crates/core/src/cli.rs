//! Command-line front end. Every command produces one canonical JSON value;
//! some also write CSV artifacts.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::actions::{self, ActionSequence, MonotoneConcaveSeq};
use crate::designer;
use crate::diophantine::{QuadraticIrrational, SearchBudget};
use crate::error::{Error, Result};
use crate::genfun;
use crate::io::{self, canonical_string, JsonScalar};
use crate::pde_sim::{self, SimConfig};
use crate::potentials::{self, FitOptions};
use crate::spectral::{self, Potential, PotentialSpec};

pub const BUDGET_ENV: &str = "BO_SEARCH_BUDGET";

#[derive(Debug, Parser)]
#[command(name = "bo", version, about = "Benjamin-Ono spectral toolkit")]
pub struct Cli {
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Cap on worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues and gaps of the truncated Lax operator.
    Spectrum(SpectrumArgs),
    /// Trusted actions of a potential.
    Actions(PotentialArgs),
    /// Frequencies from actions, or actions from frequencies with --y.
    Freq(FreqArgs),
    /// Generating function by every available route.
    Genfun(GenfunArgs),
    /// Lacunary design with all frequencies in bZ up to a certified residual.
    DesignPeriodic(DesignPeriodicArgs),
    /// Quasiperiodic design with frequency vector (1, b).
    DesignQp(DesignQpArgs),
    /// Finite-gap actions with frequencies in (1/a)Z.
    DesignFgPeriodic(DesignFgArgs),
    /// Finite-gap potential with prescribed actions.
    Fit(FitArgs),
    /// Pseudo-spectral evolution with conservation diagnostics.
    Simulate(SimulateArgs),
    /// Run a golden suite of CLI invocations.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct PotentialArgs {
    #[arg(long)]
    pub potential: PathBuf,
    /// Truncation size (default: max(64, 4 x bandwidth)).
    #[arg(long)]
    pub modes: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub input: PotentialArgs,
    /// Solve at 2M as well and keep only converged eigenvalues.
    #[arg(long)]
    pub extrapolate: bool,
}

#[derive(Debug, Args)]
pub struct FreqArgs {
    /// Action sequence JSON.
    #[arg(long, conflicts_with = "y")]
    pub actions: Option<PathBuf>,
    /// Comma-separated `omega_check` values y_1..y_N (exact rationals).
    #[arg(long, value_delimiter = ',')]
    pub y: Option<Vec<String>>,
    /// Limit of a constant extension of y (defaults to the last value).
    #[arg(long, requires = "y")]
    pub y_limit: Option<String>,
    #[arg(long)]
    pub n_max: Option<u64>,
    /// Evaluate in exact arithmetic.
    #[arg(long)]
    pub exact: bool,
}

#[derive(Debug, Args)]
pub struct GenfunArgs {
    #[command(flatten)]
    pub input: PotentialArgs,
    /// Shifts lambda (default: 20 log-spaced offsets above -lambda_0).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub lambdas: Option<Vec<f64>>,
    /// Also write the table as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DesignPeriodicArgs {
    #[arg(long, default_value = "sqrt:2")]
    pub b: String,
    #[arg(long, default_value = "1")]
    pub y_inf: String,
    #[arg(long, default_value = "1/2")]
    pub eps0: String,
    #[arg(long, default_value_t = 6)]
    pub terms: usize,
}

#[derive(Debug, Args)]
pub struct DesignQpArgs {
    #[arg(long, default_value = "sqrt:2")]
    pub b: String,
    #[arg(long, allow_hyphen_values = true)]
    pub s: f64,
    #[arg(long, default_value_t = 12)]
    pub terms: usize,
}

#[derive(Debug, Args)]
pub struct DesignFgArgs {
    #[arg(long)]
    pub a: u64,
    #[arg(long, value_delimiter = ',', required = true)]
    pub ns: Vec<u64>,
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub ks: Vec<i64>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub actions: PathBuf,
    #[arg(long, default_value_t = 200)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 1e-11)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub potential: PathBuf,
    /// Constant added to the (mean-zero) potential.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub mean: f64,
    #[arg(long, default_value_t = 1.0)]
    pub t_final: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long, default_value_t = 256)]
    pub modes: usize,
    #[arg(long, default_value_t = 100)]
    pub cadence: usize,
    #[arg(long)]
    pub no_dealias: bool,
    /// Directory for trace.csv and trace.json.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub suite: PathBuf,
}

/// Diophantine budget, overridable through `BO_SEARCH_BUDGET`.
pub fn search_budget() -> Result<SearchBudget> {
    match std::env::var(BUDGET_ENV) {
        Ok(v) => v
            .trim()
            .parse::<u64>()
            .map(SearchBudget::with_steps)
            .map_err(|_| Error::domain(format!("{BUDGET_ENV} = '{v}' is not a step count"))),
        Err(_) => Ok(SearchBudget::default()),
    }
}

fn load_potential(path: &Path) -> Result<Potential> {
    let spec: PotentialSpec = serde_json::from_value(io::read_json(path)?)?;
    spec.to_potential()
}

fn qi(s: &str) -> Result<QuadraticIrrational> {
    s.parse()
}

fn actions_json<S: JsonScalar>(a: &ActionSequence<S>, freqs: &actions::FrequencyList<S>) -> Value {
    json!({
        "actions": io::actions_to_json(a),
        "n_max": freqs.n_max,
        "omega": freqs.omega.iter().map(JsonScalar::to_json).collect::<Vec<_>>(),
        "omega_check": freqs.omega_check.iter().map(JsonScalar::to_json).collect::<Vec<_>>(),
        "hamiltonian": actions::hamiltonian_from_actions(a).to_json(),
    })
}

fn freq_forward<S: JsonScalar>(v: &Value, n_max: Option<u64>) -> Result<Value> {
    let a: ActionSequence<S> = io::actions_from_json(v)?;
    let n = n_max.unwrap_or_else(|| a.max_index().max(1));
    let f = actions::frequencies_from_actions(&a, n)?;
    Ok(actions_json(&a, &f))
}

fn freq_inverse(y: &[String], limit: Option<&String>) -> Result<Value> {
    let rational = y.iter().chain(limit).all(|s| io::rational_from(&Value::String(s.clone())).is_ok());
    if rational {
        let parse = |s: &String| io::rational_from(&Value::String(s.clone()));
        let values = y.iter().map(parse).collect::<Result<Vec<BigRational>>>()?;
        return freq_inverse_in(values, limit.map(parse).transpose()?);
    }
    let values = y.iter().map(|s| qi(s)).collect::<Result<Vec<_>>>()?;
    freq_inverse_in(values, limit.map(|s| qi(s)).transpose()?)
}

fn freq_inverse_in<S: JsonScalar>(values: Vec<S>, limit: Option<S>) -> Result<Value> {
    let seq = MonotoneConcaveSeq::new(values, limit)?;
    let a = actions::actions_from_frequencies(&seq);
    let n = a.max_index().max(seq.values().len() as u64).max(1);
    let f = actions::frequencies_from_actions(&a, n)?;
    Ok(actions_json(&a, &f))
}

fn spectrum(args: &SpectrumArgs) -> Result<Value> {
    let u = load_potential(&args.input.potential)?;
    let m = args.input.modes.unwrap_or_else(|| u.default_truncation());
    let s = spectral::lax_spectrum(&u, m, args.extrapolate)?;
    Ok(io::to_value(&s))
}

fn actions_cmd(args: &PotentialArgs) -> Result<Value> {
    let u = load_potential(&args.potential)?;
    let m = args.modes.unwrap_or_else(|| u.default_truncation());
    let r = spectral::actions_from_potential(&u, m)?;
    let f = actions::frequencies_from_actions(&r.actions, r.n_keep.max(1) as u64)?;
    Ok(json!({
        "actions": io::actions_to_json(&r.actions),
        "formula_residual": r.formula_residual,
        "n_keep": r.n_keep,
        "lambda0": r.lambda0,
        "omega": f.omega,
        "hamiltonian": actions::hamiltonian_from_actions(&r.actions),
        "warnings": r.warnings,
    }))
}

fn genfun_cmd(args: &GenfunArgs) -> Result<Value> {
    let u = load_potential(&args.input.potential)?;
    let m = args.input.modes.unwrap_or_else(|| u.default_truncation());
    let spec = spectral::lax_spectrum(&u, m, true)?;
    let grid = args
        .lambdas
        .clone()
        .unwrap_or_else(|| genfun::default_lambda_grid(spec.lambda0()));
    let rows = genfun::genfun_table(&u, &spec, &grid, m)?;
    if let Some(path) = &args.csv {
        std::fs::write(path, genfun::table_csv(&rows))?;
    }
    let pz = genfun::PoleZeroData::from_spectrum(&spec)?;
    Ok(json!({
        "lambda0": spec.lambda0(),
        "n_keep": spec.n_keep,
        "rows": io::to_value(&rows),
        "poles": pz.poles(),
        "zeros": pz.zeros(),
    }))
}

fn fit_cmd(args: &FitArgs) -> Result<Value> {
    let target: ActionSequence<f64> = io::actions_from_json(&io::read_json(&args.actions)?)?;
    let r = potentials::fit_finite_gap(
        &target,
        FitOptions {
            max_iter: args.max_iter,
            tol: args.tol,
        },
    )?;
    let potential = PotentialSpec::FiniteGap {
        q: r.q.iter().map(|x| [*x, 0.0]).collect(),
    };
    Ok(json!({
        "q": r.q,
        "iterations": r.iterations,
        "residuals": r.residuals,
        "final_residuals": r.final_residuals,
        "max_residual": r.max_residual,
        "potential": io::to_value(&potential),
    }))
}

fn simulate_cmd(args: &SimulateArgs, threads: usize) -> Result<Value> {
    let u = load_potential(&args.potential)?;
    let cfg = SimConfig {
        modes: args.modes,
        dt: args.dt,
        t_final: args.t_final,
        dealias: !args.no_dealias,
        cadence: args.cadence,
        threads,
        ..SimConfig::default()
    };
    let trace = pde_sim::simulate(args.mean, &u, &cfg)?;
    let report = pde_sim::conservation_report(&trace);
    if let Some(dir) = &args.out_dir {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("trace.csv"), trace.csv())?;
        std::fs::write(dir.join("trace.json"), canonical_string(&trace.to_json()))?;
    }
    let first = &trace.snapshots[0];
    let last = trace.snapshots.last().expect("initial snapshot");
    let norm = pde_sim::l2_norm_sq(first);
    let ret = pde_sim::l2_distance_sq(first, last).sqrt();
    Ok(json!({
        "steps": trace.steps,
        "dt_used": trace.dt_used,
        "t_final": last.t,
        "return_distance": ret,
        "return_distance_rel": if norm > 0.0 { ret / norm.sqrt() } else { ret },
        "velocity": pde_sim::measure_velocity(&trace.snapshots).ok(),
        "conservation": io::to_value(&report),
    }))
}

/// Runs one command and returns its JSON result.
pub fn execute(cli: &Cli) -> Result<Value> {
    match &cli.command {
        Command::Spectrum(a) => spectrum(a),
        Command::Actions(a) => actions_cmd(a),
        Command::Freq(a) => match (&a.actions, &a.y) {
            (Some(path), None) => {
                let v = io::read_json(path)?;
                if a.exact {
                    // rational input stays in Q so it serializes as [num, den]
                    freq_forward::<BigRational>(&v, a.n_max)
                        .or_else(|_| freq_forward::<QuadraticIrrational>(&v, a.n_max))
                } else {
                    freq_forward::<f64>(&v, a.n_max)
                }
            }
            (None, Some(y)) => freq_inverse(y, a.y_limit.as_ref()),
            _ => Err(Error::domain("freq needs exactly one of --actions or --y")),
        },
        Command::Genfun(a) => genfun_cmd(a),
        Command::DesignPeriodic(a) => {
            let d = designer::design_periodic_infinite(
                &qi(&a.b)?,
                &qi(&a.y_inf)?,
                &qi(&a.eps0)?,
                a.terms,
                search_budget()?,
            )?;
            Ok(d.to_json())
        }
        Command::DesignQp(a) => {
            let d = designer::design_quasiperiodic(&qi(&a.b)?, a.s, a.terms, search_budget()?)?;
            let report = designer::check_qp_dichotomy(&d.actions(), &d.k_map(), &d.omega(), 0.0);
            let mut v = d.to_json();
            v["dichotomy"] = report.to_json();
            Ok(v)
        }
        Command::DesignFgPeriodic(a) => Ok(designer::design_periodic_finite_gap(a.a, &a.ns, &a.ks)?.to_json()),
        Command::Fit(a) => fit_cmd(a),
        Command::Simulate(a) => simulate_cmd(a, cli.threads),
        Command::Verify(a) => verify_suite(&a.suite).map(|r| r.to_json()),
    }
}

fn emit(cli: &Cli, v: &Value) -> Result<()> {
    let text = canonical_string(v);
    match &cli.out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

/// Full process behavior: parse, run, print; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = execute(&cli).and_then(|v| {
        emit(&cli, &v)?;
        Ok(v)
    });
    match result {
        Ok(v) => {
            if matches!(cli.command, Command::Verify(_)) && v["passed"] != Value::Bool(true) {
                3
            } else {
                0
            }
        }
        Err(e) => {
            eprintln!("bo: {e}");
            e.exit_code()
        }
    }
}

#[derive(Debug, Deserialize)]
pub struct Expectation {
    pub pointer: String,
    pub value: Value,
    #[serde(default)]
    pub tol: Option<f64>,
}

#[derive(Debug, Deserialize)]
pub struct GoldenCase {
    pub name: String,
    pub args: Vec<String>,
    #[serde(default)]
    pub exit: Option<i32>,
    #[serde(default)]
    pub expect: Vec<Expectation>,
}

#[derive(Debug, Deserialize)]
pub struct GoldenSuite {
    pub cases: Vec<GoldenCase>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseOutcome {
    pub name: String,
    pub passed: bool,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub cases: Vec<CaseOutcome>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.cases.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "passed": self.passed(),
            "cases": self.cases.iter().map(|c| json!({
                "name": c.name, "passed": c.passed, "failures": c.failures,
            })).collect::<Vec<_>>(),
        })
    }
}

fn matches(actual: &Value, want: &Value, tol: Option<f64>) -> bool {
    match (actual, want, tol) {
        (Value::Number(a), Value::Number(b), Some(t)) => {
            (a.as_f64().unwrap_or(f64::NAN) - b.as_f64().unwrap_or(f64::NAN)).abs() <= t
        }
        (Value::Array(a), Value::Array(b), Some(_)) => {
            a.len() == b.len() && a.iter().zip(b).all(|(x, y)| matches(x, y, tol))
        }
        _ => actual == want,
    }
}

/// Arguments starting with `@/` are resolved against the suite directory.
fn resolve_args(args: &[String], base: &Path) -> Vec<String> {
    args.iter()
        .map(|a| match a.strip_prefix("@/") {
            Some(rest) => base.join(rest).to_string_lossy().into_owned(),
            None => a.clone(),
        })
        .collect()
}

pub fn run_case(case: &GoldenCase, base: &Path) -> CaseOutcome {
    let mut failures = Vec::new();
    let argv = std::iter::once("bo".to_string()).chain(resolve_args(&case.args, base));
    let outcome = Cli::try_parse_from(argv)
        .map_err(|e| (1, e.to_string()))
        .and_then(|cli| execute(&cli).map_err(|e| (e.exit_code(), e.to_string())));
    let want_exit = case.exit.unwrap_or(0);
    match outcome {
        Ok(v) => {
            if want_exit != 0 {
                failures.push(format!("expected exit {want_exit}, command succeeded"));
            }
            for e in &case.expect {
                match v.pointer(&e.pointer) {
                    Some(actual) if matches(actual, &e.value, e.tol) => {}
                    Some(actual) => failures.push(format!("{}: got {actual}, want {}", e.pointer, e.value)),
                    None => failures.push(format!("{}: missing", e.pointer)),
                }
            }
        }
        Err((code, msg)) => {
            if code != want_exit {
                failures.push(format!("exit {code} ({msg}), want {want_exit}"));
            }
        }
    }
    CaseOutcome {
        name: case.name.clone(),
        passed: failures.is_empty(),
        failures,
    }
}

pub fn verify_suite(path: &Path) -> Result<VerifyReport> {
    let suite: GoldenSuite = serde_json::from_value(io::read_json(path)?)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let cases = suite
        .cases
        .iter()
        .map(|c| {
            if c.args.first().map(String::as_str) == Some("verify") {
                return CaseOutcome {
                    name: c.name.clone(),
                    passed: false,
                    failures: vec!["nested verify is not allowed".into()],
                };
            }
            run_case(c, base)
        })
        .collect();
    Ok(VerifyReport { cases })
}
