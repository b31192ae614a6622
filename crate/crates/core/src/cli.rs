//! The `hus` command line.
//!
//! Exit codes: 0 success, 2 domain verdict (unstable input, failed
//! certification, wrong stability for the requested witness), 1 usage error.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::HusError;
use crate::harness::{
    certify, instability_witness, lower_bound_witness, symmetric_grid, tracked_trajectory,
    PerturbationSpec, GROWTH_LIMIT,
};
use crate::linalg::{classify, Mat2, Vec2, DEFAULT_TOL};
use crate::report::{write_trajectory_csv, Num, ReportJson, TrajectoryRow};
use crate::second_order::{second_order_report, Roots, SecondOrderProblem, Substitution};
use crate::stability::{analyze, lower_bound};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERDICT: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "hus",
    version,
    about = "Hyers-Ulam stability of x' = Ax for 2x2 real A"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify A, decide stability and report the constant K.
    Analyze(AnalyzeArgs),
    /// Certify sup |phi - x| <= K eps on closed-form perturbations.
    Verify(VerifyArgs),
    /// Write a witness trajectory as CSV.
    Witness(WitnessArgs),
    /// Analyze x'' - (l1 + l2) x' + l1 l2 x = 0 through a 2x2 reduction.
    SecondOrder(SecondOrderArgs),
}

#[derive(Debug, Args)]
pub struct MatrixArgs {
    /// Row-major entries "a b c d".
    #[arg(long, allow_hyphen_values = true)]
    pub matrix: String,
    /// Relative tolerance for the zero and repeated-eigenvalue bands.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub matrix: MatrixArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyName {
    Constant,
    Sinusoid,
    SignSwitch,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub matrix: MatrixArgs,
    #[arg(long, default_value_t = 1.0)]
    pub eps: f64,
    #[arg(long, default_value_t = 50.0)]
    pub horizon: f64,
    #[arg(long, default_value_t = 0.01)]
    pub step: f64,
    #[arg(
        long,
        value_delimiter = ',',
        default_values = ["constant", "sinusoid", "sign-switch"]
    )]
    pub families: Vec<FamilyName>,
    /// Sinusoid frequency.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub omega: f64,
    /// Sign-switch period.
    #[arg(long, default_value_t = 1.0)]
    pub period: f64,
    /// Directory for one CSV trajectory per family.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WitnessKind {
    LowerBound,
    Instability,
}

#[derive(Debug, Args)]
pub struct WitnessArgs {
    #[arg(value_enum)]
    pub kind: WitnessKind,
    #[command(flatten)]
    pub matrix: MatrixArgs,
    #[arg(long, default_value_t = 1.0)]
    pub eps: f64,
    #[arg(long, default_value_t = 5.0)]
    pub horizon: f64,
    #[arg(long, default_value_t = 0.01)]
    pub step: f64,
    /// CSV destination; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SubstitutionName {
    Direct,
    Triangular,
}

#[derive(Debug, Args)]
pub struct SecondOrderArgs {
    #[arg(long, allow_hyphen_values = true, requires = "lambda2", conflicts_with_all = ["alpha", "beta"])]
    pub lambda1: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "lambda1")]
    pub lambda2: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "beta", conflicts_with_all = ["lambda1", "lambda2"])]
    pub alpha: Option<f64>,
    #[arg(long, requires = "alpha")]
    pub beta: Option<f64>,
    #[arg(long, value_enum, default_value_t = SubstitutionName::Direct)]
    pub substitution: SubstitutionName,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
}

/// A failure carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn verdict(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_VERDICT,
            message: message.into(),
        }
    }
}

impl From<HusError> for Failure {
    fn from(e: HusError) -> Self {
        match e {
            HusError::NotStable | HusError::IsStable => Failure::verdict(e.to_string()),
            _ => Failure::usage(e.to_string()),
        }
    }
}

type CmdResult = std::result::Result<i32, Failure>;

/// Parses `"a b c d"` into a matrix of four finite reals.
pub fn parse_matrix(text: &str) -> std::result::Result<Mat2, String> {
    let entries = text
        .split_whitespace()
        .map(|tok| {
            tok.parse::<f64>()
                .map_err(|_| format!("matrix entry {tok:?} is not a number"))
        })
        .collect::<std::result::Result<Vec<f64>, String>>()?;
    let arr: [f64; 4] = entries
        .try_into()
        .map_err(|v: Vec<f64>| format!("matrix needs 4 entries, got {}", v.len()))?;
    Mat2::try_from_row_major(arr).map_err(|e| e.to_string())
}

fn check_tol(tol: f64) -> std::result::Result<(), Failure> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(Failure::usage("--tol must be positive"))
    }
}

fn check_positive(name: &str, x: f64) -> std::result::Result<(), Failure> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Failure::usage(format!("--{name} must be positive")))
    }
}

fn read_matrix(args: &MatrixArgs) -> std::result::Result<Mat2, Failure> {
    check_tol(args.tol)?;
    parse_matrix(&args.matrix).map_err(Failure::usage)
}

/// Runs the CLI on `args` (including the program name), writing reports to
/// `out` and diagnostics to `err`; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Analyze(a) => cmd_analyze(a, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Witness(a) => cmd_witness(a, out),
        Command::SecondOrder(a) => cmd_second_order(a, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn emit(out: &mut dyn Write, json: &str) -> std::result::Result<(), Failure> {
    writeln!(out, "{json}").map_err(|e| Failure::usage(format!("cannot write output: {e}")))
}

fn cmd_analyze(args: &AnalyzeArgs, out: &mut dyn Write) -> CmdResult {
    let m = read_matrix(&args.matrix)?;
    let report = analyze(&m, args.matrix.tol)?;
    emit(out, &ReportJson::new(&report).to_json())?;
    Ok(if report.stable { EXIT_OK } else { EXIT_VERDICT })
}

fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> CmdResult {
    let m = read_matrix(&args.matrix)?;
    let tol = args.matrix.tol;
    check_positive("eps", args.eps)?;
    check_positive("horizon", args.horizon)?;
    check_positive("step", args.step)?;
    check_positive("period", args.period)?;
    if !args.omega.is_finite() {
        return Err(Failure::usage("--omega must be finite"));
    }
    let report = analyze(&m, tol)?;
    if !report.stable {
        emit(out, &ReportJson::new(&report).to_json())?;
        return Err(Failure::verdict("system is not Hyers-Ulam stable"));
    }
    let dir = lower_bound(&m)?.maximizer;
    let mut families = args.families.clone();
    families.dedup();
    let specs: Vec<PerturbationSpec> = families
        .iter()
        .map(|f| match f {
            FamilyName::Constant => PerturbationSpec::constant(args.eps, dir),
            FamilyName::Sinusoid => PerturbationSpec::sinusoid(args.eps, args.omega, dir),
            FamilyName::SignSwitch => PerturbationSpec::sign_switch(args.eps, args.period, dir),
        })
        .collect();
    let summary = certify(&m, &specs, &report, args.horizon, args.step, tol)?;

    if let Some(dir_path) = &args.out_dir {
        std::fs::create_dir_all(dir_path)
            .map_err(|e| Failure::usage(format!("cannot create {}: {e}", dir_path.display())))?;
        let grid = symmetric_grid(summary.horizon, args.step)?;
        for spec in &specs {
            let rec = tracked_trajectory(&m, spec, Vec2::ZERO, &grid, tol)?;
            let rows: Vec<TrajectoryRow> = (0..rec.times.len())
                .map(|i| TrajectoryRow {
                    t: rec.times[i],
                    phi: rec.phi[i],
                    x: rec.x[i],
                    dev: rec.deviation[i],
                })
                .collect();
            write_csv(&dir_path.join(format!("{}.csv", spec.name())), &rows)?;
        }
    }

    emit(
        out,
        &ReportJson::new(&report)
            .with_certification(&summary)
            .to_json(),
    )?;
    Ok(if summary.all_pass {
        EXIT_OK
    } else {
        EXIT_VERDICT
    })
}

fn write_csv(path: &Path, rows: &[TrajectoryRow]) -> std::result::Result<(), Failure> {
    let file = File::create(path)
        .map_err(|e| Failure::usage(format!("cannot create {}: {e}", path.display())))?;
    write_trajectory_csv(BufWriter::new(file), rows)
        .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

#[derive(Serialize)]
struct WitnessSummary {
    kind: &'static str,
    eps: Num,
    rows: usize,
    /// Lower bound: `ε‖A⁻¹e‖∞`; instability: the normalizer `m`.
    #[serde(skip_serializing_if = "Option::is_none")]
    deviation_constant: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    scale: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual_ok: Option<bool>,
}

fn cmd_witness(args: &WitnessArgs, out: &mut dyn Write) -> CmdResult {
    let m = read_matrix(&args.matrix)?;
    let tol = args.matrix.tol;
    check_positive("eps", args.eps)?;
    check_positive("horizon", args.horizon)?;
    check_positive("step", args.step)?;
    let ec = classify(&m, tol);
    let rho = ec.spectral_abscissa();
    if rho * args.horizon > GROWTH_LIMIT {
        return Err(HusError::HorizonTooLarge {
            growth: rho * args.horizon,
            limit: GROWTH_LIMIT,
        }
        .into());
    }
    let grid = symmetric_grid(args.horizon, args.step)?;

    let (rows, summary) = match args.kind {
        WitnessKind::LowerBound => {
            let e = match lower_bound(&m) {
                Ok(lb) => lb.maximizer,
                Err(HusError::Singular { .. }) => return Err(HusError::NotStable.into()),
                Err(e) => return Err(e.into()),
            };
            let w = lower_bound_witness(&m, e, args.eps, tol)?;
            let rows: Vec<TrajectoryRow> = grid
                .iter()
                .map(|&t| TrajectoryRow {
                    t,
                    phi: w.phi(t),
                    x: w.x(t),
                    dev: w.deviation(t).inf_norm(),
                })
                .collect();
            let summary = WitnessSummary {
                kind: "lower-bound",
                eps: Num(args.eps),
                rows: rows.len(),
                deviation_constant: Some(Num(w.deviation_constant)),
                scale: None,
                residual_ok: None,
            };
            (rows, summary)
        }
        WitnessKind::Instability => {
            let w = instability_witness(&m, &ec, args.eps, tol)?;
            let rows: Vec<TrajectoryRow> = grid
                .iter()
                .map(|&t| {
                    let phi = w.phi(t);
                    TrajectoryRow {
                        t,
                        phi,
                        x: Vec2::ZERO,
                        dev: phi.inf_norm(),
                    }
                })
                .collect();
            let summary = WitnessSummary {
                kind: "instability",
                eps: Num(args.eps),
                rows: rows.len(),
                deviation_constant: None,
                scale: Some(Num(w.scale)),
                residual_ok: Some(w.residual_check(&grid).ok),
            };
            (rows, summary)
        }
    };

    match &args.out {
        Some(path) => {
            write_csv(path, &rows)?;
            emit(
                out,
                &serde_json::to_string_pretty(&summary).expect("summary serializes"),
            )?;
        }
        None => write_trajectory_csv(&mut *out, &rows)
            .map_err(|e| Failure::usage(format!("cannot write output: {e}")))?,
    }
    Ok(EXIT_OK)
}

fn cmd_second_order(args: &SecondOrderArgs, out: &mut dyn Write) -> CmdResult {
    check_tol(args.tol)?;
    let roots = match (args.lambda1, args.lambda2, args.alpha, args.beta) {
        (Some(lambda1), Some(lambda2), None, None) => Roots::Real { lambda1, lambda2 },
        (None, None, Some(alpha), Some(beta)) => Roots::Complex { alpha, beta },
        _ => {
            return Err(Failure::usage(
                "give either --lambda1/--lambda2 or --alpha/--beta",
            ))
        }
    };
    let substitution = match args.substitution {
        SubstitutionName::Direct => Substitution::Direct,
        SubstitutionName::Triangular => Substitution::Triangular,
    };
    let problem = SecondOrderProblem {
        roots,
        substitution,
    };
    let rep = second_order_report(&problem, args.tol)?;
    let mut json = ReportJson::new(&rep.report);
    if let Some(cc) = &rep.cross_check {
        json = json.with_cross_check(cc);
    }
    emit(out, &json.to_json())?;
    Ok(if rep.report.stable {
        EXIT_OK
    } else {
        EXIT_VERDICT
    })
}
