//! `cdexp`: correct-decoding exponents, cutoff rates, and rate-distortion
//! approximations for finite lossy source coding problems.
//!
//! Every subcommand reads a TOML problem file, prints human-readable result
//! lines followed by a JSON run record (separated by `---`), and exits with
//! a stable code: 0 success, 2 missing file or I/O failure, 3 usage or
//! schema error, 4 validation error, 5 solver non-convergence (the best
//! value is still printed).

mod problem_file;
mod record;

use cdexp_core::engine::{solve_omega, SolveOptions, TiltParams};
use cdexp_core::oracle::{
    analytic_binary_hamming_rd, ba_rate_distortion, grid_gck, grid_joint_g, grid_omega, GridSpec,
    OracleError,
};
use cdexp_core::outer::{
    cutoff_rate, exponent, rd_approx, OperatingPoint, OuterError, SearchOptions,
};
use cdexp_core::prob::Problem;
use clap::{Args, Parser, Subcommand, ValueEnum};
use record::{num, sig12, RunRecord, Units};
use serde_json::Value;
use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    MissingFile(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Schema(String),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Validation(String),
    #[error("solver did not converge within the iteration budget (result printed above)")]
    NonConvergence,
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::MissingFile(_) | CliError::Io(_) => 2,
            CliError::Schema(_) | CliError::Usage(_) => 3,
            CliError::Validation(_) => 4,
            CliError::NonConvergence => 5,
        }
    }
}

impl From<OuterError> for CliError {
    fn from(e: OuterError) -> Self {
        match e {
            OuterError::LambdaNotPositive(_)
            | OuterError::LambdaOutOfRange(_)
            | OuterError::BadOperatingPoint { .. } => CliError::Usage(e.to_string()),
            OuterError::Engine(inner) => CliError::Validation(inner.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        CliError::Usage(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "cdexp",
    version,
    about = "Correct-decoding exponent, cutoff rate, and rate-distortion solvers for finite sources"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the exponent G(R, Δ | P) with its maximizing tilt pair.
    Exponent(ExponentArgs),
    /// Compute the cutoff rate R_cut(λ)(Δ | P).
    Cutoff(CutoffArgs),
    /// Sweep Δ: approximate R(Δ | P) by the cutoff rate with a certified bound.
    Rd(RdArgs),
    /// Emit the per-iteration trace of one tilted solve as CSV.
    Trace(TraceArgs),
    /// Run one of the brute-force reference oracles.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Problem file (TOML).
    #[arg(short, long)]
    problem: String,
    /// Report nat-valued outputs in bits.
    #[arg(long)]
    bits: bool,
    /// Solver stopping tolerance.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Solver iteration budget.
    #[arg(long, default_value_t = 100_000)]
    max_iters: usize,
    /// Also write the JSON run record to this path.
    #[arg(long)]
    record: Option<String>,
}

#[derive(Args)]
struct ExponentArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Coding rate R in nats.
    #[arg(short = 'R', long)]
    rate: f64,
    /// Distortion level Δ.
    #[arg(short = 'D', long)]
    delta: f64,
    /// Write the per-iteration trace at the maximizing tilt to this CSV.
    #[arg(long)]
    trace: Option<String>,
}

#[derive(Args)]
struct CutoffArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Distortion level Δ.
    #[arg(short = 'D', long)]
    delta: f64,
    /// Slope parameter λ in (0, 1].
    #[arg(short = 'l', long)]
    lambda: f64,
}

#[derive(Args)]
struct RdArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// First Δ of the sweep.
    #[arg(long)]
    delta_min: f64,
    /// Last Δ of the sweep (inclusive within a half step).
    #[arg(long)]
    delta_max: f64,
    /// Sweep step.
    #[arg(long)]
    delta_step: f64,
    /// Slope parameter λ in (0, 1].
    #[arg(short = 'l', long)]
    lambda: f64,
    /// Write the sweep CSV here instead of stdout.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct TraceArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Distortion multiplier μ ≥ 0.
    #[arg(long)]
    mu: f64,
    /// Rate multiplier λ in [0, 1].
    #[arg(long)]
    lambda: f64,
    /// Write the trace CSV here instead of stdout.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OracleKind {
    /// Iterative rate-distortion reference R(Δ | P).
    Ba,
    /// Closed-form R(Δ | P) for a binary source under Hamming distortion.
    RdAnalytic,
    /// Dense source-marginal grid for the exponent.
    GridGck,
    /// Dense joint-table grid for the exponent.
    GridJointG,
    /// Dense joint-table grid for the tilted objective.
    GridOmega,
}

impl OracleKind {
    fn name(self) -> &'static str {
        match self {
            OracleKind::Ba => "ba",
            OracleKind::RdAnalytic => "rd-analytic",
            OracleKind::GridGck => "grid-gck",
            OracleKind::GridJointG => "grid-joint-g",
            OracleKind::GridOmega => "grid-omega",
        }
    }
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Which reference to run.
    #[arg(long, value_enum)]
    which: OracleKind,
    /// Coding rate R in nats (grid-gck, grid-joint-g).
    #[arg(short = 'R', long)]
    rate: Option<f64>,
    /// Distortion level Δ (ba, rd-analytic, grid-gck, grid-joint-g).
    #[arg(short = 'D', long)]
    delta: Option<f64>,
    /// Distortion multiplier μ (grid-omega).
    #[arg(long)]
    mu: Option<f64>,
    /// Rate multiplier λ (grid-omega).
    #[arg(long)]
    lambda: Option<f64>,
    /// Grid step (defaults: 1e-4 for grid-gck, 5e-3 for the joint grids).
    #[arg(long)]
    step: Option<f64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help and version requests are successes, everything else is
            // a usage error (exit 3)
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Exponent(args) => cmd_exponent(args),
        Command::Cutoff(args) => cmd_cutoff(args),
        Command::Rd(args) => cmd_rd(args),
        Command::Trace(args) => cmd_trace(args),
        Command::Oracle(args) => cmd_oracle(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn search_options(common: &CommonArgs) -> Result<SearchOptions, CliError> {
    if !(common.tol >= 0.0) {
        return Err(CliError::Usage(format!(
            "--tol must be >= 0, got {}",
            common.tol
        )));
    }
    if common.max_iters == 0 {
        return Err(CliError::Usage("--max-iters must be >= 1".to_string()));
    }
    Ok(SearchOptions {
        solve_tol: common.tol,
        solve_max_iters: common.max_iters,
        ..SearchOptions::default()
    })
}

fn emit(rec: &RunRecord, record_path: &Option<String>) -> Result<(), CliError> {
    let json = rec.to_json();
    println!("---");
    println!("{json}");
    if let Some(path) = record_path {
        std::fs::write(path, json + "\n")
            .map_err(|e| CliError::Io(format!("cannot write {path}: {e}")))?;
    }
    Ok(())
}

fn write_text(path: &str, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("cannot write {path}: {e}")))
}

fn trace_csv(trace: &cdexp_core::engine::IterationTrace, units: Units) -> String {
    let mut out = String::from("t,objective,minus_log_lambda,step_kl\r\n");
    for row in &trace.rows {
        out.push_str(&format!(
            "{},{},{},{}\r\n",
            row.t,
            sig12(units.convert(row.objective)),
            sig12(units.convert(row.minus_log_lambda)),
            sig12(units.convert(row.step_kl)),
        ));
    }
    out
}

fn common_parameters(rec: &mut RunRecord, common: &CommonArgs, units: Units) {
    rec.param("tol", num(common.tol));
    rec.param("max_iters", Value::from(common.max_iters as u64));
    rec.param("units", Value::from(units.label()));
}

fn cmd_exponent(args: ExponentArgs) -> Result<(), CliError> {
    let (problem, file) = problem_file::load(&args.common.problem)?;
    let units = Units::from_flags(args.common.bits, file.units.as_deref());
    let opts = search_options(&args.common)?;
    let point = OperatingPoint::new(args.rate, args.delta)?;
    let res = exponent(&problem, point, &opts)?;

    println!(
        "G(R, Δ | P) = {} {}",
        sig12(units.convert(res.value)),
        units.label()
    );
    println!("lambda* = {}", sig12(res.lambda_star));
    println!("mu* = {}", sig12(res.mu_star));
    println!(
        "converged = {} (iterations = {}, evaluations = {})",
        res.inner.converged, res.inner.iterations, res.diagnostics.evaluations
    );
    if res.diagnostics.mu_at_cap {
        println!("note: mu bracket reached its cap; treat mu* as a lower bound");
    }

    let mut rec = RunRecord::new("exponent", &args.common.problem, file);
    rec.param("rate", num(args.rate));
    rec.param("delta", num(args.delta));
    common_parameters(&mut rec, &args.common, units);
    if let Some(path) = &args.trace {
        rec.param("trace", Value::from(path.clone()));
    }
    rec.result("value", num(units.convert(res.value)));
    rec.result("lambda_star", num(res.lambda_star));
    rec.result("mu_star", num(res.mu_star));
    rec.result("units", Value::from(units.label()));
    rec.diagnostic("iterations", Value::from(res.inner.iterations as u64));
    rec.diagnostic("converged", Value::from(res.inner.converged));
    rec.diagnostic("clamp_events", Value::from(res.inner.clamp_events as u64));
    rec.diagnostic(
        "evaluations",
        Value::from(res.diagnostics.evaluations as u64),
    );
    rec.diagnostic(
        "bracket_expansions",
        Value::from(res.diagnostics.bracket_expansions as u64),
    );
    rec.diagnostic("mu_at_cap", Value::from(res.diagnostics.mu_at_cap));

    if let Some(path) = &args.trace {
        write_text(path, &trace_csv(&res.inner.trace, units))?;
    }
    emit(&rec, &args.common.record)?;
    if !res.inner.converged {
        return Err(CliError::NonConvergence);
    }
    Ok(())
}

fn cmd_cutoff(args: CutoffArgs) -> Result<(), CliError> {
    let (problem, file) = problem_file::load(&args.common.problem)?;
    let units = Units::from_flags(args.common.bits, file.units.as_deref());
    let opts = search_options(&args.common)?;
    let res = cutoff_rate(&problem, args.delta, args.lambda, &opts)?;

    println!(
        "R_cut(λ={}) (Δ={}) = {} {}",
        args.lambda,
        args.delta,
        sig12(units.convert(res.value)),
        units.label()
    );
    println!("mu* = {}", sig12(res.mu_star));
    println!(
        "converged = {} (evaluations = {})",
        res.inner.converged, res.evaluations
    );
    if res.mu_at_cap {
        println!("note: mu bracket reached its cap; treat the value as a lower bound");
    }

    let mut rec = RunRecord::new("cutoff", &args.common.problem, file);
    rec.param("delta", num(args.delta));
    rec.param("lambda", num(args.lambda));
    common_parameters(&mut rec, &args.common, units);
    rec.result("value", num(units.convert(res.value)));
    rec.result("mu_star", num(res.mu_star));
    rec.result("units", Value::from(units.label()));
    rec.diagnostic("converged", Value::from(res.inner.converged));
    rec.diagnostic("iterations", Value::from(res.inner.iterations as u64));
    rec.diagnostic("evaluations", Value::from(res.evaluations as u64));
    rec.diagnostic("mu_at_cap", Value::from(res.mu_at_cap));

    emit(&rec, &args.common.record)?;
    if !res.inner.converged {
        return Err(CliError::NonConvergence);
    }
    Ok(())
}

fn cmd_rd(args: RdArgs) -> Result<(), CliError> {
    let (problem, file) = problem_file::load(&args.common.problem)?;
    let units = Units::from_flags(args.common.bits, file.units.as_deref());
    let opts = search_options(&args.common)?;
    if !(args.delta_step > 0.0) || args.delta_max < args.delta_min {
        return Err(CliError::Usage(format!(
            "empty sweep: delta_min={}, delta_max={}, delta_step={}",
            args.delta_min, args.delta_max, args.delta_step
        )));
    }
    let mut deltas = Vec::new();
    let mut d = args.delta_min;
    while d <= args.delta_max + 0.5 * args.delta_step {
        deltas.push(d);
        d += args.delta_step;
    }
    let alpha = (problem.nx() as f64).ln().min((problem.ny() as f64).ln());
    if args.lambda > 1.0 / (8.0 * alpha) {
        eprintln!(
            "warning: lambda = {} exceeds the certification range (0, {:.6}]; bounds will be uncertified",
            args.lambda,
            1.0 / (8.0 * alpha)
        );
    }

    let mut csv = String::from("delta,rd_approx,certified_bound,ba_reference,flags\r\n");
    let mut rows = Vec::new();
    let mut all_converged = true;
    for &delta in &deltas {
        let approx = rd_approx(&problem, delta, args.lambda, &opts)?;
        let reference = ba_rate_distortion(&problem, delta, 1e-9, 50_000);
        all_converged &= approx.converged;
        let mut flags = Vec::new();
        if approx.mu_at_cap {
            flags.push("mu_at_cap");
        }
        if !approx.certified {
            flags.push("bound_not_certified");
        }
        if !approx.converged {
            flags.push("not_converged");
        }
        let bound_field = if approx.certified {
            sig12(units.convert(approx.bound))
        } else {
            String::new()
        };
        csv.push_str(&format!(
            "{},{},{},{},{}\r\n",
            sig12(delta),
            sig12(units.convert(approx.approx)),
            bound_field,
            sig12(units.convert(reference)),
            flags.join(";")
        ));
        let mut row = serde_json::Map::new();
        row.insert("delta".into(), num(delta));
        row.insert("rd_approx".into(), num(units.convert(approx.approx)));
        row.insert(
            "certified_bound".into(),
            if approx.certified {
                num(units.convert(approx.bound))
            } else {
                Value::Null
            },
        );
        row.insert("ba_reference".into(), num(units.convert(reference)));
        row.insert(
            "flags".into(),
            Value::from(
                flags
                    .iter()
                    .map(|s| Value::from(*s))
                    .collect::<Vec<Value>>(),
            ),
        );
        rows.push(Value::Object(row));
    }

    match &args.out {
        Some(path) => {
            write_text(path, &csv)?;
            println!("wrote {} rows to {}", deltas.len(), path);
        }
        None => print!("{csv}"),
    }

    let mut rec = RunRecord::new("rd", &args.common.problem, file);
    rec.param("delta_min", num(args.delta_min));
    rec.param("delta_max", num(args.delta_max));
    rec.param("delta_step", num(args.delta_step));
    rec.param("lambda", num(args.lambda));
    common_parameters(&mut rec, &args.common, units);
    if let Some(path) = &args.out {
        rec.param("out", Value::from(path.clone()));
    }
    rec.result("rows", Value::from(rows));
    rec.result("units", Value::from(units.label()));
    rec.diagnostic("swept", Value::from(deltas.len() as u64));
    rec.diagnostic("converged", Value::from(all_converged));

    emit(&rec, &args.common.record)?;
    if !all_converged {
        return Err(CliError::NonConvergence);
    }
    Ok(())
}

fn cmd_trace(args: TraceArgs) -> Result<(), CliError> {
    let (problem, file) = problem_file::load(&args.common.problem)?;
    let units = Units::from_flags(args.common.bits, file.units.as_deref());
    if !(args.common.tol >= 0.0) || args.common.max_iters == 0 {
        return Err(CliError::Usage("invalid --tol or --max-iters".to_string()));
    }
    let tilt = TiltParams::new(args.mu, args.lambda)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let sopts = SolveOptions {
        tol: args.common.tol,
        max_iters: args.common.max_iters,
        initial: None,
        record_iterates: false,
    };
    let report = solve_omega(&problem, tilt, &sopts)
        .map_err(|e| CliError::Validation(e.to_string()))?;

    let csv = trace_csv(&report.trace, units);
    match &args.out {
        Some(path) => {
            write_text(path, &csv)?;
            println!("wrote {} rows to {}", report.trace.rows.len(), path);
        }
        None => print!("{csv}"),
    }
    println!(
        "omega = {} {}",
        sig12(units.convert(report.omega_value)),
        units.label()
    );
    println!(
        "converged = {} (iterations = {})",
        report.converged, report.iterations
    );

    let mut rec = RunRecord::new("trace", &args.common.problem, file);
    rec.param("mu", num(args.mu));
    rec.param("lambda", num(args.lambda));
    common_parameters(&mut rec, &args.common, units);
    if let Some(path) = &args.out {
        rec.param("out", Value::from(path.clone()));
    }
    rec.result("omega_value", num(units.convert(report.omega_value)));
    rec.result(
        "final_minus_log_lambda",
        num(units.convert(
            report
                .trace
                .rows
                .last()
                .map(|r| r.minus_log_lambda)
                .unwrap_or(f64::NAN),
        )),
    );
    rec.result("units", Value::from(units.label()));
    rec.diagnostic("iterations", Value::from(report.iterations as u64));
    rec.diagnostic("converged", Value::from(report.converged));
    rec.diagnostic("clamp_events", Value::from(report.clamp_events as u64));

    emit(&rec, &args.common.record)?;
    if !report.converged {
        return Err(CliError::NonConvergence);
    }
    Ok(())
}

fn require(value: Option<f64>, flag: &str, which: &str) -> Result<f64, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("{flag} is required for oracle {which}")))
}

fn is_binary_hamming(problem: &Problem) -> bool {
    problem.nx() == 2
        && problem.ny() == 2
        && problem.distortion().get(0, 0) == 0.0
        && problem.distortion().get(1, 1) == 0.0
        && problem.distortion().get(0, 1) == 1.0
        && problem.distortion().get(1, 0) == 1.0
}

fn cmd_oracle(args: OracleArgs) -> Result<(), CliError> {
    let (problem, file) = problem_file::load(&args.common.problem)?;
    let units = Units::from_flags(args.common.bits, file.units.as_deref());
    let which = args.which.name();
    let mut rec = RunRecord::new("oracle", &args.common.problem, file);
    rec.param("which", Value::from(which));
    common_parameters(&mut rec, &args.common, units);

    let value = match args.which {
        OracleKind::Ba => {
            let delta = require(args.delta, "--delta", which)?;
            rec.param("delta", num(delta));
            ba_rate_distortion(&problem, delta, 1e-9, 50_000)
        }
        OracleKind::RdAnalytic => {
            let delta = require(args.delta, "--delta", which)?;
            if !is_binary_hamming(&problem) {
                return Err(CliError::Usage(
                    "oracle rd-analytic needs a binary source under Hamming distortion".to_string(),
                ));
            }
            rec.param("delta", num(delta));
            analytic_binary_hamming_rd(problem.source().get(0), delta)
        }
        OracleKind::GridGck => {
            let rate = require(args.rate, "--rate", which)?;
            let delta = require(args.delta, "--delta", which)?;
            let grid = GridSpec::new(args.step.unwrap_or(1e-4))?;
            rec.param("rate", num(rate));
            rec.param("delta", num(delta));
            rec.param("step", num(grid.step()));
            grid_gck(&problem, OperatingPoint::new(rate, delta)?, grid)?
        }
        OracleKind::GridJointG => {
            let rate = require(args.rate, "--rate", which)?;
            let delta = require(args.delta, "--delta", which)?;
            let grid = GridSpec::new(args.step.unwrap_or(5e-3))?;
            rec.param("rate", num(rate));
            rec.param("delta", num(delta));
            rec.param("step", num(grid.step()));
            grid_joint_g(&problem, OperatingPoint::new(rate, delta)?, grid)?
        }
        OracleKind::GridOmega => {
            let mu = require(args.mu, "--mu", which)?;
            let lambda = require(args.lambda, "--lambda", which)?;
            let tilt = TiltParams::new(mu, lambda).map_err(|e| CliError::Usage(e.to_string()))?;
            let grid = GridSpec::new(args.step.unwrap_or(5e-3))?;
            rec.param("mu", num(mu));
            rec.param("lambda", num(lambda));
            rec.param("step", num(grid.step()));
            grid_omega(&problem, tilt, grid)?
        }
    };

    println!(
        "oracle {which} = {} {}",
        sig12(units.convert(value)),
        units.label()
    );
    rec.result("value", num(units.convert(value)));
    rec.result("units", Value::from(units.label()));
    emit(&rec, &args.common.record)?;
    Ok(())
}
