//! `qtradeoff`: solve single instances, run sweeps, fit scaling exponents and
//! run the verification suites.
//!
//! Exit status: 0 when every check passes, 1 on a check failure, 2 on a usage
//! or input error.

mod report;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use qtradeoff_core::linsys::{
    bounded_matrix_product, check_budget, classical_bounded_product, BudgetReport, Family, LinsysConfig,
};
use qtradeoff_core::model::{matvec_min, Instance, LedgerReport, QueryLedger, SeededRng};
use qtradeoff_core::sweep::{read_rows, run_sweep, write_rows, Axis, Format, RunMode, SweepConfig, SweepRow};
use qtradeoff_poly::Suite;

#[derive(Parser)]
#[command(name = "qtradeoff", version, about = "Space-bounded matrix products: runs, sweeps and verification suites")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute min(Ax, b) for one instance file and report its query cost.
    Solve(SolveArgs),
    /// Run every cell of a JSON sweep configuration.
    Sweep(SweepArgs),
    /// Fit scaling exponents to a sweep table.
    Report(ReportArgs),
    /// Subspace checks for one (n, t, k).
    Subspace {
        #[command(subcommand)]
        command: SubspaceCommand,
    },
    /// Polynomial suites.
    Poly {
        #[command(subcommand)]
        command: PolyCommand,
    },
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Space budget in bits.
    #[arg(long)]
    space: u64,
    /// exact, cost-model, statevector or classical.
    #[arg(long, default_value = "exact")]
    mode: RunMode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output path; defaults to the config's `out`, then to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json; defaults to the output extension.
    #[arg(long)]
    format: Option<Format>,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_parser = parse_axis, default_value = "N")]
    axis: Axis,
}

#[derive(Subcommand)]
enum SubspaceCommand {
    Verify {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        t: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Random recast programs to replay.
        #[arg(long, default_value_t = 20)]
        runs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum PolyCommand {
    Verify {
        /// cheb, lp, cr, blocks or all.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the suite's grid table here as CSV (single suite only).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_axis(s: &str) -> Result<Axis, String> {
    match s {
        "N" | "n" => Ok(Axis::N),
        "S" | "s" => Ok(Axis::S),
        "t" | "T" => Ok(Axis::T),
        other => Err(format!("unknown axis {other:?}; expected N, S or t")),
    }
}

/// Outcome of a subcommand that ran to completion.
enum Verdict {
    Pass,
    Fail,
}

type Outcome = Result<Verdict, Box<dyn std::error::Error>>;

fn print_json<T: Serialize>(value: &T) -> io::Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)
}

fn verdict(passed: bool) -> Verdict {
    if passed {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

#[derive(Serialize)]
struct SolveReport {
    #[serde(rename = "N")]
    n: usize,
    t: u64,
    #[serde(rename = "S")]
    s: u64,
    mode: RunMode,
    seed: u64,
    y: Vec<u64>,
    correct: bool,
    rows_per_block: Option<usize>,
    ledger: LedgerReport,
    budget: BudgetReport,
}

fn solve(args: SolveArgs) -> Outcome {
    let inst = Instance::parse(&fs::read_to_string(&args.instance)?)?;
    let rng = SeededRng::new(args.seed);
    let mut ledger = QueryLedger::new();
    let (y, rows_per_block, family) = match args.mode.quantum_mode() {
        Some(mode) => {
            let cfg = LinsysConfig::for_size(inst.n(), mode);
            let run = bounded_matrix_product(&inst, args.space, &cfg, &mut ledger, &mut rng.fork(1))?;
            (run.y, Some(run.rows_per_block), Family::Quantum)
        }
        None => (classical_bounded_product(&inst, args.space, &mut ledger)?, None, Family::Classical),
    };
    let correct = y == matvec_min(&inst);
    let report = SolveReport {
        n: inst.n(),
        t: inst.t(),
        s: args.space,
        mode: args.mode,
        seed: args.seed,
        y,
        correct,
        rows_per_block,
        budget: check_budget(&ledger, inst.n(), inst.t(), args.space, family),
        ledger: ledger.report(),
    };
    print_json(&report)?;
    Ok(verdict(correct))
}

/// Exact and classical runs must be correct; sampled runs may err with
/// bounded probability, so only hard failures count against them.
fn sweep_failures(rows: &[SweepRow]) -> usize {
    rows.iter()
        .filter(|r| r.error.is_some() || (!r.correct && matches!(r.mode, RunMode::Exact | RunMode::Classical)))
        .count()
}

fn sweep(args: SweepArgs) -> Outcome {
    let cfg = SweepConfig::load(&args.config)?;
    let rows = run_sweep(&cfg)?;
    let out = args.out.or_else(|| cfg.out.clone());
    let format = args.format.unwrap_or_else(|| out.as_deref().map_or(Format::Csv, Format::from_path));
    match &out {
        Some(path) => {
            let file = fs::File::create(path)?;
            write_rows(&rows, format, io::BufWriter::new(file))?;
        }
        None => write_rows(&rows, format, io::stdout().lock())?,
    }
    let failures = sweep_failures(&rows);
    let wrong = rows.iter().filter(|r| !r.correct).count();
    eprintln!("{} rows, {wrong} incorrect, {failures} failing", rows.len());
    Ok(verdict(failures == 0))
}

fn report_cmd(args: ReportArgs) -> Outcome {
    let rows = read_rows(&args.input)?;
    let summary = report::summarize(&rows, args.axis);
    print_json(&summary)?;
    Ok(verdict(sweep_failures(&rows) == 0))
}

fn subspace(cmd: SubspaceCommand) -> Outcome {
    let SubspaceCommand::Verify { n, t, k, runs, seed } = cmd;
    let report = qtradeoff_subspace::suite::verify(n, t, k, runs, seed)?;
    print_json(&report)?;
    Ok(verdict(report.passed()))
}

fn write_table(report: &qtradeoff_poly::SuiteReport, path: &Path) -> io::Result<()> {
    let file = fs::File::create(path)?;
    report.table.write_csv(io::BufWriter::new(file)).map_err(io::Error::other)
}

fn poly(cmd: PolyCommand) -> Outcome {
    let PolyCommand::Verify { suite, seed, out } = cmd;
    let suites: Vec<Suite> = if suite == "all" { Suite::ALL.to_vec() } else { vec![suite.parse()?] };
    if out.is_some() && suites.len() != 1 {
        return Err("--out needs a single --suite".into());
    }
    let mut reports = Vec::new();
    for s in suites {
        let r = qtradeoff_poly::run_suite(s, seed)?;
        if let Some(path) = &out {
            write_table(&r, path)?;
        }
        reports.push(r);
    }
    let passed = reports.iter().all(|r| r.passed());
    print_json(&reports)?;
    Ok(verdict(passed))
}

fn is_broken_pipe(e: &(dyn std::error::Error + 'static)) -> bool {
    e.downcast_ref::<io::Error>().is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let outcome = match cli.command {
        Command::Solve(a) => solve(a),
        Command::Sweep(a) => sweep(a),
        Command::Report(a) => report_cmd(a),
        Command::Subspace { command } => subspace(command),
        Command::Poly { command } => poly(command),
    };
    match outcome {
        Ok(Verdict::Pass) => ExitCode::SUCCESS,
        Ok(Verdict::Fail) => ExitCode::from(1),
        Err(e) if is_broken_pipe(e.as_ref()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
