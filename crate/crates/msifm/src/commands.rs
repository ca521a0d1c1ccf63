//! The command-line surface: flag parsing, option merging, reports, exit
//! codes.
//!
//! Reports go to stdout and logging to stderr, so the report alone can be
//! captured or diffed. Options in the instance file are defaults; the
//! matching command-line flags win where both are present.

use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use log::LevelFilter;
use thiserror::Error;

use crate::border::{Border, BorderError, DEFAULT_BORDER_CAP};
use crate::driver::{
    run_colgen, run_oracle, ColgenOptions, DriverError, OracleOptions, Termination,
    DEFAULT_ORACLE_CAP,
};
use crate::io::{self, Arithmetic, FileOptions, InstanceFile, IoError};
use crate::model::{verify, ConstraintInstance, ModelError};
use crate::round::{round_solution, RoundError};
use crate::scalar::LpScalar;
use crate::Rational;

pub const EXIT_FEASIBLE: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Parser)]
#[command(
    name = "msifm",
    version,
    about = "Synthesize transactional datasets that meet support constraints"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Log verbosity on stderr.
    #[arg(long, global = true, value_enum, default_value_t = LogArg::Quiet)]
    log: LogArg,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance and write the rounded dataset.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        /// Where the dataset file goes.
        #[arg(long)]
        out: PathBuf,
        /// Wall-clock budget for the solve, in seconds.
        #[arg(long, value_name = "SECONDS", value_parser = parse_seconds)]
        time_limit: Option<f64>,
        /// Most negative-border members to enumerate before giving up.
        #[arg(long, value_name = "N")]
        border_cap: Option<usize>,
        #[arg(long, value_enum)]
        arithmetic: Option<ArithmeticArg>,
    },
    /// Check an existing dataset file against an instance.
    Verify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, value_name = "N")]
        border_cap: Option<usize>,
    },
    /// Solve with every transaction column materialized up front.
    Oracle {
        #[arg(long)]
        instance: PathBuf,
        /// Most columns the full expansion may materialize.
        #[arg(long, value_name = "N")]
        oracle_cap: Option<u64>,
        #[arg(long, value_name = "N")]
        border_cap: Option<usize>,
        #[arg(long, value_enum)]
        arithmetic: Option<ArithmeticArg>,
    },
    /// Print the minimal infrequent itemsets of each set-valued attribute.
    Border {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_name = "N")]
        border_cap: Option<usize>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LogArg {
    Quiet,
    Info,
    Trace,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ArithmeticArg {
    Rational,
    Float,
}

impl From<ArithmeticArg> for Arithmetic {
    fn from(a: ArithmeticArg) -> Arithmetic {
        match a {
            ArithmeticArg::Rational => Arithmetic::Rational,
            ArithmeticArg::Float => Arithmetic::Float,
        }
    }
}

fn parse_seconds(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err("the time limit must be a finite non-negative number".into())
    }
}

#[derive(Debug, Error)]
enum CmdError {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Border(#[from] BorderError),
    #[error(transparent)]
    Driver(#[from] DriverError),
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },
}

fn exit_code_for(e: &CmdError) -> i32 {
    match e {
        CmdError::Io(_) | CmdError::Model(_) | CmdError::Write { .. } => EXIT_USAGE,
        CmdError::Border(_) | CmdError::Driver(_) => EXIT_RESOURCE,
    }
}

pub fn main_entry() -> i32 {
    let cli = Cli::parse();
    init_logging(cli.log);
    let outcome = match &cli.command {
        Command::Solve { instance, out, time_limit, border_cap, arithmetic } => {
            cmd_solve(instance, out, *time_limit, *border_cap, *arithmetic)
        }
        Command::Verify { instance, dataset, border_cap } => {
            cmd_verify(instance, dataset, *border_cap)
        }
        Command::Oracle { instance, oracle_cap, border_cap, arithmetic } => {
            cmd_oracle(instance, *oracle_cap, *border_cap, *arithmetic)
        }
        Command::Border { instance, border_cap } => cmd_border(instance, *border_cap),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

fn init_logging(level: LogArg) {
    let filter = match level {
        LogArg::Quiet => LevelFilter::Off,
        LogArg::Info => LevelFilter::Info,
        LogArg::Trace => LevelFilter::Trace,
    };
    let _ = env_logger::Builder::new()
        .filter_level(filter)
        .format_timestamp(None)
        .try_init();
}

struct Merged {
    time_limit: Option<Duration>,
    border_cap: usize,
    arithmetic: Arithmetic,
    oracle_cap: u64,
}

fn merge(
    file: &FileOptions,
    time_limit: Option<f64>,
    border_cap: Option<usize>,
    arithmetic: Option<ArithmeticArg>,
    oracle_cap: Option<u64>,
) -> Merged {
    Merged {
        time_limit: time_limit
            .or(file.time_limit_s)
            .map(Duration::from_secs_f64),
        border_cap: border_cap.or(file.border_cap).unwrap_or(DEFAULT_BORDER_CAP),
        arithmetic: arithmetic
            .map(Arithmetic::from)
            .or(file.arithmetic)
            .unwrap_or(Arithmetic::Rational),
        oracle_cap: oracle_cap.or(file.oracle_cap).unwrap_or(DEFAULT_ORACLE_CAP),
    }
}

fn instance_border(inst: &ConstraintInstance, cap: usize) -> Result<Border, BorderError> {
    match inst.sigma_prime() {
        Some(_) => Border::compute(inst, cap),
        None => Ok(Border::empty(inst.schema())),
    }
}

fn cmd_solve(
    instance: &Path,
    out: &Path,
    time_limit: Option<f64>,
    border_cap: Option<usize>,
    arithmetic: Option<ArithmeticArg>,
) -> Result<i32, CmdError> {
    let InstanceFile { instance: inst, options } = io::parse_instance(instance)?;
    let merged = merge(&options, time_limit, border_cap, arithmetic, None);
    match merged.arithmetic {
        Arithmetic::Rational => solve_generic::<Rational>(&inst, out, &merged),
        Arithmetic::Float => solve_generic::<f64>(&inst, out, &merged),
    }
}

fn solve_generic<S: LpScalar>(
    inst: &ConstraintInstance,
    out: &Path,
    merged: &Merged,
) -> Result<i32, CmdError> {
    let opts = ColgenOptions {
        time_limit: merged.time_limit,
        border_cap: merged.border_cap,
        check_invariants: false,
    };
    let result = run_colgen::<S, _>(inst, &opts, |p| {
        log::info!(
            "iteration {}: objective {}, new column prices {}",
            p.iteration,
            p.objective,
            p.reduced_cost
        );
        log::trace!("column {}", p.column.display_in(inst.schema()));
    })?;

    let termination = match result.termination {
        Termination::Optimal => "optimal",
        Termination::TimeLimit => "time-limit",
    };
    println!("termination: {termination}");
    println!("iterations: {}", result.iterations);
    println!("objective: {}", result.objective);

    if result.termination == Termination::TimeLimit && result.iterations == 0 {
        eprintln!("error: the time limit struck before the first restricted solve finished");
        return Ok(EXIT_RESOURCE);
    }

    let (dataset, deficit) = match round_solution(inst, &result.dataset, inst.size()) {
        Ok(d) => (d, None),
        Err(RoundError::CapSaturation { partial, deficit }) => (partial, Some(deficit)),
        Err(RoundError::Model(e)) => return Err(e.into()),
    };
    if let Some(deficit) = deficit {
        println!("rounding: duplicate caps leave {deficit} units unplaced");
    }

    let border = instance_border(inst, merged.border_cap)?;
    let report = verify(inst, &dataset, border.per_attr())?;
    for v in report.violations() {
        println!("violation: {}", v.render(inst.schema()));
    }

    let text = io::emit_dataset(&dataset, inst.schema())?;
    std::fs::write(out, text).map_err(|source| CmdError::Write {
        path: out.display().to_string(),
        source,
    })?;
    println!("dataset: {} ({} distinct transactions)", out.display(), dataset.len());

    let feasible = result.termination == Termination::Optimal
        && result.objective <= S::tolerance()
        && deficit.is_none()
        && report.is_empty();
    Ok(if feasible { EXIT_FEASIBLE } else { EXIT_INFEASIBLE })
}

fn cmd_verify(
    instance: &Path,
    dataset: &Path,
    border_cap: Option<usize>,
) -> Result<i32, CmdError> {
    let InstanceFile { instance: inst, options } = io::parse_instance(instance)?;
    let merged = merge(&options, None, border_cap, None, None);
    let data = io::parse_dataset(dataset, inst.schema())?;
    let border = instance_border(&inst, merged.border_cap)?;
    let report = verify(&inst, &data, border.per_attr())?;
    if report.is_empty() {
        println!("ok: dataset satisfies the instance ({} distinct transactions)", data.len());
        Ok(EXIT_FEASIBLE)
    } else {
        for v in report.violations() {
            println!("violation: {}", v.render(inst.schema()));
        }
        Ok(EXIT_INFEASIBLE)
    }
}

fn cmd_oracle(
    instance: &Path,
    oracle_cap: Option<u64>,
    border_cap: Option<usize>,
    arithmetic: Option<ArithmeticArg>,
) -> Result<i32, CmdError> {
    let InstanceFile { instance: inst, options } = io::parse_instance(instance)?;
    let merged = merge(&options, None, border_cap, arithmetic, oracle_cap);
    match merged.arithmetic {
        Arithmetic::Rational => oracle_generic::<Rational>(&inst, &merged),
        Arithmetic::Float => oracle_generic::<f64>(&inst, &merged),
    }
}

fn oracle_generic<S: LpScalar>(
    inst: &ConstraintInstance,
    merged: &Merged,
) -> Result<i32, CmdError> {
    let res = run_oracle::<S>(
        inst,
        &OracleOptions {
            column_cap: merged.oracle_cap,
            border_cap: merged.border_cap,
            check_invariants: false,
        },
    )?;
    println!("columns: {}", res.columns_materialized);
    println!("objective: {}", res.objective);
    for (t, v) in res.dataset.iter() {
        println!("{v}\t{}", t.display_in(inst.schema()));
    }
    Ok(if res.objective <= S::tolerance() { EXIT_FEASIBLE } else { EXIT_INFEASIBLE })
}

fn cmd_border(instance: &Path, border_cap: Option<usize>) -> Result<i32, CmdError> {
    let InstanceFile { instance: inst, options } = io::parse_instance(instance)?;
    let merged = merge(&options, None, border_cap, None, None);
    let border = Border::compute(&inst, merged.border_cap)?;
    for (a, sets) in border.per_attr().iter().enumerate() {
        let attr = inst.schema().mv_attr(a);
        if sets.is_empty() {
            println!("{}: (none)", attr.name());
        } else {
            let rendered: Vec<String> = sets.iter().map(|s| s.display_in(attr)).collect();
            println!("{}: {}", attr.name(), rendered.join(" "));
        }
    }
    Ok(EXIT_FEASIBLE)
}
