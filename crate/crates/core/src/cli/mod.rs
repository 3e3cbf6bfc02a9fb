//! Command-line front end: `run`, `nash` and `report`.
//!
//! Exit codes: 0 success, 1 configuration or validation error, 2 the run
//! ended on a contract breach, 3 a trace failed its integrity re-scan.

pub mod report;
pub mod scenario;
pub mod trace_io;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::engine::{self, Verdict};
use crate::equilibria::mu_self;
use crate::error::{Error, Result};
use crate::model::{GameView, Round};
use crate::solvers::{mixed_nash_2p, public_pure_nash, reflection_best_response_profiles, reflection_mixed_2p};
use crate::sweep::{self, Execution};

use report::{audit_trace, render, ReportFailure};
use scenario::Scenario;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_BREACH: i32 = 2;
pub const EXIT_INTEGRITY: i32 = 3;

pub const LOG_ENV: &str = "INTENT_GAMES_LOG";

#[derive(Debug, Parser)]
#[command(name = "intention-games", version, about = "Run and audit repeated games with private payoff bonuses")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a scenario and write its trace and report.
    Run(RunArgs),
    /// Print public Nash and per-player reflection best-response profiles.
    Nash(NashArgs),
    /// Re-scan a trace file and print its audit report.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long, value_name = "PATH")]
    pub scenario: PathBuf,
    /// Directory for the trace and report files.
    #[arg(long, value_name = "DIR", default_value = ".")]
    pub out: PathBuf,
    /// Overrides the scenario seed.
    #[arg(long, value_name = "N")]
    pub seed: Option<u64>,
    /// Run seeds `seed..seed+N` concurrently, writing per-seed files.
    #[arg(long, value_name = "N")]
    pub sweep_seeds: Option<u64>,
}

#[derive(Debug, Args)]
pub struct NashArgs {
    #[arg(long, value_name = "PATH")]
    pub scenario: PathBuf,
    #[arg(long, value_name = "N")]
    pub seed: Option<u64>,
    /// Two-player mixed equilibria by support enumeration.
    #[arg(long)]
    pub mixed: bool,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Trace file written by `run`.
    #[arg(value_name = "TRACE")]
    pub trace: PathBuf,
}

fn log_level(value: Option<&str>) -> Result<log::LevelFilter> {
    match value.map(str::trim) {
        None | Some("") | Some("off") => Ok(log::LevelFilter::Off),
        Some("info") => Ok(log::LevelFilter::Info),
        Some("debug") => Ok(log::LevelFilter::Debug),
        Some(other) => Err(Error::InvalidConfig(format!("{LOG_ENV}={other:?}; expected off, info or debug"))),
    }
}

fn init_logging() -> Result<()> {
    let value = std::env::var(LOG_ENV).ok();
    let level = log_level(value.as_deref())?;
    // a second init in the same process keeps the first logger
    let _ = env_logger::Builder::new().filter_level(level).target(env_logger::Target::Stderr).try_init();
    Ok(())
}

/// Parse `args` (program name first) and execute. Returns the exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    if let Err(e) = init_logging() {
        let _ = writeln!(err, "error: {e}");
        return EXIT_INVALID;
    }
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a, out),
        Command::Nash(a) => cmd_nash(a, out),
        Command::Report(a) => cmd_report(&a.trace, out),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Invalid(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INVALID
        }
        Err(Failure::Integrity(msg)) => {
            let _ = writeln!(err, "integrity failure: {msg}");
            EXIT_INTEGRITY
        }
    }
}

enum Failure {
    Invalid(Error),
    Integrity(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Invalid(e)
    }
}

impl From<ReportFailure> for Failure {
    fn from(f: ReportFailure) -> Self {
        match f {
            ReportFailure::Invalid(e) => Failure::Invalid(e),
            ReportFailure::Integrity(m) => Failure::Integrity(m),
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::InvalidConfig(format!("{}: {e}", path.display()))
}

fn load(path: &Path, seed: Option<u64>) -> Result<Scenario> {
    let mut scenario = Scenario::load(path)?;
    if let Some(s) = seed {
        scenario.run.seed = s;
    }
    Ok(scenario)
}

/// Files produced by one simulated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub trace: String,
    pub report: String,
    pub verdict: Verdict,
}

/// Simulate a scenario and render its trace and report in memory.
pub fn simulate(scenario: &Scenario) -> Result<std::result::Result<RunOutput, String>> {
    let built = scenario.build()?;
    let trace = engine::run(&built.spec, &built.schedule, &built.run)?;
    let text = trace_io::write_trace(scenario, &trace);
    Ok(match audit_trace(&text) {
        Ok(audit) => Ok(RunOutput { report: render(&audit), trace: text, verdict: trace.verdict }),
        Err(ReportFailure::Invalid(e)) => Err(format!("fresh trace does not parse: {e}")),
        Err(ReportFailure::Integrity(m)) => Err(m),
    })
}

fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::Completed | Verdict::TargetReached => EXIT_OK,
        Verdict::Terminated(_) => EXIT_BREACH,
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| io_err(path, e))
}

fn cmd_run(args: &RunArgs, out: &mut dyn Write) -> std::result::Result<i32, Failure> {
    let scenario = load(&args.scenario, args.seed)?;
    std::fs::create_dir_all(&args.out).map_err(|e| io_err(&args.out, e))?;

    let Some(n) = args.sweep_seeds else {
        let output = simulate(&scenario)?.map_err(Failure::Integrity)?;
        write_file(&args.out.join(&scenario.outputs.trace), &output.trace)?;
        write_file(&args.out.join(&scenario.outputs.report), &output.report)?;
        let _ = out.write_all(output.report.as_bytes());
        return Ok(verdict_code(output.verdict));
    };

    if n == 0 {
        return Err(Error::InvalidConfig("--sweep-seeds needs at least 1 seed".into()).into());
    }
    let base = scenario.run.seed;
    let seeds: Vec<u64> = (0..n)
        .map(|k| base.checked_add(k))
        .collect::<Option<_>>()
        .ok_or_else(|| Error::InvalidConfig("seed range overflows u64".into()))?;
    let outputs = sweep::map(&seeds, Execution::default(), |&seed| {
        let mut s = scenario.clone();
        s.run.seed = seed;
        simulate(&s)
    });
    let mut code = EXIT_OK;
    for (seed, output) in seeds.iter().zip(outputs) {
        let output = output?.map_err(Failure::Integrity)?;
        write_file(&args.out.join(format!("trace_seed{seed}.csv")), &output.trace)?;
        write_file(&args.out.join(format!("report_seed{seed}.txt")), &output.report)?;
        let _ = writeln!(out, "seed {seed}: {}", trace_io::verdict_label(output.verdict));
        code = code.max(verdict_code(output.verdict));
    }
    Ok(code)
}

fn fmt_mix(p: &[f64]) -> String {
    let parts: Vec<String> = p.iter().map(|x| format!("{x:.5}")).collect();
    format!("[{}]", parts.join(", "))
}

fn cmd_nash(args: &NashArgs, out: &mut dyn Write) -> std::result::Result<i32, Failure> {
    let scenario = load(&args.scenario, args.seed)?;
    let spec = scenario.build()?.spec;
    let p = spec.players();
    let mut text = String::new();

    if args.mixed {
        if p != 2 {
            return Err(Error::Unsupported(format!("mixed equilibria need 2 players, game has {p}")).into());
        }
        let eq = mixed_nash_2p(&spec, GameView::PublicImage, &Round::new(1, &[]))?;
        text += &format!("Im: row={} col={}\n", fmt_mix(&eq.row), fmt_mix(&eq.col));
        for i in 0..p {
            let contacts = [i];
            let round = Round::new(1, &contacts);
            let refl = reflection_mixed_2p(&spec, i, &eq, &round)?;
            let bonus = mu_self(&spec, i, &refl.to_profile(), &round)?;
            text += &format!(
                "Ref_{}: row={} col={} mu_self={bonus:.5}\n",
                i + 1,
                fmt_mix(&refl.row),
                fmt_mix(&refl.col)
            );
        }
    } else {
        let nash = public_pure_nash(&spec)?;
        if nash.is_empty() {
            text += "no pure public Nash; use --mixed\n";
        } else {
            let join = |v: &[crate::model::ActionProfile]| v.iter().map(|a| a.to_string()).collect::<Vec<_>>().join("; ");
            text += &format!("Im: {}\n", join(&nash));
            for i in 0..p {
                let contacts = [i];
                let refl = reflection_best_response_profiles(&spec, i, &Round::new(1, &contacts))?;
                text += &format!("Ref_{}: {}\n", i + 1, join(&refl.profiles));
            }
        }
    }
    let _ = out.write_all(text.as_bytes());
    Ok(EXIT_OK)
}

fn cmd_report(path: &Path, out: &mut dyn Write) -> std::result::Result<i32, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let audit = audit_trace(&text)?;
    let _ = out.write_all(render(&audit).as_bytes());
    Ok(EXIT_OK)
}
