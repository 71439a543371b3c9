//! Command-line front end.
//!
//! Exit codes: 0 all checks pass, 1 a check failed, 2 usage or config error,
//! 3 invalid physical state.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::{Config, ConfigError, ProcessSpec};
use crate::constitutive::{Constitutive, ResponseSet};
use crate::error::Error;
use crate::kinematics::MaterialState;
use crate::process::run_process;
use crate::processlog::{read_log, summarize, write_log, LogError, LogRow};
use crate::tensor::{Mat3, Vec3};
use crate::verification::{run_suite, CheckReport, Tolerances};

/// Environment variable controlling log verbosity (`error` … `trace`).
pub const LOG_ENV: &str = "ELECTROELASTIC_LOG";

#[derive(Debug, Parser)]
#[command(name = "electroelastic", version, about = "Thermo-electroelastic constitutive responses and restriction checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print every derived response at one state.
    Derive(DeriveArgs),
    /// Run the configured verification suite and write an NDJSON report.
    Verify(RunArgs),
    /// Sample one configured process and write a CSV log.
    Simulate(RunArgs),
    /// Summarize a CSV log written by `simulate`.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct DeriveArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Temperature θ.
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    /// Deformation gradient, nine comma-separated values in row-major order.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_list::<9>)]
    pub f: Option<[f64; 9]>,
    /// Maxwellian electric field, three comma-separated values.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_list::<3>)]
    pub em: Option<[f64; 3]>,
    /// Spatial temperature gradient, three comma-separated values.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_list::<3>)]
    pub g: Option<[f64; 3]>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Process name: required by `simulate`; restricts process checks in `verify`.
    #[arg(long)]
    pub process: Option<String>,
    /// Output path; overrides the config's `[output]` entry.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// CSV log written by `simulate`.
    pub log: PathBuf,
}

fn parse_list<const N: usize>(s: &str) -> Result<[f64; N], String> {
    let vals: Vec<f64> = s
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}")))
        .collect::<Result<_, _>>()?;
    vals.try_into().map_err(|v: Vec<f64>| format!("expected {N} comma-separated values, got {}", v.len()))
}

/// Failure of a command, carrying its exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("invalid state: {0}")]
    InvalidState(Error),
    #[error("{0}")]
    Model(Error),
    #[error("{context}: {source}")]
    Io { context: String, source: std::io::Error },
    #[error("{0}")]
    Log(LogError),
    #[error("{0} check(s) failed")]
    ChecksFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::ChecksFailed(_) => 1,
            CliError::InvalidState(_) => 3,
            _ => 2,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_invalid_state() {
            CliError::InvalidState(e)
        } else {
            CliError::Model(e)
        }
    }
}

fn io_err(context: impl Into<String>) -> impl FnOnce(std::io::Error) -> CliError {
    let context = context.into();
    move |source| CliError::Io { context, source }
}

fn load(path: &Path, seed: Option<u64>) -> Result<Config, CliError> {
    let mut cfg = Config::load(path)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(io_err(format!("cannot create {}", path.display())))
}

pub fn derive(args: &DeriveArgs, out: &mut impl Write) -> Result<(), CliError> {
    let cfg = load(&args.config, None)?;
    let material = cfg.material()?;
    let base = cfg.derive_state();
    let state = MaterialState {
        f: args.f.map(|v| Mat3::from_flat(&v)).unwrap_or(base.f),
        theta: args.theta.unwrap_or(base.theta),
        em: args.em.map(Vec3).unwrap_or(base.em),
        g: args.g.map(Vec3).unwrap_or(base.g),
    };
    state.validate().map_err(CliError::InvalidState)?;
    let response = material.response(&state)?;
    print_response(out, &state, &response).map_err(io_err("stdout"))
}

fn print_response(out: &mut impl Write, s: &MaterialState, r: &ResponseSet) -> std::io::Result<()> {
    fn vec(v: &Vec3) -> String {
        format!("[{:.16e}, {:.16e}, {:.16e}]", v[0], v[1], v[2])
    }
    fn mat(m: &Mat3) -> String {
        let rows: Vec<String> = (0..3).map(|i| vec(&m.row(i))).collect();
        format!("[{}]", rows.join(", "))
    }
    let lines = [
        ("F", "deformation gradient", "1", mat(&s.f)),
        ("theta", "temperature", "temperature", format!("{:.16e}", s.theta)),
        ("E", "Maxwellian electric field", "statvolt/length", vec(&s.em)),
        ("g", "temperature gradient", "temperature/length", vec(&s.g)),
        ("psi", "free energy per unit mass", "energy/mass", format!("{:.16e}", r.psi)),
        ("eta", "entropy per unit mass", "energy/(mass·temperature)", format!("{:.16e}", r.eta)),
        ("eps", "internal energy per unit mass", "energy/mass", format!("{:.16e}", r.eps)),
        ("tau", "Cauchy stress", "force/area", mat(&r.tau)),
        ("S", "nominal stress", "force/reference area", mat(&r.s)),
        ("pi", "polarization per unit mass", "dipole/mass", vec(&r.pi)),
        ("P", "polarization per unit volume", "dipole/volume", vec(&r.p)),
        ("Pi", "referential polarization per unit mass", "dipole/mass", vec(&r.pi_ref)),
        ("PP", "referential polarization per unit reference volume", "dipole/reference volume", vec(&r.p_ref)),
        ("q", "heat flux", "power/area", vec(&r.q)),
        ("Q", "referential heat flux", "power/reference area", vec(&r.q_ref)),
    ];
    for (sym, label, unit, value) in lines {
        writeln!(out, "{sym:<6} {label:<52} [{unit}] = {value}")?;
    }
    Ok(())
}

/// Runs the suite; the report is written before failures are signalled.
pub fn verify(args: &RunArgs, out: &mut impl Write) -> Result<Vec<CheckReport>, CliError> {
    let cfg = load(&args.config, args.seed)?;
    let material = cfg.material()?;
    let processes = match args.process.as_deref() {
        Some(name) => vec![find_process(&cfg, name)?.to_named()?],
        None => cfg.named_processes()?,
    };
    if cfg.suite.checks.is_empty() {
        return Err(CliError::Usage("no checks selected".into()));
    }
    let reports = run_suite(&material, &cfg.suite.checks, &cfg.suite_settings(), &processes)?;
    if let Some(path) = args.out.as_ref().or(cfg.output.report.as_ref()) {
        let mut w = create(path)?;
        for r in &reports {
            let line = serde_json::to_string(r).map_err(|e| CliError::Usage(e.to_string()))?;
            writeln!(w, "{line}").map_err(io_err(format!("writing {}", path.display())))?;
        }
        w.flush().map_err(io_err(format!("writing {}", path.display())))?;
    }
    for r in &reports {
        writeln!(out, "{}", r.summary()).map_err(io_err("stdout"))?;
        if let Some(n) = &r.notes {
            writeln!(out, "     note: {n}").map_err(io_err("stdout"))?;
        }
    }
    let failed = reports.iter().filter(|r| !r.pass).count();
    if failed > 0 {
        for r in reports.iter().filter(|r| !r.pass) {
            log::info!("check `{}` failed: residual {:e} > tolerance {:e}", r.name, r.max_residual, r.tolerance);
        }
        return Err(CliError::ChecksFailed(failed));
    }
    Ok(reports)
}

fn find_process<'a>(cfg: &'a Config, name: &str) -> Result<&'a ProcessSpec, CliError> {
    cfg.process(name).ok_or_else(|| {
        let known: Vec<_> = cfg.processes.iter().map(|p| p.name.as_str()).collect();
        CliError::Usage(format!("unknown process `{name}` (known: {})", known.join(", ")))
    })
}

pub fn simulate(args: &RunArgs, out: &mut impl Write) -> Result<usize, CliError> {
    let cfg = load(&args.config, args.seed)?;
    let name = args
        .process
        .as_deref()
        .ok_or_else(|| CliError::Usage("simulate requires --process <name>".into()))?;
    let spec = find_process(&cfg, name)?;
    let material = cfg.material()?;
    let np = spec.to_named()?;
    let samples = run_process(&np.process, &material, &np.points, &np.times)?;
    let rows = samples
        .iter()
        .map(|s| LogRow::from_sample(&material, s))
        .collect::<Result<Vec<_>, _>>()?;
    let path = args
        .out
        .as_ref()
        .or(cfg.output.log.as_ref())
        .ok_or_else(|| CliError::Usage("no log path: pass --out or set [output] log".into()))?;
    write_log(create(path)?, &rows).map_err(CliError::Log)?;
    writeln!(out, "wrote {} rows to {}", rows.len(), path.display()).map_err(io_err("stdout"))?;
    Ok(rows.len())
}

pub fn report(args: &ReportArgs, out: &mut impl Write) -> Result<(), CliError> {
    let file = File::open(&args.log).map_err(io_err(format!("cannot open {}", args.log.display())))?;
    let rows = read_log(BufReader::new(file)).map_err(CliError::Log)?;
    let summary = summarize(&rows);
    let tol = Tolerances::default().internal_dissipation;
    writeln!(out, "{summary}").map_err(io_err("stdout"))?;
    writeln!(
        out,
        "internal dissipation tolerance {tol:.1e}: {}",
        if summary.max_delta0_rel <= tol { "within" } else { "exceeded" }
    )
    .map_err(io_err("stdout"))
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match &cli.command {
        Command::Derive(a) => derive(a, &mut out),
        Command::Verify(a) => verify(a, &mut out).map(|_| ()),
        Command::Simulate(a) => simulate(a, &mut out).map(|_| ()),
        Command::Report(a) => report(a, &mut out),
    }
}

/// Parses arguments, runs the command and maps the outcome to an exit code.
pub fn main_entry() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or(LOG_ENV, "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
