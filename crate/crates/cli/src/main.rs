mod commands;
mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use certikit::{CertError, Result};
use clap::{Args, Parser, Subcommand};

use commands::*;
use config::{ExperimentConfig, Manifest};
use output::Artifacts;

const EXIT_CONFIG: u8 = 2;
const EXIT_CAPACITY: u8 = 3;
const EXIT_NUMERICAL: u8 = 4;
const EXIT_NOT_CERTIFIABLE: u8 = 5;

/// Robust certificates: extraction, validation, hollow stars, and sampling experiments.
///
/// Results go to stdout as JSON; a one-line summary goes to stderr. Exit codes: 0 success,
/// 2 bad input or config, 3 capacity guard or sampler starvation, 4 numerical failure,
/// 5 not certifiable. `CERTIKIT_THREADS` caps the worker pool.
#[derive(Parser, Debug)]
#[command(name = "certikit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Extract a robust certificate for a labeled test point.
    Certify(Direct<CertifyArgs>),
    /// Check robust realizability and agreement-region membership.
    Agree(Direct<AgreeArgs>),
    /// Compute the robust hollow star number of a finite class.
    Star(Direct<StarArgs>),
    /// Certificate coefficient of a test point under a distribution.
    Coeff(Direct<CoeffArgs>),
    /// Empirical agreement probability against sample size.
    Curve(Direct<CurveArgs>),
    /// Lower-bound constructions for the sample-size terms.
    Tightness(Direct<TightnessArgs>),
    /// Certify a ball-center point from a reweighted sample.
    ReweightDemo(Direct<ReweightArgs>),
    /// Flip labels at random or adversarially.
    Attack(Direct<AttackArgs>),
    /// Conic membership of a signed test point in the cone of signed data.
    Conic(Direct<ConicArgs>),
    /// Run a key-value experiment file and write artifacts to a directory.
    Run(RunArgs),
}

#[derive(Args, Debug)]
struct Direct<T: Args> {
    #[command(flatten)]
    args: T,
    /// Also write the CSV table (if the command produces one) to this path.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

fn exit_code(err: &CertError) -> u8 {
    match err {
        CertError::Input(_) | CertError::Io(_) | CertError::Csv(_) | CertError::Json(_) => EXIT_CONFIG,
        CertError::Capacity { .. } | CertError::Starvation { .. } => EXIT_CAPACITY,
        CertError::Numerical(_) => EXIT_NUMERICAL,
        CertError::NotCertifiable { .. } | CertError::InsufficientSample { .. } | CertError::Unboundable(_) => {
            EXIT_NOT_CERTIFIABLE
        }
    }
}

/// Runs one non-`run` command. The code is nonzero only for an inexact star search.
fn execute(command: &Command) -> Result<(Artifacts, u8)> {
    let ok = |a: Artifacts| Ok((a, 0));
    match command {
        Command::Certify(c) => ok(certify(&c.args)?),
        Command::Agree(c) => ok(agree(&c.args)?),
        Command::Star(c) => {
            let (a, exact) = star(&c.args)?;
            Ok((a, if exact { 0 } else { EXIT_CAPACITY }))
        }
        Command::Coeff(c) => ok(coeff(&c.args)?),
        Command::Curve(c) => ok(curve(&c.args)?),
        Command::Tightness(c) => ok(tightness(&c.args)?),
        Command::ReweightDemo(c) => ok(reweight_demo(&c.args)?),
        Command::Attack(c) => ok(attack(&c.args)?),
        Command::Conic(c) => ok(conic(&c.args)?),
        Command::Run(_) => Err(CertError::Input("`run` cannot be nested".into())),
    }
}

fn csv_path(command: &Command) -> Option<&Path> {
    match command {
        Command::Certify(c) => c.csv.as_deref(),
        Command::Agree(c) => c.csv.as_deref(),
        Command::Star(c) => c.csv.as_deref(),
        Command::Coeff(c) => c.csv.as_deref(),
        Command::Curve(c) => c.csv.as_deref(),
        Command::Tightness(c) => c.csv.as_deref(),
        Command::ReweightDemo(c) => c.csv.as_deref(),
        Command::Attack(c) => c.csv.as_deref(),
        Command::Conic(c) => c.csv.as_deref(),
        Command::Run(_) => None,
    }
}

fn pretty(json: &serde_json::Value) -> Result<String> {
    let mut s = serde_json::to_string_pretty(json)?;
    s.push('\n');
    Ok(s)
}

fn direct(command: &Command) -> Result<u8> {
    let (artifacts, code) = execute(command)?;
    print!("{}", pretty(&artifacts.json)?);
    eprintln!("{}", artifacts.summary);
    if let (Some(path), Some(csv)) = (csv_path(command), &artifacts.csv) {
        std::fs::write(path, csv)?;
    }
    Ok(code)
}

fn run(args: &RunArgs) -> Result<u8> {
    let config = ExperimentConfig::load(&args.config)?;
    let parsed = Cli::try_parse_from(config.argv())
        .map_err(|e| CertError::Input(format!("config {}: {}", args.config.display(), e.render())))?;
    let start = Instant::now();
    let outcome = execute(&parsed.command);
    let mut manifest = Manifest::new(&config);
    manifest.wall_time_seconds = start.elapsed().as_secs_f64();
    std::fs::create_dir_all(&args.out)?;
    let write_manifest = |m: &Manifest| -> Result<()> {
        std::fs::write(args.out.join("manifest.json"), pretty(&serde_json::to_value(m)?)?)?;
        Ok(())
    };
    let (artifacts, code) = match outcome {
        Ok(v) => v,
        Err(e) => {
            manifest.exit_code = exit_code(&e);
            write_manifest(&manifest)?;
            return Err(e);
        }
    };
    std::fs::write(args.out.join("result.json"), pretty(&artifacts.json)?)?;
    manifest.artifacts.push("result.json".into());
    if let Some(csv) = &artifacts.csv {
        std::fs::write(args.out.join("result.csv"), csv)?;
        manifest.artifacts.push("result.csv".into());
    }
    manifest.exit_code = code;
    write_manifest(&manifest)?;
    println!("{}", artifacts.summary);
    Ok(code)
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("CERTIKIT_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CertError::Input(format!("CERTIKIT_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CertError::Input(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG } else { 0 });
        }
    };
    let result = configure_threads().and_then(|()| match &cli.command {
        Command::Run(args) => run(args),
        other => direct(other),
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
