//! `rffso`: closed-form and simulated secrecy metrics for a mixed RF-FSO
//! relay with transmit antenna selection.

mod config;
mod error;
mod sweep;

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rffso::validation::{run_criterion, ValidationConfig, CRITERIA};

use crate::config::{load_config, parse_schemes, ScenarioConfig};
use crate::error::CliError;
use crate::sweep::{run_sweep, write_csv, Mode};

#[derive(Parser)]
#[command(name = "rffso", version, about = "Secrecy outage and throughput of a mixed RF-FSO relay link")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form bound, exact outage by quadrature and high-SNR floor.
    Analyze(Common),
    /// Monte-Carlo estimates only.
    Simulate(Common),
    /// Closed forms and simulation side by side.
    Sweep(Common),
    /// Run the acceptance criteria.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct Common {
    /// TOML scenario file; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<u64>,
    /// otas, tasr, tase, atas or all; repeatable.
    #[arg(long)]
    scheme: Vec<String>,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    common: Common,
    /// Run only these criteria (comma separated ids).
    #[arg(long, value_delimiter = ',')]
    criteria: Vec<u8>,
    /// Alternative Meijer G reference table.
    #[arg(long)]
    fixtures: Option<PathBuf>,
}

fn resolve(c: &Common) -> Result<ScenarioConfig, CliError> {
    let mut cfg = match &c.config {
        Some(p) => load_config(p)?,
        None => ScenarioConfig::default(),
    };
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    if let Some(n) = c.samples {
        if n < rffso::montecarlo::MIN_SAMPLES {
            return Err(CliError::Config(format!(
                "invalid samples: must be at least {}",
                rffso::montecarlo::MIN_SAMPLES
            )));
        }
        cfg.samples = n;
    }
    if !c.scheme.is_empty() {
        cfg.schemes = parse_schemes(&c.scheme)?;
    }
    Ok(cfg)
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn tabulate(c: &Common, mode: Mode) -> Result<(), CliError> {
    let cfg = resolve(c)?;
    eprintln!("# {}", cfg.echo);
    let rows = run_sweep(&cfg, mode)?;
    write_csv(&rows, output(&c.out)?)
}

fn validate(args: &ValidateArgs) -> Result<(), CliError> {
    let cfg = resolve(&args.common)?;
    let mut vc =
        ValidationConfig { seed: cfg.seed, samples: cfg.samples, stream_count: cfg.stream_count, ..Default::default() };
    if let Some(p) = &args.fixtures {
        vc.fixtures = std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
    }
    let ids: Vec<u8> =
        if args.criteria.is_empty() { CRITERIA.iter().map(|c| c.0).collect() } else { args.criteria.clone() };
    let mut w = csv::Writer::from_writer(output(&args.common.out)?);
    w.write_record(["criterion", "name", "passed", "elapsed_s", "budget_s", "detail"])?;
    let mut failed = 0;
    for id in ids {
        let r = run_criterion(id, &vc)?;
        eprintln!("{}", r.line());
        failed += usize::from(!r.passed);
        w.write_record([
            r.id.to_string(),
            r.name.to_string(),
            r.passed.to_string(),
            format!("{:.3}", r.elapsed.as_secs_f64()),
            r.budget.as_secs().to_string(),
            r.detail,
        ])?;
        w.flush()?;
    }
    if failed > 0 {
        return Err(CliError::Validation { failed });
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Analyze(c) => tabulate(c, Mode::Closed),
        Command::Simulate(c) => tabulate(c, Mode::Simulated),
        Command::Sweep(c) => tabulate(c, Mode::Both),
        Command::Validate(v) => validate(v),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rffso: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
