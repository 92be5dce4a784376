use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qkz_workbench::cli::{self, Format, RunConfig, RunOptions, SectorSelection};
use qkz_workbench::tensor_space::WeightSector;
use qkz_workbench::Result;

#[derive(Parser)]
#[command(name = "workbench", version, about = "Verify qKZ / Ruijsenaars operator identities on small spin chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the selected checks and print a report.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Check name (repeatable); `all` selects every check.
        #[arg(long = "check")]
        checks: Vec<String>,
        #[arg(long)]
        format: Option<Format>,
        /// Record per-check wall-clock time in the report.
        #[arg(long)]
        timings: bool,
        /// Worker threads (defaults to the number of cores).
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Joint Hamiltonian spectrum and momenta per sector (mode = float).
    Spectrum {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        format: Option<Format>,
    },
    /// Lax spectra against the twist targets per sector (mode = float).
    Correspond {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        format: Option<Format>,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Weight sector as `M1,M2,...` (repeatable).
    #[arg(long = "sector")]
    sectors: Vec<WeightSector>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

impl Common {
    fn load(&self) -> Result<RunConfig> {
        let mut cfg = cli::load_config(&self.config)?;
        if !self.sectors.is_empty() {
            cfg.sectors = SectorSelection::List(self.sectors.clone());
        }
        if let Some(tol) = self.tol {
            cfg.tol = tol;
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn execute(command: Command) -> Result<bool> {
    match command {
        Command::Verify { common, checks, format, timings, workers } => {
            let mut cfg = common.load()?;
            if !checks.is_empty() {
                cfg.set_checks(&checks);
            }
            if let Some(f) = format {
                cfg.format = f;
            }
            cfg.validate()?;
            let report = cli::run(&cfg, RunOptions { workers, timings, ..Default::default() })?;
            println!("{}", cli::emit(&report, cfg.format).trim_end());
            Ok(report.passed())
        }
        Command::Spectrum { common, format } => {
            let cfg = common.load()?;
            let reports = cli::spectrum(&cfg)?;
            match format.unwrap_or(cfg.format) {
                Format::Json => println!("{}", serde_json::to_string_pretty(&reports).expect("serializable")),
                Format::Text => print!("{}", cli::spectrum_text(&reports)),
            }
            Ok(true)
        }
        Command::Correspond { common, format } => {
            let cfg = common.load()?;
            let reports = cli::correspond(&cfg)?;
            match format.unwrap_or(cfg.format) {
                Format::Json => println!("{}", serde_json::to_string_pretty(&reports).expect("serializable")),
                Format::Text => print!("{}", cli::correspond_text(&reports)),
            }
            Ok(reports.iter().all(|r| r.passed()))
        }
    }
}

fn main() -> ExitCode {
    let outcome = execute(Cli::parse().command);
    if let Err(e) = &outcome {
        eprintln!("error: {e}");
    }
    ExitCode::from(cli::exit_code(&outcome) as u8)
}
