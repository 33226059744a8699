use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use spar_cli::commands;
use spar_cli::config::RunConfig;

#[derive(Parser)]
#[command(name = "spar", version, about = "Angular-radial densities, SPAR models and limit sets for bivariate extremes")]
struct Cli {
    /// TOML run configuration; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (default: spar-out).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for Monte Carlo checks.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List copula families, parameter ranges and catalog availability as JSON.
    Catalog {
        /// Keep families whose name contains this text.
        #[arg(default_value = "")]
        filter: String,
    },
    /// Tabulate f_Q, f_RQ and f_XY on the configured grids.
    Eval,
    /// Export SPAR parameters and, optionally, the limit-set boundary.
    Spar,
    /// Rank-transform a two-column sample to Laplace margins and polar coordinates.
    Transform {
        /// Input CSV (overrides transform.input in the config).
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Run a verification suite.
    Verify {
        /// Suite name (overrides verify.suite in the config).
        suite: Option<String>,
    },
}

enum Outcome {
    Ok,
    ChecksFailed,
}

fn run(cli: Cli) -> Result<Outcome> {
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let threads = cli.threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("spar-out"));
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build().context("starting worker pool")?;
    pool.install(|| match cli.command {
        Command::Catalog { filter } => {
            let listing = commands::catalog(&filter)?;
            let text = serde_json::to_string_pretty(&listing)? + "\n";
            print!("{text}");
            if let Some(dir) = &cli.out {
                std::fs::create_dir_all(dir)?;
                std::fs::write(dir.join("catalog.json"), text)?;
            }
            Ok(Outcome::Ok)
        }
        Command::Eval => {
            for f in commands::eval(&cfg, &out, cli.seed)? {
                println!("wrote {}", f.display());
            }
            Ok(Outcome::Ok)
        }
        Command::Spar => {
            for f in commands::spar(&cfg, &out, cli.seed)? {
                println!("wrote {}", f.display());
            }
            Ok(Outcome::Ok)
        }
        Command::Transform { input } => {
            let input = input
                .or_else(|| cfg.transform.input.clone())
                .context("transform needs --input or transform.input in the config")?;
            for f in commands::transform(&cfg, &input, &out, cli.seed)? {
                println!("wrote {}", f.display());
            }
            Ok(Outcome::Ok)
        }
        Command::Verify { suite } => {
            let suite = suite.unwrap_or_else(|| cfg.verify.suite.clone());
            let reports = commands::verify(&cfg, &suite, &out, cli.seed)?;
            for r in &reports {
                println!("{}", r.summary());
            }
            Ok(if reports.iter().all(|r| r.pass()) { Outcome::Ok } else { Outcome::ChecksFailed })
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::ChecksFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
