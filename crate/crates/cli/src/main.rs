//! `magnetoforge` command-line driver.
//!
//! Subcommands: `solve`, `compare`, `material`, `mesh-info`. Exit codes:
//! 0 success, 2 configuration error, 3 solver non-convergence.

mod config;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Config, FormulationChoice};
use run::{CliError, EXIT_CONFIG, EXIT_OK};

#[derive(Debug, Parser)]
#[command(name = "magnetoforge", version, about = "Nonlinear magnetostatics finite element solver")]
struct Cli {
    /// Suppress progress output on stderr.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Path to the TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for reports (default: current directory).
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Override the configured formulation (mixed | scalar | vector | all).
    #[arg(long)]
    formulation: Option<String>,
    /// Override the configured polynomial degree.
    #[arg(long)]
    p: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the configured problem and write a JSON report.
    Solve(RunArgs),
    /// Run the three-formulation comparison and write the CSV table.
    Compare(RunArgs),
    /// Inspect a B-H curve file: constants, Fenchel round-trip, samples.
    Material {
        /// CSV file with `h,b` samples.
        path: PathBuf,
    },
    /// Print mesh statistics and DOF counts for the configured mesh.
    MeshInfo {
        #[arg(long)]
        config: PathBuf,
    },
}

fn load_config(args: &RunArgs) -> Result<Config, CliError> {
    let mut config = Config::load(&args.config)?;
    if let Some(f) = &args.formulation {
        config.formulation = FormulationChoice::parse(f)?;
    }
    if let Some(p) = args.p {
        if !(1..=2).contains(&p) {
            return Err(config::ConfigError::BadDegree(p).into());
        }
        config.p = p;
    }
    Ok(config)
}

fn init_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("MAGNETOFORGE_THREADS") {
        let n: usize = v.parse().map_err(|_| {
            CliError::Config(anyhow::anyhow!(
                "MAGNETOFORGE_THREADS must be a non-negative integer, got {v:?}"
            ))
        })?;
        if n > 0 {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| CliError::Config(anyhow::anyhow!("thread pool: {e}")))?;
        }
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    init_threads()?;
    match &cli.command {
        Command::Solve(args) => {
            let config = load_config(args)?;
            run::cmd_solve(&args.config, &config, &args.out, cli.quiet)
        }
        Command::Compare(args) => {
            let config = load_config(args)?;
            run::cmd_compare(&args.config, &config, &args.out, cli.quiet)
        }
        Command::Material { path } => run::cmd_material(path, &mut std::io::stdout()),
        Command::MeshInfo { config } => {
            let config = Config::load(config)?;
            run::cmd_mesh_info(&config, &mut std::io::stdout())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help / --version with success exit codes
            if e.use_stderr() {
                eprintln!("{e}");
                return ExitCode::from(EXIT_CONFIG);
            }
            print!("{e}");
            return ExitCode::from(EXIT_OK);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::from(EXIT_OK),
        Err(e) => {
            eprintln!("{}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
