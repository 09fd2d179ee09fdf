use clap::{Parser, Subcommand};
use curlgap::{commands, CliError, RunConfig};
use std::path::PathBuf;
use std::process::ExitCode;

/// Spectral-gap design and ground states of the cylindrical curl-curl
/// problem.
#[derive(Parser)]
#[command(name = "curlgap", version, about)]
struct Cli {
    /// JSON configuration file.
    #[arg(short, long, global = true, default_value = "curlgap.json")]
    config: PathBuf,
    /// Override a config value by dotted path, e.g. `--set grid.nr=128`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output directory (overrides the config's `output_dir`).
    #[arg(short, long, global = true)]
    output_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Band structure of the 1-periodic potential.
    Bands {
        /// Exit nonzero when the first spectral gap is closed.
        #[arg(long)]
        require_gap: bool,
    },
    /// Design a separable potential with zero in a spectral gap.
    Design,
    /// Sample the radial matching functions g and h over the well.
    Curves,
    /// Assemble the separable spectrum and certify the gap at zero.
    Spectrum,
    /// Solve for a ground state of the nonlinear problem.
    Groundstate,
}

fn run() -> Result<(), CliError> {
    let cli = Cli::parse();
    let mut cfg = RunConfig::load(&cli.config, &cli.overrides)?;
    if let Some(dir) = cli.output_dir {
        cfg.output_dir = Some(dir);
    }
    match cli.command {
        Command::Bands { require_gap } => {
            if require_gap {
                cfg.bands.require_gap = true;
            }
            commands::cmd_bands(&cfg)
        }
        Command::Design => commands::cmd_design(&cfg),
        Command::Curves => commands::cmd_curves(&cfg),
        Command::Spectrum => commands::cmd_spectrum(&cfg),
        Command::Groundstate => commands::cmd_groundstate(&cfg),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
