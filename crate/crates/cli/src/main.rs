//! `dirloc`: experiment runner for directional emitter localization.

mod commands;
mod experiment;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use experiment::Overrides;

#[derive(Parser)]
#[command(name = "dirloc", version, about = "Localize directional RF emitters and compute position bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo sweep over SNR; writes sweep.csv and trials.csv.
    Simulate(Common),
    /// Normalized position cost surface of one trial per method.
    Heatmap(Common),
    /// Position bound versus SNR and the orientation/beamwidth sweeps.
    Crlb(Common),
    /// Monte Carlo sweep with a 4-element ULA truth pattern.
    Mismatch(Common),
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Bundled preset name or path to a JSON configuration.
    #[arg(long, default_value = "comms_desk")]
    config: String,
    /// Monte Carlo trials per SNR.
    #[arg(long)]
    trials: Option<usize>,
    /// SNR values in dB, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    snr: Option<Vec<f64>>,
    /// Base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Position grid resolution in meters.
    #[arg(long)]
    grid_res_m: Option<f64>,
    /// Method names, comma separated.
    #[arg(long, value_delimiter = ',')]
    method: Option<Vec<String>>,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            trials: self.trials,
            snr_db: self.snr.clone(),
            seed: self.seed,
            grid_res_m: self.grid_res_m,
            methods: self.method.clone(),
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate(c) => commands::simulate(&c.config, &c.overrides(), &c.out),
        Command::Heatmap(c) => commands::heatmap(&c.config, &c.overrides(), &c.out),
        Command::Crlb(c) => commands::crlb(&c.config, &c.overrides(), &c.out),
        Command::Mismatch(c) => commands::mismatch(&c.config, &c.overrides(), &c.out),
    };
    match result {
        Ok(written) => {
            for path in written {
                println!("wrote {}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
