use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use felpair::sweep::{execute, Command, Config};

#[derive(Parser, Debug)]
#[command(name = "felpair", version, about = "Entangled photon-pair emission in FEL undulators")]
struct Cli {
    /// JSON configuration; defaults reproduce the LCLS reference setup.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    /// Relative tolerance of the detector quadrature.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand, Debug)]
enum Verb {
    /// Differential rate over the configured angular grid.
    RateMap,
    /// Concurrence over the configured angular grid.
    ConcurrenceMap,
    /// Aperture-averaged two-photon density matrix.
    DensityMatrix {
        /// Aperture centre, γ·tan Z.
        #[arg(long)]
        gamma_tan: Option<f64>,
        /// Aperture radius, γ·tan Z units.
        #[arg(long)]
        radius: Option<f64>,
    },
    /// Single-electron, synchrotron and FEL pair rates through the detector.
    PairRates,
    /// Power-law fits of U_pair against B₀λ_u.
    Scaling {
        /// Probe γ·tan Z (repeatable); replaces the configured probes.
        #[arg(long = "probe")]
        probes: Vec<f64>,
    },
    /// Microbunch enhancement and collective rate over the configured grid.
    MicrobunchMap,
    /// Print the effective configuration with all defaults filled in.
    ShowConfig,
}

fn run(cli: Cli) -> felpair::Result<()> {
    let mut config = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Some(t) = cli.tolerance {
        config.quadrature.tolerance = t;
    }
    let command = match cli.verb {
        Verb::RateMap => Command::RateMap,
        Verb::ConcurrenceMap => Command::ConcurrenceMap,
        Verb::MicrobunchMap => Command::MicrobunchMap,
        Verb::DensityMatrix { gamma_tan, radius } => Command::DensityMatrix { gamma_tan, radius },
        Verb::PairRates => Command::PairRates,
        Verb::Scaling { probes } => Command::Scaling {
            probes: (!probes.is_empty()).then_some(probes),
        },
        Verb::ShowConfig => {
            config.validate()?;
            println!("{}", config.canonical_json());
            return Ok(());
        }
    };
    let summary = execute(&command, &config, &cli.out, cli.workers)?;
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("felpair: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
