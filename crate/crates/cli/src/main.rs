use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use evw::Dims;

mod bundle;
mod commands;
mod error;
mod raster;

use commands::Settings;
use error::exit;

/// Empirical Voronoi wavelet transform of grayscale images.
///
/// Exit status: 0 success, 2 invalid input, 3 no modes detected,
/// 4 frame lower bound failure, 5 I/O error.
#[derive(Parser, Debug)]
#[command(name = "evw", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Detection {
    /// Scale-space step (Gaussian variance increment per level).
    #[arg(long)]
    scale_step: Option<f64>,
    /// Number of scale levels; default is a quarter of the smaller side.
    #[arg(long)]
    max_levels: Option<usize>,
    /// CSV of seed bins (`row,col`, or columns named row and col) used
    /// instead of detection. Mates are added.
    #[arg(long)]
    seed_file: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decompose an image (PFM or PGM) into a coefficient bundle.
    Decompose {
        input: PathBuf,
        /// Bundle directory to write.
        #[arg(short, long)]
        output: PathBuf,
        /// Transition half-width in radians. Takes precedence over --gamma.
        #[arg(long)]
        tau: Option<f64>,
        /// Transition width as a fraction of the smallest cell in-radius.
        #[arg(long)]
        gamma: Option<f64>,
        #[command(flatten)]
        detection: Detection,
        /// Reuse the filter bank of an existing bundle.
        #[arg(long, conflicts_with_all = ["tau", "gamma", "scale_step", "max_levels", "seed_file"])]
        bank_dir: Option<PathBuf>,
    },
    /// Rebuild an image from a bundle.
    Reconstruct {
        bundle: PathBuf,
        /// Output image; `.pgm` writes 16-bit PGM, anything else PFM.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Write the frequency partition: partition.pgm, seeds.csv and
    /// partition_overlay.pgm.
    Partition {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        detection: Detection,
    },
    /// Write the synthetic test image, or a single cosine with --tone.
    Synth {
        #[arg(short, long)]
        output: PathBuf,
        /// Cycles along rows and columns, e.g. `0,8`.
        #[arg(long, value_parser = parse_pair)]
        tone: Option<(f64, f64)>,
        /// Image size, e.g. `128x96`.
        #[arg(long, value_parser = parse_size)]
        size: Option<Dims>,
    },
    /// Print a bundle's manifest and its frame bounds.
    Info { bundle: PathBuf },
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or("expected two comma-separated numbers")?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}"));
    Ok((num(a)?, num(b)?))
}

fn parse_size(s: &str) -> Result<Dims, String> {
    let (h, w) = s.split_once(['x', 'X']).ok_or("expected HEIGHTxWIDTH")?;
    let num = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("`{t}`: {e}"));
    Ok(Dims::new(num(h)?, num(w)?))
}

fn settings(detection: &Detection, tau: Option<f64>, gamma: Option<f64>) -> Settings {
    Settings {
        tau,
        gamma,
        scale_step: detection.scale_step,
        max_levels: detection.max_levels,
    }
}

fn run(cli: Cli) -> error::Result<()> {
    match cli.command {
        Command::Decompose {
            input,
            output,
            tau,
            gamma,
            detection,
            bank_dir,
        } => commands::decompose_cmd(
            &input,
            &output,
            &settings(&detection, tau, gamma),
            detection.seed_file.as_deref(),
            bank_dir.as_deref(),
        ),
        Command::Reconstruct { bundle, output } => commands::reconstruct_cmd(&bundle, &output),
        Command::Partition {
            input,
            output,
            detection,
        } => commands::partition_cmd(
            &input,
            &output,
            &settings(&detection, None, None),
            detection.seed_file.as_deref(),
        ),
        Command::Synth { output, tone, size } => commands::synth_cmd(&output, tone, size),
        Command::Info { bundle } => {
            print!("{}", commands::info_cmd(Path::new(&bundle))?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::from(exit::OK),
        Err(e) => {
            eprintln!("evw: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
