use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use chiral_router::cli::{self, Command, RunOptions};
use chiral_router::Error;

/// Single-photon routing calculator for a four-port chiral waveguide device.
#[derive(Parser)]
#[command(name = "chiral-router", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Write the output document here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps and peak searches (default: all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Override the validation seed from the config.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Amplitudes and output-port probabilities at a single point.
    Point(Common),
    /// Observables over a rectangular 2-D parameter grid, as CSV.
    Sweep(Common),
    /// Nonreciprocity contrast ratios at a single point.
    Contrast(Common),
    /// Locate maxima of an observable over a 2-D parameter box.
    FindPeaks(Common),
    /// Randomized cross-validation of the two amplitude routes.
    Validate(Common),
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::SchemaError { .. }
        | Error::ConflictError(_)
        | Error::InvalidSpec(_)
        | Error::InvalidParams(_)
        | Error::EmptyBox { .. }
        | Error::Io(_) => 2,
        _ => 1,
    }
}

fn run(command: Command, common: &Common) -> Result<u8, Error> {
    let text = fs::read_to_string(&common.config)?;
    let config = cli::parse_config(&text)?;
    let options = RunOptions {
        seed_override: common.seed,
    };

    let output = match common.workers {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::InvalidParams(format!("worker pool: {e}")))?;
            pool.install(|| cli::dispatch(command, &config, &options))?
        }
        None => cli::dispatch(command, &config, &options)?,
    };

    for note in &output.notes {
        eprintln!("{note}");
    }
    match &common.out {
        Some(path) => fs::write(path, output.document.as_bytes())?,
        None => {
            let stdout = std::io::stdout();
            let mut handle = stdout.lock();
            handle.write_all(output.document.as_bytes())?;
            if !output.document.ends_with('\n') {
                handle.write_all(b"\n")?;
            }
        }
    }
    Ok(output.exit_code as u8)
}

fn main() -> ExitCode {
    let parsed = Cli::parse();
    let (command, common) = match &parsed.command {
        Cmd::Point(c) => (Command::Point, c),
        Cmd::Sweep(c) => (Command::Sweep, c),
        Cmd::Contrast(c) => (Command::Contrast, c),
        Cmd::FindPeaks(c) => (Command::FindPeaks, c),
        Cmd::Validate(c) => (Command::Validate, c),
    };
    match run(command, common) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
