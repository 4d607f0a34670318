mod analysis;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use intdyn::Error;

use crate::report::{write_error, write_report, Outcome};

#[derive(Parser)]
#[command(name = "intdyn", version, about = "Exact analyses of piecewise-linear interval maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one analysis and write `report.json` (plus CSV sidecars) to the output directory.
    Analyze {
        /// Map spec: a JSON file or an inline JSON object.
        #[arg(long)]
        map: String,
        #[arg(long, value_enum)]
        analysis: Analysis,
        /// Parameter block: a JSON file or an inline JSON object.
        #[arg(long, default_value = "{}")]
        params: String,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Analysis {
    Orbit,
    Periodic,
    EntropyClassify,
    Portion,
    Pairs,
    Covers,
    Independence,
    Witness,
    Pattern,
}

impl Analysis {
    pub fn name(self) -> &'static str {
        match self {
            Analysis::Orbit => "orbit",
            Analysis::Periodic => "periodic",
            Analysis::EntropyClassify => "entropy-classify",
            Analysis::Portion => "portion",
            Analysis::Pairs => "pairs",
            Analysis::Covers => "covers",
            Analysis::Independence => "independence",
            Analysis::Witness => "witness",
            Analysis::Pattern => "pattern",
        }
    }
}

/// Exit codes: 0 success, 1 I/O or internal failure, 2 input or
/// precondition failure, 3 budget exhaustion.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Budget { .. } => 3,
        Error::Internal(_) => 1,
        _ => 2,
    }
}

fn configure_threads() -> Result<usize, String> {
    let Ok(raw) = std::env::var("INTDYN_THREADS") else {
        return Ok(rayon::current_num_threads());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| format!("INTDYN_THREADS must be a positive integer, got {raw:?}"))?;
    if n == 0 {
        return Err("INTDYN_THREADS must be positive".into());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())?;
    Ok(n)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = match configure_threads() {
        Ok(n) => n,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let Command::Analyze {
        map,
        analysis,
        params,
        out,
    } = cli.command;
    if let Err(e) = std::fs::create_dir_all(&out) {
        eprintln!("error: cannot create {}: {e}", out.display());
        return ExitCode::from(1);
    }
    let start = Instant::now();
    let result = analysis::load_request(&map, analysis, &params).and_then(|req| {
        let outcome = analysis::run(&req)?;
        Ok((req, outcome))
    });
    let elapsed = start.elapsed();
    match result {
        Ok((req, Outcome { results, sidecars })) => {
            match write_report(&out, &req, results, &sidecars, elapsed, threads) {
                Ok(path) => {
                    println!("{}", path.display());
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            if let Err(io) = write_error(&out, analysis, &e, elapsed, threads) {
                eprintln!("error: {io}");
            }
            ExitCode::from(exit_code(&e))
        }
    }
}
