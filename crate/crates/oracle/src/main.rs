use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

/// Builds the C reference implementation and writes a differential corpus.
#[derive(Parser)]
#[command(name = "xcrush-oracle", version)]
struct Args {
    /// Number of cases (the first three are the published vectors).
    #[arg(short, long, default_value_t = 100)]
    n: usize,
    #[arg(short, long, default_value_t = 7)]
    seed: u64,
    /// Output path; stdout when omitted.
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Run the reference program's own main() instead.
    #[arg(long, conflicts_with_all = ["n", "seed", "out"])]
    reference_main: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = if args.reference_main {
        xcrush_oracle::Oracle::build().and_then(|o| o.reference_main()).map(|s| print!("{s}"))
    } else {
        xcrush_oracle::generate_oracle_corpus(args.n, args.seed).map(|corpus| match &args.out {
            Some(path) => {
                if let Err(e) = std::fs::write(path, corpus) {
                    eprintln!("error: {}: {e}", path.display());
                    std::process::exit(3);
                }
            }
            None => print!("{corpus}"),
        })
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
