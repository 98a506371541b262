use std::process::ExitCode;

use clap::Parser;
use neutral_inclusion::cli::{run, Cli};

fn main() -> ExitCode {
    if let Some(n) = std::env::var("NI_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
