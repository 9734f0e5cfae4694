use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use hpcli::{run, Cli};

/// Worker threads for the quadrature; results do not depend on it.
const THREADS_VAR: &str = "HYPERPOLYGON_THREADS";

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var(THREADS_VAR).ok().and_then(|s| s.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(&cli) {
        Ok(out) => {
            eprint!("{}", out.log);
            let written = match &cli.out {
                Some(path) if !out.payload.is_empty() => std::fs::write(path, &out.payload).map_err(|e| format!("writing {}: {e}", path.display())),
                _ => std::io::stdout().write_all(&out.payload).map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            ExitCode::from(out.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
