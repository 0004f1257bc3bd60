use std::path::PathBuf;
use std::process::ExitCode;

use pimd_kubo::cli::{run_file, RunOptions, EXIT_VALIDATION};

const USAGE: &str = "usage: pimd-kubo run <config.toml> [--threads N] [--quiet]";

fn main() -> ExitCode {
    let mut args = std::env::args().skip(1);
    if args.next().as_deref() != Some("run") {
        eprintln!("{USAGE}");
        return ExitCode::from(EXIT_VALIDATION as u8);
    }
    let mut config: Option<PathBuf> = None;
    let mut opts = RunOptions::default();
    while let Some(arg) = args.next() {
        match arg.as_str() {
            "--quiet" | "-q" => opts.quiet = true,
            "--threads" | "-j" => match args.next().and_then(|v| v.parse().ok()) {
                Some(n) => opts.threads = Some(n),
                None => {
                    eprintln!("--threads needs a positive integer\n{USAGE}");
                    return ExitCode::from(EXIT_VALIDATION as u8);
                }
            },
            _ if config.is_none() && !arg.starts_with('-') => config = Some(arg.into()),
            _ => {
                eprintln!("unexpected argument `{arg}`\n{USAGE}");
                return ExitCode::from(EXIT_VALIDATION as u8);
            }
        }
    }
    let Some(path) = config else {
        eprintln!("{USAGE}");
        return ExitCode::from(EXIT_VALIDATION as u8);
    };
    ExitCode::from(run_file(&path, &opts) as u8)
}
