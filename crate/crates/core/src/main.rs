use std::process::ExitCode;

use clap::Parser;
use entit_core::cli::{self, Cli, RunConfig};

fn main() -> ExitCode {
    let args = Cli::parse();
    if let Some(n) = args.flags.workers.filter(|&n| n > 0) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("warning: could not cap workers: {e}");
        }
    }
    let outcome = RunConfig::resolve(args.command, &args.flags).and_then(|cfg| cli::run(&cfg));
    match outcome {
        Ok(out) => {
            print!("{}", out.text);
            for path in &out.written {
                println!("wrote {}", path.display());
            }
            for check in &out.checks {
                println!("[{}] {}: {}", if check.passed { "ok" } else { "FAIL" }, check.name, check.detail);
            }
            match out.first_failure() {
                None => ExitCode::SUCCESS,
                Some(check) => {
                    eprintln!("check failed: {}", check.name);
                    ExitCode::from(1)
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
