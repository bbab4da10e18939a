use std::process::ExitCode;

use packlab::cli::{run, CliError};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args: Vec<String> = std::env::args().skip(1).collect();
    match run(&args) {
        Ok(r) => {
            println!("{}", r.summary);
            match r.replay {
                Some(outcome) if !outcome.identical() => {
                    for (flag, recorded, replayed, same) in &outcome.outputs {
                        if !same {
                            eprintln!("{flag}: {recorded} differs from {replayed}");
                        }
                    }
                    ExitCode::from(1)
                }
                _ => ExitCode::SUCCESS,
            }
        }
        Err(CliError::Usage(e)) => {
            let _ = e.print();
            ExitCode::from(if e.use_stderr() { 2 } else { 0 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
