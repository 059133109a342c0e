use std::process::ExitCode;

use clap::Parser;
use rwstreams::{run, Cli, RunConfig};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match RunConfig::new(cli).and_then(|cfg| run(&cfg)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rws: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
