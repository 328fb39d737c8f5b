mod commands;
mod docs;
mod opts;

use clap::error::ErrorKind;
use clap::Parser;
use commands::{cmd_certify, cmd_solve, cmd_sweep, cmd_verify, EXIT_USAGE};
use opts::{Cli, Command};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    let code = match &cli.command {
        Command::Certify(args) => cmd_certify(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Verify(args) => cmd_verify(args),
    };
    std::process::exit(code);
}
