mod cli;
mod commands;
mod config;
mod exit;
mod formats;

use clap::Parser;

fn main() {
    let parsed = cli::Cli::parse();
    let outcome = match &parsed.command {
        cli::Command::GenMdp(args) => commands::cmd_gen_mdp(args),
        cli::Command::Imitate(args) => commands::cmd_imitate(args),
        cli::Command::Verify(args) => commands::cmd_verify(args),
        cli::Command::Sweep(args) => commands::cmd_sweep(args),
    };
    match outcome {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(err.code);
        }
    }
}
