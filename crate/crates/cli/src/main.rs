mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // clap exits with 2 on usage errors by itself.
    let cli = Cli::parse();
    let jobs = cli.jobs;
    let result = match cli.command {
        Command::Solve(a) => commands::solve(a),
        Command::Verify(a) => commands::verify(a),
        Command::Pool(a) => commands::pool(a, jobs),
        Command::Sp(a) => commands::sp(a),
        Command::Evolve(a) => commands::evolve(a, jobs),
        Command::Bench(a) => commands::bench(a, jobs),
        Command::ExportLp(a) => commands::export(a),
        Command::Synth(a) => commands::synth(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
