mod args;
mod commands;
mod format;
mod report;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::{InputError, Outcome, EXIT_PARSE};

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    match &cli.command {
        Command::Check(a) => commands::cmd_check(a, cli.seed),
        Command::Decompose(a) => commands::cmd_decompose(a, cli.seed),
        Command::Corpus(a) => commands::cmd_corpus(a, cli.seed),
        Command::Verify(a) => commands::cmd_verify(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        builder = builder.num_threads(n);
    }
    let pool = match builder.build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    match pool.install(|| run(&cli)) {
        Ok(outcome) => {
            print!("{}", outcome.stdout);
            ExitCode::from(outcome.code)
        }
        Err(e) if e.is::<InputError>() => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_PARSE)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
