use std::io::{self, Write};

use clap::Parser;
use fittutor::cli::{run, Cli};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let stdin = io::stdin();
    let mut stdin = stdin.lock();
    let mut stdout = io::stdout().lock();
    let mut stderr = io::stderr().lock();
    let code = run(cli, &mut stdin, &mut stdout, &mut stderr);
    let _ = stdout.flush();
    std::process::exit(code);
}
