mod commands;
mod config;
mod report;

use clap::Parser;

use config::{Cli, RunConfig};

fn main() {
    let cli = Cli::parse();
    let mut cfg = RunConfig::from_opts(cli.command, &cli.opts);
    let outcome = cfg.load(&cli.opts).and_then(|()| commands::run(&cfg));
    std::process::exit(report::emit(&cfg, outcome));
}
