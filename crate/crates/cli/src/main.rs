use clap::Parser;
use wnl_cli::config::Cli;

fn main() {
    std::process::exit(wnl_cli::run(Cli::parse()));
}
