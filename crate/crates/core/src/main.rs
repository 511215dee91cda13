use clap::Parser;
use quiverstab::cli::{run, Cli};

fn main() {
    std::process::exit(run(&Cli::parse()));
}
