use clap::Parser;

use overdamp::cli::{configure_threads, run, Cli};

fn main() {
    env_logger::init();
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
    std::process::exit(run(&cli));
}
