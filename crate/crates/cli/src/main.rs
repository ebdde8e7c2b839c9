use clap::Parser;

fn main() {
    std::process::exit(gpequiv_cli::run(gpequiv_cli::Cli::parse()));
}
