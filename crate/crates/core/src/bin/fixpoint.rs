use clap::Parser;

fn main() -> std::process::ExitCode {
    fixpoint::cli::run(fixpoint::cli::Cli::parse())
}
