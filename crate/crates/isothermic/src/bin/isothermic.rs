//! Command-line entry point; see the `cli` module for commands and flags.

fn main() {
    std::process::exit(isothermic::cli::run(std::env::args_os()));
}
