use std::process::ExitCode;

fn main() -> ExitCode {
    atanseries::cli::main()
}
