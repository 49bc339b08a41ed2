use std::process::ExitCode;

fn main() -> ExitCode {
    modcov::cli::main()
}
