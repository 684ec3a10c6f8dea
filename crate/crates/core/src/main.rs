use std::process::ExitCode;

fn main() -> ExitCode {
    sdstable::cli::main_with_args(std::env::args_os())
}
