use std::process::ExitCode;

fn main() -> ExitCode {
    xbar_cli::main_with_args(std::env::args_os())
}
