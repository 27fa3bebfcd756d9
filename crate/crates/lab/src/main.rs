use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(active_lab::cli::main(std::env::args_os()))
}
