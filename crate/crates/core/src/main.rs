use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(qdot::cli::run(std::env::args_os()))
}
