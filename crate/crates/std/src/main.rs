use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(lzsm_std::cli::run(std::env::args_os()))
}
