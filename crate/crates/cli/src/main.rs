use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(qb_cli::run(std::env::args_os()))
}
