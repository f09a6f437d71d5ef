use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(irmrta_cli::run_cli(std::env::args_os()))
}
