use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(airsketch_cli::run_args(std::env::args_os()) as u8)
}
