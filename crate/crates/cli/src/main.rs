use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(model_space_lab_cli::run(std::env::args_os()))
}
