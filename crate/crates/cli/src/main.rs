use std::process::ExitCode;

fn main() -> ExitCode {
    let code = scheme_forge_core::harness::cli::run(std::env::args_os());
    ExitCode::from(code as u8)
}
