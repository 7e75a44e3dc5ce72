use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(semiqc::run(std::env::args_os()) as u8)
}
