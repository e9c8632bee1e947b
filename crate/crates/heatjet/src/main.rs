use std::process::ExitCode;

fn main() -> ExitCode {
    heatjet::cli::run()
}
