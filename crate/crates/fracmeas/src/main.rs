use std::process::ExitCode;

fn main() -> ExitCode {
    match fracmeas::cli::run_from(std::env::args_os()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fracmeas: {e}");
            ExitCode::from(&e)
        }
    }
}
