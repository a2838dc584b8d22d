use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    match vlmc::cli::run(std::env::args()) {
        Ok(out) => {
            let _ = std::io::stdout().write_all(out.as_bytes());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.to_string().trim_start_matches("error: "));
            ExitCode::from(e.exit_code())
        }
    }
}
