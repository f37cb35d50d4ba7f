use std::process::ExitCode;

use lifshitz_cli::{parse_config, run, CliError};

fn main() -> ExitCode {
    match parse_config(std::env::args_os()).and_then(|config| run(&config)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Info(text)) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            let message = e.to_string().replace('\n', " ");
            eprintln!("lifshitz-ee: {message}");
            ExitCode::from(e.exit_code())
        }
    }
}
