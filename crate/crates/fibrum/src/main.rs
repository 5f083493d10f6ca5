use std::process::ExitCode;

use clap::Parser;
use fibrum::cli::{render_text, run, Cli};
use fibrum::error::{usage, EXIT_INTERNAL, EXIT_PRECONDITION};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            println!("{}", usage(e.kind().to_string()).to_json());
            return ExitCode::from(EXIT_PRECONDITION as u8);
        }
    };
    match run(&cli) {
        Ok(out) => {
            if cli.global.text {
                print!("{}", render_text(&out.doc));
            } else {
                match serde_json::to_string_pretty(&out.doc) {
                    Ok(s) => println!("{s}"),
                    Err(e) => {
                        eprintln!("{e}");
                        return ExitCode::from(EXIT_INTERNAL as u8);
                    }
                }
            }
            ExitCode::from(out.exit as u8)
        }
        Err(e) => {
            println!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
