use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

mod args;
mod commands;
mod report;

use args::{Cli, Command, Format};
use commands::Failure;

fn format_of(command: &Command) -> Format {
    match command {
        Command::Kernel(c)
        | Command::Trace(c)
        | Command::Spectrum(c)
        | Command::Greens(c)
        | Command::Susy(c)
        | Command::Verify(c) => c.format,
    }
}

fn emit(report: &report::Report, format: Format) {
    let text = match format {
        Format::Json => report.render_json(),
        Format::Csv => report.render_csv(),
    };
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = format_of(&cli.command);
    match commands::run(&cli.command) {
        Ok(report) => {
            emit(&report, format);
            ExitCode::SUCCESS
        }
        Err(Failure::Verification(report)) => {
            emit(&report, format);
            eprintln!("verification failed");
            ExitCode::from(1)
        }
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
