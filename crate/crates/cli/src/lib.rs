//! Command-line front end: theory files, reports and their verification.

use std::io::Write;

use clap::Parser;

pub mod commands;
pub mod error;
pub mod format;
pub mod plot;
pub mod report;
pub mod verify;

/// Runs the command line and returns the exit status: 0 on success, 1 for
/// an analysis-negative answer, 2 for usage, parse and engine errors.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match commands::Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match commands::execute(&cli) {
        Ok(outcome) => {
            let _ = out.write_all(outcome.stdout.as_bytes());
            outcome.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}
