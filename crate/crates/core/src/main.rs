use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    let status = pomset_automata::cli::run(std::env::args_os(), &mut io::stdout(), &mut io::stderr());
    ExitCode::from(status.0 as u8)
}
