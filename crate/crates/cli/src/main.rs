use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    let result = hypwalk_cli::run(std::env::args_os(), &mut io::stdout(), &mut io::stderr());
    ExitCode::from(result.exit_code as u8)
}
