use std::io::{self, Write};
use std::process::ExitCode;

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let stdin = io::stdin();
    let mut input = stdin.lock();
    let mut out = io::BufWriter::new(io::stdout().lock());
    let mut err = io::stderr().lock();
    let code = tessnet_cli::dispatch(&argv, &mut input, &mut out, &mut err);
    if out.flush().is_err() {
        return ExitCode::from(tessnet_cli::EXIT_IO as u8);
    }
    ExitCode::from(code as u8)
}
