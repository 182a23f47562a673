use std::process::ExitCode;

use nanotube_spectra_cli::{configure_threads, parse_args, run, EXIT_USAGE};

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let config = match parse_args(&argv) {
        Ok(c) => c,
        Err(e) if e.informational => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            if !e.message.ends_with('\n') {
                eprintln!();
            }
            return ExitCode::from(EXIT_USAGE as u8);
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_USAGE as u8);
    }
    let stdout = std::io::stdout();
    let code = run(&config, &mut stdout.lock());
    ExitCode::from(code as u8)
}
