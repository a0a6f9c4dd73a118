use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    match nanotube_bands::cli::run(std::env::args_os()) {
        Ok(out) => {
            match &out.written {
                Some(path) => eprintln!("wrote {}", path.display()),
                None => {
                    let _ = std::io::stdout().write_all(out.text.as_bytes());
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
