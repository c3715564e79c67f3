use std::io::{self, Write};
use std::process::ExitCode;

fn main() -> ExitCode {
    let env_modulus = std::env::var(sosident::cli::MODULUS_ENV).ok();
    let stdout = io::stdout();
    let stderr = io::stderr();
    let code = sosident::cli::run(std::env::args_os(), env_modulus, &mut stdout.lock(), &mut stderr.lock());
    let _ = io::stdout().flush();
    ExitCode::from(code as u8)
}
