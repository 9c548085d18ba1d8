use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let inv = aiot_cli::invoke(std::env::args_os());
    eprint!("{}", inv.stderr);
    if std::io::stdout().write_all(&inv.stdout).is_err() {
        return ExitCode::from(aiot_cli::error::exit::IO);
    }
    ExitCode::from(inv.exit_code)
}
