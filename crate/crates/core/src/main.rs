use clap::Parser;
use qthp::cli::{run, Cli, CliError};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        if matches!(&e, CliError::Io(io) if io.kind() == std::io::ErrorKind::BrokenPipe) {
            return;
        }
        eprintln!("qthp: {e}");
        std::process::exit(e.exit_code());
    }
}
