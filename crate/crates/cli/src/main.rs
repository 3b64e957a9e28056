use clap::Parser;
use l0screen_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    let args: Vec<String> = std::env::args().skip(1).collect();
    let stdout = std::io::stdout();
    if let Err(e) = run(&cli, &args, &mut stdout.lock()) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
