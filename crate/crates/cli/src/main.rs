use clap::Parser;

fn main() {
    let cli = pipp_cli::Cli::parse();
    if let Err(e) = pipp_cli::run(cli) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
