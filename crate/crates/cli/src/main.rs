use clap::Parser;

fn main() {
    let cli = bicons_cli::Cli::parse();
    let code = match bicons_cli::run(cli) {
        Ok(outcome) => outcome.exit_code(),
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    };
    std::process::exit(code);
}
