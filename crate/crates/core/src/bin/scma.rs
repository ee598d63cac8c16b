use clap::Parser;

fn main() {
    let cli = scma::cli::Cli::parse();
    if let Err(e) = scma::cli::run(cli) {
        eprintln!("error: {e}");
        if let scma::Error::UnknownTemplate { .. } | scma::Error::UnknownReference { .. } = e {
            eprintln!("{}", scma::cli::known_names());
        }
        std::process::exit(e.exit_code());
    }
}
