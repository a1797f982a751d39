use clap::Parser;

fn main() {
    let cli = randpolar_cli::Cli::parse();
    std::process::exit(randpolar_cli::run(&cli));
}
