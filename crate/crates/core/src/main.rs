use clap::Parser;

fn main() {
    let cli = reca::cli::Cli::parse();
    std::process::exit(reca::cli::main_with(cli));
}
