use clap::Parser;

fn main() {
    let cli = mat2gen_cli::Cli::parse();
    std::process::exit(mat2gen_cli::run(cli));
}
