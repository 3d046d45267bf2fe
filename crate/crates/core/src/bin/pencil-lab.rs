use clap::Parser;
use pencil_lab::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    let out = run(&cli);
    if out.code == pencil_lab::cli::EXIT_INVALID || out.code == pencil_lab::cli::EXIT_SIZE {
        eprint!("{}", out.output);
    } else {
        print!("{}", out.output);
    }
    std::process::exit(out.code);
}
