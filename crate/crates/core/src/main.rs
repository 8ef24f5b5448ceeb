use clap::Parser;
use conic::cli::{run, Cli};
use std::process::exit;

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{}", out.stdout);
            if !out.success {
                exit(1);
            }
        }
        Err(e) => {
            eprintln!("conic: {e}");
            exit(e.exit_code());
        }
    }
}
