use clap::Parser;
use zksvm_cli::app::{run, Cli, Outcome};

fn main() {
    let outcome = run(Cli::parse());
    match &outcome {
        Outcome::Done(msg) if !msg.is_empty() => println!("{msg}"),
        Outcome::Done(_) => {}
        Outcome::Rejected(msg) => eprintln!("{msg}"),
        Outcome::Failed(msg) => eprintln!("error: {msg}"),
    }
    std::process::exit(outcome.exit_code());
}
