use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use daff_cli::report::Format;
use daff_cli::{Outcome, DEFAULT_SEED, DEFAULT_TRIALS};

#[derive(Parser)]
#[command(name = "daff", version, about = "Exact checks for double affine bundles")]
struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, env = "DAFF_FORMAT", default_value = "text")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a document.
    Check { file: PathBuf },
    /// Run a construction on every block that supports it.
    Build {
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(daff_cli::build::OPS))]
        op: String,
        file: PathBuf,
        /// Where to write the constructed blocks.
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(daff_cli::suites::SUITES))]
        suite: String,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        file: PathBuf,
    },
}

fn read(path: &PathBuf) -> Result<String, Outcome> {
    std::fs::read_to_string(path).map_err(|e| Outcome::error(format!("error: {}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Check { file } => read(file).map(|t| daff_cli::check(&file.display().to_string(), &t, cli.format)),
        Command::Build { op, file, out } => read(file).map(|t| {
            let mut o = daff_cli::build(&file.display().to_string(), op, &t, cli.format);
            match (out, o.document.take()) {
                (Some(path), Some(doc)) => {
                    if let Err(e) = std::fs::write(path, doc) {
                        o = Outcome::error(format!("error: {}: {e}", path.display()));
                    }
                }
                (None, Some(doc)) if o.code == 0 => o.stdout.push_str(&format!("\n{doc}")),
                _ => {}
            }
            o
        }),
        Command::Verify {
            suite,
            trials,
            seed,
            file,
        } => read(file).map(|t| daff_cli::verify(&file.display().to_string(), suite, &t, *seed, *trials, cli.format)),
    }
    .unwrap_or_else(|o| o);
    print!("{}", outcome.stdout);
    eprint!("{}", outcome.stderr);
    ExitCode::from(outcome.code as u8)
}
