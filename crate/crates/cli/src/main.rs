use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use oe_cli::run::summary_text;
use oe_cli::{catalog, catalog_text, run_suite, Format, RunOptions};

#[derive(Parser)]
#[command(name = "oewb", version, about = "Run verification suites for Bernoulli shifts, cocycles and orbit equivalences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the checks of a suite document and write reports.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Run only the named check; repeatable.
        #[arg(long)]
        only: Vec<String>,
        #[arg(long)]
        seed_override: Option<u64>,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Structured)]
        format: Format,
    },
    /// Print the available checks and their parameters.
    ListChecks {
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { config, out, only, seed_override, budget, format } => {
            let opts = RunOptions { only, seed_override, budget, format };
            match run_suite(&config, &out, &opts) {
                Ok(summary) => {
                    print!("{}", summary_text(&summary));
                    ExitCode::from(summary.exit_code as u8)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
        Command::ListChecks { format } => {
            match format {
                Format::Text => print!("{}", catalog_text()),
                Format::Structured => println!("{}", serde_json::to_string_pretty(&catalog()).expect("catalog serializes")),
            }
            ExitCode::SUCCESS
        }
    }
}
