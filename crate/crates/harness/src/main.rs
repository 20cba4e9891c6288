use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cn_harness::{default_output, execute, load_config, render, summarize, HarnessError, Result};

#[derive(Parser)]
#[command(name = "cnet", version, about = "Run computing-network experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a config and write its record file.
    Run {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Record file; defaults to the config's `output` or `<config>.jsonl`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a CSV summary of record files matching a glob.
    Summarize { pattern: String },
    /// Write the space-time diagram of an ECA config as .txt and .pbm.
    EcaRender {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cnet: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Run { config, seed, out } => {
            let mut cfg = load_config(&config)?;
            if seed.is_some() {
                cfg.seed = seed;
            }
            let path = out
                .or_else(|| cfg.output.clone())
                .unwrap_or_else(|| default_output(&config));
            let records = execute(&cfg, &path)?;
            let last = records
                .last()
                .ok_or_else(|| HarnessError::Numeric("run produced no records".into()))?;
            println!(
                "{}: {} records, final best {}",
                path.display(),
                records.len(),
                last.best_value
            );
        }
        Command::Summarize { pattern } => {
            let rows = summarize::summarize_glob(&pattern)?;
            print!("{}", summarize::to_csv(&rows)?);
        }
        Command::EcaRender { config, out } => {
            let cfg = load_config(&config)?;
            let stem = out.unwrap_or_else(|| config.with_extension(""));
            let (txt, pbm) = render::render(&cfg, &stem)?;
            println!("{}\n{}", txt.display(), pbm.display());
        }
    }
    Ok(())
}
