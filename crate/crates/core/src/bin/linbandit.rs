use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use linbandit::harness::{self, output, presets, ExperimentConfig, HarnessError};

#[derive(Parser)]
#[command(
    name = "linbandit",
    version,
    about = "Drifting linear bandit experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write trace.csv and summary.csv
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides master_seed
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides replications
        #[arg(long)]
        reps: Option<u32>,
        /// Overrides output_path
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-round mean and standard error of cumulative regret from a trace CSV
    Summarize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Shipped configurations
    Presets {
        #[command(subcommand)]
        action: PresetAction,
    },
}

#[derive(Subcommand)]
enum PresetAction {
    /// List preset names
    List,
    /// Print a preset as a JSON config
    Show { name: String },
}

fn run(command: Command) -> Result<(), HarnessError> {
    match command {
        Command::Run {
            config,
            seed,
            reps,
            out,
        } => {
            let mut config = ExperimentConfig::from_path(&config)?;
            if let Some(s) = seed {
                config.master_seed = s;
            }
            if let Some(r) = reps {
                config.replications = r;
            }
            if let Some(o) = out {
                config.output_path = o;
            }
            let results = harness::run_experiment(&config)?;
            let (trace, summary) = results.write(&config.output_path)?;
            for alg in &results.algorithms {
                let s = results.final_stats(alg).expect("listed algorithm");
                eprintln!("{alg}: final regret {:.3} ± {:.3}", s.mean, s.se);
            }
            eprintln!("wrote {} and {}", trace.display(), summary.display());
        }
        Command::Summarize { input, out } => {
            let file = File::open(&input)
                .map_err(|e| HarnessError::Config(format!("{}: {e}", input.display())))?;
            let records = output::read_trace(file)?;
            if records.is_empty() {
                return Err(HarnessError::Config(format!(
                    "{} has no records",
                    input.display()
                )));
            }
            let rows = harness::summarize(records.iter().map(|r| r.borrow()));
            if let Some(dir) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            output::write_summary(BufWriter::new(File::create(&out)?), &rows)?;
        }
        Command::Presets { action } => match action {
            PresetAction::List => {
                for name in presets::names() {
                    println!("{name}");
                }
            }
            PresetAction::Show { name } => {
                let config = presets::get(&name)
                    .ok_or_else(|| HarnessError::Config(format!("unknown preset {name:?}")))?;
                println!("{}", config.to_json());
            }
        },
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
