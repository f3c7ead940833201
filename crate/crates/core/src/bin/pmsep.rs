use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pmsep::cli::{self, Command, EXIT_INPUT};
use pmsep::concavity::DEFAULT_BUDGET;
use pmsep::NumericMode;

/// Rationalizability tests, cost recovery and forward solutions for
/// state-dependent stochastic choice data.
///
/// Arithmetic is exact unless PMSEP_NUMERIC=float.
#[derive(Parser)]
#[command(name = "pmsep", version)]
struct Args {
    /// Write the JSON report here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Also write each figure series as DIR/<name>.csv.
    #[arg(long, global = true, value_name = "DIR")]
    csv_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Check a dataset file against the model's invariants.
    Validate { dataset: PathBuf },
    /// Test NIAS and NIPMC; prints multipliers or a violation certificate.
    Check {
        dataset: PathBuf,
        /// Write the multiplier system in LP format.
        #[arg(long, value_name = "FILE")]
        dump_lp: Option<PathBuf>,
    },
    /// Recover a cost derivative and price functions, with their audit.
    Recover {
        dataset: PathBuf,
        /// Report the multipliers with the smallest interior total.
        #[arg(long)]
        flattest: bool,
        #[arg(long, value_name = "FILE")]
        dump_lp: Option<PathBuf>,
    },
    /// Solve a single-agent problem over mean-preserving contractions.
    Solve {
        problem: PathBuf,
        /// Add this many evenly spaced points to the grid.
        #[arg(long, default_value_t = 0)]
        refine: usize,
        /// Oracle grid resolution (0 disables; default max(101, grid size)).
        #[arg(long)]
        oracle: Option<usize>,
    },
    /// Search for a concave rationalizing cost derivative.
    Concavity {
        dataset: PathBuf,
        /// Maximum number of programs to solve.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Synthesize a dataset from a generation spec; prints the dataset file.
    Generate { spec: PathBuf },
    /// Re-audit the cost and prices of a recover or concavity report.
    Verify { dataset: PathBuf, report: PathBuf },
}

fn main() -> ExitCode {
    let args = Args::parse();
    let mode = match NumericMode::from_env() {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT as u8);
        }
    };
    let command = match args.command {
        Sub::Validate { dataset } => Command::Validate { dataset },
        Sub::Check { dataset, dump_lp } => Command::Check { dataset, dump_lp },
        Sub::Recover {
            dataset,
            flattest,
            dump_lp,
        } => Command::Recover {
            dataset,
            flattest,
            dump_lp,
        },
        Sub::Solve { problem, refine, oracle } => Command::Solve { problem, refine, oracle },
        Sub::Concavity { dataset, budget } => Command::Concavity { dataset, budget },
        Sub::Generate { spec } => Command::Generate { spec },
        Sub::Verify { dataset, report } => Command::Verify { dataset, report },
    };
    let out = cli::run(&command, mode, &mut |line| eprintln!("{line}"));

    let text = serde_json::to_string_pretty(&out.report).expect("reports serialize") + "\n";
    let written = match &args.output {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write report: {e}");
        return ExitCode::from(EXIT_INPUT as u8);
    }
    if let Some(dir) = &args.csv_dir {
        let result = std::fs::create_dir_all(dir).and_then(|_| {
            out.figures
                .iter()
                .try_for_each(|f| std::fs::write(dir.join(format!("{}.csv", f.name)), f.to_csv()))
        });
        if let Err(e) = result {
            eprintln!("error: cannot write figures: {e}");
            return ExitCode::from(EXIT_INPUT as u8);
        }
    }
    eprintln!("{}", out.summary);
    ExitCode::from(out.code as u8)
}
