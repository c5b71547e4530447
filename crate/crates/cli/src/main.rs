use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qhe_limits::bounds::BoundMode;
use qhe_limits_cli::scenario::CodeSource;
use qhe_limits_cli::{all_pass, emit_report, parse_scenarios, run_all, CliError, Format, RunOptions, Scenario, ScenarioFile, Task};

/// Information-theoretic limits of quantum homomorphic encryption.
#[derive(Debug, Parser)]
#[command(name = "qhe-limits", version)]
struct Cli {
    /// Bound mode used when a scenario does not set one.
    #[arg(long, global = true, default_value = "rigorous")]
    mode: BoundMode,
    /// Base seed used when a scenario does not set one.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value = "csv")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form entropy and communication bounds.
    Bounds {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        family_size: Option<u64>,
        #[arg(long)]
        epsilon: Option<f64>,
        /// Comma-separated n values for the eps = 2^(-1.01 n) scan.
        #[arg(long, value_delimiter = ',')]
        corollary: Option<Vec<usize>>,
    },
    /// log2 of the number of reversible maps on n bits.
    Count {
        #[arg(long)]
        n: usize,
    },
    /// Seesaw search for n -> m random access codes.
    QracOptimize {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 20)]
        runs: usize,
        #[arg(long, default_value_t = 200)]
        iterations: usize,
        /// Comma-separated bitstrings; all 2^n by default.
        #[arg(long, value_delimiter = ',')]
        family: Option<Vec<String>>,
    },
    /// Security and correctness audit of a shipped scheme.
    QheAudit {
        #[arg(long)]
        scheme: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Extract a random access code from a scheme and check the bounds.
    Reduce {
        #[arg(long)]
        scheme: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        base: Option<String>,
        /// Also write the per-step chain table as CSV.
        #[arg(long)]
        chain_out: Option<PathBuf>,
    },
    /// Prefix-by-prefix entropy chain for a code.
    TraceLemma {
        #[arg(long)]
        code: CodeSource,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        iterations: Option<usize>,
    },
    /// Run every scenario in a JSON file.
    Run { file: PathBuf },
}

fn task_of(command: Command) -> Task {
    match command {
        Command::Bounds { n, p, family_size, epsilon, corollary } => Task::Bounds { n, p, family_size, epsilon, corollary },
        Command::Count { n } => Task::Count { n },
        Command::QracOptimize { n, m, runs, iterations, family } => Task::QracOptimize { n, m, runs, iterations, family },
        Command::QheAudit { scheme, n, delta } => Task::QheAudit { scheme, n, delta },
        Command::Reduce { scheme, n, delta, base, chain_out } => Task::Reduce { scheme, n, delta, base, chain_out },
        Command::TraceLemma { code, n, m, iterations } => Task::TraceLemma { code, n, m, iterations },
        Command::Run { .. } => unreachable!(),
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let opts = RunOptions { mode: cli.mode, seed: cli.seed };
    let file = match cli.command {
        Command::Run { file } => parse_scenarios(&std::fs::read_to_string(file)?)?,
        cmd => {
            let id = cmd_name(&cmd).to_string();
            ScenarioFile { scenarios: vec![Scenario { id, mode: None, seed: None, budget_seconds: None, task: task_of(cmd) }] }
        }
    };
    let rows = run_all(&file, &opts)?;
    emit_report(&rows, cli.format, cli.out.as_deref())?;
    Ok(all_pass(&rows))
}

fn cmd_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Bounds { .. } => "bounds",
        Command::Count { .. } => "count",
        Command::QracOptimize { .. } => "qrac-optimize",
        Command::QheAudit { .. } => "qhe-audit",
        Command::Reduce { .. } => "reduce",
        Command::TraceLemma { .. } => "trace-lemma",
        Command::Run { .. } => "run",
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
