use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use modal_lift::driver::{run_sources, Exit, Mode, RunOptions};
use modal_lift::labels::DEFAULT_FEATURE_LIMIT;
use modal_lift::modal::IntervalEmpty;

#[derive(Parser)]
#[command(name = "modal", version, about = "Evaluate programs over labelled multi-world inputs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a program against a bindings file.
    Run(RunArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Plain,
    Shallow,
    Deep,
    Oracle,
    Check,
}

#[derive(Clone, Copy, ValueEnum)]
enum EmptyArg {
    Reject,
    Swap,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Program file (.mdl).
    #[arg(short = 'p', long = "program")]
    program: PathBuf,
    /// Bindings file (.mb).
    #[arg(short = 'b', long = "bindings")]
    bindings: PathBuf,
    #[arg(long, value_enum, default_value = "deep")]
    mode: ModeArg,
    /// World for plain mode: `FA=1,FB=0`, or `MIN` / `MAX` for intervals.
    #[arg(long)]
    config: Option<String>,
    /// Print application and cross-product counters after the result.
    #[arg(long)]
    stats: bool,
    /// Validate every intermediate modal value.
    #[arg(long)]
    check_invariants: bool,
    /// Handling of ranges whose MAX is below their MIN.
    #[arg(long, value_enum, default_value = "reject")]
    interval_empty: EmptyArg,
    #[arg(long, default_value_t = DEFAULT_FEATURE_LIMIT)]
    feature_limit: usize,
}

fn read(path: &PathBuf) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { Exit::Usage as u8 } else { 0 });
        }
    };
    let Command::Run(args) = cli.command;
    let (program, bindings) = match (read(&args.program), read(&args.bindings)) {
        (Ok(p), Ok(b)) => (p, b),
        (Err(e), _) | (_, Err(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(Exit::Usage as u8);
        }
    };
    let opts = RunOptions {
        mode: match args.mode {
            ModeArg::Plain => Mode::Plain,
            ModeArg::Shallow => Mode::Shallow,
            ModeArg::Deep => Mode::Deep,
            ModeArg::Oracle => Mode::Oracle,
            ModeArg::Check => Mode::Check,
        },
        config: args.config,
        stats: args.stats,
        check_invariants: args.check_invariants,
        interval_empty: match args.interval_empty {
            EmptyArg::Reject => IntervalEmpty::Reject,
            EmptyArg::Swap => IntervalEmpty::Swap,
        },
        feature_limit: args.feature_limit,
    };
    let report = run_sources(&program, &bindings, &opts);
    let _ = std::io::stdout().write_all(report.stdout.as_bytes());
    let _ = std::io::stderr().write_all(report.stderr.as_bytes());
    ExitCode::from(report.exit as u8)
}
