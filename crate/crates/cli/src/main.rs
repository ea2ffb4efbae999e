//! `colmine` command-line interface.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error (I/O, parsing, or
//! invalid arguments reported by the engine).

mod bench;
mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "colmine", version, about = "Columnar process-mining engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Shared input flags: file format and CSV schema configuration.
#[derive(Args, Clone)]
struct InputArgs {
    /// Event log file (.csv or .elt; see --format)
    input: PathBuf,

    /// Input format; inferred from the file extension when omitted
    #[arg(long, value_enum)]
    format: Option<FileFormat>,

    /// CSV header name of the case identifier column
    #[arg(long, default_value = "case")]
    case_field: String,

    /// CSV header name of the activity column
    #[arg(long, default_value = "activity")]
    activity_field: String,

    /// CSV header name of the timestamp column
    #[arg(long, default_value = "timestamp")]
    timestamp_field: String,

    /// CSV separator byte
    #[arg(long, default_value = ",")]
    separator: char,

    /// Additional chrono timestamp format, tried in order (repeatable);
    /// replaces the built-in ISO-8601/epoch-milliseconds defaults
    #[arg(long = "ts-format")]
    ts_formats: Vec<String>,
}

#[derive(Args, Clone)]
struct WorkersArg {
    /// Worker threads (default: $COLMINE_WORKERS, then hardware parallelism)
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum FileFormat {
    Csv,
    Elt,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Keep,
    Remove,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum TimestampModeArg {
    Events,
    CasesContained,
    CasesIntersecting,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum LevelArg {
    Events,
    Cases,
}

#[derive(Subcommand)]
enum Command {
    /// Ingest a log and print its summary; optionally convert it
    Ingest {
        #[command(flatten)]
        input: InputArgs,
        /// Write the ingested table to this path (.elt or .csv)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Discover the directly-follows graph
    Dfg {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        workers: WorkersArg,
        /// Annotate edges with duration statistics
        #[arg(long)]
        performance: bool,
        /// Write the graph as JSON to this path (default: stdout)
        #[arg(long)]
        json: Option<PathBuf>,
        /// Also write a Graphviz .dot file
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Discover the eventually-follows graph
    Efg {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        workers: WorkersArg,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Compute the temporal profile (mean/stdev per eventually-follows pair)
    TemporalProfile {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        workers: WorkersArg,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// List trace variants with case counts
    Variants {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        workers: WorkersArg,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Filter the log (exactly one filter group per invocation)
    Filter(Box<FilterCmd>),
    /// Sample cases or take an event prefix
    Sample {
        #[command(flatten)]
        input: InputArgs,
        /// Keep n cases drawn uniformly without replacement
        #[arg(long, group = "what")]
        cases: Option<usize>,
        /// Keep the first n events of the formatted log
        #[arg(long, group = "what")]
        events: Option<usize>,
        /// PRNG seed for --cases
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Extract a per-case feature matrix as CSV
    Features {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        workers: WorkersArg,
        /// Numeric attributes, comma separated (last value per case)
        #[arg(long, value_delimiter = ',')]
        numeric: Vec<String>,
        /// String attributes, comma separated (one-hot presence)
        #[arg(long, value_delimiter = ',')]
        string: Vec<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Duplicate every case k times under fresh case ids
    Replicate {
        #[command(flatten)]
        input: InputArgs,
        /// Replication factor
        #[arg(short = 'k', long = "factor", value_parser = clap::value_parser!(u32).range(1..))]
        k: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a seeded synthetic log
    Synth {
        /// Number of cases
        #[arg(long, default_value_t = 1000)]
        cases: usize,
        /// Number of distinct activities
        #[arg(long, default_value_t = 11)]
        activities: usize,
        /// Number of distinct variants
        #[arg(long, default_value_t = 231)]
        variants: usize,
        /// Minimum case length
        #[arg(long, default_value_t = 2)]
        min_len: usize,
        /// Maximum case length
        #[arg(long, default_value_t = 8)]
        max_len: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Time engine tasks across worker counts (median of >= 3 runs)
    Bench {
        #[command(flatten)]
        input: InputArgs,
        /// Tasks to time, comma separated
        #[arg(long, value_delimiter = ',', default_values_t = vec![
            bench::Task::Import, bench::Task::Dfg, bench::Task::Variants
        ])]
        tasks: Vec<bench::Task>,
        /// Worker counts to time, comma separated (default: "1,<hardware>")
        #[arg(long, value_delimiter = ',')]
        workers: Option<Vec<usize>>,
        /// Runs per cell; medians are reported (minimum 3, enforced)
        #[arg(long, default_value_t = 3)]
        runs: u32,
        /// Write the full report as JSON
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Args)]
struct FilterCmd {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    workers: WorkersArg,
    #[arg(long)]
    out: PathBuf,

    /// Timestamp range: two values, epoch ms or ISO-8601
    #[arg(long, num_args = 2, value_names = ["T1", "T2"], allow_negative_numbers = true)]
    timestamp: Option<Vec<String>>,
    /// Timestamp filter semantics
    #[arg(long, value_enum, default_value = "events")]
    mode: TimestampModeArg,

    /// Keep cases starting with one of these activities (comma separated)
    #[arg(long, value_delimiter = ',')]
    start_activities: Option<Vec<String>>,
    /// Keep cases ending with one of these activities (comma separated)
    #[arg(long, value_delimiter = ',')]
    end_activities: Option<Vec<String>>,

    /// Attribute to filter on ("case", "activity", "timestamp", or a column)
    #[arg(long)]
    attribute: Option<String>,
    /// String membership predicate for --attribute (comma separated)
    #[arg(long = "in", value_delimiter = ',')]
    string_in: Option<Vec<String>>,
    /// Inclusive numeric range predicate for --attribute
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
    range: Option<Vec<f64>>,
    /// Attribute filter level
    #[arg(long, value_enum, default_value = "events")]
    level: LevelArg,

    /// Keep cases with min..=max events
    #[arg(long, num_args = 2, value_names = ["MIN", "MAX"])]
    case_size: Option<Vec<usize>>,
    /// Keep cases with throughput in min..=max milliseconds
    #[arg(long, num_args = 2, value_names = ["MIN", "MAX"], allow_negative_numbers = true)]
    throughput: Option<Vec<i64>>,

    /// Directly-follows pairs "A>B,C>D" for path filtering
    #[arg(long)]
    paths: Option<String>,
    /// Keep or remove cases containing a listed path
    #[arg(long, value_enum, default_value = "keep")]
    path_mode: ModeArg,

    /// Variant sequence "A,B,C" (repeatable)
    #[arg(long = "variant")]
    variant: Vec<String>,
    /// Keep or remove cases whose variant is listed
    #[arg(long, value_enum, default_value = "keep")]
    variant_mode: ModeArg,
}

/// Errors that should exit with code 1 (usage) vs 2 (data).
enum CliError {
    Usage(String),
    Data(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::Data(e.into())
    }
}

fn usage(message: impl Into<String>) -> CliError {
    CliError::Usage(message.into())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and --version are not errors.
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(message)) => {
            eprintln!("usage error: {message}");
            ExitCode::from(1)
        }
        Err(CliError::Data(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
