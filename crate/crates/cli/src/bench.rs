//! Wall-clock benchmark harness: tasks x worker counts, median of >= 3 runs,
//! with speedups reported relative to workers = 1.

use std::fmt;
use std::path::Path;
use std::time::Instant;

use clap::ValueEnum;
use serde::Serialize;

use colmine::variants::get_variants;
use colmine::{build_cases_table, format_log};

use crate::commands::load_table;
use crate::{CliError, InputArgs};

#[derive(Debug, Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum Task {
    /// Read the input file into an event table
    Import,
    /// Sort and derive the per-event columns
    Format,
    /// Build the per-case table
    Cases,
    /// Frequency directly-follows graph
    Dfg,
    /// Performance directly-follows graph
    PerfDfg,
    /// Eventually-follows graph
    Efg,
    /// Case aggregation plus variant grouping (the double aggregation)
    Variants,
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Task::Import => "import",
            Task::Format => "format",
            Task::Cases => "cases",
            Task::Dfg => "dfg",
            Task::PerfDfg => "perf-dfg",
            Task::Efg => "efg",
            Task::Variants => "variants",
        };
        f.write_str(name)
    }
}

#[derive(Serialize)]
struct Machine {
    logical_cpus: usize,
    os: &'static str,
    arch: &'static str,
}

#[derive(Serialize)]
struct Cell {
    task: String,
    workers: usize,
    runs: u32,
    times_ms: Vec<f64>,
    median_ms: f64,
    min_ms: f64,
    /// median(workers = 1) / median(workers = k); absent when 1 was not timed.
    speedup: Option<f64>,
}

#[derive(Serialize)]
struct Report {
    machine: Machine,
    input: String,
    n_events: usize,
    n_cases: usize,
    runs: u32,
    results: Vec<Cell>,
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

pub fn run_bench(
    input: &InputArgs,
    tasks: &[Task],
    workers: Option<Vec<usize>>,
    runs: u32,
    json: Option<&Path>,
) -> Result<(), CliError> {
    // Median needs at least 3 observations to mean anything.
    let runs = runs.max(3);
    let hardware = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let mut worker_counts = workers.unwrap_or_else(|| vec![1, hardware]);
    worker_counts.retain(|&k| k >= 1);
    worker_counts.sort_unstable();
    worker_counts.dedup();
    if worker_counts.is_empty() {
        worker_counts.push(1);
    }

    let table = load_table(input)?;
    let log = format_log(table.clone());
    let cases = build_cases_table(&log, hardware);

    let mut results: Vec<Cell> = Vec::new();
    for &task in tasks {
        for &k in &worker_counts {
            let mut times_ms = Vec::with_capacity(runs as usize);
            for _ in 0..runs {
                let elapsed = match task {
                    Task::Import => {
                        let start = Instant::now();
                        let loaded = load_table(input)?;
                        let elapsed = start.elapsed();
                        std::hint::black_box(loaded);
                        elapsed
                    }
                    Task::Format => {
                        let fresh = table.clone();
                        let start = Instant::now();
                        let formatted = format_log(fresh);
                        let elapsed = start.elapsed();
                        std::hint::black_box(formatted);
                        elapsed
                    }
                    Task::Cases => {
                        let start = Instant::now();
                        let built = build_cases_table(&log, k);
                        let elapsed = start.elapsed();
                        std::hint::black_box(built);
                        elapsed
                    }
                    Task::Dfg => {
                        let start = Instant::now();
                        let dfg = colmine::discovery::frequency_dfg(&log, &cases, k);
                        let elapsed = start.elapsed();
                        std::hint::black_box(dfg);
                        elapsed
                    }
                    Task::PerfDfg => {
                        let start = Instant::now();
                        let dfg = colmine::discovery::performance_dfg(&log, &cases, k);
                        let elapsed = start.elapsed();
                        std::hint::black_box(dfg);
                        elapsed
                    }
                    Task::Efg => {
                        let start = Instant::now();
                        let efg = colmine::discovery::efg(&log, &cases, k);
                        let elapsed = start.elapsed();
                        std::hint::black_box(efg);
                        elapsed
                    }
                    Task::Variants => {
                        let start = Instant::now();
                        let fresh_cases = build_cases_table(&log, k);
                        let variants = get_variants(&log, &fresh_cases);
                        let elapsed = start.elapsed();
                        std::hint::black_box(variants);
                        elapsed
                    }
                };
                times_ms.push(elapsed.as_secs_f64() * 1e3);
            }
            let mut sorted = times_ms.clone();
            sorted.sort_by(f64::total_cmp);
            results.push(Cell {
                task: task.to_string(),
                workers: k,
                runs,
                median_ms: median(&sorted),
                min_ms: sorted[0],
                times_ms,
                speedup: None,
            });
        }
    }

    // Speedups relative to the workers = 1 cell of the same task.
    let baselines: Vec<(String, f64)> = results
        .iter()
        .filter(|c| c.workers == 1)
        .map(|c| (c.task.clone(), c.median_ms))
        .collect();
    for cell in &mut results {
        if let Some((_, base)) = baselines.iter().find(|(t, _)| *t == cell.task) {
            cell.speedup = Some(base / cell.median_ms);
        }
    }

    let report = Report {
        machine: Machine {
            logical_cpus: hardware,
            os: std::env::consts::OS,
            arch: std::env::consts::ARCH,
        },
        input: input.input.display().to_string(),
        n_events: log.n_events(),
        n_cases: cases.n_cases(),
        runs,
        results,
    };

    println!(
        "input: {} ({} events, {} cases) on {} logical cpus, {} runs/cell",
        report.input, report.n_events, report.n_cases, report.machine.logical_cpus, report.runs
    );
    println!("{:<10} {:>8} {:>12} {:>12} {:>9}", "task", "workers", "median_ms", "min_ms", "speedup");
    for cell in &report.results {
        println!(
            "{:<10} {:>8} {:>12.3} {:>12.3} {:>9}",
            cell.task,
            cell.workers,
            cell.median_ms,
            cell.min_ms,
            cell.speedup
                .map(|s| format!("{s:.2}x"))
                .unwrap_or_else(|| "-".to_string()),
        );
    }

    if let Some(path) = json {
        let text = serde_json::to_string_pretty(&report).expect("report serializes");
        std::fs::write(path, text + "\n")
            .map_err(|e| CliError::Data(anyhow::anyhow!("writing {}: {e}", path.display())))?;
    }
    Ok(())
}
