//! Subcommand implementations.

use std::collections::HashSet;
use std::path::Path;

use anyhow::Context;

use colmine::filters::{self, AttrPredicate, FilterLevel, TimeRange, TimestampMode};
use colmine::ingest::{self, parse_timestamp_ms, CsvOptions};
use colmine::variants::{filter_by_variants, get_variants, FilterMode};
use colmine::{build_cases_table, format_log, CaseTable, EventTable, FormattedLog};

use crate::bench;
use crate::{
    usage, CliError, Command, FileFormat, FilterCmd, InputArgs, LevelArg, ModeArg,
    TimestampModeArg, WorkersArg,
};

/// Environment variable giving the default worker count.
pub const WORKERS_ENV: &str = "COLMINE_WORKERS";

pub fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Ingest { input, out } => {
            let table = load_table(&input)?;
            if let Some(path) = &out {
                write_table(&table, path)?;
            }
            print_summary(&table, default_workers(&WorkersArg { workers: None }));
            Ok(())
        }
        Command::Dfg {
            input,
            workers,
            performance,
            json,
            dot,
        } => {
            let k = default_workers(&workers);
            let (log, cases) = prepare(load_table(&input)?, k);
            let dfg = if performance {
                colmine::discovery::performance_dfg(&log, &cases, k)
            } else {
                colmine::discovery::frequency_dfg(&log, &cases, k)
            };
            if let Some(path) = &dot {
                std::fs::write(path, dfg.to_dot())
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            emit_json(&dfg.to_json(), json.as_deref())?;
            Ok(())
        }
        Command::Efg {
            input,
            workers,
            json,
        } => {
            let k = default_workers(&workers);
            let (log, cases) = prepare(load_table(&input)?, k);
            let efg = colmine::discovery::efg(&log, &cases, k);
            emit_json(&efg.to_json(), json.as_deref())?;
            Ok(())
        }
        Command::TemporalProfile {
            input,
            workers,
            json,
        } => {
            let k = default_workers(&workers);
            let (log, cases) = prepare(load_table(&input)?, k);
            let profile = colmine::discovery::temporal_profile(&colmine::discovery::efg(
                &log, &cases, k,
            ));
            emit_json(&profile.to_json(), json.as_deref())?;
            Ok(())
        }
        Command::Variants {
            input,
            workers,
            json,
        } => {
            let k = default_workers(&workers);
            let (log, cases) = prepare(load_table(&input)?, k);
            let variants = get_variants(&log, &cases);
            emit_json(&variants.to_json(), json.as_deref())?;
            Ok(())
        }
        Command::Filter(cmd) => run_filter(*cmd),
        Command::Sample {
            input,
            cases,
            events,
            seed,
            out,
        } => {
            let (log, case_table) = prepare(load_table(&input)?, 1);
            let sampled = match (cases, events) {
                (Some(n), None) => filters::sample_cases(&log, &case_table, n, seed),
                (None, Some(n)) => filters::sample_events(&log, n),
                _ => return Err(usage("pass exactly one of --cases or --events")),
            };
            write_table(sampled.base(), &out)?;
            print_kept(&sampled);
            Ok(())
        }
        Command::Features {
            input,
            workers,
            numeric,
            string,
            out,
        } => {
            if numeric.is_empty() && string.is_empty() {
                return Err(usage("name at least one attribute via --numeric or --string"));
            }
            let k = default_workers(&workers);
            let (log, cases) = prepare(load_table(&input)?, k);
            let matrix = filters_err(colmine::features::extract_features(
                &log, &cases, &numeric, &string, k,
            ))?;
            matrix.to_csv(&out)?;
            println!(
                "wrote {} rows x {} columns to {}",
                matrix.n_rows(),
                matrix.n_cols(),
                out.display()
            );
            Ok(())
        }
        Command::Replicate { input, k, out } => {
            let table = load_table(&input)?;
            let replicated = colmine::synth::replicate(&table, k as usize);
            write_table(&replicated, &out)?;
            print_summary(&replicated, 1);
            Ok(())
        }
        Command::Synth {
            cases,
            activities,
            variants,
            min_len,
            max_len,
            seed,
            out,
        } => {
            let cfg = colmine::synth::SynthConfig {
                n_cases: cases,
                n_activities: activities,
                n_variants: variants,
                min_case_len: min_len,
                max_case_len: max_len,
                seed,
                ..Default::default()
            };
            let table = colmine::synth::generate(&cfg)?;
            write_table(&table, &out)?;
            print_summary(&table, 1);
            Ok(())
        }
        Command::Bench {
            input,
            tasks,
            workers,
            runs,
            json,
        } => bench::run_bench(&input, &tasks, workers, runs, json.as_deref()),
    }
}

fn run_filter(cmd: FilterCmd) -> Result<(), CliError> {
    let k = default_workers(&cmd.workers);
    let (log, cases) = prepare(load_table(&cmd.input)?, k);

    let groups = [
        cmd.timestamp.is_some(),
        cmd.start_activities.is_some(),
        cmd.end_activities.is_some(),
        cmd.attribute.is_some(),
        cmd.case_size.is_some(),
        cmd.throughput.is_some(),
        cmd.paths.is_some(),
        !cmd.variant.is_empty(),
    ];
    if groups.iter().filter(|&&g| g).count() != 1 {
        return Err(usage(
            "choose exactly one filter: --timestamp, --start-activities, --end-activities, \
             --attribute, --case-size, --throughput, --paths, or --variant",
        ));
    }

    let filtered = if let Some(bounds) = &cmd.timestamp {
        let t1 = parse_ts_arg(&bounds[0])?;
        let t2 = parse_ts_arg(&bounds[1])?;
        let range = TimeRange::new(t1, t2)?;
        let mode = match cmd.mode {
            TimestampModeArg::Events => TimestampMode::Events,
            TimestampModeArg::CasesContained => TimestampMode::CasesContained,
            TimestampModeArg::CasesIntersecting => TimestampMode::CasesIntersecting,
        };
        filters::filter_timestamp(&log, &cases, range, mode, k)
    } else if let Some(allowed) = &cmd.start_activities {
        let allowed: HashSet<String> = allowed.iter().cloned().collect();
        filters::filter_start_activities(&log, &cases, &allowed, k)
    } else if let Some(allowed) = &cmd.end_activities {
        let allowed: HashSet<String> = allowed.iter().cloned().collect();
        filters::filter_end_activities(&log, &cases, &allowed, k)
    } else if let Some(attr) = &cmd.attribute {
        let predicate = match (&cmd.string_in, &cmd.range) {
            (Some(values), None) => {
                AttrPredicate::StringIn(values.iter().cloned().collect())
            }
            (None, Some(bounds)) => AttrPredicate::NumericRange(bounds[0], bounds[1]),
            _ => {
                return Err(usage(
                    "--attribute needs exactly one predicate: --in or --range",
                ))
            }
        };
        let level = match cmd.level {
            LevelArg::Events => FilterLevel::Events,
            LevelArg::Cases => FilterLevel::Cases,
        };
        filters::filter_attribute(&log, &cases, attr, &predicate, level, k)?
    } else if let Some(bounds) = &cmd.case_size {
        filters::filter_case_size(&log, &cases, bounds[0], bounds[1], k)?
    } else if let Some(bounds) = &cmd.throughput {
        filters::filter_throughput(&log, &cases, bounds[0], bounds[1], k)?
    } else if let Some(spec) = &cmd.paths {
        let pairs = parse_paths(spec)?;
        filters::filter_paths(&log, &cases, &pairs, filter_mode(cmd.path_mode), k)
    } else {
        let sequences: Vec<Vec<String>> = cmd
            .variant
            .iter()
            .map(|v| v.split(',').map(|s| s.trim().to_string()).collect())
            .collect();
        filter_by_variants(&log, &cases, &sequences, filter_mode(cmd.variant_mode))
    };

    write_table(filtered.base(), &cmd.out)?;
    print_kept(&filtered);
    Ok(())
}

fn filter_mode(mode: ModeArg) -> FilterMode {
    match mode {
        ModeArg::Keep => FilterMode::Keep,
        ModeArg::Remove => FilterMode::Remove,
    }
}

fn parse_ts_arg(text: &str) -> Result<i64, CliError> {
    parse_timestamp_ms(text, &[])
        .ok_or_else(|| usage(format!("{text:?} is not epoch milliseconds or ISO-8601")))
}

fn parse_paths(spec: &str) -> Result<HashSet<(String, String)>, CliError> {
    spec.split(',')
        .map(|pair| {
            pair.split_once('>')
                .map(|(a, b)| (a.trim().to_string(), b.trim().to_string()))
                .ok_or_else(|| usage(format!("path {pair:?} must look like \"A>B\"")))
        })
        .collect()
}

fn filters_err<T>(r: colmine::Result<T>) -> Result<T, CliError> {
    r.map_err(CliError::from)
}

pub fn csv_options(input: &InputArgs) -> CsvOptions {
    CsvOptions {
        separator: input.separator as u8,
        case_field: input.case_field.clone(),
        activity_field: input.activity_field.clone(),
        timestamp_field: input.timestamp_field.clone(),
        timestamp_formats: input.ts_formats.clone(),
        type_hints: Default::default(),
    }
}

fn detect_format(input: &InputArgs) -> FileFormat {
    if let Some(fmt) = input.format {
        return fmt;
    }
    match input.input.extension().and_then(|e| e.to_str()) {
        Some("elt") => FileFormat::Elt,
        _ => FileFormat::Csv,
    }
}

pub fn load_table(input: &InputArgs) -> Result<EventTable, CliError> {
    let table = match detect_format(input) {
        FileFormat::Elt => ingest::read_binary(&input.input)?,
        FileFormat::Csv => ingest::read_csv(&input.input, &csv_options(input))?,
    };
    Ok(table)
}

/// Writes `.elt` for that extension, CSV otherwise.
pub fn write_table(table: &EventTable, path: &Path) -> Result<(), CliError> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("elt") => ingest::write_binary(table, path)?,
        _ => ingest::write_csv(table, path, b',')?,
    }
    Ok(())
}

pub fn prepare(table: EventTable, workers: usize) -> (FormattedLog, CaseTable) {
    let log = format_log(table);
    let cases = build_cases_table(&log, workers);
    (log, cases)
}

pub fn default_workers(arg: &WorkersArg) -> usize {
    if let Some(k) = arg.workers {
        return k.max(1);
    }
    if let Ok(value) = std::env::var(WORKERS_ENV) {
        if let Ok(k) = value.trim().parse::<usize>() {
            return k.max(1);
        }
    }
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn print_summary(table: &EventTable, workers: usize) {
    let (log, cases) = prepare(table.clone(), workers);
    let variants = get_variants(&log, &cases);
    println!(
        "{} cases, {} events, {} activities, {} variants",
        cases.n_cases(),
        log.n_events(),
        log.base().activity().dict().len(),
        variants.n_variants()
    );
}

fn print_kept(log: &FormattedLog) {
    let cases = build_cases_table(log, 1);
    println!("kept {} events, {} cases", log.n_events(), cases.n_cases());
}

fn emit_json(value: &serde_json::Value, path: Option<&Path>) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("JSON serialization cannot fail");
    match path {
        Some(path) => {
            std::fs::write(path, text + "\n")
                .with_context(|| format!("writing {}", path.display()))?;
        }
        None => println!("{text}"),
    }
    Ok(())
}
