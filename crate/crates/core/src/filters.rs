//! Retrieval and filtering operations: timestamps (three modes), endpoint
//! activities, attribute values, case size and throughput, paths, and
//! sampling.
//!
//! Every filter selects rows out of a formatted log and re-formats the
//! remainder, so position and previous-event columns are always re-derived
//! (event-level filters may leave partial cases). Case-level filters keep
//! whole cases only. All range bounds are inclusive on both ends.

use std::collections::{BTreeMap, HashSet};
use std::ops::Range;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::format::{CaseTable, FormattedLog};
use crate::log_model::{
    ColumnData, ColumnKind, Dictionary, NullMask, RESERVED_ACTIVITY, RESERVED_CASE,
    RESERVED_TIMESTAMP,
};
use crate::parallel::{partition_loads, run_segments};
use crate::variants::FilterMode;
use crate::{Error, Result};

/// Inclusive timestamp range in epoch milliseconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimeRange {
    t1: i64,
    t2: i64,
}

impl TimeRange {
    pub fn new(t1: i64, t2: i64) -> Result<Self> {
        if t1 > t2 {
            return Err(Error::Argument(format!(
                "time range start {t1} exceeds end {t2}"
            )));
        }
        Ok(TimeRange { t1, t2 })
    }

    pub fn start(&self) -> i64 {
        self.t1
    }

    pub fn end(&self) -> i64 {
        self.t2
    }

    pub fn contains(&self, ts: i64) -> bool {
        ts >= self.t1 && ts <= self.t2
    }
}

/// The three timestamp filtering semantics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimestampMode {
    /// Keep individual events inside the range; cases may become partial.
    Events,
    /// Keep whole cases whose full span lies inside the range.
    CasesContained,
    /// Keep whole cases whose span overlaps the range.
    CasesIntersecting,
}

pub fn filter_timestamp(
    log: &FormattedLog,
    cases: &CaseTable,
    range: TimeRange,
    mode: TimestampMode,
    workers: usize,
) -> FormattedLog {
    match mode {
        TimestampMode::Events => {
            let ts = log.base().timestamps();
            let rows: Vec<usize> = (0..log.n_events()).filter(|&r| range.contains(ts[r])).collect();
            reformat(log, rows)
        }
        TimestampMode::CasesContained => keep_cases(log, cases, workers, |case| {
            cases.start_ts()[case] >= range.t1 && cases.end_ts()[case] <= range.t2
        }),
        TimestampMode::CasesIntersecting => keep_cases(log, cases, workers, |case| {
            cases.start_ts()[case] <= range.t2 && cases.end_ts()[case] >= range.t1
        }),
    }
}

/// Case counts per first activity of a case.
pub fn start_activities(log: &FormattedLog, cases: &CaseTable) -> BTreeMap<String, u64> {
    endpoint_counts(log, cases, |rows| rows.start)
}

/// Case counts per last activity of a case.
pub fn end_activities(log: &FormattedLog, cases: &CaseTable) -> BTreeMap<String, u64> {
    endpoint_counts(log, cases, |rows| rows.end - 1)
}

fn endpoint_counts(
    log: &FormattedLog,
    cases: &CaseTable,
    pick: impl Fn(Range<usize>) -> usize,
) -> BTreeMap<String, u64> {
    let activity = log.base().activity();
    let mut counts = BTreeMap::new();
    for case in 0..cases.n_cases() {
        let row = pick(cases.rows_of(case));
        *counts.entry(activity.value(row).to_string()).or_insert(0) += 1;
    }
    counts
}

pub fn filter_start_activities(
    log: &FormattedLog,
    cases: &CaseTable,
    allowed: &HashSet<String>,
    workers: usize,
) -> FormattedLog {
    let codes = resolve_codes(log.base().activity().dict(), allowed);
    let activity = log.base().activity().codes();
    keep_cases(log, cases, workers, |case| {
        codes.contains(&activity[cases.rows_of(case).start])
    })
}

pub fn filter_end_activities(
    log: &FormattedLog,
    cases: &CaseTable,
    allowed: &HashSet<String>,
    workers: usize,
) -> FormattedLog {
    let codes = resolve_codes(log.base().activity().dict(), allowed);
    let activity = log.base().activity().codes();
    keep_cases(log, cases, workers, |case| {
        codes.contains(&activity[cases.rows_of(case).end - 1])
    })
}

fn resolve_codes(dict: &Dictionary, values: &HashSet<String>) -> HashSet<u32> {
    values.iter().filter_map(|v| dict.code(v)).collect()
}

/// Retrieval result of [`attribute_values`].
#[derive(Debug, Clone, PartialEq)]
pub enum AttributeSummary {
    /// Null-skipping value histogram of a string attribute.
    StringCounts(BTreeMap<String, u64>),
    /// Null-skipping summary of a numeric attribute.
    Numeric(NumericSummary),
}

/// min/max/mean are `None` when every value is null.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericSummary {
    pub count: u64,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub mean: Option<f64>,
}

/// Values of a string attribute (as counts) or a numeric attribute (as
/// summary statistics). The reserved names `case`, `activity`, and
/// `timestamp` address the mandatory columns.
pub fn attribute_values(log: &FormattedLog, attr: &str) -> Result<AttributeSummary> {
    match resolve_attr(log, attr)? {
        AttrRef::Strings { codes, dict, mask } => {
            let mut by_code = vec![0u64; dict.len()];
            for (row, &code) in codes.iter().enumerate() {
                if valid(mask, row) {
                    by_code[code as usize] += 1;
                }
            }
            let counts = by_code
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(code, &c)| (dict.value(code as u32).to_string(), c))
                .collect();
            Ok(AttributeSummary::StringCounts(counts))
        }
        AttrRef::Ints { values, mask } => Ok(AttributeSummary::Numeric(numeric_summary(
            values.iter().enumerate().filter_map(|(row, &v)| {
                valid(mask, row).then_some(v as f64)
            }),
        ))),
        AttrRef::Floats { values, mask } => Ok(AttributeSummary::Numeric(numeric_summary(
            values.iter().enumerate().filter_map(|(row, &v)| {
                valid(mask, row).then_some(v)
            }),
        ))),
    }
}

fn numeric_summary(values: impl Iterator<Item = f64>) -> NumericSummary {
    let mut count = 0u64;
    let mut sum = 0.0f64;
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for v in values {
        count += 1;
        sum += v;
        min = min.min(v);
        max = max.max(v);
    }
    if count == 0 {
        NumericSummary {
            count,
            min: None,
            max: None,
            mean: None,
        }
    } else {
        NumericSummary {
            count,
            min: Some(min),
            max: Some(max),
            mean: Some(sum / count as f64),
        }
    }
}

/// Attribute predicate: string membership or inclusive numeric range.
/// Nulls never match.
#[derive(Debug, Clone)]
pub enum AttrPredicate {
    StringIn(HashSet<String>),
    NumericRange(f64, f64),
}

/// Event-level keeps matching rows; case-level keeps every event of cases
/// with at least one matching row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterLevel {
    Events,
    Cases,
}

pub fn filter_attribute(
    log: &FormattedLog,
    cases: &CaseTable,
    attr: &str,
    predicate: &AttrPredicate,
    level: FilterLevel,
    workers: usize,
) -> Result<FormattedLog> {
    let attr_ref = resolve_attr(log, attr)?;
    let matches_row: Box<dyn Fn(usize) -> bool + Sync> = match (&attr_ref, predicate) {
        (AttrRef::Strings { codes, dict, mask }, AttrPredicate::StringIn(set)) => {
            let allowed = resolve_codes(dict, set);
            let codes = *codes;
            let mask = *mask;
            Box::new(move |row| valid(mask, row) && allowed.contains(&codes[row]))
        }
        (AttrRef::Ints { values, mask }, AttrPredicate::NumericRange(lo, hi)) => {
            let (lo, hi) = (*lo, *hi);
            let values = *values;
            let mask = *mask;
            Box::new(move |row| {
                valid(mask, row) && (values[row] as f64) >= lo && (values[row] as f64) <= hi
            })
        }
        (AttrRef::Floats { values, mask }, AttrPredicate::NumericRange(lo, hi)) => {
            let (lo, hi) = (*lo, *hi);
            let values = *values;
            let mask = *mask;
            Box::new(move |row| valid(mask, row) && values[row] >= lo && values[row] <= hi)
        }
        (AttrRef::Strings { .. }, AttrPredicate::NumericRange(..)) => {
            return Err(Error::Argument(format!(
                "attribute {attr:?} is a string column; numeric range does not apply"
            )))
        }
        (_, AttrPredicate::StringIn(..)) => {
            return Err(Error::Argument(format!(
                "attribute {attr:?} is numeric; string membership does not apply"
            )))
        }
    };

    Ok(match level {
        FilterLevel::Events => {
            let rows: Vec<usize> = (0..log.n_events()).filter(|&r| matches_row(r)).collect();
            reformat(log, rows)
        }
        FilterLevel::Cases => keep_cases(log, cases, workers, |case| {
            cases.rows_of(case).any(&matches_row)
        }),
    })
}

/// Keeps whole cases with `min_events <= n_events_in_case <= max_events`.
pub fn filter_case_size(
    log: &FormattedLog,
    cases: &CaseTable,
    min_events: usize,
    max_events: usize,
    workers: usize,
) -> Result<FormattedLog> {
    if min_events > max_events {
        return Err(Error::Argument(format!(
            "case size minimum {min_events} exceeds maximum {max_events}"
        )));
    }
    Ok(keep_cases(log, cases, workers, |case| {
        let n = cases.n_events_in_case()[case] as usize;
        n >= min_events && n <= max_events
    }))
}

/// Keeps whole cases with `min_ms <= throughput <= max_ms`.
pub fn filter_throughput(
    log: &FormattedLog,
    cases: &CaseTable,
    min_ms: i64,
    max_ms: i64,
    workers: usize,
) -> Result<FormattedLog> {
    if min_ms > max_ms {
        return Err(Error::Argument(format!(
            "throughput minimum {min_ms} exceeds maximum {max_ms}"
        )));
    }
    Ok(keep_cases(log, cases, workers, |case| {
        let t = cases.throughput_ms()[case];
        t >= min_ms && t <= max_ms
    }))
}

/// Keep mode retains cases with at least one directly-follows occurrence in
/// `pairs`; remove mode drops them. An empty set therefore keeps nothing in
/// keep mode and everything in remove mode.
pub fn filter_paths(
    log: &FormattedLog,
    cases: &CaseTable,
    pairs: &HashSet<(String, String)>,
    mode: FilterMode,
    workers: usize,
) -> FormattedLog {
    let dict = log.base().activity().dict();
    let code_pairs: HashSet<(u32, u32)> = pairs
        .iter()
        .filter_map(|(a, b)| Some((dict.code(a)?, dict.code(b)?)))
        .collect();
    let activity = log.base().activity().codes();
    let prev_activity = log.prev_activity_raw();
    let pos = log.pos_in_case();
    keep_cases(log, cases, workers, |case| {
        let has = cases.rows_of(case).any(|row| {
            pos[row] != 0 && code_pairs.contains(&(prev_activity[row], activity[row]))
        });
        match mode {
            FilterMode::Keep => has,
            FilterMode::Remove => !has,
        }
    })
}

/// Keeps `min(n, n_cases)` cases chosen uniformly without replacement by a
/// seeded ChaCha8 generator, with all their events. Reproducible across
/// platforms for a given seed.
pub fn sample_cases(
    log: &FormattedLog,
    cases: &CaseTable,
    n: usize,
    seed: u64,
) -> FormattedLog {
    let n_cases = cases.n_cases();
    if n >= n_cases {
        return reformat(log, (0..log.n_events()).collect());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen: Vec<usize> = rand::seq::index::sample(&mut rng, n_cases, n).into_vec();
    chosen.sort_unstable();
    let rows: Vec<usize> = chosen.into_iter().flat_map(|case| cases.rows_of(case)).collect();
    reformat(log, rows)
}

/// Keeps the first `n` rows of the formatted log: a deterministic prefix,
/// not a random sample, so case contiguity breaks at one predictable point.
pub fn sample_events(log: &FormattedLog, n: usize) -> FormattedLog {
    let keep = n.min(log.n_events());
    reformat(log, (0..keep).collect())
}

// ---------------------------------------------------------------------------
// Shared machinery
// ---------------------------------------------------------------------------

enum AttrRef<'a> {
    Strings {
        codes: &'a [u32],
        dict: &'a Dictionary,
        mask: Option<&'a NullMask>,
    },
    Ints {
        values: &'a [i64],
        mask: Option<&'a NullMask>,
    },
    Floats {
        values: &'a [f64],
        mask: Option<&'a NullMask>,
    },
}

#[inline]
fn valid(mask: Option<&NullMask>, row: usize) -> bool {
    mask.is_none_or(|m| m.is_valid(row))
}

fn resolve_attr<'a>(log: &'a FormattedLog, name: &str) -> Result<AttrRef<'a>> {
    let table = log.base();
    match name {
        RESERVED_CASE => Ok(AttrRef::Strings {
            codes: table.case().codes(),
            dict: table.case().dict(),
            mask: None,
        }),
        RESERVED_ACTIVITY => Ok(AttrRef::Strings {
            codes: table.activity().codes(),
            dict: table.activity().dict(),
            mask: None,
        }),
        RESERVED_TIMESTAMP => Ok(AttrRef::Ints {
            values: table.timestamps(),
            mask: None,
        }),
        _ => {
            let col = table
                .attr(name)
                .ok_or_else(|| Error::Argument(format!("unknown attribute {name:?}")))?;
            Ok(match col.data() {
                ColumnData::StringDict { codes, dict } => AttrRef::Strings {
                    codes,
                    dict,
                    mask: Some(col.mask()),
                },
                ColumnData::Int64(values) | ColumnData::Timestamp64(values) => AttrRef::Ints {
                    values,
                    mask: Some(col.mask()),
                },
                ColumnData::Float64(values) => AttrRef::Floats {
                    values,
                    mask: Some(col.mask()),
                },
            })
        }
    }
}

/// Materializes the given rows (already in formatted order) as a fresh
/// formatted log, re-deriving all derived columns.
fn reformat(log: &FormattedLog, rows: Vec<usize>) -> FormattedLog {
    crate::format_log(log.base().take_rows(&rows))
}

/// Evaluates a per-case predicate over case segments in parallel, then
/// keeps every event of the selected cases.
fn keep_cases(
    log: &FormattedLog,
    cases: &CaseTable,
    workers: usize,
    keep: impl Fn(usize) -> bool + Sync,
) -> FormattedLog {
    let segments = partition_loads(cases.n_events_in_case(), workers.max(1));
    let masks = run_segments(&segments, |range| {
        range.map(&keep).collect::<Vec<bool>>()
    });
    let mut rows = Vec::new();
    let mut case = 0usize;
    for segment in masks {
        for kept in segment {
            if kept {
                rows.extend(cases.rows_of(case));
            }
            case += 1;
        }
    }
    reformat(log, rows)
}

/// Used by tests and the attribute kind checks in the CLI.
pub fn attr_kind(log: &FormattedLog, name: &str) -> Result<ColumnKind> {
    Ok(match resolve_attr(log, name)? {
        AttrRef::Strings { .. } => ColumnKind::String,
        AttrRef::Ints { .. } => ColumnKind::Int64,
        AttrRef::Floats { .. } => ColumnKind::Float64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::{build_cases_table, format_log};
    use crate::log_model::AttrValue;
    use crate::reference;

    fn l1() -> (FormattedLog, CaseTable) {
        let log = format_log(reference::fixture_l1().to_table());
        let cases = build_cases_table(&log, 1);
        (log, cases)
    }

    fn decoded(log: &FormattedLog) -> Vec<(String, String, i64)> {
        let t = log.base();
        (0..t.n_events())
            .map(|i| {
                (
                    t.case().value(i).to_string(),
                    t.activity().value(i).to_string(),
                    t.timestamps()[i],
                )
            })
            .collect()
    }

    fn set(items: &[&str]) -> HashSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn timestamp_events_mode() {
        let (log, cases) = l1();
        let range = TimeRange::new(0, 15).unwrap();
        let out = filter_timestamp(&log, &cases, range, TimestampMode::Events, 2);
        assert_eq!(
            decoded(&out),
            vec![
                ("c1".into(), "A".into(), 0),
                ("c1".into(), "B".into(), 10),
                ("c2".into(), "A".into(), 5),
                ("c2".into(), "C".into(), 15),
                ("c3".into(), "A".into(), 0),
            ]
        );
        // Partial case c1 re-derives its prev columns.
        assert_eq!(out.pos_in_case(), &[0, 1, 0, 1, 0]);
    }

    #[test]
    fn timestamp_cases_contained() {
        let (log, cases) = l1();
        let range = TimeRange::new(0, 20).unwrap();
        let out = filter_timestamp(&log, &cases, range, TimestampMode::CasesContained, 2);
        let kept: HashSet<String> = decoded(&out).into_iter().map(|(c, _, _)| c).collect();
        assert_eq!(kept, set(&["c1", "c2"]));
    }

    #[test]
    fn timestamp_cases_intersecting() {
        let (log, cases) = l1();
        let range = TimeRange::new(90, 200).unwrap();
        let out = filter_timestamp(&log, &cases, range, TimestampMode::CasesIntersecting, 2);
        let kept: HashSet<String> = decoded(&out).into_iter().map(|(c, _, _)| c).collect();
        assert_eq!(kept, set(&["c3"]));
        assert_eq!(out.n_events(), 3);
    }

    #[test]
    fn invalid_range_is_argument_error() {
        assert!(matches!(TimeRange::new(5, 4), Err(Error::Argument(_))));
    }

    #[test]
    fn l1_endpoints() {
        let (log, cases) = l1();
        let starts = start_activities(&log, &cases);
        let ends = end_activities(&log, &cases);
        assert_eq!(starts, [("A".to_string(), 3)].into_iter().collect());
        assert_eq!(ends, [("C".to_string(), 3)].into_iter().collect());
    }

    #[test]
    fn empty_log_endpoints() {
        let log = format_log(crate::log_model::EventTableBuilder::new().finish());
        let cases = build_cases_table(&log, 1);
        assert!(start_activities(&log, &cases).is_empty());
        assert!(end_activities(&log, &cases).is_empty());
    }

    #[test]
    fn start_filter_allowing_all_is_identity() {
        let (log, cases) = l1();
        let out = filter_start_activities(&log, &cases, &set(&["A"]), 2);
        assert!(out.value_eq(&log));
    }

    #[test]
    fn end_filter_with_no_match_empties_log() {
        let (log, cases) = l1();
        let out = filter_end_activities(&log, &cases, &set(&["B"]), 2);
        assert_eq!(out.n_events(), 0);
    }

    #[test]
    fn attribute_values_string_counts() {
        let log = format_log(reference::fixture_l1_attrs().to_table());
        match attribute_values(&log, "channel").unwrap() {
            AttributeSummary::StringCounts(counts) => {
                assert_eq!(counts["web"], 4);
                assert_eq!(counts["phone"], 3);
            }
            other => panic!("expected string counts, got {other:?}"),
        }
    }

    #[test]
    fn attribute_values_numeric_summary() {
        let log = format_log(reference::fixture_l1_attrs().to_table());
        match attribute_values(&log, "amount").unwrap() {
            AttributeSummary::Numeric(s) => {
                // Non-null values: 5, 7, 3, 2, 2.
                assert_eq!(s.count, 5);
                assert_eq!(s.min, Some(2.0));
                assert_eq!(s.max, Some(7.0));
                assert!((s.mean.unwrap() - 3.8).abs() < 1e-12);
            }
            other => panic!("expected numeric summary, got {other:?}"),
        }
    }

    #[test]
    fn all_null_numeric_summary_is_flagged() {
        let mut b = crate::log_model::EventTableBuilder::new()
            .attr("x", ColumnKind::Int64)
            .unwrap();
        b.push("c", "A", 0);
        b.push("c", "B", 1);
        let log = format_log(b.finish());
        match attribute_values(&log, "x").unwrap() {
            AttributeSummary::Numeric(s) => {
                assert_eq!(s.count, 0);
                assert_eq!(s.min, None);
                assert_eq!(s.max, None);
                assert_eq!(s.mean, None);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_attribute_is_argument_error() {
        let (log, _) = l1();
        assert!(matches!(
            attribute_values(&log, "nope"),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn activity_in_set_case_level() {
        let (log, cases) = l1();
        let out = filter_attribute(
            &log,
            &cases,
            "activity",
            &AttrPredicate::StringIn(set(&["B"])),
            FilterLevel::Cases,
            2,
        )
        .unwrap();
        let kept: HashSet<String> = decoded(&out).into_iter().map(|(c, _, _)| c).collect();
        assert_eq!(kept, set(&["c1", "c3"]));
        assert_eq!(out.n_events(), 6); // complete cases
    }

    #[test]
    fn numeric_filter_with_no_match_is_empty() {
        let log = format_log(reference::fixture_l1_attrs().to_table());
        let cases = build_cases_table(&log, 1);
        let out = filter_attribute(
            &log,
            &cases,
            "amount",
            &AttrPredicate::NumericRange(1000.0, f64::INFINITY),
            FilterLevel::Events,
            1,
        )
        .unwrap();
        assert_eq!(out.n_events(), 0);
    }

    #[test]
    fn nulls_never_match() {
        let log = format_log(reference::fixture_l1_attrs().to_table());
        let cases = build_cases_table(&log, 1);
        // All non-null amounts are in [2, 7]; nulls must not sneak in.
        let out = filter_attribute(
            &log,
            &cases,
            "amount",
            &AttrPredicate::NumericRange(f64::NEG_INFINITY, f64::INFINITY),
            FilterLevel::Events,
            1,
        )
        .unwrap();
        assert_eq!(out.n_events(), 5);
    }

    #[test]
    fn predicate_kind_mismatch_is_argument_error() {
        let (log, cases) = l1();
        assert!(matches!(
            filter_attribute(
                &log,
                &cases,
                "activity",
                &AttrPredicate::NumericRange(0.0, 1.0),
                FilterLevel::Events,
                1,
            ),
            Err(Error::Argument(_))
        ));
        let log2 = format_log(reference::fixture_l1_attrs().to_table());
        let cases2 = build_cases_table(&log2, 1);
        assert!(matches!(
            filter_attribute(
                &log2,
                &cases2,
                "amount",
                &AttrPredicate::StringIn(set(&["5"])),
                FilterLevel::Events,
                1,
            ),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn case_size_three_keeps_c1_c3() {
        let (log, cases) = l1();
        let out = filter_case_size(&log, &cases, 3, 3, 2).unwrap();
        let kept: HashSet<String> = decoded(&out).into_iter().map(|(c, _, _)| c).collect();
        assert_eq!(kept, set(&["c1", "c3"]));
    }

    #[test]
    fn throughput_keeps_c2_only() {
        let (log, cases) = l1();
        let out = filter_throughput(&log, &cases, 0, 10, 2).unwrap();
        let kept: HashSet<String> = decoded(&out).into_iter().map(|(c, _, _)| c).collect();
        assert_eq!(kept, set(&["c2"]));
    }

    #[test]
    fn unbounded_filters_are_identity() {
        let (log, cases) = l1();
        let out = filter_case_size(&log, &cases, 0, usize::MAX, 2).unwrap();
        assert!(out.value_eq(&log));
        let out = filter_throughput(&log, &cases, 0, i64::MAX, 2).unwrap();
        assert!(out.value_eq(&log));
    }

    #[test]
    fn inverted_bounds_are_argument_errors() {
        let (log, cases) = l1();
        assert!(filter_case_size(&log, &cases, 3, 2, 1).is_err());
        assert!(filter_throughput(&log, &cases, 10, 0, 1).is_err());
    }

    #[test]
    fn paths_keep_ac() {
        let (log, cases) = l1();
        let pairs: HashSet<(String, String)> =
            [("A".to_string(), "C".to_string())].into_iter().collect();
        let out = filter_paths(&log, &cases, &pairs, FilterMode::Keep, 2);
        let kept: HashSet<String> = decoded(&out).into_iter().map(|(c, _, _)| c).collect();
        assert_eq!(kept, set(&["c2"]));
    }

    #[test]
    fn paths_empty_set_keep_and_remove() {
        let (log, cases) = l1();
        let empty = HashSet::new();
        let kept = filter_paths(&log, &cases, &empty, FilterMode::Keep, 1);
        assert_eq!(kept.n_events(), 0);
        let removed = filter_paths(&log, &cases, &empty, FilterMode::Remove, 1);
        assert!(removed.value_eq(&log));
    }

    #[test]
    fn sample_with_n_at_least_cases_is_identity() {
        let (log, cases) = l1();
        let out = sample_cases(&log, &cases, 3, 9);
        assert!(out.value_eq(&log));
        let out = sample_cases(&log, &cases, 100, 9);
        assert!(out.value_eq(&log));
    }

    #[test]
    fn sample_cases_is_deterministic() {
        let (log, cases) = l1();
        let a = sample_cases(&log, &cases, 1, 12345);
        let b = sample_cases(&log, &cases, 1, 12345);
        assert!(a.value_eq(&b));
        assert_eq!(build_cases_table(&a, 1).n_cases(), 1);
    }

    #[test]
    fn sample_cases_chi_square_sanity() {
        // 10 single-event cases, n=1 over many seeds: each case should be
        // chosen roughly uniformly.
        let mut b = crate::log_model::EventTableBuilder::new();
        for i in 0..10 {
            b.push(&format!("c{i}"), "X", i);
        }
        let log = format_log(b.finish());
        let cases = build_cases_table(&log, 1);
        let trials = 10_000usize;
        let mut observed = [0u64; 10];
        for seed in 0..trials as u64 {
            let out = sample_cases(&log, &cases, 1, seed);
            let case = out.base().case().value(0);
            let idx: usize = case[1..].parse().unwrap();
            observed[idx] += 1;
        }
        let expected = trials as f64 / 10.0;
        let chi2: f64 = observed
            .iter()
            .map(|&o| {
                let d = o as f64 - expected;
                d * d / expected
            })
            .sum();
        // 9 degrees of freedom; 27.88 is the p = 0.001 cut-off.
        assert!(chi2 < 27.88, "chi2 = {chi2}, observed = {observed:?}");
    }

    #[test]
    fn sample_events_takes_prefix() {
        let (log, _) = l1();
        let out = sample_events(&log, 4);
        assert_eq!(out.n_events(), 4);
        assert_eq!(
            decoded(&out),
            decoded(&log)[..4].to_vec()
        );
        // Partial case c2 gets fresh derived columns.
        assert_eq!(out.pos_in_case(), &[0, 1, 2, 0]);
        let all = sample_events(&log, 1000);
        assert!(all.value_eq(&log));
    }

    #[test]
    fn contained_is_subset_of_intersecting() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4242);
        for seed in 0..25 {
            let raw = reference::random_log(seed, &reference::RandomLogConfig::default());
            let log = format_log(raw.to_table());
            let cases = build_cases_table(&log, 2);
            for _ in 0..4 {
                let a = rng.random_range(-1000..12_000i64);
                let b = rng.random_range(-1000..12_000i64);
                let range = TimeRange::new(a.min(b), a.max(b)).unwrap();
                let contained =
                    filter_timestamp(&log, &cases, range, TimestampMode::CasesContained, 2);
                let intersecting =
                    filter_timestamp(&log, &cases, range, TimestampMode::CasesIntersecting, 2);
                let contained_cases: HashSet<String> = decoded(&contained)
                    .into_iter()
                    .map(|(c, _, _)| c)
                    .collect();
                let intersecting_cases: HashSet<String> = decoded(&intersecting)
                    .into_iter()
                    .map(|(c, _, _)| c)
                    .collect();
                assert!(contained_cases.is_subset(&intersecting_cases));
            }
        }
    }

    #[test]
    fn filters_match_reference_on_random_logs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        for seed in 200..225 {
            let raw = reference::random_log(seed, &reference::RandomLogConfig::default());
            let traces = raw.traces();
            let log = format_log(raw.to_table());
            let cases = build_cases_table(&log, 4);

            assert_eq!(
                start_activities(&log, &cases),
                reference::start_activities(&traces)
            );
            assert_eq!(
                end_activities(&log, &cases),
                reference::end_activities(&traces)
            );

            let t1 = rng.random_range(0..6_000i64);
            let t2 = t1 + rng.random_range(0..6_000i64);
            let range = TimeRange::new(t1, t2).unwrap();
            let got = filter_timestamp(&log, &cases, range, TimestampMode::Events, 3);
            assert_eq!(
                reference::log_to_traces(&got),
                reference::filter_timestamp_events(&traces, t1, t2),
                "seed {seed} events"
            );
            let got = filter_timestamp(&log, &cases, range, TimestampMode::CasesContained, 3);
            assert_eq!(
                reference::log_to_traces(&got),
                reference::filter_timestamp_contained(&traces, t1, t2)
            );
            let got = filter_timestamp(&log, &cases, range, TimestampMode::CasesIntersecting, 3);
            assert_eq!(
                reference::log_to_traces(&got),
                reference::filter_timestamp_intersecting(&traces, t1, t2)
            );

            let allowed = set(&["act0", "act3", "act5"]);
            let got = filter_start_activities(&log, &cases, &allowed, 3);
            assert_eq!(
                reference::log_to_traces(&got),
                reference::filter_start_activities(&traces, &allowed)
            );
            let got = filter_end_activities(&log, &cases, &allowed, 3);
            assert_eq!(
                reference::log_to_traces(&got),
                reference::filter_end_activities(&traces, &allowed)
            );

            let (lo, hi) = (1usize, 7usize);
            let got = filter_case_size(&log, &cases, lo, hi, 3).unwrap();
            assert_eq!(
                reference::log_to_traces(&got),
                reference::filter_case_size(&traces, lo, hi)
            );

            let got = filter_throughput(&log, &cases, 100, 4000, 3).unwrap();
            assert_eq!(
                reference::log_to_traces(&got),
                reference::filter_throughput(&traces, 100, 4000)
            );

            let pairs: HashSet<(String, String)> = [
                ("act0".to_string(), "act1".to_string()),
                ("act2".to_string(), "act2".to_string()),
            ]
            .into_iter()
            .collect();
            for mode in [FilterMode::Keep, FilterMode::Remove] {
                let got = filter_paths(&log, &cases, &pairs, mode, 3);
                assert_eq!(
                    reference::log_to_traces(&got),
                    reference::filter_paths(&traces, &pairs, mode == FilterMode::Keep)
                );
            }

            let pred = AttrPredicate::NumericRange(0.0, 900.0);
            let got =
                filter_attribute(&log, &cases, "amount", &pred, FilterLevel::Events, 3).unwrap();
            let matcher = |v: &AttrValue| matches!(v, AttrValue::Int(x) if *x >= 0 && *x <= 900);
            assert_eq!(
                reference::log_to_traces(&got),
                reference::filter_attribute_events(&traces, Some(0), &matcher)
            );
            let got =
                filter_attribute(&log, &cases, "amount", &pred, FilterLevel::Cases, 3).unwrap();
            assert_eq!(
                reference::log_to_traces(&got),
                reference::filter_attribute_cases(&traces, Some(0), &matcher)
            );

            let pred = AttrPredicate::StringIn(set(&["r1", "r4"]));
            let got =
                filter_attribute(&log, &cases, "resource", &pred, FilterLevel::Cases, 3).unwrap();
            let matcher =
                |v: &AttrValue| matches!(v, AttrValue::Str(s) if s == "r1" || s == "r4");
            assert_eq!(
                reference::log_to_traces(&got),
                reference::filter_attribute_cases(&traces, Some(2), &matcher)
            );

            match attribute_values(&log, "resource").unwrap() {
                AttributeSummary::StringCounts(counts) => {
                    assert_eq!(counts, reference::attribute_string_counts(&traces, 2));
                }
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn filters_deterministic_across_workers() {
        let raw = reference::random_log(31, &reference::RandomLogConfig::default());
        let log = format_log(raw.to_table());
        let cases = build_cases_table(&log, 1);
        let range = TimeRange::new(100, 5_000).unwrap();
        let base = filter_timestamp(&log, &cases, range, TimestampMode::CasesIntersecting, 1);
        for k in [2, 4, 8] {
            let got = filter_timestamp(&log, &cases, range, TimestampMode::CasesIntersecting, k);
            assert!(got.value_eq(&base));
        }
    }
}
