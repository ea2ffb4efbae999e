//! Variant retrieval and variant-based filtering.
//!
//! Variant identity is the exact activity sequence of a case. The hashes in
//! [`CaseTable`] only accelerate grouping; the filtering API speaks
//! sequences, never hashes.

use std::collections::HashSet;

use serde_json::{json, Value};

use crate::format::{CaseTable, FormattedLog};

/// Keep or drop the matching cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterMode {
    Keep,
    Remove,
}

/// Distinct activity sequences of a log, with per-variant case counts.
#[derive(Debug, Clone, PartialEq)]
pub struct VariantTable {
    sequences: Vec<Vec<String>>,
    counts: Vec<u64>,
    case_to_variant: Vec<u32>,
}

impl VariantTable {
    pub fn n_variants(&self) -> usize {
        self.sequences.len()
    }

    /// Activity sequence of a variant id.
    pub fn sequence(&self, variant: usize) -> &[String] {
        &self.sequences[variant]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn case_to_variant(&self) -> &[u32] {
        &self.case_to_variant
    }

    pub fn total_cases(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Variants as (sequence, count), sorted by descending count, then
    /// lexicographically. This is also the JSON order.
    pub fn sorted(&self) -> Vec<(&[String], u64)> {
        let mut rows: Vec<(&[String], u64)> = self
            .sequences
            .iter()
            .map(Vec::as_slice)
            .zip(self.counts.iter().copied())
            .collect();
        rows.sort_by(|(seq_a, count_a), (seq_b, count_b)| {
            count_b.cmp(count_a).then_with(|| seq_a.cmp(seq_b))
        });
        rows
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .sorted()
            .into_iter()
            .map(|(seq, count)| json!({ "variant": seq, "count": count }))
            .collect();
        Value::Array(rows)
    }
}

/// Groups cases into variants using the verified variant ids of the cases
/// table (events were already grouped into cases there; this is the second
/// aggregation of the pair).
pub fn get_variants(log: &FormattedLog, cases: &CaseTable) -> VariantTable {
    let dict = log.base().activity().dict();
    let n_variants = cases.n_variants();
    let mut counts = vec![0u64; n_variants];
    let mut sequences: Vec<Option<Vec<String>>> = vec![None; n_variants];
    for case in 0..cases.n_cases() {
        let id = cases.variant_id()[case] as usize;
        counts[id] += 1;
        if sequences[id].is_none() {
            let seq = log.base().activity().codes()[cases.rows_of(case)]
                .iter()
                .map(|&c| dict.value(c).to_string())
                .collect();
            sequences[id] = Some(seq);
        }
    }
    VariantTable {
        sequences: sequences.into_iter().map(|s| s.expect("every id has a case")).collect(),
        counts,
        case_to_variant: cases.variant_id().to_vec(),
    }
}

/// Keeps (or removes) all cases whose activity sequence is in the given
/// collection. Unknown sequences are ignored; relative row order is
/// preserved and the result is freshly formatted.
pub fn filter_by_variants(
    log: &FormattedLog,
    cases: &CaseTable,
    sequences: &[Vec<String>],
    mode: FilterMode,
) -> FormattedLog {
    let dict = log.base().activity().dict();
    // Sequences containing activities the log never saw cannot match.
    let keep_set: HashSet<Vec<u32>> = sequences
        .iter()
        .filter_map(|seq| seq.iter().map(|a| dict.code(a)).collect())
        .collect();
    let activity_codes = log.base().activity().codes();
    let in_set = |case: usize| keep_set.contains(&activity_codes[cases.rows_of(case)]);

    let mut rows = Vec::new();
    for case in 0..cases.n_cases() {
        let matches = in_set(case);
        let keep = match mode {
            FilterMode::Keep => matches,
            FilterMode::Remove => !matches,
        };
        if keep {
            rows.extend(cases.rows_of(case));
        }
    }
    crate::format_log(log.base().take_rows(&rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::{build_cases_table, format_log};
    use crate::reference;

    fn l1() -> (FormattedLog, CaseTable) {
        let log = format_log(reference::fixture_l1().to_table());
        let cases = build_cases_table(&log, 1);
        (log, cases)
    }

    fn seq(parts: &[&str]) -> Vec<String> {
        parts.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn l1_variants() {
        let (log, cases) = l1();
        let variants = get_variants(&log, &cases);
        assert_eq!(variants.n_variants(), 2);
        let sorted = variants.sorted();
        assert_eq!(sorted[0].0, seq(&["A", "B", "C"]).as_slice());
        assert_eq!(sorted[0].1, 2);
        assert_eq!(sorted[1].0, seq(&["A", "C"]).as_slice());
        assert_eq!(sorted[1].1, 1);
        assert_eq!(variants.total_cases(), 3);
    }

    #[test]
    fn single_activity_cases_collapse_to_one_variant() {
        let mut b = crate::log_model::EventTableBuilder::new();
        for i in 0..7 {
            b.push(&format!("c{i}"), "X", i);
        }
        let log = format_log(b.finish());
        let cases = build_cases_table(&log, 2);
        let variants = get_variants(&log, &cases);
        assert_eq!(variants.n_variants(), 1);
        assert_eq!(variants.counts(), &[7]);
        assert_eq!(variants.sequence(0), seq(&["X"]).as_slice());
    }

    #[test]
    fn replication_keeps_variant_set() {
        let table = reference::fixture_l1().to_table();
        let log = format_log(crate::synth::replicate(&table, 20));
        let cases = build_cases_table(&log, 2);
        let variants = get_variants(&log, &cases);
        assert_eq!(variants.n_variants(), 2);
        assert_eq!(variants.total_cases(), 60);
    }

    #[test]
    fn keep_single_variant() {
        let (log, cases) = l1();
        let filtered = filter_by_variants(&log, &cases, &[seq(&["A", "C"])], FilterMode::Keep);
        assert_eq!(filtered.n_events(), 2);
        assert_eq!(filtered.base().case().value(0), "c2");
        assert_eq!(filtered.base().case().value(1), "c2");
    }

    #[test]
    fn keep_all_observed_is_identity() {
        let (log, cases) = l1();
        let all: Vec<Vec<String>> = vec![seq(&["A", "B", "C"]), seq(&["A", "C"])];
        let filtered = filter_by_variants(&log, &cases, &all, FilterMode::Keep);
        assert!(filtered.value_eq(&log));
    }

    #[test]
    fn remove_nothing_is_identity() {
        let (log, cases) = l1();
        let filtered = filter_by_variants(&log, &cases, &[], FilterMode::Remove);
        assert!(filtered.value_eq(&log));
    }

    #[test]
    fn unknown_sequences_are_ignored() {
        let (log, cases) = l1();
        let filtered = filter_by_variants(
            &log,
            &cases,
            &[seq(&["Z", "Z"]), seq(&["A", "C"])],
            FilterMode::Keep,
        );
        assert_eq!(filtered.n_events(), 2);
    }

    #[test]
    fn keep_and_remove_partition_cases() {
        for seed in 0..20 {
            let raw = reference::random_log(seed, &reference::RandomLogConfig::default());
            let log = format_log(raw.to_table());
            let cases = build_cases_table(&log, 2);
            let variants = get_variants(&log, &cases);
            // Pick every other variant as the filter set.
            let set: Vec<Vec<String>> = variants
                .sorted()
                .iter()
                .step_by(2)
                .map(|(s, _)| s.to_vec())
                .collect();
            let kept = filter_by_variants(&log, &cases, &set, FilterMode::Keep);
            let removed = filter_by_variants(&log, &cases, &set, FilterMode::Remove);
            assert_eq!(kept.n_events() + removed.n_events(), log.n_events());
            let kept_cases = build_cases_table(&kept, 1).n_cases();
            let removed_cases = build_cases_table(&removed, 1).n_cases();
            assert_eq!(kept_cases + removed_cases, cases.n_cases());

            // Variants of the kept log are a subset of the filter set.
            let kept_variants = get_variants(&kept, &build_cases_table(&kept, 1));
            for v in 0..kept_variants.n_variants() {
                assert!(set.iter().any(|s| s == kept_variants.sequence(v)));
            }
        }
    }

    #[test]
    fn oracle_equivalence_on_random_logs() {
        use std::collections::HashSet;
        for seed in 50..70 {
            let raw = reference::random_log(seed, &reference::RandomLogConfig::default());
            let traces = raw.traces();
            let log = format_log(raw.to_table());
            let cases = build_cases_table(&log, 4);

            let variants = get_variants(&log, &cases);
            let expected = reference::variants(&traces);
            let got: std::collections::BTreeMap<Vec<String>, u64> = variants
                .sorted()
                .into_iter()
                .map(|(s, c)| (s.to_vec(), c))
                .collect();
            assert_eq!(got, expected, "seed {seed}");

            // Filter by the most frequent variant.
            let top = variants.sorted()[0].0.to_vec();
            let keep_set: HashSet<Vec<String>> = [top.clone()].into_iter().collect();
            let filtered = filter_by_variants(&log, &cases, &[top], FilterMode::Keep);
            let expected_traces = reference::filter_variants(&traces, &keep_set, true);
            assert_eq!(reference::log_to_traces(&filtered), expected_traces);
        }
    }

    #[test]
    fn json_sorted_by_count_then_sequence() {
        let (log, cases) = l1();
        let json = get_variants(&log, &cases).to_json();
        let rows = json.as_array().unwrap();
        assert_eq!(rows[0]["count"], 2);
        assert_eq!(rows[0]["variant"], json!(["A", "B", "C"]));
        assert_eq!(rows[1]["count"], 1);
    }
}
