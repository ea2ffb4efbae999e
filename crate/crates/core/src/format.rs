//! Log preparation: canonical sort, previous-event columns, and the cases
//! table.
//!
//! [`format_log`] reorders events by (case, timestamp, original index) so
//! every case occupies one contiguous row range, then derives the position
//! of each event inside its case and the activity/timestamp of the previous
//! event. [`build_cases_table`] aggregates one row per case and assigns a
//! verified variant id: cases are bucketed by a 128-bit hash of their
//! activity-code sequence and then compared by exact sequence, so a hash
//! collision can never merge two distinct variants.

use std::collections::HashMap;

use crate::log_model::EventTable;
use crate::parallel::{partition_loads, run_segments};

/// An [`EventTable`] in canonical order plus the derived per-event columns.
///
/// The derived columns are total functions of the base table: `pos_in_case`
/// is 0 exactly at each case's first event, and the previous-event columns
/// are null exactly there (the raw arrays hold 0 at those rows; use the
/// `Option` accessors unless iterating with `pos_in_case` at hand).
#[derive(Debug, Clone, PartialEq)]
pub struct FormattedLog {
    base: EventTable,
    pos_in_case: Vec<u32>,
    prev_activity: Vec<u32>,
    prev_ts: Vec<i64>,
}

impl FormattedLog {
    pub fn base(&self) -> &EventTable {
        &self.base
    }

    pub fn n_events(&self) -> usize {
        self.base.n_events()
    }

    pub fn pos_in_case(&self) -> &[u32] {
        &self.pos_in_case
    }

    /// Previous activity code, null at the first event of a case. Shares the
    /// activity dictionary of the base table.
    pub fn prev_activity(&self, row: usize) -> Option<u32> {
        (self.pos_in_case[row] != 0).then(|| self.prev_activity[row])
    }

    /// Previous event timestamp, null at the first event of a case.
    pub fn prev_ts(&self, row: usize) -> Option<i64> {
        (self.pos_in_case[row] != 0).then(|| self.prev_ts[row])
    }

    /// Raw previous-activity codes; rows with `pos_in_case == 0` hold 0.
    pub fn prev_activity_raw(&self) -> &[u32] {
        &self.prev_activity
    }

    /// Raw previous-event timestamps; rows with `pos_in_case == 0` hold 0.
    pub fn prev_ts_raw(&self) -> &[i64] {
        &self.prev_ts
    }

    pub fn value_eq(&self, other: &FormattedLog) -> bool {
        self.base.value_eq(&other.base)
            && self.pos_in_case == other.pos_in_case
            && self.prev_ts == other.prev_ts
    }
}

/// Sorts a table into canonical order and derives the per-event columns.
///
/// The sort key is (case code, timestamp, original row index); the index
/// makes the key total, so ties between equal timestamps keep ingest order.
/// Formatting an already formatted base is the identity permutation.
pub fn format_log(table: EventTable) -> FormattedLog {
    let case_codes = table.case().codes();
    let ts = table.timestamps();
    let n = table.n_events();

    let sorted = (1..n).all(|i| {
        (case_codes[i - 1], ts[i - 1]) <= (case_codes[i], ts[i])
    });
    let base = if sorted {
        table
    } else {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.sort_unstable_by_key(|&i| (case_codes[i], ts[i], i));
        table.permuted(&perm)
    };

    let case_codes = base.case().codes();
    let activity_codes = base.activity().codes();
    let ts = base.timestamps();
    let mut pos_in_case = vec![0u32; n];
    let mut prev_activity = vec![0u32; n];
    let mut prev_ts = vec![0i64; n];
    for i in 0..n {
        if i > 0 && case_codes[i] == case_codes[i - 1] {
            pos_in_case[i] = pos_in_case[i - 1] + 1;
            prev_activity[i] = activity_codes[i - 1];
            prev_ts[i] = ts[i - 1];
        }
    }
    FormattedLog {
        base,
        pos_in_case,
        prev_activity,
        prev_ts,
    }
}

/// One row per case: row range into the formatted log, event count, start
/// and end timestamps, throughput time, and the verified variant identity.
///
/// Cases are ordered by ascending case code, which equals first occurrence
/// in the pre-format table. Row ranges partition `[0, n_events)` exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseTable {
    case_code: Vec<u32>,
    first_row: Vec<u32>,
    n_events_in_case: Vec<u32>,
    start_ts: Vec<i64>,
    end_ts: Vec<i64>,
    throughput_ms: Vec<i64>,
    variant_hash: Vec<u128>,
    variant_id: Vec<u32>,
    n_variants: u32,
}

impl CaseTable {
    pub fn n_cases(&self) -> usize {
        self.case_code.len()
    }

    pub fn case_code(&self, case: usize) -> u32 {
        self.case_code[case]
    }

    /// Row range of a case in the formatted log.
    #[inline]
    pub fn rows_of(&self, case: usize) -> std::ops::Range<usize> {
        let first = self.first_row[case] as usize;
        first..first + self.n_events_in_case[case] as usize
    }

    pub fn n_events_in_case(&self) -> &[u32] {
        &self.n_events_in_case
    }

    pub fn start_ts(&self) -> &[i64] {
        &self.start_ts
    }

    pub fn end_ts(&self) -> &[i64] {
        &self.end_ts
    }

    pub fn throughput_ms(&self) -> &[i64] {
        &self.throughput_ms
    }

    pub fn variant_hash(&self) -> &[u128] {
        &self.variant_hash
    }

    /// Dense variant id per case; equal id if and only if equal activity
    /// sequence.
    pub fn variant_id(&self) -> &[u32] {
        &self.variant_id
    }

    pub fn n_variants(&self) -> usize {
        self.n_variants as usize
    }
}

/// Two independent 64-bit polynomial rolling hashes over the activity-code
/// sequence, combined into one 128-bit value. Collisions only cost a
/// sequence comparison, never correctness.
pub(crate) fn variant_hash(activity_codes: &[u32]) -> u128 {
    const SEED1: u64 = 0x9e37_79b9_7f4a_7c15;
    const SEED2: u64 = 0xc2b2_ae3d_27d4_eb4f;
    const MUL1: u64 = 0x0000_0100_0000_01b3;
    const MUL2: u64 = 0x5851_f42d_4c95_7f2d;
    let mut h1 = SEED1;
    let mut h2 = SEED2;
    for &code in activity_codes {
        let c = code as u64 + 1;
        h1 = h1.wrapping_mul(MUL1).wrapping_add(c);
        h2 = h2.wrapping_mul(MUL2).wrapping_add(c);
    }
    (h1 as u128) << 64 | h2 as u128
}

/// Builds the per-case table from a formatted log.
///
/// Per-case aggregation runs over case-respecting segments (at most
/// `workers` of them); variant-id assignment is a sequential pass in case
/// order, so output is identical for every worker count.
pub fn build_cases_table(log: &FormattedLog, workers: usize) -> CaseTable {
    let case_codes = log.base().case().codes();
    let activity_codes = log.base().activity().codes();
    let ts = log.base().timestamps();
    let n = log.n_events();

    let mut case_code = Vec::new();
    let mut first_row: Vec<u32> = Vec::new();
    let mut n_events_in_case: Vec<u32> = Vec::new();
    let mut i = 0;
    while i < n {
        let code = case_codes[i];
        let start = i;
        while i < n && case_codes[i] == code {
            i += 1;
        }
        case_code.push(code);
        first_row.push(start as u32);
        n_events_in_case.push((i - start) as u32);
    }
    let n_cases = case_code.len();

    let segments = partition_loads(&n_events_in_case, workers.max(1));
    let per_segment = run_segments(&segments, |range| {
        let mut stats = Vec::with_capacity(range.len());
        for case in range {
            let first = first_row[case] as usize;
            let len = n_events_in_case[case] as usize;
            let rows = first..first + len;
            let start_ts = ts[rows.start];
            let end_ts = ts[rows.end - 1];
            let hash = variant_hash(&activity_codes[rows]);
            stats.push((start_ts, end_ts, hash));
        }
        stats
    });

    let mut start_ts = Vec::with_capacity(n_cases);
    let mut end_ts = Vec::with_capacity(n_cases);
    let mut throughput_ms = Vec::with_capacity(n_cases);
    let mut variant_hashes = Vec::with_capacity(n_cases);
    for stats in per_segment {
        for (s, e, h) in stats {
            start_ts.push(s);
            end_ts.push(e);
            throughput_ms.push(e - s);
            variant_hashes.push(h);
        }
    }

    // Hash-bucketed dedup with exact verification: within a bucket, compare
    // the candidate's sequence against each representative before reusing a
    // variant id.
    let mut variant_id = vec![0u32; n_cases];
    let mut buckets: HashMap<u128, Vec<(usize, u32)>> = HashMap::new();
    let mut next_id = 0u32;
    for case in 0..n_cases {
        let rows = first_row[case] as usize
            ..first_row[case] as usize + n_events_in_case[case] as usize;
        let seq = &activity_codes[rows];
        let candidates = buckets.entry(variant_hashes[case]).or_default();
        let mut assigned = None;
        for &(repr_case, id) in candidates.iter() {
            let repr_rows = first_row[repr_case] as usize
                ..first_row[repr_case] as usize + n_events_in_case[repr_case] as usize;
            if &activity_codes[repr_rows] == seq {
                assigned = Some(id);
                break;
            }
        }
        variant_id[case] = match assigned {
            Some(id) => id,
            None => {
                let id = next_id;
                next_id += 1;
                candidates.push((case, id));
                id
            }
        };
    }

    CaseTable {
        case_code,
        first_row,
        n_events_in_case,
        start_ts,
        end_ts,
        throughput_ms,
        variant_hash: variant_hashes,
        variant_id,
        n_variants: next_id,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference;

    fn l1() -> FormattedLog {
        format_log(reference::fixture_l1().to_table())
    }

    #[test]
    fn l1_groups_cases_and_derives_prev_columns() {
        let log = l1();
        let t = log.base();
        let decoded: Vec<(&str, &str, i64)> = (0..t.n_events())
            .map(|i| (t.case().value(i), t.activity().value(i), t.timestamps()[i]))
            .collect();
        assert_eq!(
            decoded,
            vec![
                ("c1", "A", 0),
                ("c1", "B", 10),
                ("c1", "C", 20),
                ("c2", "A", 5),
                ("c2", "C", 15),
                ("c3", "A", 0),
                ("c3", "B", 50),
                ("c3", "C", 100),
            ]
        );
        let prev_of = |row: usize| {
            log.prev_activity(row)
                .map(|c| t.activity().dict().value(c).to_string())
        };
        assert_eq!(prev_of(0), None);
        assert_eq!(prev_of(1), Some("A".to_string()));
        assert_eq!(prev_of(2), Some("B".to_string()));
        assert_eq!(log.pos_in_case(), &[0, 1, 2, 0, 1, 0, 1, 2]);
        assert_eq!(log.prev_ts(3), None);
        assert_eq!(log.prev_ts(4), Some(5));
    }

    #[test]
    fn equal_timestamps_keep_ingest_order() {
        let mut b = crate::log_model::EventTableBuilder::new();
        b.push("c", "X", 100);
        b.push("c", "Y", 100);
        let log = format_log(b.finish());
        assert_eq!(log.base().activity().value(0), "X");
        assert_eq!(log.base().activity().value(1), "Y");
    }

    #[test]
    fn format_is_idempotent() {
        let log = format_log(reference::fixture_l1().to_table());
        let again = format_log(log.base().clone());
        assert_eq!(again, log);
    }

    #[test]
    fn format_preserves_row_multiset() {
        let raw = reference::random_log(42, &reference::RandomLogConfig::default());
        let table = raw.to_table();
        let mut before: Vec<(String, String, i64)> = (0..table.n_events())
            .map(|i| {
                (
                    table.case().value(i).to_string(),
                    table.activity().value(i).to_string(),
                    table.timestamps()[i],
                )
            })
            .collect();
        let log = format_log(table);
        let t = log.base();
        let mut after: Vec<(String, String, i64)> = (0..t.n_events())
            .map(|i| {
                (
                    t.case().value(i).to_string(),
                    t.activity().value(i).to_string(),
                    t.timestamps()[i],
                )
            })
            .collect();
        before.sort();
        after.sort();
        assert_eq!(before, after);
    }

    #[test]
    fn shuffled_log_formats_like_per_trace_oracle() {
        let raw = reference::random_log(7, &reference::RandomLogConfig::default());
        let log = format_log(raw.to_table());
        let traces = raw.traces();
        let mut row = 0;
        for trace in &traces {
            for (k, ev) in trace.events.iter().enumerate() {
                assert_eq!(log.base().case().value(row), trace.case);
                assert_eq!(log.base().activity().value(row), ev.activity);
                assert_eq!(log.base().timestamps()[row], ev.ts_ms);
                assert_eq!(log.pos_in_case()[row] as usize, k);
                row += 1;
            }
        }
        assert_eq!(row, log.n_events());
    }

    #[test]
    fn l1_cases_table() {
        let log = l1();
        let cases = build_cases_table(&log, 2);
        assert_eq!(cases.n_cases(), 3);
        assert_eq!(cases.n_events_in_case(), &[3, 2, 3]);
        assert_eq!(cases.throughput_ms(), &[20, 10, 100]);
        assert_eq!(cases.start_ts(), &[0, 5, 0]);
        assert_eq!(cases.end_ts(), &[20, 15, 100]);
        let vid = cases.variant_id();
        assert_eq!(vid[0], vid[2]);
        assert_ne!(vid[0], vid[1]);
        assert_eq!(cases.n_variants(), 2);
    }

    #[test]
    fn single_event_case_has_zero_throughput() {
        let mut b = crate::log_model::EventTableBuilder::new();
        b.push("only", "X", 1234);
        let cases = build_cases_table(&format_log(b.finish()), 1);
        assert_eq!(cases.throughput_ms(), &[0]);
    }

    #[test]
    fn row_ranges_partition_all_events() {
        let raw = reference::random_log(3, &reference::RandomLogConfig::default());
        let log = format_log(raw.to_table());
        let cases = build_cases_table(&log, 3);
        let total: usize = cases.n_events_in_case().iter().map(|&x| x as usize).sum();
        assert_eq!(total, log.n_events());
        let mut expected_start = 0usize;
        for case in 0..cases.n_cases() {
            let rows = cases.rows_of(case);
            assert_eq!(rows.start, expected_start);
            expected_start = rows.end;
        }
        assert_eq!(expected_start, log.n_events());
        // Non-null prev entries: one per event that is not first in its case.
        let non_null = (0..log.n_events())
            .filter(|&i| log.prev_activity(i).is_some())
            .count();
        assert_eq!(non_null, log.n_events() - cases.n_cases());
    }

    #[test]
    fn variant_ids_match_exact_sequences() {
        for seed in 0..20 {
            let raw = reference::random_log(seed, &reference::RandomLogConfig::default());
            let log = format_log(raw.to_table());
            let cases = build_cases_table(&log, 4);
            let seqs: Vec<Vec<u32>> = (0..cases.n_cases())
                .map(|c| log.base().activity().codes()[cases.rows_of(c)].to_vec())
                .collect();
            for a in 0..seqs.len() {
                for b in (a + 1)..seqs.len() {
                    assert_eq!(
                        cases.variant_id()[a] == cases.variant_id()[b],
                        seqs[a] == seqs[b],
                        "seed {seed}, cases {a}/{b}"
                    );
                }
            }
        }
    }

    #[test]
    fn cases_table_identical_for_any_worker_count() {
        let raw = reference::random_log(11, &reference::RandomLogConfig::default());
        let log = format_log(raw.to_table());
        let reference_table = build_cases_table(&log, 1);
        for workers in [2, 4, 8] {
            assert_eq!(build_cases_table(&log, workers), reference_table);
        }
    }

    #[test]
    fn replication_doubles_cases_keeps_variants() {
        let table = reference::fixture_l1().to_table();
        let replicated = crate::synth::replicate(&table, 2);
        let log = format_log(replicated);
        let cases = build_cases_table(&log, 2);
        assert_eq!(cases.n_cases(), 6);
        assert_eq!(cases.n_variants(), 2);
    }
}
