//! Directly-follows graph, eventually-follows graph, and temporal profile.
//!
//! All three are case-segmented reductions: each worker folds its cases into
//! an edge accumulator keyed by activity-code pairs, and partials merge by
//! edge-wise integer addition. Small activity alphabets use a dense d*d
//! array, larger ones a hash map; both finalize into string-keyed sorted
//! maps, so the choice is invisible in results.

use std::collections::{BTreeMap, HashMap};

use serde_json::{json, Value};

use crate::format::{CaseTable, FormattedLog};
use crate::parallel::{partition_cases, reduce_over_cases, PartialAggregate};

/// Edge alphabets up to this size aggregate into a dense matrix.
const DENSE_ACTIVITY_LIMIT: usize = 512;

/// Frequency and duration statistics of one directly-follows edge. The
/// duration fields are zero in a frequency-only DFG.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeStats {
    pub count: u64,
    pub sum_ms: i64,
    pub min_ms: i64,
    pub max_ms: i64,
}

impl EdgeStats {
    /// Mean duration, computed from the exact integer sum at read time.
    pub fn mean_ms(&self) -> f64 {
        self.sum_ms as f64 / self.count as f64
    }
}

/// Directly-follows graph keyed by activity names, lexicographically sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct Dfg {
    pub edges: BTreeMap<(String, String), EdgeStats>,
    pub node_counts: BTreeMap<String, u64>,
}

impl Dfg {
    pub fn total_edge_count(&self) -> u64 {
        self.edges.values().map(|e| e.count).sum()
    }

    /// JSON form with stable (lexicographic) ordering.
    pub fn to_json(&self) -> Value {
        let edges: Vec<Value> = self
            .edges
            .iter()
            .map(|((from, to), e)| {
                json!({
                    "from": from,
                    "to": to,
                    "count": e.count,
                    "sum_ms": e.sum_ms,
                    "min_ms": e.min_ms,
                    "max_ms": e.max_ms,
                })
            })
            .collect();
        let mut nodes = serde_json::Map::new();
        for (activity, count) in &self.node_counts {
            nodes.insert(activity.clone(), json!(count));
        }
        json!({ "edges": edges, "nodes": Value::Object(nodes) })
    }

    /// Graphviz digraph with edge counts as labels.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph dfg {\n");
        for (activity, count) in &self.node_counts {
            out.push_str(&format!("  {:?} [label=\"{activity} ({count})\"];\n", activity));
        }
        for ((from, to), e) in &self.edges {
            out.push_str(&format!("  {:?} -> {:?} [label=\"{}\"];\n", from, to, e.count));
        }
        out.push_str("}\n");
        out
    }
}

/// One eventually-follows edge: exact count, duration sum, and sum of
/// squared durations (for the temporal profile's standard deviation).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EfgEdge {
    pub count: u64,
    pub sum_ms: i64,
    pub sumsq_ms: u128,
}

/// Eventually-follows graph keyed by activity names.
#[derive(Debug, Clone, PartialEq)]
pub struct Efg {
    pub edges: BTreeMap<(String, String), EfgEdge>,
}

impl Efg {
    pub fn total_count(&self) -> u64 {
        self.edges.values().map(|e| e.count).sum()
    }

    pub fn to_json(&self) -> Value {
        let edges: Vec<Value> = self
            .edges
            .iter()
            .map(|((from, to), e)| {
                json!({
                    "from": from,
                    "to": to,
                    "count": e.count,
                    "sum_ms": e.sum_ms,
                    // u128 does not fit JSON numbers losslessly.
                    "sumsq_ms": e.sumsq_ms.to_string(),
                })
            })
            .collect();
        json!({ "edges": edges })
    }
}

/// Mean and population standard deviation of one eventually-follows pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileEntry {
    pub mean_ms: f64,
    pub stdev_ms: f64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TemporalProfile {
    pub entries: BTreeMap<(String, String), ProfileEntry>,
}

impl TemporalProfile {
    pub fn to_json(&self) -> Value {
        let entries: Vec<Value> = self
            .entries
            .iter()
            .map(|((from, to), p)| {
                json!({
                    "from": from,
                    "to": to,
                    "count": p.count,
                    "mean_ms": p.mean_ms,
                    "stdev_ms": p.stdev_ms,
                })
            })
            .collect();
        json!({ "entries": entries })
    }
}

// ---------------------------------------------------------------------------
// Edge accumulators
// ---------------------------------------------------------------------------

trait EdgeCell: Clone + Send {
    fn empty() -> Self;
    fn is_empty(&self) -> bool;
    fn absorb(&mut self, duration_ms: i64);
    fn merge(&mut self, other: &Self);
}

#[derive(Clone, Debug, PartialEq)]
struct FreqCell(u64);

impl EdgeCell for FreqCell {
    fn empty() -> Self {
        FreqCell(0)
    }
    fn is_empty(&self) -> bool {
        self.0 == 0
    }
    fn absorb(&mut self, _duration_ms: i64) {
        self.0 += 1;
    }
    fn merge(&mut self, other: &Self) {
        self.0 += other.0;
    }
}

#[derive(Clone, Debug, PartialEq)]
struct PerfCell {
    count: u64,
    sum_ms: i64,
    min_ms: i64,
    max_ms: i64,
}

impl EdgeCell for PerfCell {
    fn empty() -> Self {
        PerfCell {
            count: 0,
            sum_ms: 0,
            min_ms: i64::MAX,
            max_ms: i64::MIN,
        }
    }
    fn is_empty(&self) -> bool {
        self.count == 0
    }
    fn absorb(&mut self, duration_ms: i64) {
        self.count += 1;
        self.sum_ms += duration_ms;
        self.min_ms = self.min_ms.min(duration_ms);
        self.max_ms = self.max_ms.max(duration_ms);
    }
    fn merge(&mut self, other: &Self) {
        if other.count == 0 {
            return;
        }
        self.count += other.count;
        self.sum_ms += other.sum_ms;
        self.min_ms = self.min_ms.min(other.min_ms);
        self.max_ms = self.max_ms.max(other.max_ms);
    }
}

#[derive(Clone, Debug, PartialEq)]
struct EfgCell {
    count: u64,
    sum_ms: i64,
    sumsq_ms: u128,
}

impl EdgeCell for EfgCell {
    fn empty() -> Self {
        EfgCell {
            count: 0,
            sum_ms: 0,
            sumsq_ms: 0,
        }
    }
    fn is_empty(&self) -> bool {
        self.count == 0
    }
    fn absorb(&mut self, duration_ms: i64) {
        self.count += 1;
        self.sum_ms += duration_ms;
        self.sumsq_ms += (duration_ms as i128 * duration_ms as i128) as u128;
    }
    fn merge(&mut self, other: &Self) {
        self.count += other.count;
        self.sum_ms += other.sum_ms;
        self.sumsq_ms += other.sumsq_ms;
    }
}

#[derive(Clone)]
enum PairStore<C> {
    Empty,
    Dense { d: usize, cells: Vec<C> },
    Sparse(HashMap<u64, C>),
}

#[derive(Clone)]
struct PairAccum<C> {
    store: PairStore<C>,
    node_counts: Vec<u64>,
}

impl<C: EdgeCell> PairAccum<C> {
    fn ensure(&mut self, d: usize) {
        if matches!(self.store, PairStore::Empty) {
            self.store = if d <= DENSE_ACTIVITY_LIMIT {
                PairStore::Dense {
                    d,
                    cells: vec![C::empty(); d * d],
                }
            } else {
                PairStore::Sparse(HashMap::new())
            };
        }
    }

    #[inline]
    fn cell(&mut self, a: u32, b: u32) -> &mut C {
        match &mut self.store {
            PairStore::Dense { d, cells } => &mut cells[a as usize * *d + b as usize],
            PairStore::Sparse(map) => map
                .entry((a as u64) << 32 | b as u64)
                .or_insert_with(C::empty),
            PairStore::Empty => unreachable!("ensure() runs before cell()"),
        }
    }

    fn bump_node(&mut self, code: u32) {
        let idx = code as usize;
        if idx >= self.node_counts.len() {
            self.node_counts.resize(idx + 1, 0);
        }
        self.node_counts[idx] += 1;
    }

    /// Consumes the accumulator into (edges, node counts).
    fn into_parts(self) -> (Vec<(u32, u32, C)>, Vec<u64>) {
        let edges = match self.store {
            PairStore::Empty => Vec::new(),
            PairStore::Dense { d, cells } => cells
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_empty())
                .map(|(i, c)| ((i / d) as u32, (i % d) as u32, c))
                .collect(),
            PairStore::Sparse(map) => map
                .into_iter()
                .map(|(k, c)| ((k >> 32) as u32, k as u32, c))
                .collect(),
        };
        (edges, self.node_counts)
    }
}

impl<C: EdgeCell> PartialAggregate for PairAccum<C> {
    fn identity() -> Self {
        PairAccum {
            store: PairStore::Empty,
            node_counts: Vec::new(),
        }
    }

    fn merge(&mut self, other: Self) {
        for (i, count) in other.node_counts.into_iter().enumerate() {
            if count > 0 {
                if i >= self.node_counts.len() {
                    self.node_counts.resize(i + 1, 0);
                }
                self.node_counts[i] += count;
            }
        }
        match (&mut self.store, other.store) {
            (_, PairStore::Empty) => {}
            (store @ PairStore::Empty, theirs) => *store = theirs,
            (PairStore::Dense { cells, .. }, PairStore::Dense { cells: theirs, .. }) => {
                for (mine, other_cell) in cells.iter_mut().zip(&theirs) {
                    mine.merge(other_cell);
                }
            }
            (PairStore::Sparse(map), PairStore::Sparse(theirs)) => {
                for (k, c) in theirs {
                    map.entry(k).or_insert_with(C::empty).merge(&c);
                }
            }
            // All folds of one reduction size their stores identically.
            _ => unreachable!("mismatched pair-store shapes"),
        }
    }
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

fn dfg_reduce<C: EdgeCell>(
    log: &FormattedLog,
    cases: &CaseTable,
    workers: usize,
    with_durations: bool,
) -> PairAccum<C> {
    let d = log.base().activity().dict().len();
    let partition = partition_cases(cases, workers.max(1)).expect("workers >= 1");
    let activity = log.base().activity().codes();
    let prev_activity = log.prev_activity_raw();
    let ts = log.base().timestamps();
    let prev_ts = log.prev_ts_raw();
    reduce_over_cases(log, cases, &partition, |acc: &mut PairAccum<C>, case| {
        acc.ensure(d);
        let rows = case.rows();
        for row in rows.clone() {
            acc.bump_node(activity[row]);
        }
        // Skipping the case's first row is exactly the non-null-prev rows.
        for row in rows.skip(1) {
            let duration = if with_durations {
                ts[row] - prev_ts[row]
            } else {
                0
            };
            acc.cell(prev_activity[row], activity[row]).absorb(duration);
        }
    })
}

/// Frequency DFG: one count per row whose previous-event column is non-null.
/// Duration fields of the result are zero.
pub fn frequency_dfg(log: &FormattedLog, cases: &CaseTable, workers: usize) -> Dfg {
    let (raw_edges, nodes) = dfg_reduce::<FreqCell>(log, cases, workers, false).into_parts();
    let dict = log.base().activity().dict();
    let edges = raw_edges
        .into_iter()
        .map(|(a, b, FreqCell(count))| {
            (
                (dict.value(a).to_string(), dict.value(b).to_string()),
                EdgeStats {
                    count,
                    sum_ms: 0,
                    min_ms: 0,
                    max_ms: 0,
                },
            )
        })
        .collect();
    Dfg {
        edges,
        node_counts: node_map(log, &nodes),
    }
}

/// Performance DFG: per edge, the duration `ts - prev_ts` accumulated into
/// exact integer count/sum/min/max.
pub fn performance_dfg(log: &FormattedLog, cases: &CaseTable, workers: usize) -> Dfg {
    let (raw_edges, nodes) = dfg_reduce::<PerfCell>(log, cases, workers, true).into_parts();
    let dict = log.base().activity().dict();
    let edges = raw_edges
        .into_iter()
        .map(|(a, b, cell)| {
            (
                (dict.value(a).to_string(), dict.value(b).to_string()),
                EdgeStats {
                    count: cell.count,
                    sum_ms: cell.sum_ms,
                    min_ms: cell.min_ms,
                    max_ms: cell.max_ms,
                },
            )
        })
        .collect();
    Dfg {
        edges,
        node_counts: node_map(log, &nodes),
    }
}

fn node_map(log: &FormattedLog, counts: &[u64]) -> BTreeMap<String, u64> {
    let dict = log.base().activity().dict();
    counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(code, &c)| (dict.value(code as u32).to_string(), c))
        .collect()
}

/// Eventually-follows graph: every ordered in-case pair (i < j) counts once,
/// with duration `ts_j - ts_i`.
pub fn efg(log: &FormattedLog, cases: &CaseTable, workers: usize) -> Efg {
    let d = log.base().activity().dict().len();
    let partition = partition_cases(cases, workers.max(1)).expect("workers >= 1");
    let acc = reduce_over_cases(
        log,
        cases,
        &partition,
        |acc: &mut PairAccum<EfgCell>, case| {
            acc.ensure(d);
            let activities = case.activities();
            let timestamps = case.timestamps();
            for i in 0..activities.len() {
                for j in (i + 1)..activities.len() {
                    acc.cell(activities[i], activities[j])
                        .absorb(timestamps[j] - timestamps[i]);
                }
            }
        },
    );
    let dict = log.base().activity().dict();
    let (raw_edges, _) = acc.into_parts();
    let edges = raw_edges
        .into_iter()
        .map(|(a, b, cell)| {
            (
                (dict.value(a).to_string(), dict.value(b).to_string()),
                EfgEdge {
                    count: cell.count,
                    sum_ms: cell.sum_ms,
                    sumsq_ms: cell.sumsq_ms,
                },
            )
        })
        .collect();
    Efg { edges }
}

/// Temporal profile: per eventually-follows pair, mean and population
/// standard deviation derived from the exact integer sums.
pub fn temporal_profile(efg: &Efg) -> TemporalProfile {
    let entries = efg
        .edges
        .iter()
        .map(|(key, e)| {
            let mean = e.sum_ms as f64 / e.count as f64;
            (
                key.clone(),
                ProfileEntry {
                    mean_ms: mean,
                    stdev_ms: population_stdev(e.count, e.sum_ms, e.sumsq_ms),
                    count: e.count,
                },
            )
        })
        .collect();
    TemporalProfile { entries }
}

/// sqrt((n * sumsq - sum^2) / n^2), exactly in integers when it fits.
fn population_stdev(count: u64, sum_ms: i64, sumsq_ms: u128) -> f64 {
    let n = count as i128;
    let sum = sum_ms as i128;
    let exact = i128::try_from(sumsq_ms)
        .ok()
        .and_then(|sumsq| n.checked_mul(sumsq))
        .and_then(|ns| ns.checked_sub(sum.checked_mul(sum)?));
    let variance = match exact {
        Some(numerator) => numerator.max(0) as f64 / (n * n) as f64,
        // Magnitudes beyond i128: fall back to floating point.
        None => {
            let mean = sum_ms as f64 / count as f64;
            (sumsq_ms as f64 / count as f64 - mean * mean).max(0.0)
        }
    };
    variance.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::{build_cases_table, format_log};
    use crate::reference;
    use crate::synth::replicate;

    fn l1() -> (FormattedLog, CaseTable) {
        let log = format_log(reference::fixture_l1().to_table());
        let cases = build_cases_table(&log, 1);
        (log, cases)
    }

    fn edge(dfg: &Dfg, a: &str, b: &str) -> Option<EdgeStats> {
        dfg.edges.get(&(a.to_string(), b.to_string())).cloned()
    }

    #[test]
    fn l1_frequency_dfg() {
        let (log, cases) = l1();
        let dfg = frequency_dfg(&log, &cases, 2);
        assert_eq!(edge(&dfg, "A", "B").unwrap().count, 2);
        assert_eq!(edge(&dfg, "B", "C").unwrap().count, 2);
        assert_eq!(edge(&dfg, "A", "C").unwrap().count, 1);
        assert_eq!(dfg.edges.len(), 3);
        assert_eq!(dfg.node_counts["A"], 3);
        assert_eq!(dfg.node_counts["B"], 2);
        assert_eq!(dfg.node_counts["C"], 3);
        // Sum law: n_events - n_cases.
        assert_eq!(dfg.total_edge_count(), 8 - 3);
    }

    #[test]
    fn empty_log_has_empty_dfg() {
        let log = format_log(crate::log_model::EventTableBuilder::new().finish());
        let cases = build_cases_table(&log, 1);
        let dfg = frequency_dfg(&log, &cases, 4);
        assert!(dfg.edges.is_empty());
        assert!(dfg.node_counts.is_empty());
    }

    #[test]
    fn l1_performance_dfg() {
        let (log, cases) = l1();
        let dfg = performance_dfg(&log, &cases, 3);
        let ab = edge(&dfg, "A", "B").unwrap();
        assert_eq!(ab.count, 2);
        assert_eq!(ab.sum_ms, 60);
        assert_eq!(ab.min_ms, 10);
        assert_eq!(ab.max_ms, 50);
        assert!((ab.mean_ms() - 30.0).abs() < 1e-12);
        let ac = edge(&dfg, "A", "C").unwrap();
        assert_eq!(ac.count, 1);
        assert!((ac.mean_ms() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn equal_consecutive_timestamps_give_zero_duration() {
        let mut b = crate::log_model::EventTableBuilder::new();
        b.push("c", "X", 500);
        b.push("c", "Y", 500);
        let log = format_log(b.finish());
        let cases = build_cases_table(&log, 1);
        let dfg = performance_dfg(&log, &cases, 1);
        let xy = edge(&dfg, "X", "Y").unwrap();
        assert_eq!(xy.min_ms, 0);
        assert_eq!(xy.max_ms, 0);
    }

    #[test]
    fn l1_efg_counts_and_sums() {
        let (log, cases) = l1();
        let g = efg(&log, &cases, 2);
        let get = |a: &str, b: &str| g.edges.get(&(a.to_string(), b.to_string())).unwrap();
        assert_eq!(get("A", "B").count, 2);
        assert_eq!(get("A", "C").count, 3);
        assert_eq!(get("B", "C").count, 2);
        assert_eq!(g.edges.len(), 3);
        assert_eq!(get("A", "C").sum_ms, 130);
        // Sum law: sum over cases of m(m-1)/2 = 3 + 1 + 3.
        assert_eq!(g.total_count(), 7);
    }

    #[test]
    fn single_event_cases_give_empty_efg() {
        let mut b = crate::log_model::EventTableBuilder::new();
        b.push("c1", "X", 0);
        b.push("c2", "Y", 5);
        let log = format_log(b.finish());
        let cases = build_cases_table(&log, 1);
        assert!(efg(&log, &cases, 2).edges.is_empty());
    }

    #[test]
    fn l1_temporal_profile() {
        let (log, cases) = l1();
        let profile = temporal_profile(&efg(&log, &cases, 1));
        let ac = &profile.entries[&("A".to_string(), "C".to_string())];
        // Durations {20, 10, 100}: mean 130/3, population stdev
        // sqrt((3*10500 - 130^2) / 9).
        let expected_mean = 130.0 / 3.0;
        let expected_stdev = (14_600.0f64 / 9.0).sqrt();
        assert!((ac.mean_ms - expected_mean).abs() < 1e-9);
        assert!((ac.stdev_ms - expected_stdev).abs() < 1e-9);
        assert_eq!(ac.count, 3);
    }

    #[test]
    fn single_observation_has_zero_stdev() {
        let mut b = crate::log_model::EventTableBuilder::new();
        b.push("c", "X", 0);
        b.push("c", "Y", 7);
        let log = format_log(b.finish());
        let cases = build_cases_table(&log, 1);
        let profile = temporal_profile(&efg(&log, &cases, 1));
        let xy = &profile.entries[&("X".to_string(), "Y".to_string())];
        assert_eq!(xy.count, 1);
        assert!((xy.mean_ms - 7.0).abs() < 1e-12);
        assert_eq!(xy.stdev_ms, 0.0);
    }

    #[test]
    fn equal_durations_have_exactly_zero_stdev() {
        let mut b = crate::log_model::EventTableBuilder::new();
        for case in ["c1", "c2", "c3"] {
            b.push(case, "X", 0);
            b.push(case, "Y", 250);
        }
        let log = format_log(b.finish());
        let cases = build_cases_table(&log, 2);
        let profile = temporal_profile(&efg(&log, &cases, 2));
        let xy = &profile.entries[&("X".to_string(), "Y".to_string())];
        assert_eq!(xy.count, 3);
        assert_eq!(xy.stdev_ms, 0.0);
    }

    #[test]
    fn replication_scales_counts_keeps_means() {
        let table = reference::fixture_l1().to_table();
        let base_log = format_log(table.clone());
        let base_cases = build_cases_table(&base_log, 1);
        let base_freq = frequency_dfg(&base_log, &base_cases, 1);
        let base_perf = performance_dfg(&base_log, &base_cases, 1);

        for k in [5usize, 10] {
            let log = format_log(replicate(&table, k));
            let cases = build_cases_table(&log, 2);
            let freq = frequency_dfg(&log, &cases, 2);
            assert_eq!(freq.edges.len(), base_freq.edges.len());
            for (key, e) in &freq.edges {
                assert_eq!(e.count, base_freq.edges[key].count * k as u64, "{key:?}");
            }
            let perf = performance_dfg(&log, &cases, 2);
            for (key, e) in &perf.edges {
                let base = &base_perf.edges[key];
                assert_eq!(e.count, base.count * k as u64);
                assert!((e.mean_ms() - base.mean_ms()).abs() < 1e-12);
                assert_eq!(e.min_ms, base.min_ms);
                assert_eq!(e.max_ms, base.max_ms);
            }
        }
    }

    #[test]
    fn structural_sums_on_random_logs() {
        for seed in 0..30 {
            let raw = reference::random_log(seed, &reference::RandomLogConfig::default());
            let log = format_log(raw.to_table());
            let cases = build_cases_table(&log, 3);
            let dfg = frequency_dfg(&log, &cases, 3);
            assert_eq!(
                dfg.total_edge_count(),
                (log.n_events() - cases.n_cases()) as u64,
                "seed {seed}"
            );
            let g = efg(&log, &cases, 3);
            let expected: u64 = cases
                .n_events_in_case()
                .iter()
                .map(|&m| {
                    let m = m as u64;
                    m * (m - 1) / 2
                })
                .sum();
            assert_eq!(g.total_count(), expected, "seed {seed}");
        }
    }

    #[test]
    fn oracle_equivalence_on_random_logs() {
        for seed in 100..140 {
            let raw = reference::random_log(seed, &reference::RandomLogConfig::default());
            let traces = raw.traces();
            let log = format_log(raw.to_table());
            let cases = build_cases_table(&log, 4);

            let dfg = frequency_dfg(&log, &cases, 4);
            let expected_freq = reference::dfg_frequency(&traces);
            let got_freq: BTreeMap<(String, String), u64> = dfg
                .edges
                .iter()
                .map(|(k, e)| (k.clone(), e.count))
                .collect();
            assert_eq!(got_freq, expected_freq, "seed {seed}");
            assert_eq!(dfg.node_counts, reference::node_counts(&traces));

            let perf = performance_dfg(&log, &cases, 4);
            let expected_perf = reference::dfg_performance(&traces);
            assert_eq!(perf.edges.len(), expected_perf.len());
            for (key, e) in &perf.edges {
                let r = &expected_perf[key];
                assert_eq!((e.count, e.sum_ms, e.min_ms, e.max_ms),
                           (r.count, r.sum_ms, r.min_ms, r.max_ms));
            }

            let g = efg(&log, &cases, 4);
            let expected_efg = reference::efg_durations(&traces);
            assert_eq!(g.edges.len(), expected_efg.len());
            for (key, e) in &g.edges {
                let durations = &expected_efg[key];
                assert_eq!(e.count, durations.len() as u64);
                assert_eq!(e.sum_ms, durations.iter().sum::<i64>());
            }
        }
    }

    #[test]
    fn deterministic_across_worker_counts() {
        let raw = reference::random_log(777, &reference::RandomLogConfig::default());
        let log = format_log(raw.to_table());
        let cases = build_cases_table(&log, 1);
        let base_freq = frequency_dfg(&log, &cases, 1);
        let base_perf = performance_dfg(&log, &cases, 1);
        let base_efg = efg(&log, &cases, 1);
        for k in [2, 4, 8] {
            assert_eq!(frequency_dfg(&log, &cases, k), base_freq);
            assert_eq!(performance_dfg(&log, &cases, k), base_perf);
            assert_eq!(efg(&log, &cases, k), base_efg);
        }
    }

    fn accum_from<C: EdgeCell>(observations: &[(u32, u32, i64)], d: usize) -> PairAccum<C> {
        let mut acc: PairAccum<C> = PairAccum::identity();
        acc.ensure(d);
        for &(a, b, duration) in observations {
            acc.bump_node(a);
            acc.cell(a, b).absorb(duration);
        }
        acc
    }

    fn merged<C: EdgeCell>(mut a: PairAccum<C>, b: PairAccum<C>) -> PairAccum<C> {
        a.merge(b);
        a
    }

    /// Canonical form for comparing accumulators: sorted edges plus node
    /// counts with trailing zeros trimmed.
    fn canon<C: EdgeCell>(acc: PairAccum<C>) -> (Vec<(u32, u32, C)>, Vec<u64>) {
        let (mut edges, mut nodes) = acc.into_parts();
        edges.sort_by_key(|&(a, b, _)| (a, b));
        while nodes.last() == Some(&0) {
            nodes.pop();
        }
        (edges, nodes)
    }

    fn check_merge_laws<C>(x: &[(u32, u32, i64)], y: &[(u32, u32, i64)], z: &[(u32, u32, i64)])
    where
        C: EdgeCell + PartialEq + std::fmt::Debug,
    {
        let d = 6;
        let (ax, ay, az) = (
            accum_from::<C>(x, d),
            accum_from::<C>(y, d),
            accum_from::<C>(z, d),
        );
        // Identity.
        assert_eq!(
            canon(merged(PairAccum::identity(), ax.clone())),
            canon(ax.clone())
        );
        assert_eq!(
            canon(merged(ax.clone(), PairAccum::identity())),
            canon(ax.clone())
        );
        // Commutativity.
        assert_eq!(
            canon(merged(ax.clone(), ay.clone())),
            canon(merged(ay.clone(), ax.clone()))
        );
        // Associativity.
        assert_eq!(
            canon(merged(merged(ax.clone(), ay.clone()), az.clone())),
            canon(merged(ax.clone(), merged(ay.clone(), az.clone())))
        );
    }

    proptest::proptest! {
        #[test]
        fn merge_laws_hold_for_every_accumulator(
            x in proptest::collection::vec((0u32..6, 0u32..6, 0i64..10_000), 0..40),
            y in proptest::collection::vec((0u32..6, 0u32..6, 0i64..10_000), 0..40),
            z in proptest::collection::vec((0u32..6, 0u32..6, 0i64..10_000), 0..40),
        ) {
            check_merge_laws::<FreqCell>(&x, &y, &z);
            check_merge_laws::<PerfCell>(&x, &y, &z);
            check_merge_laws::<EfgCell>(&x, &y, &z);
        }
    }

    #[test]
    fn json_has_sorted_edges() {
        let (log, cases) = l1();
        let json = frequency_dfg(&log, &cases, 1).to_json();
        let edges = json["edges"].as_array().unwrap();
        let keys: Vec<(String, String)> = edges
            .iter()
            .map(|e| {
                (
                    e["from"].as_str().unwrap().to_string(),
                    e["to"].as_str().unwrap().to_string(),
                )
            })
            .collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert_eq!(json["nodes"]["A"], 3);
    }
}
