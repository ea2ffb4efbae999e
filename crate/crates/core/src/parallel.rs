//! Case-respecting data parallelism.
//!
//! Every parallel aggregation in the engine is expressed the same way: the
//! case table is split into contiguous segments that never cut a case in
//! half, each worker folds its segment's cases into a [`PartialAggregate`],
//! and the partials are merged. Merging is associative and commutative with
//! an identity, and every accumulator uses exact integer arithmetic, so the
//! result is bit-identical for any worker count and any segment assignment.

use std::ops::Range;

use crate::format::{CaseTable, FormattedLog};
use crate::{Error, Result};

/// Contiguous, disjoint case segments covering a [`CaseTable`] exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CasePartition {
    segments: Vec<Range<usize>>,
}

impl CasePartition {
    pub fn segments(&self) -> &[Range<usize>] {
        &self.segments
    }

    pub fn n_segments(&self) -> usize {
        self.segments.len()
    }
}

/// Splits cases into at most `workers` segments balanced by event count.
///
/// The max segment load stays below `ceil(total_events / workers)` plus the
/// largest single case, since case boundaries are never crossed.
pub fn partition_cases(cases: &CaseTable, workers: usize) -> Result<CasePartition> {
    if workers == 0 {
        return Err(Error::Argument("worker count must be at least 1".into()));
    }
    Ok(CasePartition {
        segments: partition_loads(cases.n_events_in_case(), workers),
    })
}

/// Greedy balanced split of `loads` into at most `k` contiguous ranges.
/// A segment closes once it reaches `ceil(total / k)`; the remainder after
/// `k - 1` closes is then at most one target's worth.
pub(crate) fn partition_loads(loads: &[u32], k: usize) -> Vec<Range<usize>> {
    let n = loads.len();
    if n == 0 {
        return Vec::new();
    }
    if k <= 1 {
        return vec![0..n];
    }
    let total: u64 = loads.iter().map(|&x| x as u64).sum();
    let target = total.div_ceil(k as u64).max(1);
    let mut segments = Vec::with_capacity(k);
    let mut start = 0usize;
    let mut load = 0u64;
    for (i, &l) in loads.iter().enumerate() {
        load += l as u64;
        if load >= target && segments.len() < k - 1 {
            segments.push(start..i + 1);
            start = i + 1;
            load = 0;
        }
    }
    if start < n {
        segments.push(start..n);
    }
    segments
}

/// Runs one closure per segment on its own thread and returns the results in
/// segment order. A single segment runs inline.
pub(crate) fn run_segments<T, F>(segments: &[Range<usize>], work: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<usize>) -> T + Sync,
{
    match segments {
        [] => Vec::new(),
        [only] => vec![work(only.clone())],
        _ => std::thread::scope(|scope| {
            let handles: Vec<_> = segments
                .iter()
                .map(|seg| {
                    let work = &work;
                    let seg = seg.clone();
                    scope.spawn(move || work(seg))
                })
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        }),
    }
}

/// Per-algorithm partial aggregate: an identity element plus an associative,
/// commutative merge.
pub trait PartialAggregate: Send {
    fn identity() -> Self;
    fn merge(&mut self, other: Self);
}

/// One case of a formatted log, as seen by a fold function.
#[derive(Clone, Copy)]
pub struct CaseView<'a> {
    log: &'a FormattedLog,
    cases: &'a CaseTable,
    index: usize,
}

impl<'a> CaseView<'a> {
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn case_code(&self) -> u32 {
        self.cases.case_code(self.index)
    }

    /// Row range of this case in the formatted log.
    pub fn rows(&self) -> Range<usize> {
        self.cases.rows_of(self.index)
    }

    pub fn n_events(&self) -> usize {
        self.rows().len()
    }

    /// Activity codes of this case, in order.
    pub fn activities(&self) -> &'a [u32] {
        &self.log.base().activity().codes()[self.rows()]
    }

    pub fn timestamps(&self) -> &'a [i64] {
        &self.log.base().timestamps()[self.rows()]
    }

    pub fn start_ts(&self) -> i64 {
        self.cases.start_ts()[self.index]
    }

    pub fn end_ts(&self) -> i64 {
        self.cases.end_ts()[self.index]
    }

    pub fn throughput_ms(&self) -> i64 {
        self.cases.throughput_ms()[self.index]
    }

    pub fn log(&self) -> &'a FormattedLog {
        self.log
    }
}

/// Folds every case into a [`PartialAggregate`], one accumulator per
/// partition segment, then merges the partials in segment order.
///
/// The result equals the sequential fold over all cases in order and is
/// independent of the worker count and segment assignment.
pub fn reduce_over_cases<A, F>(
    log: &FormattedLog,
    cases: &CaseTable,
    partition: &CasePartition,
    fold_case: F,
) -> A
where
    A: PartialAggregate,
    F: Fn(&mut A, CaseView<'_>) + Sync,
{
    let partials = run_segments(&partition.segments, |range| {
        let mut acc = A::identity();
        for index in range {
            fold_case(&mut acc, CaseView { log, cases, index });
        }
        acc
    });
    let mut result = A::identity();
    for partial in partials {
        result.merge(partial);
    }
    result
}
