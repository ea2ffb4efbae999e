//! Shared fixtures for the criterion benches.

use colmine::synth::{generate, SynthConfig};
use colmine::{build_cases_table, format_log, CaseTable, EventTable, FormattedLog};

/// Synthetic log of roughly `n_cases * 10` events with the benchmark-log
/// shape (11 activities, 231 variants).
pub fn sample_table(n_cases: usize) -> EventTable {
    generate(&SynthConfig {
        n_cases,
        n_activities: 11,
        n_variants: 231.min(n_cases),
        min_case_len: 8,
        max_case_len: 12,
        seed: 7,
        ..SynthConfig::default()
    })
    .expect("feasible bench config")
}

pub fn prepared(n_cases: usize, workers: usize) -> (FormattedLog, CaseTable) {
    let log = format_log(sample_table(n_cases));
    let cases = build_cases_table(&log, workers);
    (log, cases)
}
