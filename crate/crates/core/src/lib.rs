//! Columnar, data-parallel process-mining engine.
//!
//! An event log is ingested from CSV (or the `.elt` binary columnar format)
//! into an immutable [`EventTable`] with dictionary-encoded string columns.
//! Three preparation steps turn it into the structures every other operation
//! runs on:
//!
//! 1. [`format_log`] sorts events by (case, timestamp, original index) so each
//!    case occupies one contiguous row range, and derives the position-in-case
//!    and previous-event columns.
//! 2. [`build_cases_table`] aggregates one row per case: row range, event
//!    count, start/end timestamps, throughput time, and a verified variant id.
//! 3. Discovery, filtering, and feature extraction operate on the pair
//!    ([`FormattedLog`], [`CaseTable`]) through a case-respecting parallel
//!    reduction contract ([`parallel::reduce_over_cases`]).
//!
//! All duration aggregates are exact integer sums in milliseconds, so results
//! are bit-identical for any worker count.

pub mod discovery;
pub mod features;
pub mod filters;
pub mod format;
pub mod ingest;
pub mod log_model;
pub mod parallel;
pub mod reference;
pub mod synth;
pub mod variants;

mod error;

pub use error::{Error, Result};
pub use format::{build_cases_table, format_log, CaseTable, FormattedLog};
pub use log_model::{
    dict_encode, AttrValue, Column, ColumnData, Dictionary, EventTable, EventTableBuilder,
    NullMask, Violation,
};
pub use parallel::{partition_cases, reduce_over_cases, CasePartition, PartialAggregate};
