//! Event-log ingestion: CSV parsing with schema inference, plus the `.elt`
//! binary columnar format that plays the role Parquet plays for dataframe
//! engines (column-organized on disk, so ingestion skips text parsing).

mod binary;
mod csv_io;
mod timestamp;

pub use binary::{read_binary, write_binary};
pub use csv_io::{infer_schema, read_csv, write_csv};
pub use timestamp::{format_timestamp_ms, parse_timestamp_ms};

use std::collections::HashMap;

use crate::log_model::ColumnKind;
use crate::{Error, Result};

/// Number of data rows sampled for schema inference. Rows after the sample
/// that violate the inferred type are an error, never silently widened.
pub const SCHEMA_SAMPLE_ROWS: usize = 1000;

/// CSV dialect and column-role configuration.
///
/// The dialect is RFC 4180 quoting over UTF-8 with a configurable single-byte
/// separator. Timestamps accept ISO-8601 with optional fractional seconds and
/// optional zone (UTC assumed when absent), plus raw integer epoch
/// milliseconds; `timestamp_formats` overrides that default with an ordered
/// list of `chrono` format strings.
#[derive(Debug, Clone)]
pub struct CsvOptions {
    pub separator: u8,
    pub case_field: String,
    pub activity_field: String,
    pub timestamp_field: String,
    pub timestamp_formats: Vec<String>,
    pub type_hints: HashMap<String, ColumnKind>,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions {
            separator: b',',
            case_field: "case".to_string(),
            activity_field: "activity".to_string(),
            timestamp_field: "timestamp".to_string(),
            timestamp_formats: Vec::new(),
            type_hints: HashMap::new(),
        }
    }
}

impl CsvOptions {
    pub(crate) fn check(&self) -> Result<()> {
        if self.case_field == self.activity_field
            || self.case_field == self.timestamp_field
            || self.activity_field == self.timestamp_field
        {
            return Err(Error::Schema(
                "case, activity, and timestamp field names must be distinct".into(),
            ));
        }
        if matches!(self.separator, b'"' | b'\r' | b'\n') {
            return Err(Error::Schema(
                "separator must not be a quote or newline byte".into(),
            ));
        }
        Ok(())
    }
}

/// Inferred or hinted typing of every CSV column, with the mandatory roles
/// resolved to header positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    /// One entry per header column, in header order.
    pub columns: Vec<(String, ColumnKind)>,
    pub case_idx: usize,
    pub activity_idx: usize,
    pub timestamp_idx: usize,
}

impl Schema {
    /// Indices of non-mandatory columns, in header order.
    pub fn attr_indices(&self) -> Vec<usize> {
        (0..self.columns.len())
            .filter(|&i| i != self.case_idx && i != self.activity_idx && i != self.timestamp_idx)
            .collect()
    }
}
