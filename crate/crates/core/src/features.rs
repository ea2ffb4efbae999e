//! Per-case feature extraction.
//!
//! Numeric attributes contribute the last non-null value of each case plus a
//! presence flag (`attr@last`, `attr@last_present`); string attributes
//! one-hot encode presence of each observed value (`attr=value`, 1 if any
//! event of the case carries it). Row order is locked to the cases table.

use std::io::Write;
use std::path::Path;

use crate::format::{CaseTable, FormattedLog};
use crate::log_model::{ColumnData, NullMask};
use crate::parallel::{partition_loads, run_segments};
use crate::{Error, Result};

/// Dense per-case numeric matrix, row i = case i of the cases table.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    column_names: Vec<String>,
    values: Vec<f64>,
    n_rows: usize,
}

impl FeatureMatrix {
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.column_names.len()
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.column_names.len() + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        let w = self.column_names.len();
        &self.values[row * w..(row + 1) * w]
    }

    /// CSV export with a header row, for downstream ML tools.
    pub fn to_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut writer = csv::Writer::from_writer(std::io::BufWriter::new(file));
        writer
            .write_record(&self.column_names)
            .map_err(|e| Error::io(path, std::io::Error::other(e)))?;
        let mut record: Vec<String> = Vec::with_capacity(self.n_cols());
        for row in 0..self.n_rows {
            record.clear();
            record.extend(self.row(row).iter().map(|v| v.to_string()));
            writer
                .write_record(&record)
                .map_err(|e| Error::io(path, std::io::Error::other(e)))?;
        }
        writer
            .into_inner()
            .map_err(|e| Error::io(path, std::io::Error::other(e)))?
            .flush()
            .map_err(|e| Error::io(path, e))?;
        Ok(())
    }
}

enum NumericSource<'a> {
    Ints(&'a [i64], &'a NullMask),
    Floats(&'a [f64], &'a NullMask),
}

impl NumericSource<'_> {
    #[inline]
    fn get(&self, row: usize) -> Option<f64> {
        match self {
            NumericSource::Ints(values, mask) => {
                mask.is_valid(row).then(|| values[row] as f64)
            }
            NumericSource::Floats(values, mask) => mask.is_valid(row).then(|| values[row]),
        }
    }
}

/// Extracts the feature matrix for the named attributes.
///
/// One-hot columns use presence semantics (1 if the case has at least one
/// event with that value) over the lexicographically sorted set of observed
/// values. Unknown attributes or kind mismatches are argument errors.
pub fn extract_features(
    log: &FormattedLog,
    cases: &CaseTable,
    numeric_attrs: &[String],
    string_attrs: &[String],
    workers: usize,
) -> Result<FeatureMatrix> {
    let table = log.base();

    let mut numeric_sources = Vec::with_capacity(numeric_attrs.len());
    for name in numeric_attrs {
        let col = table
            .attr(name)
            .ok_or_else(|| Error::Argument(format!("unknown attribute {name:?}")))?;
        let source = match col.data() {
            ColumnData::Int64(v) | ColumnData::Timestamp64(v) => {
                NumericSource::Ints(v, col.mask())
            }
            ColumnData::Float64(v) => NumericSource::Floats(v, col.mask()),
            ColumnData::StringDict { .. } => {
                return Err(Error::Argument(format!(
                    "attribute {name:?} is a string column, not numeric"
                )))
            }
        };
        numeric_sources.push(source);
    }

    // For each string attribute: observed values sorted lexicographically,
    // plus a code -> one-hot-column lookup.
    struct StringSource<'a> {
        codes: &'a [u32],
        mask: &'a NullMask,
        code_to_col: Vec<Option<usize>>,
    }
    let mut string_sources: Vec<StringSource> = Vec::with_capacity(string_attrs.len());
    let mut names = Vec::new();
    for name in numeric_attrs {
        names.push(format!("{name}@last"));
        names.push(format!("{name}@last_present"));
    }
    for name in string_attrs {
        let col = table
            .attr(name)
            .ok_or_else(|| Error::Argument(format!("unknown attribute {name:?}")))?;
        let (codes, dict) = match col.data() {
            ColumnData::StringDict { codes, dict } => (codes.as_slice(), dict),
            _ => {
                return Err(Error::Argument(format!(
                    "attribute {name:?} is numeric, not a string column"
                )))
            }
        };
        let mut observed = vec![false; dict.len()];
        for (row, &code) in codes.iter().enumerate() {
            if col.mask().is_valid(row) {
                observed[code as usize] = true;
            }
        }
        let mut values: Vec<(String, u32)> = observed
            .iter()
            .enumerate()
            .filter(|(_, &seen)| seen)
            .map(|(code, _)| (dict.value(code as u32).to_string(), code as u32))
            .collect();
        values.sort();
        let base_col = names.len();
        let mut code_to_col = vec![None; dict.len()];
        for (offset, (value, code)) in values.iter().enumerate() {
            names.push(format!("{name}={value}"));
            code_to_col[*code as usize] = Some(base_col + offset);
        }
        string_sources.push(StringSource {
            codes,
            mask: col.mask(),
            code_to_col,
        });
    }

    let width = names.len();
    let segments = partition_loads(cases.n_events_in_case(), workers.max(1));
    let blocks = run_segments(&segments, |range| {
        let mut block = vec![0.0f64; range.len() * width];
        for (local, case) in range.enumerate() {
            let rows = cases.rows_of(case);
            let out = &mut block[local * width..(local + 1) * width];
            let mut col = 0usize;
            for source in &numeric_sources {
                let last = rows.clone().rev().find_map(|row| source.get(row));
                out[col] = last.unwrap_or(0.0);
                out[col + 1] = if last.is_some() { 1.0 } else { 0.0 };
                col += 2;
            }
            for source in &string_sources {
                for row in rows.clone() {
                    if source.mask.is_valid(row) {
                        if let Some(c) = source.code_to_col[source.codes[row] as usize] {
                            out[c] = 1.0;
                        }
                    }
                }
            }
        }
        block
    });

    let mut values = Vec::with_capacity(cases.n_cases() * width);
    for block in blocks {
        values.extend(block);
    }
    Ok(FeatureMatrix {
        column_names: names,
        values,
        n_rows: cases.n_cases(),
    })
}
