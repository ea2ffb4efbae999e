//! CSV ingestion and export.
//!
//! Reading is a single pass: the first [`SCHEMA_SAMPLE_ROWS`] data rows are
//! buffered for schema inference, then every row (buffered and streamed) is
//! decoded under the frozen schema. Rows past the sample that violate the
//! inferred type are a positioned error, never silently widened.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use csv::{ReaderBuilder, StringRecord};

use super::timestamp::{format_timestamp_ms, parse_timestamp_ms};
use super::{CsvOptions, Schema, SCHEMA_SAMPLE_ROWS};
use crate::log_model::{
    AttrValue, ColumnKind, EventTable, EventTableBuilder, RESERVED_ACTIVITY, RESERVED_CASE,
    RESERVED_TIMESTAMP,
};
use crate::{Error, Result};

/// Infers a typed schema from the header and the first sampled data rows.
///
/// Each non-mandatory column gets the narrowest kind that parses every
/// sampled non-empty cell, with precedence int64 -> float64 -> timestamp ->
/// string; `opts.type_hints` overrides inference. The mandatory roles always
/// resolve to string/string/timestamp.
pub fn infer_schema(header: &[String], rows: &[StringRecord], opts: &CsvOptions) -> Result<Schema> {
    opts.check()?;
    let find = |field: &str| -> Result<usize> {
        header
            .iter()
            .position(|h| h == field)
            .ok_or_else(|| Error::Schema(format!("mandatory field {field:?} missing from header")))
    };
    let case_idx = find(&opts.case_field)?;
    let activity_idx = find(&opts.activity_field)?;
    let timestamp_idx = find(&opts.timestamp_field)?;

    let mut columns = Vec::with_capacity(header.len());
    for (i, name) in header.iter().enumerate() {
        let kind = if i == case_idx || i == activity_idx {
            ColumnKind::String
        } else if i == timestamp_idx {
            ColumnKind::Timestamp
        } else if let Some(&hint) = opts.type_hints.get(name) {
            hint
        } else {
            infer_column_kind(rows, i, opts)
        };
        columns.push((name.clone(), kind));
    }
    Ok(Schema {
        columns,
        case_idx,
        activity_idx,
        timestamp_idx,
    })
}

fn infer_column_kind(rows: &[StringRecord], col: usize, opts: &CsvOptions) -> ColumnKind {
    let cells = || {
        rows.iter()
            .filter_map(|r| r.get(col))
            .filter(|c| !c.is_empty())
    };
    // All-empty sample: no evidence, fall back to string.
    if cells().next().is_none() {
        return ColumnKind::String;
    }
    if cells().all(|c| c.parse::<i64>().is_ok()) {
        return ColumnKind::Int64;
    }
    if cells().all(|c| c.parse::<f64>().is_ok()) {
        return ColumnKind::Float64;
    }
    if cells().all(|c| parse_timestamp_ms(c, &opts.timestamp_formats).is_some()) {
        return ColumnKind::Timestamp;
    }
    ColumnKind::String
}

/// Parses a CSV event log into an [`EventTable`], preserving file row order.
///
/// Empty cells become nulls in attribute columns and are an error in the
/// three mandatory columns. Any unparseable cell or inconsistent field count
/// is an error carrying the 1-based data-row number.
pub fn read_csv(path: impl AsRef<Path>, opts: &CsvOptions) -> Result<EventTable> {
    let path = path.as_ref();
    opts.check()?;
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = ReaderBuilder::new()
        .delimiter(opts.separator)
        .has_headers(true)
        .from_reader(BufReader::new(file));

    let header: Vec<String> = reader
        .headers()
        .map_err(|e| csv_error(0, e))?
        .iter()
        .map(|s| s.to_string())
        .collect();

    let mut sample: Vec<StringRecord> = Vec::new();
    let mut record = StringRecord::new();
    let mut row: u64 = 0;
    while sample.len() < SCHEMA_SAMPLE_ROWS {
        match reader.read_record(&mut record) {
            Ok(true) => {
                row += 1;
                check_width(&record, header.len(), row)?;
                sample.push(record.clone());
            }
            Ok(false) => break,
            Err(e) => return Err(csv_error(row + 1, e)),
        }
    }

    let schema = infer_schema(&header, &sample, opts)?;
    let mut decoder = RowDecoder::new(&schema, opts)?;
    for (i, rec) in sample.iter().enumerate() {
        decoder.push(rec, (i + 1) as u64)?;
    }
    loop {
        match reader.read_record(&mut record) {
            Ok(true) => {
                row += 1;
                check_width(&record, header.len(), row)?;
                decoder.push(&record, row)?;
            }
            Ok(false) => break,
            Err(e) => return Err(csv_error(row + 1, e)),
        }
    }
    Ok(decoder.finish())
}

fn check_width(record: &StringRecord, expected: usize, row: u64) -> Result<()> {
    if record.len() != expected {
        return Err(Error::Ingest {
            row,
            message: format!(
                "inconsistent field count: expected {expected}, got {}",
                record.len()
            ),
        });
    }
    Ok(())
}

fn csv_error(row: u64, e: csv::Error) -> Error {
    Error::Ingest {
        row,
        message: e.to_string(),
    }
}

struct RowDecoder<'a> {
    schema: &'a Schema,
    opts: &'a CsvOptions,
    attr_indices: Vec<usize>,
    builder: EventTableBuilder,
    attr_buf: Vec<Option<AttrValue>>,
}

impl<'a> RowDecoder<'a> {
    fn new(schema: &'a Schema, opts: &'a CsvOptions) -> Result<Self> {
        let attr_indices = schema.attr_indices();
        let mut builder = EventTableBuilder::new();
        for &i in &attr_indices {
            let (name, kind) = &schema.columns[i];
            builder = builder.attr(name, *kind)?;
        }
        Ok(RowDecoder {
            schema,
            opts,
            builder,
            attr_buf: Vec::with_capacity(attr_indices.len()),
            attr_indices,
        })
    }

    fn push(&mut self, record: &StringRecord, row: u64) -> Result<()> {
        let cell = |i: usize| record.get(i).unwrap_or("");
        let case = cell(self.schema.case_idx);
        let activity = cell(self.schema.activity_idx);
        let ts_text = cell(self.schema.timestamp_idx);
        for (idx, value) in [
            (self.schema.case_idx, case),
            (self.schema.activity_idx, activity),
            (self.schema.timestamp_idx, ts_text),
        ] {
            if value.is_empty() {
                return Err(Error::Ingest {
                    row,
                    message: format!(
                        "null in mandatory column {:?}",
                        self.schema.columns[idx].0
                    ),
                });
            }
        }
        let ts = parse_timestamp_ms(ts_text, &self.opts.timestamp_formats).ok_or_else(|| {
            Error::Ingest {
                row,
                message: format!("unparseable timestamp {ts_text:?}"),
            }
        })?;

        self.attr_buf.clear();
        for &i in &self.attr_indices {
            let raw = cell(i);
            if raw.is_empty() {
                self.attr_buf.push(None);
                continue;
            }
            let (name, kind) = &self.schema.columns[i];
            let value = match kind {
                ColumnKind::String => AttrValue::Str(raw.to_string()),
                ColumnKind::Int64 => AttrValue::Int(raw.parse::<i64>().map_err(|_| {
                    type_error(row, name, "int64", raw)
                })?),
                ColumnKind::Float64 => AttrValue::Float(raw.parse::<f64>().map_err(|_| {
                    type_error(row, name, "float64", raw)
                })?),
                ColumnKind::Timestamp => AttrValue::Ts(
                    parse_timestamp_ms(raw, &self.opts.timestamp_formats)
                        .ok_or_else(|| type_error(row, name, "timestamp", raw))?,
                ),
            };
            self.attr_buf.push(Some(value));
        }
        self.builder
            .push_with_attrs(case, activity, ts, &self.attr_buf)
            .map_err(|e| Error::Ingest {
                row,
                message: e.to_string(),
            })
    }

    fn finish(self) -> EventTable {
        self.builder.finish()
    }
}

fn type_error(row: u64, column: &str, kind: &str, raw: &str) -> Error {
    Error::Ingest {
        row,
        message: format!("column {column:?}: cell {raw:?} does not parse as {kind}"),
    }
}

/// Writes a table back to CSV. The three mandatory columns are emitted first
/// under their role names, timestamps in ISO-8601 UTC milliseconds.
pub fn write_csv(table: &EventTable, path: impl AsRef<Path>, separator: u8) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = csv::WriterBuilder::new()
        .delimiter(separator)
        .from_writer(BufWriter::new(file));

    let mut header = vec![
        RESERVED_CASE.to_string(),
        RESERVED_ACTIVITY.to_string(),
        RESERVED_TIMESTAMP.to_string(),
    ];
    header.extend(table.attrs().iter().map(|(n, _)| n.clone()));
    writer
        .write_record(&header)
        .map_err(|e| Error::io(path, std::io::Error::other(e)))?;

    let mut record: Vec<String> = Vec::with_capacity(header.len());
    for row in 0..table.n_events() {
        record.clear();
        record.push(table.case().value(row).to_string());
        record.push(table.activity().value(row).to_string());
        record.push(format_timestamp_ms(table.timestamps()[row]));
        for (_, col) in table.attrs() {
            record.push(match col.get(row) {
                None => String::new(),
                Some(AttrValue::Str(s)) => s,
                Some(AttrValue::Int(i)) => i.to_string(),
                Some(AttrValue::Float(f)) => {
                    // Keep enough digits that parsing back is lossless.
                    format!("{f:?}")
                }
                Some(AttrValue::Ts(ms)) => format_timestamp_ms(ms),
            });
        }
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
