//! The `.elt` binary columnar format, version 1.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! magic   4 bytes  "ELT1"
//! version u32      1
//! n_events u64
//! n_columns u32            three mandatory columns first, then attributes
//! directory, n_columns entries:
//!     name_len u32, name bytes (UTF-8)
//!     kind u8              0 string, 1 int64, 2 float64, 3 timestamp
//!     role u8              0 case, 1 activity, 2 timestamp, 255 attribute
//!     offset u64           absolute file offset of the column block
//!     byte_len u64         length of the column block in bytes
//! column blocks, in directory order:
//!     string column:  dict_count u32; per value (len u32, bytes);
//!                     null bitmap ceil(n/8) bytes (bit set = present);
//!                     codes u32 * n
//!     numeric column: null bitmap ceil(n/8) bytes; values 8 bytes * n
//! ```
//!
//! No compression in v1. Reading back a written file reproduces the table
//! bit-exactly, including dictionary order and attribute order.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::log_model::{Column, ColumnData, ColumnKind, Dictionary, EventTable, NullMask};
use crate::{Error, Result};

const MAGIC: &[u8; 4] = b"ELT1";
const VERSION: u32 = 1;

const ROLE_CASE: u8 = 0;
const ROLE_ACTIVITY: u8 = 1;
const ROLE_TIMESTAMP: u8 = 2;
const ROLE_ATTR: u8 = 255;

fn kind_tag(kind: ColumnKind) -> u8 {
    match kind {
        ColumnKind::String => 0,
        ColumnKind::Int64 => 1,
        ColumnKind::Float64 => 2,
        ColumnKind::Timestamp => 3,
    }
}

fn tag_kind(tag: u8) -> Option<ColumnKind> {
    match tag {
        0 => Some(ColumnKind::String),
        1 => Some(ColumnKind::Int64),
        2 => Some(ColumnKind::Float64),
        3 => Some(ColumnKind::Timestamp),
        _ => None,
    }
}

fn mask_len(n_events: usize) -> u64 {
    n_events.div_ceil(8) as u64
}

fn dict_block_len(dict: &Dictionary) -> u64 {
    4 + dict
        .values()
        .iter()
        .map(|v| 4 + v.len() as u64)
        .sum::<u64>()
}

fn string_block_len(dict: &Dictionary, n_events: usize) -> u64 {
    dict_block_len(dict) + mask_len(n_events) + 4 * n_events as u64
}

fn numeric_block_len(n_events: usize) -> u64 {
    mask_len(n_events) + 8 * n_events as u64
}

/// Serializes a table to an `.elt` file.
pub fn write_binary(table: &EventTable, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io_err = |e: std::io::Error| Error::io(path, e);

    let n = table.n_events();
    struct Entry<'a> {
        name: &'a str,
        kind: ColumnKind,
        role: u8,
        byte_len: u64,
    }
    let mut entries = vec![
        Entry {
            name: "case",
            kind: ColumnKind::String,
            role: ROLE_CASE,
            byte_len: string_block_len(table.case().dict(), n),
        },
        Entry {
            name: "activity",
            kind: ColumnKind::String,
            role: ROLE_ACTIVITY,
            byte_len: string_block_len(table.activity().dict(), n),
        },
        Entry {
            name: "timestamp",
            kind: ColumnKind::Timestamp,
            role: ROLE_TIMESTAMP,
            byte_len: numeric_block_len(n),
        },
    ];
    for (name, col) in table.attrs() {
        let byte_len = match col.data() {
            ColumnData::StringDict { dict, .. } => string_block_len(dict, n),
            _ => numeric_block_len(n),
        };
        entries.push(Entry {
            name,
            kind: col.kind(),
            role: ROLE_ATTR,
            byte_len,
        });
    }

    let directory_len: u64 = entries
        .iter()
        .map(|e| 4 + e.name.len() as u64 + 1 + 1 + 8 + 8)
        .sum();
    let mut offset = 4 + 4 + 8 + 4 + directory_len;

    w.write_all(MAGIC).map_err(io_err)?;
    w.write_all(&VERSION.to_le_bytes()).map_err(io_err)?;
    w.write_all(&(n as u64).to_le_bytes()).map_err(io_err)?;
    w.write_all(&(entries.len() as u32).to_le_bytes())
        .map_err(io_err)?;
    for e in &entries {
        w.write_all(&(e.name.len() as u32).to_le_bytes())
            .map_err(io_err)?;
        w.write_all(e.name.as_bytes()).map_err(io_err)?;
        w.write_all(&[kind_tag(e.kind), e.role]).map_err(io_err)?;
        w.write_all(&offset.to_le_bytes()).map_err(io_err)?;
        w.write_all(&e.byte_len.to_le_bytes()).map_err(io_err)?;
        offset += e.byte_len;
    }

    let all_valid = NullMask::all_valid(n);
    write_string_block(&mut w, table.case().dict(), &all_valid, table.case().codes())
        .map_err(io_err)?;
    write_string_block(
        &mut w,
        table.activity().dict(),
        &all_valid,
        table.activity().codes(),
    )
    .map_err(io_err)?;
    write_numeric_block(&mut w, &all_valid, table.timestamps(), |v| v.to_le_bytes())
        .map_err(io_err)?;
    for (_, col) in table.attrs() {
        match col.data() {
            ColumnData::StringDict { codes, dict } => {
                write_string_block(&mut w, dict, col.mask(), codes).map_err(io_err)?
            }
            ColumnData::Int64(v) | ColumnData::Timestamp64(v) => {
                write_numeric_block(&mut w, col.mask(), v, |x| x.to_le_bytes()).map_err(io_err)?
            }
            ColumnData::Float64(v) => {
                write_numeric_block(&mut w, col.mask(), v, |x| x.to_le_bytes()).map_err(io_err)?
            }
        }
    }
    w.flush().map_err(io_err)
}

fn write_string_block<W: Write>(
    w: &mut W,
    dict: &Dictionary,
    mask: &NullMask,
    codes: &[u32],
) -> std::io::Result<()> {
    w.write_all(&(dict.len() as u32).to_le_bytes())?;
    for value in dict.values() {
        w.write_all(&(value.len() as u32).to_le_bytes())?;
        w.write_all(value.as_bytes())?;
    }
    w.write_all(mask.as_bytes())?;
    let mut buf = Vec::with_capacity(codes.len() * 4);
    for c in codes {
        buf.extend_from_slice(&c.to_le_bytes());
    }
    w.write_all(&buf)
}

fn write_numeric_block<W: Write, T: Copy>(
    w: &mut W,
    mask: &NullMask,
    values: &[T],
    to_bytes: impl Fn(T) -> [u8; 8],
) -> std::io::Result<()> {
    w.write_all(mask.as_bytes())?;
    let mut buf = Vec::with_capacity(values.len() * 8);
    for &v in values {
        buf.extend_from_slice(&to_bytes(v));
    }
    w.write_all(&buf)
}

/// Reads an `.elt` file produced by [`write_binary`]. The decoded table is
/// re-validated, so corrupt files are rejected rather than propagated.
pub fn read_binary(path: impl AsRef<Path>) -> Result<EventTable> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = Decoder {
        inner: BufReader::new(file),
        pos: 0,
    };

    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("bad magic (not an .elt file)".into()));
    }
    let version = r.read_u32()?;
    if version != VERSION {
        return Err(Error::Format(format!("unknown version {version}")));
    }
    let n_events = r.read_u64()? as usize;
    let n_columns = r.read_u32()? as usize;
    if n_columns < 3 {
        return Err(Error::Format(format!(
            "expected at least 3 columns, found {n_columns}"
        )));
    }

    struct DirEntry {
        name: String,
        kind: ColumnKind,
        role: u8,
        offset: u64,
        byte_len: u64,
    }
    let mut directory = Vec::with_capacity(n_columns);
    for _ in 0..n_columns {
        let name = r.read_string()?;
        let mut tags = [0u8; 2];
        r.read_exact(&mut tags)?;
        let kind = tag_kind(tags[0])
            .ok_or_else(|| Error::Format(format!("unknown column kind tag {}", tags[0])))?;
        directory.push(DirEntry {
            name,
            kind,
            role: tags[1],
            offset: r.read_u64()?,
            byte_len: r.read_u64()?,
        });
    }

    let mut case: Option<(Vec<u32>, Dictionary)> = None;
    let mut activity: Option<(Vec<u32>, Dictionary)> = None;
    let mut ts: Option<Vec<i64>> = None;
    let mut attrs: Vec<(String, Column)> = Vec::new();
    for entry in &directory {
        if r.pos != entry.offset {
            return Err(Error::Format(format!(
                "column {:?}: directory offset {} does not match stream position {}",
                entry.name, entry.offset, r.pos
            )));
        }
        let block_end = entry.offset + entry.byte_len;
        match (entry.role, entry.kind) {
            (ROLE_CASE, ColumnKind::String) | (ROLE_ACTIVITY, ColumnKind::String) => {
                let (codes, dict, mask) = r.read_string_block(n_events)?;
                if !mask.all_set() {
                    return Err(Error::Format(format!(
                        "mandatory column {:?} contains nulls",
                        entry.name
                    )));
                }
                let slot = if entry.role == ROLE_CASE {
                    &mut case
                } else {
                    &mut activity
                };
                if slot.replace((codes, dict)).is_some() {
                    return Err(Error::Format("duplicate mandatory column".into()));
                }
            }
            (ROLE_TIMESTAMP, ColumnKind::Timestamp) => {
                let (values, mask) = r.read_i64_block(n_events)?;
                if !mask.all_set() {
                    return Err(Error::Format("timestamp column contains nulls".into()));
                }
                if ts.replace(values).is_some() {
                    return Err(Error::Format("duplicate timestamp column".into()));
                }
            }
            (ROLE_ATTR, kind) => {
                let column = match kind {
                    ColumnKind::String => {
                        let (codes, dict, mask) = r.read_string_block(n_events)?;
                        Column::new(ColumnData::StringDict { codes, dict }, mask)
                    }
                    ColumnKind::Int64 => {
                        let (values, mask) = r.read_i64_block(n_events)?;
                        Column::new(ColumnData::Int64(values), mask)
                    }
                    ColumnKind::Timestamp => {
                        let (values, mask) = r.read_i64_block(n_events)?;
                        Column::new(ColumnData::Timestamp64(values), mask)
                    }
                    ColumnKind::Float64 => {
                        let (values, mask) = r.read_i64_block(n_events)?;
                        let floats = values.into_iter().map(f64::from_bits_i64).collect();
                        Column::new(ColumnData::Float64(floats), mask)
                    }
                };
                attrs.push((entry.name.clone(), column));
            }
            (role, kind) => {
                return Err(Error::Format(format!(
                    "column {:?}: role {role} is incompatible with kind {kind}",
                    entry.name
                )))
            }
        }
        if r.pos != block_end {
            return Err(Error::Format(format!(
                "column {:?}: block length {} disagrees with directory",
                entry.name, entry.byte_len
            )));
        }
    }

    let (case_codes, case_dict) =
        case.ok_or_else(|| Error::Format("missing case column".into()))?;
    let (activity_codes, activity_dict) =
        activity.ok_or_else(|| Error::Format("missing activity column".into()))?;
    let ts = ts.ok_or_else(|| Error::Format("missing timestamp column".into()))?;

    let table = EventTable::from_parts_unchecked(
        case_codes,
        case_dict,
        activity_codes,
        activity_dict,
        ts,
        attrs,
    );
    table
        .validate()
        .map_err(|v| Error::Format(format!("invalid table in file: {v}")))?;
    Ok(table)
}

trait FromBitsI64 {
    fn from_bits_i64(v: i64) -> Self;
}
impl FromBitsI64 for f64 {
    fn from_bits_i64(v: i64) -> f64 {
        f64::from_bits(v as u64)
    }
}

struct Decoder<R> {
    inner: R,
    pos: u64,
}

impl<R: Read> Decoder<R> {
    fn read_exact(&mut self, buf: &mut [u8]) -> Result<()> {
        self.inner.read_exact(buf).map_err(|e| {
            if e.kind() == std::io::ErrorKind::UnexpectedEof {
                Error::Format("truncated file".into())
            } else {
                Error::Format(format!("read failed: {e}"))
            }
        })?;
        self.pos += buf.len() as u64;
        Ok(())
    }

    fn read_u32(&mut self) -> Result<u32> {
        let mut b = [0u8; 4];
        self.read_exact(&mut b)?;
        Ok(u32::from_le_bytes(b))
    }

    fn read_u64(&mut self) -> Result<u64> {
        let mut b = [0u8; 8];
        self.read_exact(&mut b)?;
        Ok(u64::from_le_bytes(b))
    }

    fn read_string(&mut self) -> Result<String> {
        let len = self.read_u32()? as usize;
        if len > 1 << 24 {
            return Err(Error::Format(format!("implausible string length {len}")));
        }
        let mut buf = vec![0u8; len];
        self.read_exact(&mut buf)?;
        String::from_utf8(buf).map_err(|_| Error::Format("invalid UTF-8 in string".into()))
    }

    fn read_mask(&mut self, n_events: usize) -> Result<NullMask> {
        let mut bytes = vec![0u8; n_events.div_ceil(8)];
        self.read_exact(&mut bytes)?;
        NullMask::from_bytes(bytes, n_events)
            .ok_or_else(|| Error::Format("malformed null bitmap".into()))
    }

    fn read_string_block(&mut self, n_events: usize) -> Result<(Vec<u32>, Dictionary, NullMask)> {
        let dict_count = self.read_u32()? as usize;
        let mut values = Vec::with_capacity(dict_count.min(1 << 20));
        for _ in 0..dict_count {
            values.push(self.read_string()?);
        }
        let dict = Dictionary::from_values(values)
            .ok_or_else(|| Error::Format("dictionary contains duplicates".into()))?;
        let mask = self.read_mask(n_events)?;
        let mut bytes = vec![0u8; n_events * 4];
        self.read_exact(&mut bytes)?;
        let codes = bytes
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Ok((codes, dict, mask))
    }

    fn read_i64_block(&mut self, n_events: usize) -> Result<(Vec<i64>, NullMask)> {
        let mask = self.read_mask(n_events)?;
        let mut bytes = vec![0u8; n_events * 8];
        self.read_exact(&mut bytes)?;
        let values = bytes
            .chunks_exact(8)
            .map(|c| i64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Ok((values, mask))
    }
}
