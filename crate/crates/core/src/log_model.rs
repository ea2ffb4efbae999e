//! Immutable columnar event-log representation.
//!
//! An [`EventTable`] stores one column per attribute, each contiguous in
//! memory. String columns are dictionary-encoded: the column holds dense
//! `u32` codes into a [`Dictionary`] of distinct values ordered by first
//! occurrence. Attribute columns carry a validity bitmap ([`NullMask`],
//! bit set = value present); the three mandatory columns (case, activity,
//! timestamp) never contain nulls.
//!
//! Timestamps are signed 64-bit milliseconds since the Unix epoch, so all
//! duration arithmetic downstream is exact integer math.
//!
//! Tables are immutable after construction and safe to share across threads;
//! every downstream operation returns new tables or aggregates.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Validity bitmap: bit set = value present at that row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NullMask {
    bits: Vec<u8>,
    len: usize,
}

impl NullMask {
    /// Empty mask with zero rows.
    pub fn new() -> Self {
        NullMask {
            bits: Vec::new(),
            len: 0,
        }
    }

    /// Mask of `len` rows, all valid.
    pub fn all_valid(len: usize) -> Self {
        let mut bits = vec![0xffu8; len.div_ceil(8)];
        // Trailing bits past `len` stay zero so equality is structural.
        if len % 8 != 0 {
            if let Some(last) = bits.last_mut() {
                *last = (1u8 << (len % 8)) - 1;
            }
        }
        NullMask { bits, len }
    }

    pub fn push(&mut self, valid: bool) {
        if self.len % 8 == 0 {
            self.bits.push(0);
        }
        if valid {
            *self.bits.last_mut().unwrap() |= 1 << (self.len % 8);
        }
        self.len += 1;
    }

    #[inline]
    pub fn is_valid(&self, row: usize) -> bool {
        debug_assert!(row < self.len);
        self.bits[row / 8] >> (row % 8) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn count_valid(&self) -> usize {
        self.bits.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn all_set(&self) -> bool {
        self.count_valid() == self.len
    }

    /// Raw packed bytes, little-endian bit order within each byte.
    pub fn as_bytes(&self) -> &[u8] {
        &self.bits
    }

    /// Rebuilds a mask from packed bytes produced by [`NullMask::as_bytes`].
    pub fn from_bytes(bits: Vec<u8>, len: usize) -> Option<Self> {
        if bits.len() != len.div_ceil(8) {
            return None;
        }
        // Reject garbage in the unused trailing bits.
        if len % 8 != 0 {
            let last = *bits.last().unwrap_or(&0);
            if last & !((1u8 << (len % 8)) - 1) != 0 {
                return None;
            }
        }
        Some(NullMask { bits, len })
    }
}

impl Default for NullMask {
    fn default() -> Self {
        Self::new()
    }
}

/// Distinct string values of a dictionary-encoded column, ordered by first
/// occurrence, with the reverse index for interning.
#[derive(Debug, Clone)]
pub struct Dictionary {
    values: Vec<String>,
    index: HashMap<String, u32>,
}

impl Dictionary {
    pub fn new() -> Self {
        Dictionary {
            values: Vec::new(),
            index: HashMap::new(),
        }
    }

    /// Builds a dictionary from distinct values. Returns `None` if the list
    /// contains duplicates.
    pub fn from_values(values: Vec<String>) -> Option<Self> {
        let mut index = HashMap::with_capacity(values.len());
        for (i, v) in values.iter().enumerate() {
            if index.insert(v.clone(), i as u32).is_some() {
                return None;
            }
        }
        Some(Dictionary { values, index })
    }

    /// Returns the code for `value`, inserting it if unseen.
    pub fn intern(&mut self, value: &str) -> u32 {
        if let Some(&code) = self.index.get(value) {
            return code;
        }
        let code = u32::try_from(self.values.len()).expect("dictionary overflow: > u32::MAX values");
        self.values.push(value.to_string());
        self.index.insert(value.to_string(), code);
        code
    }

    /// Code for `value` if present.
    pub fn code(&self, value: &str) -> Option<u32> {
        self.index.get(value).copied()
    }

    /// Value for `code`.
    #[inline]
    pub fn value(&self, code: u32) -> &str {
        &self.values[code as usize]
    }

    pub fn values(&self) -> &[String] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl Default for Dictionary {
    fn default() -> Self {
        Self::new()
    }
}

// The index is derived from `values`; equality on values is enough.
impl PartialEq for Dictionary {
    fn eq(&self, other: &Self) -> bool {
        self.values == other.values
    }
}
impl Eq for Dictionary {}

/// Encodes a list of optional strings into dictionary codes.
///
/// The dictionary is ordered by first occurrence. Null positions carry code 0
/// as a placeholder and are cleared in the returned mask.
pub fn dict_encode(raw: &[Option<String>]) -> (Vec<u32>, NullMask, Dictionary) {
    let mut dict = Dictionary::new();
    let mut codes = Vec::with_capacity(raw.len());
    let mut mask = NullMask::new();
    for value in raw {
        match value {
            Some(s) => {
                codes.push(dict.intern(s));
                mask.push(true);
            }
            None => {
                codes.push(0);
                mask.push(false);
            }
        }
    }
    (codes, mask, dict)
}

/// Decodes codes back to optional strings. Test-facing inverse of
/// [`dict_encode`].
pub fn dict_decode(codes: &[u32], mask: &NullMask, dict: &Dictionary) -> Vec<Option<String>> {
    codes
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            if mask.is_valid(i) {
                Some(dict.value(c).to_string())
            } else {
                None
            }
        })
        .collect()
}

/// Typed storage of one attribute column.
#[derive(Debug, Clone, PartialEq)]
pub enum ColumnData {
    StringDict { codes: Vec<u32>, dict: Dictionary },
    Int64(Vec<i64>),
    Float64(Vec<f64>),
    /// Milliseconds since the Unix epoch, signed.
    Timestamp64(Vec<i64>),
}

impl ColumnData {
    pub fn len(&self) -> usize {
        match self {
            ColumnData::StringDict { codes, .. } => codes.len(),
            ColumnData::Int64(v) => v.len(),
            ColumnData::Float64(v) => v.len(),
            ColumnData::Timestamp64(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind(&self) -> ColumnKind {
        match self {
            ColumnData::StringDict { .. } => ColumnKind::String,
            ColumnData::Int64(_) => ColumnKind::Int64,
            ColumnData::Float64(_) => ColumnKind::Float64,
            ColumnData::Timestamp64(_) => ColumnKind::Timestamp,
        }
    }
}

/// Column kind tag, used by schema inference and the binary format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ColumnKind {
    String,
    Int64,
    Float64,
    Timestamp,
}

impl fmt::Display for ColumnKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ColumnKind::String => "string",
            ColumnKind::Int64 => "int64",
            ColumnKind::Float64 => "float64",
            ColumnKind::Timestamp => "timestamp",
        };
        f.write_str(s)
    }
}

/// One attribute column: typed data plus validity mask.
#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    data: ColumnData,
    mask: NullMask,
}

impl Column {
    pub fn new(data: ColumnData, mask: NullMask) -> Self {
        assert_eq!(data.len(), mask.len(), "column data/mask length mismatch");
        Column { data, mask }
    }

    pub fn data(&self) -> &ColumnData {
        &self.data
    }

    pub fn mask(&self) -> &NullMask {
        &self.mask
    }

    pub fn len(&self) -> usize {
        self.mask.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind(&self) -> ColumnKind {
        self.data.kind()
    }

    /// Decoded value at `row`, or `None` when null.
    pub fn get(&self, row: usize) -> Option<AttrValue> {
        if !self.mask.is_valid(row) {
            return None;
        }
        Some(match &self.data {
            ColumnData::StringDict { codes, dict } => {
                AttrValue::Str(dict.value(codes[row]).to_string())
            }
            ColumnData::Int64(v) => AttrValue::Int(v[row]),
            ColumnData::Float64(v) => AttrValue::Float(v[row]),
            ColumnData::Timestamp64(v) => AttrValue::Ts(v[row]),
        })
    }
}

/// A single decoded attribute value.
#[derive(Debug, Clone, PartialEq)]
pub enum AttrValue {
    Str(String),
    Int(i64),
    Float(f64),
    /// Milliseconds since the Unix epoch.
    Ts(i64),
}

impl AttrValue {
    pub fn kind(&self) -> ColumnKind {
        match self {
            AttrValue::Str(_) => ColumnKind::String,
            AttrValue::Int(_) => ColumnKind::Int64,
            AttrValue::Float(_) => ColumnKind::Float64,
            AttrValue::Ts(_) => ColumnKind::Timestamp,
        }
    }
}

/// Mandatory dictionary-encoded column (case or activity): no nulls.
#[derive(Debug, Clone, PartialEq)]
pub struct DictColumn {
    codes: Vec<u32>,
    dict: Dictionary,
}

impl DictColumn {
    pub fn codes(&self) -> &[u32] {
        &self.codes
    }

    pub fn dict(&self) -> &Dictionary {
        &self.dict
    }

    #[inline]
    pub fn value(&self, row: usize) -> &str {
        self.dict.value(self.codes[row])
    }
}

/// Reserved names that address the three mandatory columns in operations that
/// take an attribute name. Attribute columns may not use them.
pub const RESERVED_CASE: &str = "case";
pub const RESERVED_ACTIVITY: &str = "activity";
pub const RESERVED_TIMESTAMP: &str = "timestamp";

/// First invariant violation found by [`EventTable::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("length mismatch: column {column} has {actual} rows, table has {expected}")]
    LengthMismatch {
        column: String,
        actual: usize,
        expected: usize,
    },
    #[error("mandatory column {column} has a null at row {row}")]
    MandatoryNull { column: String, row: usize },
    #[error("code out of range in column {column} at row {row}: {code} >= dictionary size {dict_len}")]
    CodeOutOfRange {
        column: String,
        row: usize,
        code: u32,
        dict_len: usize,
    },
    #[error("dictionary of column {column} is inconsistent: {message}")]
    DictionaryBroken { column: String, message: String },
    #[error("attribute name {name:?} is duplicated or reserved")]
    BadAttributeName { name: String },
}

/// Immutable columnar event log.
///
/// Row order is the ingest order until [`crate::format_log`] reorders it.
#[derive(Debug, Clone, PartialEq)]
pub struct EventTable {
    case: DictColumn,
    activity: DictColumn,
    ts: Vec<i64>,
    attrs: Vec<(String, Column)>,
}

impl EventTable {
    /// Assembles a table from parts without checking invariants. Callers are
    /// expected to run [`EventTable::validate`] when the parts come from an
    /// untrusted source (e.g. a file).
    pub fn from_parts_unchecked(
        case_codes: Vec<u32>,
        case_dict: Dictionary,
        activity_codes: Vec<u32>,
        activity_dict: Dictionary,
        ts: Vec<i64>,
        attrs: Vec<(String, Column)>,
    ) -> Self {
        EventTable {
            case: DictColumn {
                codes: case_codes,
                dict: case_dict,
            },
            activity: DictColumn {
                codes: activity_codes,
                dict: activity_dict,
            },
            ts,
            attrs,
        }
    }

    pub fn n_events(&self) -> usize {
        self.ts.len()
    }

    pub fn case(&self) -> &DictColumn {
        &self.case
    }

    pub fn activity(&self) -> &DictColumn {
        &self.activity
    }

    pub fn timestamps(&self) -> &[i64] {
        &self.ts
    }

    pub fn attrs(&self) -> &[(String, Column)] {
        &self.attrs
    }

    pub fn attr(&self, name: &str) -> Option<&Column> {
        self.attrs.iter().find(|(n, _)| n == name).map(|(_, c)| c)
    }

    /// Checks every structural invariant, returning the first violation.
    pub fn validate(&self) -> Result<(), Violation> {
        let n = self.n_events();
        for (name, codes, dict) in [
            ("case", &self.case.codes, &self.case.dict),
            ("activity", &self.activity.codes, &self.activity.dict),
        ] {
            if codes.len() != n {
                return Err(Violation::LengthMismatch {
                    column: name.into(),
                    actual: codes.len(),
                    expected: n,
                });
            }
            check_dictionary(name, dict)?;
            for (row, &code) in codes.iter().enumerate() {
                if code as usize >= dict.len() {
                    return Err(Violation::CodeOutOfRange {
                        column: name.into(),
                        row,
                        code,
                        dict_len: dict.len(),
                    });
                }
            }
        }
        let mut seen = std::collections::HashSet::new();
        for (name, col) in &self.attrs {
            if name == RESERVED_CASE
                || name == RESERVED_ACTIVITY
                || name == RESERVED_TIMESTAMP
                || !seen.insert(name.clone())
            {
                return Err(Violation::BadAttributeName { name: name.clone() });
            }
            if col.len() != n || col.data.len() != n {
                return Err(Violation::LengthMismatch {
                    column: name.clone(),
                    actual: col.data.len(),
                    expected: n,
                });
            }
            if let ColumnData::StringDict { codes, dict } = &col.data {
                check_dictionary(name, dict)?;
                for (row, &code) in codes.iter().enumerate() {
                    if col.mask.is_valid(row) && code as usize >= dict.len() {
                        return Err(Violation::CodeOutOfRange {
                            column: name.clone(),
                            row,
                            code,
                            dict_len: dict.len(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Value-level equality: row-wise decoded comparison that ignores
    /// dictionary code assignment. Structural `==` additionally requires
    /// identical dictionaries (what the binary round trip guarantees).
    pub fn value_eq(&self, other: &EventTable) -> bool {
        if self.n_events() != other.n_events() || self.ts != other.ts {
            return false;
        }
        let n = self.n_events();
        for row in 0..n {
            if self.case.value(row) != other.case.value(row)
                || self.activity.value(row) != other.activity.value(row)
            {
                return false;
            }
        }
        if self.attrs.len() != other.attrs.len() {
            return false;
        }
        for ((name_a, col_a), (name_b, col_b)) in self.attrs.iter().zip(&other.attrs) {
            if name_a != name_b || col_a.kind() != col_b.kind() {
                return false;
            }
            for row in 0..n {
                if col_a.get(row) != col_b.get(row) {
                    return false;
                }
            }
        }
        true
    }

    /// Reorders rows by the given permutation, keeping dictionaries as-is.
    /// Unlike [`EventTable::take_rows`] this is a pure gather; it is what
    /// formatting uses, so codes stay stable across the sort.
    pub(crate) fn permuted(&self, perm: &[usize]) -> EventTable {
        debug_assert_eq!(perm.len(), self.n_events());
        let gather_u32 = |src: &[u32]| -> Vec<u32> { perm.iter().map(|&i| src[i]).collect() };
        let gather_i64 = |src: &[i64]| -> Vec<i64> { perm.iter().map(|&i| src[i]).collect() };
        let attrs = self
            .attrs
            .iter()
            .map(|(name, col)| {
                let mut mask = NullMask::new();
                for &i in perm {
                    mask.push(col.mask.is_valid(i));
                }
                let data = match &col.data {
                    ColumnData::StringDict { codes, dict } => ColumnData::StringDict {
                        codes: gather_u32(codes),
                        dict: dict.clone(),
                    },
                    ColumnData::Int64(v) => ColumnData::Int64(gather_i64(v)),
                    ColumnData::Float64(v) => {
                        ColumnData::Float64(perm.iter().map(|&i| v[i]).collect())
                    }
                    ColumnData::Timestamp64(v) => ColumnData::Timestamp64(gather_i64(v)),
                };
                (name.clone(), Column::new(data, mask))
            })
            .collect();
        EventTable {
            case: DictColumn {
                codes: gather_u32(&self.case.codes),
                dict: self.case.dict.clone(),
            },
            activity: DictColumn {
                codes: gather_u32(&self.activity.codes),
                dict: self.activity.dict.clone(),
            },
            ts: gather_i64(&self.ts),
            attrs,
        }
    }

    /// New table containing exactly the given rows, in the given order.
    /// String columns are re-encoded so dictionaries follow first occurrence
    /// in the new row order.
    pub fn take_rows(&self, rows: &[usize]) -> EventTable {
        let mut case_dict = Dictionary::new();
        let mut activity_dict = Dictionary::new();
        let mut case_codes = Vec::with_capacity(rows.len());
        let mut activity_codes = Vec::with_capacity(rows.len());
        let mut ts = Vec::with_capacity(rows.len());
        for &r in rows {
            case_codes.push(case_dict.intern(self.case.value(r)));
            activity_codes.push(activity_dict.intern(self.activity.value(r)));
            ts.push(self.ts[r]);
        }
        let attrs = self
            .attrs
            .iter()
            .map(|(name, col)| {
                let mut mask = NullMask::new();
                let data = match &col.data {
                    ColumnData::StringDict { codes, dict } => {
                        let mut new_dict = Dictionary::new();
                        let mut new_codes = Vec::with_capacity(rows.len());
                        for &r in rows {
                            if col.mask.is_valid(r) {
                                new_codes.push(new_dict.intern(dict.value(codes[r])));
                                mask.push(true);
                            } else {
                                new_codes.push(0);
                                mask.push(false);
                            }
                        }
                        ColumnData::StringDict {
                            codes: new_codes,
                            dict: new_dict,
                        }
                    }
                    ColumnData::Int64(v) => {
                        ColumnData::Int64(take_numeric(v, &col.mask, rows, &mut mask))
                    }
                    ColumnData::Float64(v) => {
                        ColumnData::Float64(take_numeric(v, &col.mask, rows, &mut mask))
                    }
                    ColumnData::Timestamp64(v) => {
                        ColumnData::Timestamp64(take_numeric(v, &col.mask, rows, &mut mask))
                    }
                };
                (name.clone(), Column::new(data, mask))
            })
            .collect();
        EventTable {
            case: DictColumn {
                codes: case_codes,
                dict: case_dict,
            },
            activity: DictColumn {
                codes: activity_codes,
                dict: activity_dict,
            },
            ts,
            attrs,
        }
    }
}

fn take_numeric<T: Copy + Default>(
    values: &[T],
    mask: &NullMask,
    rows: &[usize],
    out_mask: &mut NullMask,
) -> Vec<T> {
    let mut out = Vec::with_capacity(rows.len());
    for &r in rows {
        if mask.is_valid(r) {
            out.push(values[r]);
            out_mask.push(true);
        } else {
            out.push(T::default());
            out_mask.push(false);
        }
    }
    out
}

fn check_dictionary(column: &str, dict: &Dictionary) -> Result<(), Violation> {
    let mut seen = std::collections::HashSet::new();
    for (i, v) in dict.values().iter().enumerate() {
        if !seen.insert(v) {
            return Err(Violation::DictionaryBroken {
                column: column.into(),
                message: format!("duplicate value {v:?}"),
            });
        }
        if dict.code(v) != Some(i as u32) {
            return Err(Violation::DictionaryBroken {
                column: column.into(),
                message: format!("index[{v:?}] != {i}"),
            });
        }
    }
    Ok(())
}

/// Row-oriented builder for [`EventTable`], used by ingestion, the synthetic
/// generator, and tests.
pub struct EventTableBuilder {
    case_dict: Dictionary,
    activity_dict: Dictionary,
    case_codes: Vec<u32>,
    activity_codes: Vec<u32>,
    ts: Vec<i64>,
    attr_names: Vec<String>,
    attr_cols: Vec<AttrBuilder>,
}

enum AttrBuilder {
    Str {
        codes: Vec<u32>,
        dict: Dictionary,
        mask: NullMask,
    },
    Int(Vec<i64>, NullMask),
    Float(Vec<f64>, NullMask),
    Ts(Vec<i64>, NullMask),
}

impl AttrBuilder {
    fn new(kind: ColumnKind) -> Self {
        match kind {
            ColumnKind::String => AttrBuilder::Str {
                codes: Vec::new(),
                dict: Dictionary::new(),
                mask: NullMask::new(),
            },
            ColumnKind::Int64 => AttrBuilder::Int(Vec::new(), NullMask::new()),
            ColumnKind::Float64 => AttrBuilder::Float(Vec::new(), NullMask::new()),
            ColumnKind::Timestamp => AttrBuilder::Ts(Vec::new(), NullMask::new()),
        }
    }

    fn kind(&self) -> ColumnKind {
        match self {
            AttrBuilder::Str { .. } => ColumnKind::String,
            AttrBuilder::Int(..) => ColumnKind::Int64,
            AttrBuilder::Float(..) => ColumnKind::Float64,
            AttrBuilder::Ts(..) => ColumnKind::Timestamp,
        }
    }

    fn push(&mut self, value: Option<&AttrValue>) -> Result<(), String> {
        match (self, value) {
            (AttrBuilder::Str { codes, dict, mask }, Some(AttrValue::Str(s))) => {
                codes.push(dict.intern(s));
                mask.push(true);
            }
            (AttrBuilder::Str { codes, mask, .. }, None) => {
                codes.push(0);
                mask.push(false);
            }
            (AttrBuilder::Int(v, mask), Some(AttrValue::Int(x))) => {
                v.push(*x);
                mask.push(true);
            }
            (AttrBuilder::Int(v, mask), None) => {
                v.push(0);
                mask.push(false);
            }
            (AttrBuilder::Float(v, mask), Some(AttrValue::Float(x))) => {
                v.push(*x);
                mask.push(true);
            }
            (AttrBuilder::Float(v, mask), None) => {
                v.push(0.0);
                mask.push(false);
            }
            (AttrBuilder::Ts(v, mask), Some(AttrValue::Ts(x))) => {
                v.push(*x);
                mask.push(true);
            }
            (AttrBuilder::Ts(v, mask), None) => {
                v.push(0);
                mask.push(false);
            }
            (b, Some(v)) => {
                return Err(format!(
                    "expected {} value, got {}",
                    b.kind(),
                    v.kind()
                ))
            }
        }
        Ok(())
    }

    fn finish(self) -> Column {
        match self {
            AttrBuilder::Str { codes, dict, mask } => {
                Column::new(ColumnData::StringDict { codes, dict }, mask)
            }
            AttrBuilder::Int(v, mask) => Column::new(ColumnData::Int64(v), mask),
            AttrBuilder::Float(v, mask) => Column::new(ColumnData::Float64(v), mask),
            AttrBuilder::Ts(v, mask) => Column::new(ColumnData::Timestamp64(v), mask),
        }
    }
}

impl EventTableBuilder {
    pub fn new() -> Self {
        EventTableBuilder {
            case_dict: Dictionary::new(),
            activity_dict: Dictionary::new(),
            case_codes: Vec::new(),
            activity_codes: Vec::new(),
            ts: Vec::new(),
            attr_names: Vec::new(),
            attr_cols: Vec::new(),
        }
    }

    /// Declares an attribute column. Must be called before the first row.
    pub fn attr(mut self, name: &str, kind: ColumnKind) -> crate::Result<Self> {
        if name == RESERVED_CASE || name == RESERVED_ACTIVITY || name == RESERVED_TIMESTAMP {
            return Err(crate::Error::Schema(format!(
                "attribute name {name:?} collides with a mandatory role"
            )));
        }
        if self.attr_names.iter().any(|n| n == name) {
            return Err(crate::Error::Schema(format!(
                "duplicate attribute name {name:?}"
            )));
        }
        self.attr_names.push(name.to_string());
        self.attr_cols.push(AttrBuilder::new(kind));
        Ok(self)
    }

    /// Appends an event with no attribute values (all declared attributes
    /// become null for this row).
    pub fn push(&mut self, case: &str, activity: &str, ts_ms: i64) {
        let nones: Vec<Option<AttrValue>> = vec![None; self.attr_cols.len()];
        self.push_with_attrs(case, activity, ts_ms, &nones)
            .expect("null attribute row cannot mismatch");
    }

    /// Appends an event with one optional value per declared attribute, in
    /// declaration order.
    pub fn push_with_attrs(
        &mut self,
        case: &str,
        activity: &str,
        ts_ms: i64,
        attrs: &[Option<AttrValue>],
    ) -> crate::Result<()> {
        if attrs.len() != self.attr_cols.len() {
            return Err(crate::Error::Argument(format!(
                "expected {} attribute values, got {}",
                self.attr_cols.len(),
                attrs.len()
            )));
        }
        self.case_codes.push(self.case_dict.intern(case));
        self.activity_codes.push(self.activity_dict.intern(activity));
        self.ts.push(ts_ms);
        for (builder, value) in self.attr_cols.iter_mut().zip(attrs) {
            builder
                .push(value.as_ref())
                .map_err(crate::Error::Argument)?;
        }
        Ok(())
    }

    pub fn n_events(&self) -> usize {
        self.ts.len()
    }

    pub fn finish(self) -> EventTable {
        let attrs = self
            .attr_names
            .into_iter()
            .zip(self.attr_cols.into_iter().map(AttrBuilder::finish))
            .collect();
        EventTable {
            case: DictColumn {
                codes: self.case_codes,
                dict: self.case_dict,
            },
            activity: DictColumn {
                codes: self.activity_codes,
                dict: self.activity_dict,
            },
            ts: self.ts,
            attrs,
        }
    }
}

impl Default for EventTableBuilder {
    fn default() -> Self {
        Self::new()
    }
}
