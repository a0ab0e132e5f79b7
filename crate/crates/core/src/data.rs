//! Typed tabular data with dense row identities, plus CSV / JSON-records ingestion.

use std::fmt;
use std::path::Path;

use chrono::{DateTime, NaiveDate, NaiveDateTime};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Index of a row in its [`Dataset`]. Row ids are dense: `0..len`.
pub type RowId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldType {
    Nominal,
    Quantitative,
    Temporal,
}

impl FieldType {
    pub fn is_numeric(self) -> bool {
        !matches!(self, FieldType::Nominal)
    }
}

impl fmt::Display for FieldType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FieldType::Nominal => "nominal",
            FieldType::Quantitative => "quantitative",
            FieldType::Temporal => "temporal",
        })
    }
}

/// A single cell. Temporal values are epoch milliseconds (UTC).
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Number(f64),
    Time(i64),
    Text(String),
}

impl Value {
    pub fn field_type(&self) -> FieldType {
        match self {
            Value::Number(_) => FieldType::Quantitative,
            Value::Time(_) => FieldType::Temporal,
            Value::Text(_) => FieldType::Nominal,
        }
    }

    /// Numeric view of quantitative and temporal values.
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Number(v) => Some(*v),
            Value::Time(ms) => Some(*ms as f64),
            Value::Text(_) => None,
        }
    }

    /// Stable textual key, used for band categories and group labels.
    pub fn key(&self) -> String {
        match self {
            Value::Text(s) => s.clone(),
            Value::Time(ms) => format_time(*ms),
            Value::Number(v) => crate::snapshot::format_number(*v),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

/// Renders epoch milliseconds as an ISO-8601 date, or a full UTC timestamp when
/// the value is not at midnight.
pub fn format_time(ms: i64) -> String {
    match DateTime::from_timestamp_millis(ms) {
        Some(dt) if ms.rem_euclid(86_400_000) == 0 => dt.format("%Y-%m-%d").to_string(),
        Some(dt) => dt.format("%Y-%m-%dT%H:%M:%S%.3fZ").to_string(),
        None => ms.to_string(),
    }
}

/// Parses an ISO-8601 date or timestamp (or a bare integer of epoch ms).
pub fn parse_time(text: &str) -> Option<i64> {
    let text = text.trim();
    if let Ok(dt) = DateTime::parse_from_rfc3339(text) {
        return Some(dt.timestamp_millis());
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f", "%Y-%m-%dT%H:%M"] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(text, fmt) {
            return Some(dt.and_utc().timestamp_millis());
        }
    }
    if let Ok(d) = NaiveDate::parse_from_str(text, "%Y-%m-%d") {
        return Some(d.and_hms_opt(0, 0, 0)?.and_utc().timestamp_millis());
    }
    text.parse::<i64>().ok()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Field {
    pub name: String,
    #[serde(rename = "type")]
    pub field_type: FieldType,
}

impl Field {
    pub fn new(name: impl Into<String>, field_type: FieldType) -> Self {
        Self {
            name: name.into(),
            field_type,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Schema {
    fields: Vec<Field>,
}

impl Schema {
    pub fn new(fields: Vec<Field>) -> Self {
        Self { fields }
    }

    pub fn fields(&self) -> &[Field] {
        &self.fields
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.fields.iter().position(|f| f.name == name)
    }

    pub fn field(&self, name: &str) -> Option<&Field> {
        self.fields.iter().find(|f| f.name == name)
    }
}

#[derive(Debug, Error)]
pub enum DataError {
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("row {row}, column `{column}`: cannot parse {value:?} as {expected}")]
    Parse {
        row: usize,
        column: String,
        value: String,
        expected: FieldType,
    },
    #[error("row {row}: expected {expected} fields, found {found}")]
    Arity {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("row {row}, field `{field}`: value does not match declared type {expected}")]
    TypeMismatch {
        row: usize,
        field: String,
        expected: FieldType,
    },
    #[error("unsupported data file extension: {0}")]
    UnsupportedFormat(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Rows of values conforming to a schema. The row id of a row is its index.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    schema: Schema,
    rows: Vec<Vec<Value>>,
}

impl Dataset {
    pub fn new(schema: Schema, rows: Vec<Vec<Value>>) -> Result<Self, DataError> {
        for (i, row) in rows.iter().enumerate() {
            if row.len() != schema.fields.len() {
                return Err(DataError::Arity {
                    row: i,
                    expected: schema.fields.len(),
                    found: row.len(),
                });
            }
            for (field, value) in schema.fields.iter().zip(row) {
                let ok = match value {
                    Value::Number(v) => field.field_type == FieldType::Quantitative && v.is_finite(),
                    other => other.field_type() == field.field_type,
                };
                if !ok {
                    return Err(DataError::TypeMismatch {
                        row: i,
                        field: field.name.clone(),
                        expected: field.field_type,
                    });
                }
            }
        }
        Ok(Self { schema, rows })
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row_ids(&self) -> impl Iterator<Item = RowId> {
        0..self.rows.len() as RowId
    }

    pub fn row(&self, id: RowId) -> &[Value] {
        &self.rows[id as usize]
    }

    pub fn value(&self, id: RowId, column: usize) -> &Value {
        &self.rows[id as usize][column]
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.schema.index_of(name)
    }
}

fn parse_cell(text: &str, field: &Field, row: usize) -> Result<Value, DataError> {
    let err = || DataError::Parse {
        row,
        column: field.name.clone(),
        value: text.to_string(),
        expected: field.field_type,
    };
    match field.field_type {
        FieldType::Nominal => Ok(Value::Text(text.to_string())),
        FieldType::Quantitative => match text.trim().parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Value::Number(v)),
            _ => Err(err()),
        },
        FieldType::Temporal => parse_time(text).map(Value::Time).ok_or_else(err),
    }
}

/// Parses comma-separated text with a header row. Columns not in the schema are ignored.
/// Row numbers in errors are 1-based data rows (the header is row 0).
pub fn parse_csv(text: &str, schema: &Schema) -> Result<Dataset, DataError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].trim().is_empty()) {
        return Err(DataError::EmptyDataset);
    }
    let columns = schema
        .fields
        .iter()
        .map(|f| {
            headers
                .iter()
                .position(|h| h.trim() == f.name)
                .ok_or_else(|| DataError::MissingColumn(f.name.clone()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let row = i + 1;
        let values = schema
            .fields
            .iter()
            .zip(&columns)
            .map(|(field, &col)| parse_cell(record.get(col).unwrap_or(""), field, row))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(values);
    }
    if rows.is_empty() {
        return Err(DataError::EmptyDataset);
    }
    Dataset::new(schema.clone(), rows)
}

/// Parses a JSON array of records (objects keyed by field name).
pub fn parse_json_records(text: &str, schema: &Schema) -> Result<Dataset, DataError> {
    let records: Vec<serde_json::Map<String, serde_json::Value>> = serde_json::from_str(text)?;
    if records.is_empty() {
        return Err(DataError::EmptyDataset);
    }
    let mut rows = Vec::with_capacity(records.len());
    for (i, record) in records.iter().enumerate() {
        let row = i + 1;
        let mut values = Vec::with_capacity(schema.fields.len());
        for field in &schema.fields {
            let raw = record
                .get(&field.name)
                .ok_or_else(|| DataError::MissingColumn(field.name.clone()))?;
            let value = match (field.field_type, raw) {
                (FieldType::Quantitative, serde_json::Value::Number(n)) => n
                    .as_f64()
                    .filter(|v| v.is_finite())
                    .map(Value::Number)
                    .ok_or_else(|| DataError::Parse {
                        row,
                        column: field.name.clone(),
                        value: raw.to_string(),
                        expected: field.field_type,
                    })?,
                (FieldType::Temporal, serde_json::Value::Number(n)) if n.is_i64() => {
                    Value::Time(n.as_i64().unwrap_or_default())
                }
                (_, serde_json::Value::String(s)) => parse_cell(s, field, row)?,
                (FieldType::Nominal, other) => Value::Text(other.to_string()),
                (_, other) => {
                    return Err(DataError::Parse {
                        row,
                        column: field.name.clone(),
                        value: other.to_string(),
                        expected: field.field_type,
                    })
                }
            };
            values.push(value);
        }
        rows.push(values);
    }
    Dataset::new(schema.clone(), rows)
}

/// Loads a `.csv` or `.json` data file. Row ids follow file order.
pub fn load_dataset(path: &Path, schema: &Schema) -> Result<Dataset, DataError> {
    let text = std::fs::read_to_string(path)?;
    if text.trim().is_empty() {
        return Err(DataError::EmptyDataset);
    }
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => parse_json_records(&text, schema),
        Some("csv") | Some("txt") | None => parse_csv(&text, schema),
        Some(other) => Err(DataError::UnsupportedFormat(other.to_string())),
    }
}
