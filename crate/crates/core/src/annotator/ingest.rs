//! Raw reading formats: CSV and a SenML-like JSON array.

use std::str::FromStr;

use chrono::{DateTime, SecondsFormat, Utc};
use rust_decimal::Decimal;
use serde_json::Value;
use thiserror::Error;

use crate::registry::{Named, Registry};

/// Column order of the CSV format; also the field names of the JSON format.
pub const FIELDS: [&str; 7] = ["sensor", "value", "unit", "timestamp", "domain", "feature", "source"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawReading {
    pub sensor_label: String,
    pub value: Decimal,
    pub unit_label: String,
    pub timestamp: DateTime<Utc>,
    pub domain_hint: Option<String>,
    pub feature_hint: Option<String>,
    pub source_id: String,
}

impl RawReading {
    /// UTC timestamp in `xsd:dateTime` form, e.g. `2016-09-01T10:00:00Z`.
    pub fn timestamp_lexical(&self) -> String {
        self.timestamp.to_rfc3339_opts(SecondsFormat::AutoSi, true)
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum IngestError {
    #[error("header mismatch: expected '{expected}', found '{found}'")]
    Header { expected: String, found: String },
    #[error("record {index}: {reason}")]
    Record { index: usize, reason: String },
    #[error("malformed document: {0}")]
    Malformed(String),
}

pub trait ReadingFormat: Named + Send + Sync {
    fn parse(&self, text: &str) -> Result<Vec<RawReading>, IngestError>;
}

fn optional(s: &str) -> Option<String> {
    let s = s.trim();
    (!s.is_empty()).then(|| s.to_string())
}

fn parse_value(raw: &str) -> Result<Decimal, String> {
    let raw = raw.trim();
    Decimal::from_str(raw)
        .or_else(|_| Decimal::from_scientific(raw))
        .map_err(|_| format!("value '{raw}' is not a finite decimal number"))
}

fn parse_timestamp(raw: &str) -> Result<DateTime<Utc>, String> {
    DateTime::parse_from_rfc3339(raw.trim())
        .map(|t| t.with_timezone(&Utc))
        .map_err(|e| format!("timestamp '{}' is not an ISO-8601 instant: {e}", raw.trim()))
}

fn build(fields: [&str; 7]) -> Result<RawReading, String> {
    let [sensor, value, unit, timestamp, domain, feature, source] = fields;
    let sensor = sensor.trim();
    if sensor.is_empty() {
        return Err("empty sensor label".into());
    }
    let unit = unit.trim();
    if unit.is_empty() {
        return Err("empty unit label".into());
    }
    let source = source.trim();
    if source.is_empty() {
        return Err("empty source identifier".into());
    }
    Ok(RawReading {
        sensor_label: sensor.to_string(),
        value: parse_value(value)?,
        unit_label: unit.to_string(),
        timestamp: parse_timestamp(timestamp)?,
        domain_hint: optional(domain),
        feature_hint: optional(feature),
        source_id: source.to_string(),
    })
}

/// `sensor,value,unit,timestamp,domain,feature,source`; domain and feature
/// may be empty. A document with no content at all holds zero readings.
pub struct CsvFormat;

impl Named for CsvFormat {
    fn name(&self) -> &'static str {
        "csv"
    }
}

impl ReadingFormat for CsvFormat {
    fn parse(&self, text: &str) -> Result<Vec<RawReading>, IngestError> {
        if text.trim().is_empty() {
            return Ok(Vec::new());
        }
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .from_reader(text.as_bytes());
        let header = rdr
            .headers()
            .map_err(|e| IngestError::Malformed(e.to_string()))?
            .clone();
        let found: Vec<&str> = header.iter().map(str::trim).collect();
        if found != FIELDS {
            return Err(IngestError::Header {
                expected: FIELDS.join(","),
                found: found.join(","),
            });
        }
        let mut out = Vec::new();
        for (index, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| IngestError::Record {
                index,
                reason: e.to_string(),
            })?;
            if rec.len() != FIELDS.len() {
                return Err(IngestError::Record {
                    index,
                    reason: format!("expected {} fields, found {}", FIELDS.len(), rec.len()),
                });
            }
            let fields: [&str; 7] = std::array::from_fn(|i| rec.get(i).unwrap_or(""));
            out.push(build(fields).map_err(|reason| IngestError::Record { index, reason })?);
        }
        Ok(out)
    }
}

/// JSON array of objects keyed by the CSV column names. `value` may be a
/// number or a numeric string; `domain` and `feature` may be null or absent.
pub struct JsonFormat;

impl Named for JsonFormat {
    fn name(&self) -> &'static str {
        "json"
    }
}

impl ReadingFormat for JsonFormat {
    fn parse(&self, text: &str) -> Result<Vec<RawReading>, IngestError> {
        let doc: Value =
            serde_json::from_str(text).map_err(|e| IngestError::Malformed(e.to_string()))?;
        let Value::Array(items) = doc else {
            return Err(IngestError::Malformed("top-level value must be an array".into()));
        };
        items
            .iter()
            .enumerate()
            .map(|(index, item)| {
                let err = |reason: String| IngestError::Record { index, reason };
                let Value::Object(obj) = item else {
                    return Err(err("record is not an object".into()));
                };
                if let Some(k) = obj.keys().find(|k| !FIELDS.contains(&k.as_str())) {
                    return Err(err(format!("unknown field '{k}'")));
                }
                let mut texts: Vec<String> = Vec::with_capacity(7);
                for field in FIELDS {
                    let v = match obj.get(field) {
                        None | Some(Value::Null) => String::new(),
                        Some(Value::String(s)) => s.clone(),
                        Some(Value::Number(n)) if field == "value" => n.to_string(),
                        Some(other) => {
                            return Err(err(format!("field '{field}' has unsupported value {other}")))
                        }
                    };
                    texts.push(v);
                }
                let fields: [&str; 7] = std::array::from_fn(|i| texts[i].as_str());
                build(fields).map_err(err)
            })
            .collect()
    }
}

/// Registry holding `csv` and `json`.
pub fn reading_formats() -> Registry<dyn ReadingFormat> {
    let mut reg: Registry<dyn ReadingFormat> = Registry::new();
    reg.register(Box::new(CsvFormat)).register(Box::new(JsonFormat));
    reg
}

/// Parses `text` with the named format.
pub fn parse_readings(text: &str, format: &str) -> Result<Vec<RawReading>, IngestError> {
    let formats = reading_formats();
    let f = formats
        .resolve(format)
        .map_err(|e| IngestError::Malformed(e.to_string()))?;
    f.parse(text)
}
