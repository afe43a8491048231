//! Turns raw sensor readings into unified RDF observations.
//!
//! Each reading becomes one observation node:
//!
//! ```text
//! obs a <measurement type> ;
//!     m3:hasValue "38.7"^^xsd:decimal ;
//!     m3:hasUnit unit:Cel ;
//!     m3:hasTimestamp "2016-09-01T10:00:00Z"^^xsd:dateTime ;
//!     m3:observedBy <sensor node> ;
//!     m3:hasDomain m3x:Health ;
//!     m3:hasFeature m3x:Body .          # only with a feature hint
//! <sensor node> a <sensor type> .
//! ```
//!
//! Observation IRIs hash `(source, timestamp, sensor label)`; sensor node
//! IRIs combine the source id with the sensor type.

mod ingest;
pub mod units;

use std::collections::BTreeMap;

use percent_encoding::{utf8_percent_encode, AsciiSet, NON_ALPHANUMERIC};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::rdf::{Graph, Iri, Term, Triple};
use crate::taxonomy::{Kind, Taxonomy, UnificationContext, UnifyError};
use crate::vocab::{self, m3, RDF_TYPE, XSD_DATE_TIME};

pub use ingest::{
    parse_readings, reading_formats, CsvFormat, IngestError, JsonFormat, RawReading, ReadingFormat,
    FIELDS,
};

pub const OBS_NAMESPACE: &str = "https://m3.example.org/data/obs/";
pub const SENSOR_NAMESPACE: &str = "https://m3.example.org/data/sensor/";

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ReadingIssue {
    #[error(transparent)]
    Unify(#[from] UnifyError),
    #[error("no domain hint and sensor type <{sensor}> is valid in {count} domains")]
    MissingDomain { sensor: String, count: usize },
    #[error("no conversion from <{from}> to default unit <{to}>")]
    UnsupportedConversion { from: String, to: String },
    /// Same source, timestamp and sensor label as an earlier reading, but
    /// different content; both cannot be one observation.
    #[error("conflicts with reading #{first}, which has the same source, timestamp and sensor")]
    ConflictingDuplicate { first: usize },
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("{} reading(s) failed: {}", .failures.len(), .failures.iter().map(|(i, e)| format!("#{i}: {e}")).collect::<Vec<_>>().join("; "))]
pub struct AnnotateError {
    /// `(reading index, problem)` for every failing reading.
    pub failures: Vec<(usize, ReadingIssue)>,
}

/// Unreserved characters stay as-is in generated IRI segments.
const SEGMENT: &AsciiSet = &NON_ALPHANUMERIC.remove(b'-').remove(b'_').remove(b'.').remove(b'~');

pub fn observation_iri(reading: &RawReading) -> Iri {
    let mut h = Sha256::new();
    h.update(reading.source_id.as_bytes());
    h.update([0x1f]);
    h.update(reading.timestamp_lexical().as_bytes());
    h.update([0x1f]);
    h.update(reading.sensor_label.as_bytes());
    let digest = hex::encode(h.finalize());
    Iri::new(format!("{OBS_NAMESPACE}{}", &digest[..16])).expect("valid IRI")
}

pub fn sensor_iri(source_id: &str, sensor_type: &Iri) -> Iri {
    let local = sensor_type
        .as_str()
        .rsplit(['#', '/'])
        .next()
        .unwrap_or_default();
    let source = utf8_percent_encode(source_id, SEGMENT);
    Iri::new(format!("{SENSOR_NAMESPACE}{source}-{local}")).expect("valid IRI")
}

struct Resolved {
    measurement: Iri,
    value: rust_decimal::Decimal,
    unit: Iri,
    sensor_type: Iri,
    domain: Iri,
    feature: Option<Iri>,
}

fn resolve(reading: &RawReading, tax: &Taxonomy) -> Result<Resolved, ReadingIssue> {
    let empty = UnificationContext::default();
    let domain_hint = reading
        .domain_hint
        .as_deref()
        .map(|d| tax.unify(d, Kind::Domain, &empty))
        .transpose()?;
    let feature = reading
        .feature_hint
        .as_deref()
        .map(|f| tax.unify(f, Kind::Feature, &UnificationContext::new(domain_hint.clone(), None)))
        .transpose()?;
    let ctx = UnificationContext::new(domain_hint.clone(), feature.clone());
    let sensor_type = tax.unify(&reading.sensor_label, Kind::SensorType, &ctx)?;
    let domain = match domain_hint {
        Some(d) => d,
        None => {
            let entry = tax.get(&sensor_type).expect("unified IRIs are entries");
            match entry.domains.as_slice() {
                [only] => only.clone(),
                many => {
                    return Err(ReadingIssue::MissingDomain {
                        sensor: sensor_type.as_str().into(),
                        count: many.len(),
                    })
                }
            }
        }
    };
    let ctx = UnificationContext::new(Some(domain.clone()), feature.clone());
    let measurement = tax.resolve_measurement(&sensor_type, &ctx)?;
    let unit = tax.unify(&reading.unit_label, Kind::Unit, &ctx)?;
    let default_unit = tax
        .get(&measurement)
        .and_then(|e| e.default_unit.clone());
    let (value, unit) = match default_unit {
        Some(target) if target != unit => {
            let conv = units::find_conversion(unit.as_str(), target.as_str()).ok_or_else(|| {
                ReadingIssue::UnsupportedConversion {
                    from: unit.as_str().into(),
                    to: target.as_str().into(),
                }
            })?;
            (conv.apply(reading.value), target)
        }
        _ => (reading.value, unit),
    };
    Ok(Resolved {
        measurement,
        value,
        unit,
        sensor_type,
        domain,
        feature,
    })
}

/// Annotates a batch. Either every reading is annotated or every failing
/// reading is reported; no partial graph is returned.
pub fn annotate(readings: &[RawReading], tax: &Taxonomy) -> Result<Graph, AnnotateError> {
    let mut graph = Graph::new();
    for (p, ns) in vocab::standard_prefixes() {
        graph.set_prefix(p, ns);
    }
    graph.set_prefix("obs", OBS_NAMESPACE);
    graph.set_prefix("sensor", SENSOR_NAMESPACE);

    let iri = |s: &str| Term::iri(s).expect("vocabulary IRI");
    let mut failures = Vec::new();
    let mut seen: BTreeMap<Iri, usize> = BTreeMap::new();
    for (index, reading) in readings.iter().enumerate() {
        // an exact repeat adds nothing; a different reading under the same
        // observation IRI would give it two values
        match seen.get(&observation_iri(reading)) {
            Some(&first) if readings[first] == *reading => continue,
            Some(&first) => {
                failures.push((index, ReadingIssue::ConflictingDuplicate { first }));
                continue;
            }
            None => {
                seen.insert(observation_iri(reading), index);
            }
        }
        let r = match resolve(reading, tax) {
            Ok(r) => r,
            Err(e) => {
                failures.push((index, e));
                continue;
            }
        };
        let obs = Term::Iri(observation_iri(reading));
        let sensor = Term::Iri(sensor_iri(&reading.source_id, &r.sensor_type));
        let mut triples = vec![
            (obs.clone(), iri(RDF_TYPE), Term::Iri(r.measurement)),
            (obs.clone(), iri(&m3("hasValue")), Term::decimal(r.value)),
            (obs.clone(), iri(&m3("hasUnit")), Term::Iri(r.unit)),
            (
                obs.clone(),
                iri(&m3("hasTimestamp")),
                Term::typed(reading.timestamp_lexical(), XSD_DATE_TIME).expect("valid"),
            ),
            (obs.clone(), iri(&m3("observedBy")), sensor.clone()),
            (obs.clone(), iri(&m3("hasDomain")), Term::Iri(r.domain)),
            (sensor, iri(RDF_TYPE), Term::Iri(r.sensor_type)),
        ];
        if let Some(f) = r.feature {
            triples.push((obs, iri(&m3("hasFeature")), Term::Iri(f)));
        }
        for (s, p, o) in triples {
            graph.insert(Triple::new(s, p, o).expect("valid triple"));
        }
    }
    if failures.is_empty() {
        Ok(graph)
    } else {
        Err(AnnotateError { failures })
    }
}
