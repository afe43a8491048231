//! Namespace IRIs and the repo's own vocabulary terms.

pub const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const RDFS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";
pub const SKOS: &str = "http://www.w3.org/2004/02/skos/core#";
pub const SSN: &str = "http://purl.oclc.org/NET/ssnx/ssn#";

/// Predicates and classes of the observation shape, taxonomy and template vocabularies.
pub const M3: &str = "https://m3.example.org/vocab#";
/// Canonical taxonomy classes (sensor types, measurement types, features, domains).
pub const M3X: &str = "https://m3.example.org/m3-lite#";
pub const UNIT: &str = "https://m3.example.org/unit#";
/// Base for generated observation and sensor node IRIs.
pub const DATA: &str = "https://m3.example.org/data/";

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const RDF_LANG_STRING: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString";
pub const RDFS_SUBCLASS_OF: &str = "http://www.w3.org/2000/01/rdf-schema#subClassOf";
pub const RDFS_LABEL: &str = "http://www.w3.org/2000/01/rdf-schema#label";
pub const SKOS_PREF_LABEL: &str = "http://www.w3.org/2004/02/skos/core#prefLabel";
pub const SKOS_ALT_LABEL: &str = "http://www.w3.org/2004/02/skos/core#altLabel";

pub const XSD_STRING: &str = "http://www.w3.org/2001/XMLSchema#string";
pub const XSD_BOOLEAN: &str = "http://www.w3.org/2001/XMLSchema#boolean";
pub const XSD_INTEGER: &str = "http://www.w3.org/2001/XMLSchema#integer";
pub const XSD_DECIMAL: &str = "http://www.w3.org/2001/XMLSchema#decimal";
pub const XSD_DOUBLE: &str = "http://www.w3.org/2001/XMLSchema#double";
pub const XSD_FLOAT: &str = "http://www.w3.org/2001/XMLSchema#float";
pub const XSD_DATE_TIME: &str = "http://www.w3.org/2001/XMLSchema#dateTime";

pub const SSN_SENSOR: &str = "http://purl.oclc.org/NET/ssnx/ssn#Sensor";
pub const SSN_FEATURE_OF_INTEREST: &str = "http://purl.oclc.org/NET/ssnx/ssn#FeatureOfInterest";
pub const SSN_OBSERVATION_VALUE: &str = "http://purl.oclc.org/NET/ssnx/ssn#ObservationValue";

/// Builds a full IRI in the repo vocabulary namespace.
pub fn m3(local: &str) -> String {
    format!("{M3}{local}")
}

pub fn m3x(local: &str) -> String {
    format!("{M3X}{local}")
}

/// Local names defined by the repo vocabulary. Anything else in the `m3:`
/// namespace is unknown.
pub const M3_TERMS: &[&str] = &[
    // observation shape
    "hasValue",
    "hasUnit",
    "hasTimestamp",
    "observedBy",
    "hasDomain",
    "hasFeature",
    // taxonomy
    "Taxonomy",
    "taxonomyVersion",
    "SensorType",
    "MeasurementType",
    "FeatureType",
    "Unit",
    "Domain",
    "measures",
    "defaultUnit",
    "validIn",
    "hasFeatureOfInterest",
    // templates
    "SWoTTemplate",
    "title",
    "description",
    "usesSensor",
    "inDomain",
    "annotationHint",
    "usesRuleset",
    "usesKnowledge",
    "query",
    "sampleReadings",
];

pub fn is_m3_term(iri: &str) -> bool {
    iri.strip_prefix(M3)
        .map(|local| M3_TERMS.contains(&local))
        .unwrap_or(false)
}

/// Prefixes every generated document declares.
pub fn standard_prefixes() -> Vec<(&'static str, &'static str)> {
    vec![
        ("m3", M3),
        ("m3x", M3X),
        ("rdf", RDF),
        ("rdfs", RDFS),
        ("unit", UNIT),
        ("xsd", XSD),
    ]
}

/// Namespace part of an IRI: everything up to and including the last `#`,
/// or the last `/` when there is no fragment.
pub fn namespace_of(iri: &str) -> &str {
    if let Some(i) = iri.rfind('#') {
        return &iri[..=i];
    }
    match iri.rfind('/') {
        Some(i) => &iri[..=i],
        None => iri,
    }
}
