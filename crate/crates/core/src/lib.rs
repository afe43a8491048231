//! Semantic Web of Things engine.
//!
//! Raw sensor readings are annotated into unified RDF observations using a
//! loadable taxonomy, enriched by forward-chaining rules, linked with
//! domain knowledge through shared namespaces, and queried with a small
//! SPARQL subset. Application templates bundle all of these pieces.

pub mod annotator;
pub mod generator;
pub mod knowledge;
pub mod pipeline;
pub mod query;
pub mod rdf;
pub mod reasoner;
pub mod registry;
pub mod taxonomy;
pub mod vocab;
