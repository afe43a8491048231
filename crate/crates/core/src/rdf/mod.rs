//! RDF data model, indexed in-memory triple store, and the two supported
//! serializations (a Turtle subset and N-Triples).

pub(crate) mod cursor;
mod graph;
mod iso;
pub(crate) mod lex;
mod ntriples;
mod term;
mod turtle;

use thiserror::Error;

use crate::registry::{Named, Registry};

pub use graph::{merge, Graph, TripleRef};
pub use iso::is_isomorphic;
pub use ntriples::{parse_ntriples, serialize_ntriples};
pub use term::{canonical_decimal, BlankNode, Iri, Literal, Numeric, Term, Triple};
pub use turtle::{parse_turtle, serialize_turtle};


#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RdfError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown prefix '{prefix}:' at line {line}, column {column}")]
    UnknownPrefix {
        prefix: String,
        line: usize,
        column: usize,
    },
    #[error("invalid term: {0}")]
    InvalidTerm(String),
}

/// A concrete RDF syntax.
pub trait RdfFormat: Named + Send + Sync {
    fn parse(&self, text: &str) -> Result<Graph, RdfError>;
    fn serialize(&self, graph: &Graph) -> String;
    fn file_extension(&self) -> &'static str;
}

pub struct TurtleFormat;

impl Named for TurtleFormat {
    fn name(&self) -> &'static str {
        "turtle"
    }
}

impl RdfFormat for TurtleFormat {
    fn parse(&self, text: &str) -> Result<Graph, RdfError> {
        parse_turtle(text)
    }

    fn serialize(&self, graph: &Graph) -> String {
        serialize_turtle(graph)
    }

    fn file_extension(&self) -> &'static str {
        "ttl"
    }
}

pub struct NTriplesFormat;

impl Named for NTriplesFormat {
    fn name(&self) -> &'static str {
        "ntriples"
    }
}

impl RdfFormat for NTriplesFormat {
    fn parse(&self, text: &str) -> Result<Graph, RdfError> {
        parse_ntriples(text)
    }

    fn serialize(&self, graph: &Graph) -> String {
        serialize_ntriples(graph)
    }

    fn file_extension(&self) -> &'static str {
        "nt"
    }
}

/// Registry holding `turtle` and `ntriples`.
pub fn formats() -> Registry<dyn RdfFormat> {
    let mut reg: Registry<dyn RdfFormat> = Registry::new();
    reg.register(Box::new(TurtleFormat))
        .register(Box::new(NTriplesFormat));
    reg
}

/// Picks a format from a file extension (`.nt` → N-Triples, otherwise Turtle).
pub fn format_for_path(path: &std::path::Path) -> &'static dyn RdfFormat {
    match path.extension().and_then(|e| e.to_str()) {
        Some("nt") => &NTriplesFormat,
        _ => &TurtleFormat,
    }
}
