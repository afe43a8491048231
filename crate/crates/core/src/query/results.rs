use serde_json::{json, Map, Value};

use crate::rdf::Term;
use crate::registry::{Named, Registry};

use super::SolutionSet;

pub trait ResultsFormat: Named + Send + Sync {
    fn write(&self, results: &SolutionSet) -> String;
}

/// Header of variable names, then one row per solution with terms in
/// N-Triples syntax.
pub struct CsvResults;

impl Named for CsvResults {
    fn name(&self) -> &'static str {
        "csv"
    }
}

impl ResultsFormat for CsvResults {
    fn write(&self, results: &SolutionSet) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&results.vars).expect("in-memory write");
        for row in &results.rows {
            w.write_record(row.iter().map(ToString::to_string))
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }
}

/// SPARQL 1.1 Query Results JSON.
pub struct JsonResults;

impl Named for JsonResults {
    fn name(&self) -> &'static str {
        "json"
    }
}

fn term_json(t: &Term) -> Value {
    match t {
        Term::Iri(i) => json!({"type": "uri", "value": i.as_str()}),
        Term::BlankNode(b) => json!({"type": "bnode", "value": b.label()}),
        Term::Literal(l) => {
            let mut m = Map::new();
            m.insert("type".into(), "literal".into());
            m.insert("value".into(), l.lexical().into());
            match l.language() {
                Some(lang) => {
                    m.insert("xml:lang".into(), lang.into());
                }
                None if l.datatype().as_str() != crate::vocab::XSD_STRING => {
                    m.insert("datatype".into(), l.datatype().as_str().into());
                }
                None => {}
            }
            Value::Object(m)
        }
    }
}

impl ResultsFormat for JsonResults {
    fn write(&self, results: &SolutionSet) -> String {
        let bindings: Vec<Value> = results
            .rows
            .iter()
            .map(|row| {
                Value::Object(
                    results
                        .vars
                        .iter()
                        .zip(row)
                        .map(|(v, t)| (v.clone(), term_json(t)))
                        .collect(),
                )
            })
            .collect();
        let doc = json!({
            "head": {"vars": results.vars},
            "results": {"bindings": bindings},
        });
        serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
    }
}

/// Registry holding `csv` and `json`.
pub fn results_formats() -> Registry<dyn ResultsFormat> {
    let mut reg: Registry<dyn ResultsFormat> = Registry::new();
    reg.register(Box::new(CsvResults)).register(Box::new(JsonResults));
    reg
}
