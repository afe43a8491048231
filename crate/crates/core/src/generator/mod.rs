//! Application templates: a catalog of ready-made sensor applications,
//! matching of developer requests against it, and materialization of a
//! template into a self-contained bundle directory.
//!
//! Templates are described in Turtle:
//!
//! ```text
//! tpl:HomeRemedies a m3:SWoTTemplate ;
//!     m3:title "Suggest home remedies" ;
//!     m3:description "..." ;
//!     m3:usesSensor m3x:BodyThermometer ;
//!     m3:inDomain m3x:Health ;
//!     m3:annotationHint m3x:BodyTemperature , unit:Cel ;
//!     m3:usesRuleset "health-rules" ;
//!     m3:usesKnowledge "health-ontology" , "naturopathy-dataset" ;
//!     m3:query "queries/remedies.rq" ;
//!     m3:sampleReadings "samples/remedies.csv" .
//! ```
//!
//! Paths are relative to the catalog file.

mod bundle;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use thiserror::Error;

use crate::knowledge::{Catalog, EntryKind};
use crate::query::{execute, parse_query, Query};
use crate::rdf::{Graph, Iri, Term};
use crate::taxonomy::{Kind, Taxonomy, UnificationContext, UnifyError};
use crate::vocab;

pub use bundle::{closure_gaps, materialize, verify_bundle, Bundle, BundleFile, PipelineFile, RUNBOOK_COMMAND_PREFIX};

#[derive(Debug, Clone, PartialEq)]
pub struct Template {
    pub id: Iri,
    pub title: String,
    pub description: String,
    pub sensors: Vec<Iri>,
    pub domains: Vec<Iri>,
    /// Extra taxonomy entries the bundle needs for annotation (measurement
    /// types, units, features).
    pub annotation_hints: Vec<Iri>,
    pub rulesets: Vec<String>,
    pub knowledge: Vec<String>,
    pub query_file: String,
    pub query_text: String,
    pub query: Query,
    pub sample_file: String,
    pub sample_text: String,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum TemplateError {
    #[error("template <{template}>: missing {slot}")]
    MissingSlot { template: String, slot: &'static str },
    #[error("template <{template}>: {slot} must have exactly one value")]
    MultipleValues { template: String, slot: &'static str },
    #[error("template <{template}>: {slot} references unknown {target}")]
    DanglingReference {
        template: String,
        slot: &'static str,
        target: String,
    },
    #[error("template <{template}>: {path}: {message}")]
    File {
        template: String,
        path: String,
        message: String,
    },
    #[error("template <{template}>: bundle is not closed; unresolved IRIs: {}", .iris.join(", "))]
    NotClosed { template: String, iris: Vec<String> },
    #[error("unknown template <{0}>")]
    UnknownTemplate(String),
    #[error("output directory {0} is not empty")]
    OutputNotEmpty(String),
    #[error("I/O error on {path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Unify(#[from] UnifyError),
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("{} template error(s): {}", .errors.len(), .errors.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
pub struct TemplateCatalogError {
    pub errors: Vec<TemplateError>,
}

/// Runs `SELECT ?t ?v WHERE { ?t a m3:SWoTTemplate ; <property> ?v }` and
/// groups the values per template.
fn slot_values(graph: &Graph, property: &str) -> BTreeMap<Iri, Vec<Term>> {
    let q = parse_query(&format!(
        "SELECT ?t ?v WHERE {{ ?t a <{}> ; <{}> ?v . }}",
        vocab::m3("SWoTTemplate"),
        vocab::m3(property)
    ))
    .expect("static query parses");
    let mut out: BTreeMap<Iri, Vec<Term>> = BTreeMap::new();
    for row in execute(&q, graph).rows {
        if let Term::Iri(t) = &row[0] {
            out.entry(t.clone()).or_default().push(row[1].clone());
        }
    }
    out
}

fn template_ids(graph: &Graph) -> Vec<Iri> {
    let q = parse_query(&format!(
        "SELECT DISTINCT ?t WHERE {{ ?t a <{}> . }}",
        vocab::m3("SWoTTemplate")
    ))
    .expect("static query parses");
    execute(&q, graph)
        .rows
        .into_iter()
        .filter_map(|r| r[0].as_iri().cloned())
        .collect()
}

struct Slots {
    values: BTreeMap<&'static str, BTreeMap<Iri, Vec<Term>>>,
}

impl Slots {
    fn get(&self, slot: &'static str, t: &Iri) -> &[Term] {
        self.values[slot].get(t).map(Vec::as_slice).unwrap_or(&[])
    }

    fn iris(&self, slot: &'static str, t: &Iri, errors: &mut Vec<TemplateError>) -> Vec<Iri> {
        let mut out = Vec::new();
        for v in self.get(slot, t) {
            match v {
                Term::Iri(i) => out.push(i.clone()),
                other => errors.push(TemplateError::DanglingReference {
                    template: t.as_str().into(),
                    slot,
                    target: other.to_string(),
                }),
            }
        }
        out
    }

    fn strings(&self, slot: &'static str, t: &Iri) -> Vec<String> {
        let mut v: Vec<String> = self
            .get(slot, t)
            .iter()
            .map(|v| match v {
                Term::Literal(l) => l.lexical().to_string(),
                other => other.to_string(),
            })
            .collect();
        v.sort();
        v.dedup();
        v
    }

    fn single(&self, slot: &'static str, t: &Iri, errors: &mut Vec<TemplateError>) -> Option<String> {
        let v = self.strings(slot, t);
        match v.len() {
            1 => v.into_iter().next(),
            0 => {
                errors.push(TemplateError::MissingSlot {
                    template: t.as_str().into(),
                    slot,
                });
                None
            }
            _ => {
                errors.push(TemplateError::MultipleValues {
                    template: t.as_str().into(),
                    slot,
                });
                None
            }
        }
    }
}

const SLOTS: [&str; 9] = [
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

/// Checks that every catalog and taxonomy reference of `t` resolves.
pub fn validate_template(t: &Template, knowledge: &Catalog, tax: &Taxonomy) -> Vec<TemplateError> {
    let mut errors = Vec::new();
    let id = t.id.as_str().to_string();
    let mut dangling = |slot: &'static str, target: String| {
        errors.push(TemplateError::DanglingReference {
            template: id.clone(),
            slot,
            target,
        })
    };
    for s in &t.sensors {
        if tax.get(s).map(|e| e.kind) != Some(Kind::SensorType) {
            dangling("usesSensor", format!("sensor type <{}>", s.as_str()));
        }
    }
    for d in &t.domains {
        if tax.get(d).map(|e| e.kind) != Some(Kind::Domain) {
            dangling("inDomain", format!("domain <{}>", d.as_str()));
        }
    }
    for h in &t.annotation_hints {
        if tax.get(h).is_none() {
            dangling("annotationHint", format!("taxonomy entry <{}>", h.as_str()));
        }
    }
    for r in &t.rulesets {
        if knowledge.get(r).map(|e| e.kind) != Some(EntryKind::Ruleset) {
            dangling("usesRuleset", format!("rule set '{r}'"));
        }
    }
    for k in &t.knowledge {
        if !knowledge.get(k).is_some_and(|e| e.kind != EntryKind::Ruleset) {
            dangling("usesKnowledge", format!("ontology or dataset '{k}'"));
        }
    }
    errors
}

/// Reads every template in `graph`, loading query and sample files from
/// `base_dir`, and validates all references. Every problem is reported.
pub fn load_template_catalog(
    graph: &Graph,
    base_dir: &Path,
    knowledge: &Catalog,
    tax: &Taxonomy,
) -> Result<Vec<Template>, TemplateCatalogError> {
    let slots = Slots {
        values: SLOTS
            .iter()
            .map(|s| (*s, slot_values(graph, s)))
            .collect(),
    };
    let mut errors = Vec::new();
    let mut out = Vec::new();
    for id in template_ids(graph) {
        let before = errors.len();
        let name = id.as_str().to_string();
        let title = slots.single("title", &id, &mut errors);
        let description = slots.strings("description", &id).join("\n");
        let sensors = slots.iris("usesSensor", &id, &mut errors);
        let domains = slots.iris("inDomain", &id, &mut errors);
        let hints = slots.iris("annotationHint", &id, &mut errors);
        let rulesets = slots.strings("usesRuleset", &id);
        let knowledge_ids = slots.strings("usesKnowledge", &id);
        let query_file = slots.single("query", &id, &mut errors);
        let sample_file = slots.single("sampleReadings", &id, &mut errors);
        for (slot, empty) in [
            ("usesSensor", sensors.is_empty()),
            ("inDomain", domains.is_empty()),
            ("annotationHint", hints.is_empty()),
            ("usesRuleset", rulesets.is_empty()),
            ("usesKnowledge", knowledge_ids.is_empty()),
        ] {
            if empty && !errors.iter().skip(before).any(|e| matches!(e, TemplateError::DanglingReference { slot: s, .. } if *s == slot)) {
                errors.push(TemplateError::MissingSlot {
                    template: name.clone(),
                    slot,
                });
            }
        }
        let read = |rel: &str, errors: &mut Vec<TemplateError>| {
            std::fs::read_to_string(base_dir.join(rel))
                .map_err(|e| {
                    errors.push(TemplateError::File {
                        template: name.clone(),
                        path: rel.into(),
                        message: e.to_string(),
                    })
                })
                .ok()
        };
        let query_text = query_file.as_deref().and_then(|q| read(q, &mut errors));
        let query = match (&query_file, &query_text) {
            (Some(f), Some(text)) => parse_query(text)
                .map_err(|e| {
                    errors.push(TemplateError::File {
                        template: name.clone(),
                        path: f.clone(),
                        message: e.to_string(),
                    })
                })
                .ok(),
            _ => None,
        };
        let sample_text = sample_file.as_deref().and_then(|s| read(s, &mut errors));
        if let (Some(f), Some(text)) = (&sample_file, &sample_text) {
            if let Err(e) = crate::annotator::parse_readings(text, "csv") {
                errors.push(TemplateError::File {
                    template: name.clone(),
                    path: f.clone(),
                    message: e.to_string(),
                });
            }
        }
        if errors.len() > before {
            continue;
        }
        let t = Template {
            id: id.clone(),
            title: title.expect("checked"),
            description,
            sensors,
            domains,
            annotation_hints: hints,
            rulesets,
            knowledge: knowledge_ids,
            query_file: query_file.expect("checked"),
            query_text: query_text.expect("checked"),
            query: query.expect("checked"),
            sample_file: sample_file.expect("checked"),
            sample_text: sample_text.expect("checked"),
        };
        let problems = validate_template(&t, knowledge, tax);
        if problems.is_empty() {
            out.push(t);
        } else {
            errors.extend(problems);
        }
    }
    if errors.is_empty() {
        Ok(out)
    } else {
        Err(TemplateCatalogError { errors })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TemplateMatch<'a> {
    pub template: &'a Template,
    pub matched_sensors: usize,
    pub matched_domains: usize,
}

impl TemplateMatch<'_> {
    pub fn score(&self) -> usize {
        self.matched_sensors + self.matched_domains
    }
}

/// Every template sharing at least one sensor type and at least one domain
/// with the request, best first (score descending, then template id).
pub fn match_templates<'a>(sensors: &[Iri], domains: &[Iri], templates: &'a [Template]) -> Vec<TemplateMatch<'a>> {
    let sensors: BTreeSet<&Iri> = sensors.iter().collect();
    let domains: BTreeSet<&Iri> = domains.iter().collect();
    let mut out: Vec<TemplateMatch> = templates
        .iter()
        .filter_map(|t| {
            let ms = t.sensors.iter().collect::<BTreeSet<_>>().intersection(&sensors).count();
            let md = t.domains.iter().collect::<BTreeSet<_>>().intersection(&domains).count();
            (ms > 0 && md > 0).then_some(TemplateMatch {
                template: t,
                matched_sensors: ms,
                matched_domains: md,
            })
        })
        .collect();
    out.sort_by(|a, b| {
        b.score()
            .cmp(&a.score())
            .then_with(|| a.template.id.cmp(&b.template.id))
    });
    out
}

fn as_known_iri(raw: &str, tax: &Taxonomy, kind: Kind) -> Option<Iri> {
    tax.get_str(raw)
        .filter(|e| e.kind == kind)
        .map(|e| e.canonical.clone())
}

/// Unifies raw request labels. Domains are unified first; each sensor label
/// is then unified once per requested domain (or without context when no
/// domain is given) and every distinct result is kept. A sensor label that
/// unifies in no context is an error. Full IRIs of taxonomy entries are
/// accepted as-is.
pub fn unify_request(
    raw_sensors: &[String],
    raw_domains: &[String],
    tax: &Taxonomy,
) -> Result<(Vec<Iri>, Vec<Iri>), UnifyError> {
    let none = UnificationContext::default();
    let mut domains = Vec::new();
    for d in raw_domains {
        let iri = match as_known_iri(d, tax, Kind::Domain) {
            Some(i) => i,
            None => tax.unify(d, Kind::Domain, &none)?,
        };
        if !domains.contains(&iri) {
            domains.push(iri);
        }
    }
    let contexts: Vec<UnificationContext> = if domains.is_empty() {
        vec![none]
    } else {
        domains
            .iter()
            .map(|d| UnificationContext::new(Some(d.clone()), None))
            .collect()
    };
    let mut sensors = Vec::new();
    for s in raw_sensors {
        if let Some(i) = as_known_iri(s, tax, Kind::SensorType) {
            if !sensors.contains(&i) {
                sensors.push(i);
            }
            continue;
        }
        let mut first_err = None;
        let mut found = false;
        for ctx in &contexts {
            match tax.unify(s, Kind::SensorType, ctx) {
                Ok(i) => {
                    found = true;
                    if !sensors.contains(&i) {
                        sensors.push(i);
                    }
                }
                Err(e) => {
                    first_err.get_or_insert(e);
                }
            }
        }
        if !found {
            return Err(first_err.expect("at least one context"));
        }
    }
    Ok((sensors, domains))
}

pub fn find_template<'a>(templates: &'a [Template], id: &str) -> Result<&'a Template, TemplateError> {
    // accept the bracketed form `templates list` prints
    let id = id.strip_prefix('<').and_then(|i| i.strip_suffix('>')).unwrap_or(id);
    templates
        .iter()
        .find(|t| t.id.as_str() == id || t.id.as_str().rsplit(['#', '/']).next() == Some(id))
        .ok_or_else(|| TemplateError::UnknownTemplate(id.to_string()))
}
