//! The four processing stages as text-to-text steps. `run` chains them
//! through their serialized forms, so a full run writes exactly the bytes
//! the stages would write when invoked one at a time.

use thiserror::Error;

use crate::annotator::{annotate, parse_readings, AnnotateError, IngestError};
use crate::knowledge::{build_cross_domain_graph, observed_domains, select_knowledge, Catalog, KnowledgeEntry, KnowledgeError};
use crate::query::{execute, results_formats, Query, SolutionSet};
use crate::rdf::{parse_turtle, serialize_turtle, Graph, RdfError};
use crate::reasoner::{evaluators, BuiltinTypeError, RuleSet};
use crate::registry::UnknownStrategy;
use crate::taxonomy::Taxonomy;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Annotate(#[from] AnnotateError),
    #[error(transparent)]
    Knowledge(#[from] KnowledgeError),
    #[error(transparent)]
    Strategy(#[from] UnknownStrategy),
    #[error("intermediate graph does not parse: {0}")]
    Intermediate(#[from] RdfError),
}

pub fn annotate_stage(readings: &str, format: &str, tax: &Taxonomy) -> Result<String, PipelineError> {
    let raw = parse_readings(readings, format)?;
    Ok(serialize_turtle(&annotate(&raw, tax)?))
}

pub struct ReasonOutput {
    pub enriched: String,
    pub derivations: String,
    pub derived: usize,
    pub diagnostics: Vec<BuiltinTypeError>,
}

pub fn reason_stage(input: &Graph, rules: &RuleSet, engine: &str) -> Result<ReasonOutput, PipelineError> {
    let reg = evaluators();
    let r = reg.resolve(engine)?.evaluate(input, rules);
    Ok(ReasonOutput {
        enriched: serialize_turtle(&r.graph),
        derivations: r.log_jsonl(),
        derived: r.derived_count(input),
        diagnostics: r.diagnostics,
    })
}

/// Which knowledge entries the merge stage links in.
#[derive(Debug, Clone, Copy)]
pub enum KnowledgeChoice<'a> {
    Entries(&'a [&'a KnowledgeEntry]),
    /// Entries selected for the domains the input observations name.
    ObservedDomains(&'a Catalog),
}

impl<'a> KnowledgeChoice<'a> {
    pub fn entries(&self, input: &Graph) -> Vec<&'a KnowledgeEntry> {
        match *self {
            KnowledgeChoice::Entries(e) => e.to_vec(),
            KnowledgeChoice::ObservedDomains(cat) => select_knowledge(&observed_domains(input), cat),
        }
    }
}

pub fn merge_stage(input: &Graph, knowledge: KnowledgeChoice) -> Result<String, PipelineError> {
    let entries = knowledge.entries(input);
    Ok(serialize_turtle(&build_cross_domain_graph(&entries, input)?.graph))
}

pub fn query_stage(input: &Graph, query: &Query, format: &str) -> Result<(String, SolutionSet), PipelineError> {
    let reg = results_formats();
    let writer = reg.resolve(format)?;
    let solutions = execute(query, input);
    Ok((writer.write(&solutions), solutions))
}

pub struct PipelineSpec<'a> {
    pub taxonomy: &'a Taxonomy,
    pub readings: &'a str,
    pub reading_format: &'a str,
    pub rules: &'a RuleSet,
    pub engine: &'a str,
    pub knowledge: KnowledgeChoice<'a>,
    pub query: &'a Query,
    pub results_format: &'a str,
}

/// Every artifact of a full run, as written to disk.
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub annotated: String,
    pub enriched: String,
    pub derivations: String,
    pub merged: String,
    pub results: String,
    pub solutions: SolutionSet,
    pub diagnostics: Vec<BuiltinTypeError>,
}

pub fn run(spec: &PipelineSpec) -> Result<PipelineOutput, PipelineError> {
    let annotated = annotate_stage(spec.readings, spec.reading_format, spec.taxonomy)?;
    let reasoned = reason_stage(&parse_turtle(&annotated)?, spec.rules, spec.engine)?;
    let merged = merge_stage(&parse_turtle(&reasoned.enriched)?, spec.knowledge)?;
    let (results, solutions) = query_stage(&parse_turtle(&merged)?, spec.query, spec.results_format)?;
    Ok(PipelineOutput {
        annotated,
        enriched: reasoned.enriched,
        derivations: reasoned.derivations,
        merged,
        results,
        solutions,
        diagnostics: reasoned.diagnostics,
    })
}
