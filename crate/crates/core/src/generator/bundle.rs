use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::knowledge::{load_catalog, Catalog, EntryKind, KnowledgeEntry, Manifest, ManifestEntry};
use crate::query::{parse_query, Expr, Query, QueryTerm};
use crate::rdf::{parse_turtle, serialize_turtle, Graph, Term};
use crate::reasoner::{RuleSet, RuleTerm};
use crate::taxonomy::{load_taxonomy, Taxonomy};
use crate::vocab;

use super::{validate_template, Template, TemplateError};

/// Every runbook line that invokes the tool starts with this.
pub const RUNBOOK_COMMAND_PREFIX: &str = "m3 ";

const OUT_DIR: &str = "out";

/// Configuration file for `m3 run`. Relative paths are resolved against the
/// file's own directory. Every key is optional so command-line flags and
/// environment variables can fill the gaps.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub taxonomy: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input_format: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rules: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub engine: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub knowledge_manifest: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub knowledge: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub query: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub results_format: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleFile {
    pub path: String,
    pub role: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct BundleManifest {
    template: String,
    title: String,
    files: Vec<BundleFile>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bundle {
    pub dir: PathBuf,
    pub files: Vec<BundleFile>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn is_standard(iri: &str) -> bool {
    [vocab::RDF, vocab::RDFS, vocab::XSD, vocab::SKOS, vocab::SSN]
        .iter()
        .any(|ns| iri.starts_with(ns))
        || vocab::is_m3_term(iri)
}

fn rule_iris(rules: &RuleSet) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let mut add = |t: &RuleTerm| {
        if let RuleTerm::Const(Term::Iri(i)) = t {
            out.insert(i.as_str().to_string());
        }
        if let RuleTerm::Const(Term::Literal(l)) = t {
            out.insert(l.datatype().as_str().to_string());
        }
    };
    for r in &rules.rules {
        for p in r.patterns().chain(&r.head) {
            add(&p.subject);
            add(&p.predicate);
            add(&p.object);
        }
    }
    out
}

fn query_iris(q: &Query) -> BTreeSet<String> {
    fn term(t: &QueryTerm, out: &mut BTreeSet<String>) {
        match t {
            QueryTerm::Const(Term::Iri(i)) => {
                out.insert(i.as_str().to_string());
            }
            QueryTerm::Const(Term::Literal(l)) => {
                out.insert(l.datatype().as_str().to_string());
            }
            _ => {}
        }
    }
    fn expr(e: &Expr, out: &mut BTreeSet<String>) {
        match e {
            Expr::Cmp(_, a, b) => {
                term(a, out);
                term(b, out);
            }
            Expr::And(a, b) | Expr::Or(a, b) => {
                expr(a, out);
                expr(b, out);
            }
        }
    }
    let mut out = BTreeSet::new();
    for p in &q.patterns {
        for t in p.terms() {
            term(t, &mut out);
        }
    }
    for f in &q.filters {
        expr(f, &mut out);
    }
    out
}

/// IRIs used by the rules or the query that neither the taxonomy nor any
/// knowledge graph mentions. Standard vocabularies are exempt.
pub fn closure_gaps<'a>(
    rules: impl IntoIterator<Item = &'a RuleSet>,
    query: &Query,
    taxonomy: &'a Graph,
    knowledge: impl IntoIterator<Item = &'a Graph>,
) -> Vec<String> {
    let mut known: BTreeSet<String> = BTreeSet::new();
    for g in std::iter::once(taxonomy).chain(knowledge) {
        for t in g.terms() {
            if let Term::Iri(i) = t {
                known.insert(i.as_str().to_string());
            }
        }
    }
    let mut used = query_iris(query);
    for r in rules {
        used.extend(rule_iris(r));
    }
    used.into_iter()
        .filter(|i| !is_standard(i) && !known.contains(i))
        .collect()
}

fn extension(path: &str) -> &str {
    Path::new(path)
        .extension()
        .and_then(|e| e.to_str())
        .unwrap_or("ttl")
}

fn knowledge_file(e: &KnowledgeEntry) -> String {
    match e.kind {
        EntryKind::Ruleset => format!("rules/{}.rules", e.id),
        _ => format!("knowledge/{}.{}", e.id, extension(&e.path)),
    }
}

fn local_name(iri: &str) -> &str {
    iri.rsplit(['#', '/']).next().unwrap_or(iri)
}

fn runbook(t: &Template, rules: &[String], knowledge_ids: &[String]) -> String {
    let mut reason = String::from("m3 reason --in out/annotated.ttl");
    for r in rules {
        reason.push_str(&format!(" --rules {r}"));
    }
    reason.push_str(" --out out/enriched.ttl --log out/derivations.jsonl");
    let commands = [
        "m3 annotate --taxonomy taxonomy.ttl --in sample-readings.csv --format csv --out out/annotated.ttl".to_string(),
        reason,
        format!(
            "m3 knowledge merge --manifest knowledge/catalog.toml --ids {} --in out/enriched.ttl --out out/merged.ttl",
            knowledge_ids.join(",")
        ),
        "m3 query --in out/merged.ttl --query query.rq --format csv --output out/results.csv".to_string(),
    ];
    let list = |v: &[crate::rdf::Iri]| {
        v.iter()
            .map(|i| local_name(i.as_str()).to_string())
            .collect::<Vec<_>>()
            .join(", ")
    };
    let mut s = format!("# {}\n\n", t.title);
    if !t.description.is_empty() {
        s.push_str(&format!("{}\n\n", t.description));
    }
    s.push_str(&format!(
        "Template `{}`. Sensors: {}. Domains: {}.\n\n",
        t.id.as_str(),
        list(&t.sensors),
        list(&t.domains)
    ));
    s.push_str("## Running\n\nFrom this directory:\n\n```sh\n");
    for c in &commands {
        s.push_str(c);
        s.push('\n');
    }
    s.push_str("```\n\nThe same steps run in one go with `m3 run --config pipeline.conf`.\n");
    s.push_str("Suggestions land in `out/results.csv`. Replace `sample-readings.csv` with real\n");
    s.push_str("readings (columns: sensor,value,unit,timestamp,domain,feature,source) to use\n");
    s.push_str("live data.\n\n## Files\n\n");
    s.push_str("| file | purpose |\n|---|---|\n");
    s.push_str("| taxonomy.ttl | sensor taxonomy subset used for annotation |\n");
    s.push_str("| rules/ | rule sets applied to annotated data |\n");
    s.push_str("| knowledge/ | domain ontologies and datasets with their catalog |\n");
    s.push_str("| query.rq | query producing the suggestions |\n");
    s.push_str("| sample-readings.csv | example input |\n");
    s.push_str("| pipeline.conf | configuration for `m3 run` |\n");
    s.push_str("| manifest.json | file list with SHA-256 digests |\n");
    s
}

fn is_empty_dir(dir: &Path) -> Result<bool, TemplateError> {
    match fs::read_dir(dir) {
        Ok(mut it) => Ok(it.next().is_none()),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(true),
        Err(e) => Err(TemplateError::Io {
            path: dir.display().to_string(),
            message: e.to_string(),
        }),
    }
}

/// Writes a self-contained bundle for `template` into `out_dir`, which must
/// be missing or empty. Everything is assembled and checked in memory first,
/// so a failed materialization leaves `out_dir` untouched.
pub fn materialize(
    template: &Template,
    knowledge: &Catalog,
    tax: &Taxonomy,
    out_dir: &Path,
) -> Result<Bundle, TemplateError> {
    if let Some(e) = validate_template(template, knowledge, tax).into_iter().next() {
        return Err(e);
    }
    let id = template.id.as_str().to_string();

    let seeds: Vec<&crate::rdf::Iri> = template
        .sensors
        .iter()
        .chain(&template.domains)
        .chain(&template.annotation_hints)
        .collect();
    let taxonomy_graph = tax.subset(seeds).to_graph();

    let mut rule_entries: Vec<&KnowledgeEntry> =
        template.rulesets.iter().filter_map(|r| knowledge.get(r)).collect();
    rule_entries.sort_by(|a, b| a.id.cmp(&b.id));
    let mut graph_entries: Vec<&KnowledgeEntry> =
        template.knowledge.iter().filter_map(|k| knowledge.get(k)).collect();
    graph_entries.sort_by(|a, b| a.id.cmp(&b.id));

    let gaps = closure_gaps(
        rule_entries.iter().filter_map(|e| e.rules()),
        &template.query,
        &taxonomy_graph,
        graph_entries.iter().filter_map(|e| e.graph()),
    );
    if !gaps.is_empty() {
        return Err(TemplateError::NotClosed { template: id, iris: gaps });
    }

    let mut files: BTreeMap<String, (&'static str, String)> = BTreeMap::new();
    files.insert("taxonomy.ttl".into(), ("taxonomy", serialize_turtle(&taxonomy_graph)));
    let mut catalog = Manifest::default();
    let mut rule_paths = Vec::new();
    for e in rule_entries.iter().chain(&graph_entries) {
        let path = knowledge_file(e);
        let role = if e.kind == EntryKind::Ruleset { "ruleset" } else { "knowledge" };
        files.insert(path.clone(), (role, e.text.clone()));
        if e.kind == EntryKind::Ruleset {
            rule_paths.push(path.clone());
        }
        // catalog paths are relative to knowledge/
        let rel = match path.strip_prefix("knowledge/") {
            Some(p) => p.to_string(),
            None => format!("../{path}"),
        };
        catalog.entry.push(ManifestEntry { path: rel, ..e.to_manifest_entry() });
    }
    files.insert("knowledge/catalog.toml".into(), ("catalog", catalog.to_toml()));
    files.insert("query.rq".into(), ("query", template.query_text.clone()));
    files.insert("sample-readings.csv".into(), ("sample-readings", template.sample_text.clone()));

    let knowledge_ids: Vec<String> = graph_entries.iter().map(|e| e.id.clone()).collect();
    let conf = PipelineFile {
        taxonomy: Some("taxonomy.ttl".into()),
        input: Some("sample-readings.csv".into()),
        input_format: Some("csv".into()),
        rules: Some(rule_paths.clone()),
        engine: None,
        knowledge_manifest: Some("knowledge/catalog.toml".into()),
        knowledge: Some(knowledge_ids.clone()),
        query: Some("query.rq".into()),
        results_format: Some("csv".into()),
        output_dir: Some(OUT_DIR.into()),
    };
    files.insert(
        "pipeline.conf".into(),
        ("pipeline-config", toml::to_string(&conf).expect("config serializes")),
    );
    files.insert("README.md".into(), ("runbook", runbook(template, &rule_paths, &knowledge_ids)));

    let listing: Vec<BundleFile> = files
        .iter()
        .map(|(path, (role, text))| BundleFile {
            path: path.clone(),
            role: role.to_string(),
            sha256: sha256_hex(text.as_bytes()),
        })
        .collect();
    let manifest = BundleManifest {
        template: id,
        title: template.title.clone(),
        files: listing.clone(),
    };
    let manifest_json = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";

    if !is_empty_dir(out_dir)? {
        return Err(TemplateError::OutputNotEmpty(out_dir.display().to_string()));
    }
    let io = |p: &Path, e: std::io::Error| TemplateError::Io {
        path: p.display().to_string(),
        message: e.to_string(),
    };
    let all = files
        .iter()
        .map(|(p, (_, text))| (p.as_str(), text.as_str()))
        .chain(std::iter::once(("manifest.json", manifest_json.as_str())));
    for (rel, text) in all {
        let path = out_dir.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| io(parent, e))?;
        }
        fs::write(&path, text).map_err(|e| io(&path, e))?;
    }
    Ok(Bundle {
        dir: out_dir.to_path_buf(),
        files: listing,
    })
}

/// Re-reads a bundle from disk: digests must match `manifest.json`, every
/// component must parse, and the closure check must hold. Returns every
/// problem found.
pub fn verify_bundle(dir: &Path) -> Result<Vec<BundleFile>, Vec<String>> {
    let read = |rel: &str| fs::read_to_string(dir.join(rel)).map_err(|e| format!("{rel}: {e}"));
    let manifest: BundleManifest = read("manifest.json")
        .and_then(|t| serde_json::from_str(&t).map_err(|e| format!("manifest.json: {e}")))
        .map_err(|e| vec![e])?;
    let mut problems = Vec::new();
    for f in &manifest.files {
        match fs::read(dir.join(&f.path)) {
            Ok(bytes) if sha256_hex(&bytes) == f.sha256 => {}
            Ok(_) => problems.push(format!("{}: digest mismatch", f.path)),
            Err(e) => problems.push(format!("{}: {e}", f.path)),
        }
    }
    let taxonomy = read("taxonomy.ttl").and_then(|t| parse_turtle(&t).map_err(|e| format!("taxonomy.ttl: {e}")));
    if let Ok(g) = &taxonomy {
        if let Err(e) = load_taxonomy(g) {
            problems.push(format!("taxonomy.ttl: {e}"));
        }
    }
    let catalog = load_catalog(&dir.join("knowledge/catalog.toml")).map_err(|e| format!("knowledge/catalog.toml: {e}"));
    let query = read("query.rq").and_then(|t| parse_query(&t).map_err(|e| format!("query.rq: {e}")));
    match (&taxonomy, &catalog, &query) {
        (Ok(tg), Ok(cat), Ok(q)) => {
            let entries: Vec<&KnowledgeEntry> = cat.entries().collect();
            let gaps = closure_gaps(
                entries.iter().filter_map(|e| e.rules()),
                q,
                tg,
                entries.iter().filter_map(|e| e.graph()),
            );
            if !gaps.is_empty() {
                problems.push(format!("unresolved IRIs: {}", gaps.join(", ")));
            }
        }
        _ => {
            for e in [taxonomy.err(), catalog.err(), query.err()].into_iter().flatten() {
                problems.push(e);
            }
        }
    }
    if problems.is_empty() {
        Ok(manifest.files)
    } else {
        Err(problems)
    }
}
