//! Local catalog of domain ontologies, datasets and rule sets, and
//! cross-domain merging through shared namespaces.
//!
//! The catalog is a TOML manifest with one `[[entry]]` table per item:
//!
//! ```toml
//! [[entry]]
//! id = "naturopathy-dataset"
//! kind = "dataset"                 # ontology | dataset | ruleset
//! domains = ["https://m3.example.org/m3-lite#Health"]
//! defines = ["https://m3.example.org/naturopathy#"]
//! reuses = ["https://m3.example.org/health#", "https://m3.example.org/food#"]
//! path = "naturopathy-dataset.ttl" # relative to the manifest
//! provenance = "free text"
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rdf::{self, Graph, Iri, Term};
use crate::reasoner::{parse_rules, Atom, RuleSet, RuleTerm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryKind {
    Ontology,
    Dataset,
    Ruleset,
}

impl fmt::Display for EntryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EntryKind::Ontology => "ontology",
            EntryKind::Dataset => "dataset",
            EntryKind::Ruleset => "ruleset",
        })
    }
}

/// Manifest record as written on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub id: String,
    pub kind: EntryKind,
    #[serde(default)]
    pub domains: Vec<String>,
    #[serde(default)]
    pub defines: Vec<String>,
    #[serde(default)]
    pub reuses: Vec<String>,
    pub path: String,
    #[serde(default)]
    pub provenance: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    #[serde(default)]
    pub entry: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifest serializes")
    }
}

#[derive(Debug, Clone)]
pub enum Content {
    Graph(Graph),
    Rules(RuleSet),
}

#[derive(Debug, Clone)]
pub struct KnowledgeEntry {
    pub id: String,
    pub kind: EntryKind,
    pub domains: BTreeSet<Iri>,
    pub defines: BTreeSet<String>,
    pub reuses: BTreeSet<String>,
    /// Path as written in the manifest.
    pub path: String,
    pub provenance: String,
    /// File contents, kept so bundles can copy them verbatim.
    pub text: String,
    pub content: Content,
}

impl KnowledgeEntry {
    /// Namespaces the entry defines or reuses.
    pub fn namespaces(&self) -> BTreeSet<&str> {
        self.defines
            .iter()
            .chain(&self.reuses)
            .map(String::as_str)
            .collect()
    }

    pub fn graph(&self) -> Option<&Graph> {
        match &self.content {
            Content::Graph(g) => Some(g),
            Content::Rules(_) => None,
        }
    }

    pub fn rules(&self) -> Option<&RuleSet> {
        match &self.content {
            Content::Rules(r) => Some(r),
            Content::Graph(_) => None,
        }
    }

    pub fn to_manifest_entry(&self) -> ManifestEntry {
        ManifestEntry {
            id: self.id.clone(),
            kind: self.kind,
            domains: self.domains.iter().map(|d| d.as_str().to_string()).collect(),
            defines: self.defines.iter().cloned().collect(),
            reuses: self.reuses.iter().cloned().collect(),
            path: self.path.clone(),
            provenance: self.provenance.clone(),
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("{}", .issues.iter().map(|(id, r)| format!("{id}: {r}")).collect::<Vec<_>>().join("; "))]
pub struct CatalogError {
    /// `(entry id, reason)`; the id is `<manifest>` for document-level errors.
    pub issues: Vec<(String, String)>,
}

impl CatalogError {
    fn single(id: &str, reason: impl Into<String>) -> Self {
        CatalogError {
            issues: vec![(id.to_string(), reason.into())],
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Catalog {
    entries: BTreeMap<String, KnowledgeEntry>,
    by_domain: BTreeMap<Iri, BTreeSet<String>>,
    by_namespace: BTreeMap<String, BTreeSet<String>>,
}

fn iri_constants(entry_content: &Content) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    match entry_content {
        Content::Graph(g) => {
            for t in g.iter() {
                for term in [t.subject, t.predicate, t.object] {
                    if let Term::Iri(i) = term {
                        out.insert(i.as_str().to_string());
                    }
                    if let Term::Literal(l) = term {
                        out.insert(l.datatype().as_str().to_string());
                    }
                }
            }
        }
        Content::Rules(rs) => {
            for r in &rs.rules {
                let body = r.body.iter().filter_map(|a| match a {
                    Atom::Pattern(p) => Some(p),
                    Atom::Builtin(_) => None,
                });
                for p in body.chain(&r.head) {
                    for t in [&p.subject, &p.predicate, &p.object] {
                        if let RuleTerm::Const(Term::Iri(i)) = t {
                            out.insert(i.as_str().to_string());
                        }
                    }
                }
            }
        }
    }
    out
}

fn subject_iris(content: &Content) -> BTreeSet<String> {
    match content {
        Content::Graph(g) => g
            .iter()
            .filter_map(|t| t.subject.as_iri().map(|i| i.as_str().to_string()))
            .collect(),
        Content::Rules(_) => BTreeSet::new(),
    }
}

fn check_entry(raw: &ManifestEntry, base: &Path) -> Result<KnowledgeEntry, Vec<String>> {
    let mut problems = Vec::new();
    let mut domains = BTreeSet::new();
    for d in &raw.domains {
        match Iri::new(d.as_str()) {
            Ok(i) => {
                domains.insert(i);
            }
            Err(e) => problems.push(format!("domain '{d}': {e}")),
        }
    }
    for ns in raw.defines.iter().chain(&raw.reuses) {
        if Iri::new(ns.as_str()).is_err() {
            problems.push(format!("namespace '{ns}' is not an absolute IRI"));
        }
    }
    let file = base.join(&raw.path);
    let text = match std::fs::read_to_string(&file) {
        Ok(t) => t,
        Err(e) => {
            problems.push(format!("cannot read {}: {e}", file.display()));
            return Err(problems);
        }
    };
    let content = match raw.kind {
        EntryKind::Ruleset => parse_rules(&text).map(Content::Rules).map_err(|e| e.to_string()),
        _ => rdf::format_for_path(&file)
            .parse(&text)
            .map(Content::Graph)
            .map_err(|e| e.to_string()),
    };
    let content = match content {
        Ok(c) => c,
        Err(e) => {
            problems.push(format!("{} does not parse: {e}", raw.path));
            return Err(problems);
        }
    };
    if raw.kind == EntryKind::Ruleset && !raw.defines.is_empty() {
        problems.push("rule sets cannot define namespaces".into());
    }
    let subjects = subject_iris(&content);
    for ns in &raw.defines {
        if !subjects.iter().any(|s| s.starts_with(ns.as_str())) {
            problems.push(format!("declares namespace {ns} but describes no subject in it"));
        }
    }
    let used = iri_constants(&content);
    for ns in &raw.reuses {
        if !used.iter().any(|s| s.starts_with(ns.as_str())) {
            problems.push(format!("declares reuse of {ns} but never mentions it"));
        }
    }
    if !problems.is_empty() {
        return Err(problems);
    }
    Ok(KnowledgeEntry {
        id: raw.id.clone(),
        kind: raw.kind,
        domains,
        defines: raw.defines.iter().cloned().collect(),
        reuses: raw.reuses.iter().cloned().collect(),
        path: raw.path.clone(),
        provenance: raw.provenance.clone(),
        text,
        content,
    })
}

impl Catalog {
    /// Builds a catalog from manifest text; entry paths resolve against
    /// `base_dir`. Every problem in every entry is reported.
    pub fn from_manifest(text: &str, base_dir: &Path) -> Result<Catalog, CatalogError> {
        let manifest: Manifest =
            toml::from_str(text).map_err(|e| CatalogError::single("<manifest>", e.to_string()))?;
        let mut issues = Vec::new();
        let mut cat = Catalog::default();
        for raw in &manifest.entry {
            if cat.entries.contains_key(&raw.id) || issues.iter().any(|(id, _)| id == &raw.id) {
                issues.push((raw.id.clone(), "duplicate id".to_string()));
                continue;
            }
            match check_entry(raw, base_dir) {
                Ok(e) => cat.insert(e),
                Err(problems) => issues.extend(problems.into_iter().map(|p| (raw.id.clone(), p))),
            }
        }
        if issues.is_empty() {
            Ok(cat)
        } else {
            Err(CatalogError { issues })
        }
    }

    fn insert(&mut self, e: KnowledgeEntry) {
        for d in &e.domains {
            self.by_domain.entry(d.clone()).or_default().insert(e.id.clone());
        }
        for ns in e.namespaces() {
            self.by_namespace.entry(ns.to_string()).or_default().insert(e.id.clone());
        }
        self.entries.insert(e.id.clone(), e);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries ordered by id.
    pub fn entries(&self) -> impl Iterator<Item = &KnowledgeEntry> {
        self.entries.values()
    }

    pub fn get(&self, id: &str) -> Option<&KnowledgeEntry> {
        self.entries.get(id)
    }

    pub fn by_domain(&self, domain: &Iri) -> impl Iterator<Item = &KnowledgeEntry> {
        self.by_domain
            .get(domain)
            .into_iter()
            .flatten()
            .map(|id| &self.entries[id])
    }

    pub fn by_namespace(&self, ns: &str) -> impl Iterator<Item = &KnowledgeEntry> {
        self.by_namespace
            .get(ns)
            .into_iter()
            .flatten()
            .map(|id| &self.entries[id])
    }

    /// Entries defining `ns`.
    pub fn definers<'a>(&'a self, ns: &'a str) -> impl Iterator<Item = &'a KnowledgeEntry> + 'a {
        self.by_namespace(ns).filter(move |e| e.defines.contains(ns))
    }

    /// True when the domain and namespace indexes agree with the entries.
    pub fn indexes_consistent(&self) -> bool {
        let mut rebuilt = Catalog::default();
        for e in self.entries.values() {
            rebuilt.insert(e.clone());
        }
        rebuilt.by_domain == self.by_domain && rebuilt.by_namespace == self.by_namespace
    }

    /// Manifest describing the given entries, e.g. for a bundle.
    pub fn manifest_for<'a>(entries: impl IntoIterator<Item = &'a KnowledgeEntry>) -> Manifest {
        Manifest {
            entry: entries.into_iter().map(KnowledgeEntry::to_manifest_entry).collect(),
        }
    }
}

pub fn load_catalog(manifest: &Path) -> Result<Catalog, CatalogError> {
    let text = std::fs::read_to_string(manifest).map_err(|e| {
        CatalogError::single("<manifest>", format!("cannot read {}: {e}", manifest.display()))
    })?;
    let base = manifest.parent().unwrap_or_else(|| Path::new("."));
    Catalog::from_manifest(&text, base)
}

/// Ontologies and datasets covering any of `domains`, closed under "also
/// take every entry that defines a namespace a selected entry reuses".
/// Rule sets are never selected here; templates name them explicitly.
pub fn select_knowledge<'c>(domains: &BTreeSet<Iri>, cat: &'c Catalog) -> Vec<&'c KnowledgeEntry> {
    let mut selected: BTreeSet<&str> = BTreeSet::new();
    let mut queue: Vec<&KnowledgeEntry> = domains
        .iter()
        .flat_map(|d| cat.by_domain(d))
        .filter(|e| e.kind != EntryKind::Ruleset)
        .collect();
    while let Some(e) = queue.pop() {
        if !selected.insert(e.id.as_str()) {
            continue;
        }
        for ns in &e.reuses {
            queue.extend(cat.definers(ns).filter(|d| d.kind != EntryKind::Ruleset));
        }
    }
    selected.into_iter().map(|id| &cat.entries[id]).collect()
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum KnowledgeError {
    #[error("unknown knowledge entry '{0}'")]
    UnknownEntry(String),
    #[error("entry '{0}' is a rule set, not an ontology or dataset")]
    NotAGraph(String),
}

#[derive(Debug, Clone)]
pub struct CrossDomainGraph {
    pub graph: Graph,
    /// Namespaces mentioned by two or more merged entries, with those
    /// entries' ids.
    pub shared_namespaces: BTreeMap<String, Vec<String>>,
}

/// Merges `base` with the graphs of `entries` (in id order). Entry
/// prefixes are added when the base does not already bind them.
pub fn build_cross_domain_graph(
    entries: &[&KnowledgeEntry],
    base: &Graph,
) -> Result<CrossDomainGraph, KnowledgeError> {
    let mut sorted: Vec<&KnowledgeEntry> = entries.to_vec();
    sorted.sort_by(|a, b| a.id.cmp(&b.id));
    sorted.dedup_by(|a, b| a.id == b.id);
    let mut graph = base.clone();
    let mut users: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for e in &sorted {
        let g = e.graph().ok_or_else(|| KnowledgeError::NotAGraph(e.id.clone()))?;
        graph.merge_from(g);
        for ns in e.namespaces() {
            users.entry(ns.to_string()).or_default().push(e.id.clone());
        }
    }
    users.retain(|_, ids| ids.len() > 1);
    Ok(CrossDomainGraph {
        graph,
        shared_namespaces: users,
    })
}

/// Looks up entries by id, in the order given.
pub fn resolve_ids<'c>(ids: &[String], cat: &'c Catalog) -> Result<Vec<&'c KnowledgeEntry>, KnowledgeError> {
    ids.iter()
        .map(|id| cat.get(id).ok_or_else(|| KnowledgeError::UnknownEntry(id.clone())))
        .collect()
}

/// Domains named by `m3:hasDomain` in a graph.
pub fn observed_domains(graph: &Graph) -> BTreeSet<Iri> {
    let p = Term::iri(crate::vocab::m3("hasDomain")).expect("valid");
    graph
        .match_pattern(None, Some(&p), None)
        .filter_map(|t| t.object.as_iri().cloned())
        .collect()
}

/// Directory holding the manifest.
pub fn manifest_dir(manifest: &Path) -> PathBuf {
    manifest
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, text: &str) {
        std::fs::write(dir.join(name), text).unwrap();
    }

    fn fixture() -> (tempfile::TempDir, Catalog) {
        let dir = tempfile::tempdir().unwrap();
        let d = dir.path();
        write(d, "h.ttl", "<https://ex.org/health#Fever> <http://www.w3.org/2000/01/rdf-schema#label> \"fever\" .\n");
        write(
            d,
            "n.ttl",
            "<https://ex.org/nat#Tea> <https://ex.org/nat#treats> <https://ex.org/health#Fever> .\n\
             <https://ex.org/nat#Tea> <https://ex.org/nat#uses> <https://ex.org/food#Ginger> .\n",
        );
        write(d, "w.ttl", "<https://ex.org/weather#Hot> <http://www.w3.org/2000/01/rdf-schema#label> \"hot\" .\n");
        write(
            d,
            "s.ttl",
            "<https://ex.org/season#r1> <https://ex.org/season#food> <https://ex.org/food#Melon> .\n\
             <https://ex.org/season#r1> <https://ex.org/season#when> <https://ex.org/weather#Hot> .\n",
        );
        write(d, "r.rules", "[hot: (?o type m3x:AirTemperature) -> (?o type <https://ex.org/weather#Hot>)]\n");
        let manifest = r#"
            [[entry]]
            id = "health"
            kind = "ontology"
            domains = ["https://ex.org/d#Health"]
            defines = ["https://ex.org/health#"]
            path = "h.ttl"

            [[entry]]
            id = "naturopathy"
            kind = "dataset"
            domains = ["https://ex.org/d#Health"]
            defines = ["https://ex.org/nat#"]
            reuses = ["https://ex.org/health#", "https://ex.org/food#"]
            path = "n.ttl"

            [[entry]]
            id = "weather"
            kind = "ontology"
            domains = ["https://ex.org/d#Weather"]
            defines = ["https://ex.org/weather#"]
            path = "w.ttl"

            [[entry]]
            id = "season"
            kind = "dataset"
            domains = ["https://ex.org/d#Food"]
            defines = ["https://ex.org/season#"]
            reuses = ["https://ex.org/weather#", "https://ex.org/food#"]
            path = "s.ttl"

            [[entry]]
            id = "weather-rules"
            kind = "ruleset"
            domains = ["https://ex.org/d#Weather"]
            reuses = ["https://ex.org/weather#"]
            path = "r.rules"
        "#;
        write(d, "catalog.toml", manifest);
        let cat = load_catalog(&d.join("catalog.toml")).unwrap();
        (dir, cat)
    }

    fn ids(v: Vec<&KnowledgeEntry>) -> Vec<&str> {
        v.into_iter().map(|e| e.id.as_str()).collect()
    }

    fn domains(names: &[&str]) -> BTreeSet<Iri> {
        names
            .iter()
            .map(|n| Iri::new(format!("https://ex.org/d#{n}")).unwrap())
            .collect()
    }

    #[test]
    fn loads_and_indexes() {
        let (_d, cat) = fixture();
        assert_eq!(cat.len(), 5);
        assert!(cat.indexes_consistent());
        assert_eq!(cat.by_namespace("https://ex.org/food#").count(), 2);
    }

    #[test]
    fn selection_follows_shared_namespaces() {
        let (_d, cat) = fixture();
        assert_eq!(ids(select_knowledge(&domains(&["Health"]), &cat)), vec!["health", "naturopathy"]);
        // season reuses weather#, which the weather ontology defines
        assert_eq!(ids(select_knowledge(&domains(&["Food"]), &cat)), vec!["season", "weather"]);
        assert!(select_knowledge(&BTreeSet::new(), &cat).is_empty());
    }

    #[test]
    fn cross_domain_merge_reports_join_surface() {
        let (_d, cat) = fixture();
        let entries = resolve_ids(&["naturopathy".into(), "season".into()], &cat).unwrap();
        let merged = build_cross_domain_graph(&entries, &Graph::new()).unwrap();
        assert_eq!(merged.graph.len(), 4);
        assert_eq!(
            merged.shared_namespaces.keys().collect::<Vec<_>>(),
            vec!["https://ex.org/food#"]
        );
        let alone = resolve_ids(&["health".into(), "weather".into()], &cat).unwrap();
        assert!(build_cross_domain_graph(&alone, &Graph::new()).unwrap().shared_namespaces.is_empty());
        let rules = resolve_ids(&["weather-rules".into()], &cat).unwrap();
        assert!(matches!(build_cross_domain_graph(&rules, &Graph::new()), Err(KnowledgeError::NotAGraph(_))));
    }

    #[test]
    fn errors_are_aggregated() {
        let dir = tempfile::tempdir().unwrap();
        let d = dir.path();
        write(d, "w.ttl", "<https://ex.org/weather#Hot> <http://www.w3.org/2000/01/rdf-schema#label> \"hot\" .\n");
        write(d, "bad.ttl", "this is not turtle");
        let manifest = r#"
            [[entry]]
            id = "missing"
            kind = "dataset"
            path = "nope.ttl"

            [[entry]]
            id = "bad"
            kind = "ontology"
            path = "bad.ttl"

            [[entry]]
            id = "liar"
            kind = "ontology"
            defines = ["https://ex.org/other#"]
            reuses = ["https://ex.org/food#"]
            path = "w.ttl"
        "#;
        let err = Catalog::from_manifest(manifest, d).unwrap_err();
        let ids: BTreeSet<&str> = err.issues.iter().map(|(i, _)| i.as_str()).collect();
        assert_eq!(ids, ["bad", "liar", "missing"].into_iter().collect());
        assert_eq!(err.issues.iter().filter(|(i, _)| i == "liar").count(), 2);
        assert!(Catalog::from_manifest("", d).unwrap().is_empty());
    }
}
