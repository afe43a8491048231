//! Loadable taxonomy of canonical sensor, measurement, feature, unit and
//! domain classes, and unification of raw labels onto those classes.
//!
//! A taxonomy is read from Turtle using a small vocabulary:
//!
//! ```text
//! m3x:BodyTemperature a m3:MeasurementType ;
//!     rdfs:subClassOf ssn:ObservationValue ;     # optional parent
//!     skos:prefLabel "body temperature" ;        # exactly one
//!     rdfs:label "core body temperature" ;       # extra labels
//!     skos:altLabel "temperature" ;              # synonyms
//!     m3:defaultUnit unit:Cel ;                  # measurement types only
//!     m3:validIn m3x:Health ;                    # domain scope
//!     m3:hasFeatureOfInterest m3x:Body .         # feature scope
//! ```
//!
//! Sensor types additionally list the measurement types they produce with
//! `m3:measures`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::rdf::{Graph, Iri, Term, Triple};
use crate::vocab::{self, m3, RDFS_LABEL, RDFS_SUBCLASS_OF, RDF_TYPE, SKOS_ALT_LABEL, SKOS_PREF_LABEL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    SensorType,
    MeasurementType,
    Feature,
    Unit,
    Domain,
}

impl Kind {
    pub const ALL: [Kind; 5] = [
        Kind::SensorType,
        Kind::MeasurementType,
        Kind::Feature,
        Kind::Unit,
        Kind::Domain,
    ];

    /// Class used with `rdf:type` to declare an entry of this kind.
    pub fn class_iri(self) -> String {
        m3(match self {
            Kind::SensorType => "SensorType",
            Kind::MeasurementType => "MeasurementType",
            Kind::Feature => "FeatureType",
            Kind::Unit => "Unit",
            Kind::Domain => "Domain",
        })
    }

    /// Implicit top of every parent chain of this kind.
    pub fn root_iri(self) -> String {
        match self {
            Kind::SensorType => vocab::SSN_SENSOR.to_string(),
            Kind::MeasurementType => vocab::SSN_OBSERVATION_VALUE.to_string(),
            Kind::Feature => vocab::SSN_FEATURE_OF_INTEREST.to_string(),
            Kind::Unit => m3("Unit"),
            Kind::Domain => m3("Domain"),
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::SensorType => "sensor-type",
            Kind::MeasurementType => "measurement-type",
            Kind::Feature => "feature",
            Kind::Unit => "unit",
            Kind::Domain => "domain",
        })
    }
}

impl FromStr for Kind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Kind::ALL
            .into_iter()
            .find(|k| k.to_string() == s)
            .ok_or_else(|| format!("unknown taxonomy kind '{s}'"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaxonomyEntry {
    pub canonical: Iri,
    pub kind: Kind,
    /// Non-empty; the first label is the preferred one.
    pub labels: Vec<String>,
    pub synonyms: Vec<String>,
    pub parent: Option<Iri>,
    pub default_unit: Option<Iri>,
    /// Domains the entry is valid in; empty means valid everywhere.
    pub domains: Vec<Iri>,
    /// Features of interest the entry applies to; empty means any.
    pub features: Vec<Iri>,
    /// Measurement types produced by a sensor type.
    pub measures: Vec<Iri>,
}

impl TaxonomyEntry {
    pub fn preferred_label(&self) -> &str {
        &self.labels[0]
    }

    /// Normalized forms of all labels and synonyms.
    pub fn normalized_labels(&self) -> BTreeSet<String> {
        self.labels
            .iter()
            .chain(&self.synonyms)
            .map(|l| normalize_label(l))
            .collect()
    }

    fn valid_in_domain(&self, domain: &Iri) -> bool {
        self.domains.is_empty() || self.domains.contains(domain)
    }

    fn applies_to_feature(&self, feature: &Iri) -> bool {
        self.features.is_empty() || self.features.contains(feature)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TaxonomyIssue {
    DuplicateCanonical { iri: String, kinds: Vec<Kind> },
    CyclicHierarchy { cycle: Vec<String> },
    DuplicateLabelInScope { label: String, kind: Kind, entries: Vec<String> },
    MissingLabel { iri: String },
    ConflictingPreferredLabels { iri: String },
    UnknownParent { iri: String, parent: String },
    MultipleParents { iri: String },
    DanglingReference { iri: String, property: String, target: String },
    InvalidValue { iri: String, property: String, reason: String },
}

impl fmt::Display for TaxonomyIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TaxonomyIssue::DuplicateCanonical { iri, kinds } => {
                write!(f, "duplicate canonical <{iri}> declared as {kinds:?}")
            }
            TaxonomyIssue::CyclicHierarchy { cycle } => {
                write!(f, "cyclic hierarchy: {}", cycle.join(" -> "))
            }
            TaxonomyIssue::DuplicateLabelInScope {
                label,
                kind,
                entries,
            } => write!(
                f,
                "label '{label}' shared by {kind} entries in one domain scope: {}",
                entries.join(", ")
            ),
            TaxonomyIssue::MissingLabel { iri } => write!(f, "<{iri}> has no skos:prefLabel"),
            TaxonomyIssue::ConflictingPreferredLabels { iri } => {
                write!(f, "<{iri}> has more than one skos:prefLabel")
            }
            TaxonomyIssue::UnknownParent { iri, parent } => {
                write!(f, "<{iri}> has parent <{parent}> which is neither an entry of the same kind nor the kind root")
            }
            TaxonomyIssue::MultipleParents { iri } => write!(f, "<{iri}> has more than one parent"),
            TaxonomyIssue::DanglingReference {
                iri,
                property,
                target,
            } => write!(f, "<{iri}> {property} <{target}> does not name a suitable entry"),
            TaxonomyIssue::InvalidValue {
                iri,
                property,
                reason,
            } => write!(f, "<{iri}> {property}: {reason}"),
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("invalid taxonomy: {}", .issues.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("; "))]
pub struct TaxonomyError {
    pub issues: Vec<TaxonomyIssue>,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum UnifyError {
    #[error("unknown {kind} term '{raw}'")]
    UnknownTerm { raw: String, kind: Kind },
    #[error("ambiguous {kind} term '{raw}': candidates {}; supply a domain or feature", .candidates.join(", "))]
    AmbiguousTerm {
        raw: String,
        kind: Kind,
        candidates: Vec<String>,
    },
}

/// Context used to disambiguate a label shared by several entries.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UnificationContext {
    pub domain: Option<Iri>,
    pub feature: Option<Iri>,
}

impl UnificationContext {
    pub fn new(domain: Option<Iri>, feature: Option<Iri>) -> Self {
        Self { domain, feature }
    }
}

/// Lowercase, punctuation to spaces, whitespace collapsed, tokens sorted.
pub fn normalize_label(raw: &str) -> String {
    let cleaned: String = raw
        .chars()
        .map(|c| if c.is_alphanumeric() { c } else { ' ' })
        .flat_map(char::to_lowercase)
        .collect();
    let mut tokens: Vec<&str> = cleaned.split_whitespace().collect();
    tokens.sort_unstable();
    tokens.join(" ")
}

#[derive(Debug, Clone, Default)]
pub struct Taxonomy {
    entries: BTreeMap<Iri, TaxonomyEntry>,
    lookup: BTreeMap<String, BTreeSet<Iri>>,
    version: Option<String>,
}

fn literal_values(graph: &Graph, s: &Term, p: &str, issues: &mut Vec<TaxonomyIssue>) -> Vec<String> {
    let pred = Term::iri(p).expect("vocabulary IRI");
    let mut out = Vec::new();
    for o in graph.objects(s, &pred) {
        match o.as_literal() {
            Some(l) => out.push(l.lexical().to_string()),
            None => issues.push(TaxonomyIssue::InvalidValue {
                iri: subject_str(s),
                property: p.to_string(),
                reason: format!("expected a literal, found {o}"),
            }),
        }
    }
    out.sort();
    out
}

fn iri_values(graph: &Graph, s: &Term, p: &str, issues: &mut Vec<TaxonomyIssue>) -> Vec<Iri> {
    let pred = Term::iri(p).expect("vocabulary IRI");
    let mut out = Vec::new();
    for o in graph.objects(s, &pred) {
        match o.as_iri() {
            Some(i) => out.push(i.clone()),
            None => issues.push(TaxonomyIssue::InvalidValue {
                iri: subject_str(s),
                property: p.to_string(),
                reason: format!("expected an IRI, found {o}"),
            }),
        }
    }
    out.sort();
    out
}

fn subject_str(t: &Term) -> String {
    match t {
        Term::Iri(i) => i.as_str().to_string(),
        other => other.to_string(),
    }
}

/// Builds a taxonomy from its Turtle encoding. Every malformed entry is
/// reported; nothing is silently dropped.
pub fn load_taxonomy(graph: &Graph) -> Result<Taxonomy, TaxonomyError> {
    let mut issues = Vec::new();
    let rdf_type = Term::iri(RDF_TYPE).expect("valid");

    let mut kinds_of: BTreeMap<Term, BTreeSet<Kind>> = BTreeMap::new();
    for kind in Kind::ALL {
        let class = Term::iri(kind.class_iri()).expect("valid");
        for s in graph.subjects(&rdf_type, &class) {
            kinds_of.entry(s.clone()).or_default().insert(kind);
        }
    }

    let mut entries = BTreeMap::new();
    for (subject, kinds) in &kinds_of {
        let Term::Iri(canonical) = subject else {
            issues.push(TaxonomyIssue::InvalidValue {
                iri: subject.to_string(),
                property: RDF_TYPE.into(),
                reason: "taxonomy entries must be IRIs".into(),
            });
            continue;
        };
        if kinds.len() > 1 {
            issues.push(TaxonomyIssue::DuplicateCanonical {
                iri: canonical.as_str().to_string(),
                kinds: kinds.iter().copied().collect(),
            });
            continue;
        }
        let kind = *kinds.iter().next().expect("non-empty");
        let pref = literal_values(graph, subject, SKOS_PREF_LABEL, &mut issues);
        let iri = canonical.as_str().to_string();
        match pref.len() {
            0 => {
                issues.push(TaxonomyIssue::MissingLabel { iri });
                continue;
            }
            1 => {}
            _ => {
                issues.push(TaxonomyIssue::ConflictingPreferredLabels { iri });
                continue;
            }
        }
        let mut labels = pref;
        labels.extend(literal_values(graph, subject, RDFS_LABEL, &mut issues));
        let synonyms = literal_values(graph, subject, SKOS_ALT_LABEL, &mut issues);
        let parents = iri_values(graph, subject, RDFS_SUBCLASS_OF, &mut issues);
        if parents.len() > 1 {
            issues.push(TaxonomyIssue::MultipleParents { iri });
            continue;
        }
        let default_units = iri_values(graph, subject, &m3("defaultUnit"), &mut issues);
        if default_units.len() > 1 {
            issues.push(TaxonomyIssue::InvalidValue {
                iri,
                property: m3("defaultUnit"),
                reason: "more than one default unit".into(),
            });
            continue;
        }
        let entry = TaxonomyEntry {
            canonical: canonical.clone(),
            kind,
            labels,
            synonyms,
            parent: parents.into_iter().next(),
            default_unit: default_units.into_iter().next(),
            domains: iri_values(graph, subject, &m3("validIn"), &mut issues),
            features: iri_values(graph, subject, &m3("hasFeatureOfInterest"), &mut issues),
            measures: iri_values(graph, subject, &m3("measures"), &mut issues),
        };
        entries.insert(canonical.clone(), entry);
    }

    let version_class = Term::iri(m3("Taxonomy")).expect("valid");
    let version = graph
        .subjects(&rdf_type, &version_class)
        .into_iter()
        .flat_map(|s| literal_values(graph, s, &m3("taxonomyVersion"), &mut issues))
        .next();

    let tax = Taxonomy::build(entries, version);
    issues.extend(tax.validate());
    if issues.is_empty() {
        Ok(tax)
    } else {
        Err(TaxonomyError { issues })
    }
}

impl Taxonomy {
    fn build(entries: BTreeMap<Iri, TaxonomyEntry>, version: Option<String>) -> Self {
        let mut lookup: BTreeMap<String, BTreeSet<Iri>> = BTreeMap::new();
        for e in entries.values() {
            for l in e.normalized_labels() {
                lookup.entry(l).or_default().insert(e.canonical.clone());
            }
        }
        Taxonomy {
            entries,
            lookup,
            version,
        }
    }

    /// Builds a taxonomy from entries, checking the same invariants as
    /// [`load_taxonomy`].
    pub fn from_entries(
        entries: impl IntoIterator<Item = TaxonomyEntry>,
        version: Option<String>,
    ) -> Result<Self, TaxonomyError> {
        let mut map = BTreeMap::new();
        let mut issues = Vec::new();
        for e in entries {
            if e.labels.is_empty() {
                issues.push(TaxonomyIssue::MissingLabel {
                    iri: e.canonical.as_str().into(),
                });
                continue;
            }
            if let Some(prev) = map.insert(e.canonical.clone(), e) {
                issues.push(TaxonomyIssue::DuplicateCanonical {
                    iri: prev.canonical.as_str().into(),
                    kinds: vec![prev.kind, map[&prev.canonical].kind],
                });
            }
        }
        let tax = Taxonomy::build(map, version);
        issues.extend(tax.validate());
        if issues.is_empty() {
            Ok(tax)
        } else {
            Err(TaxonomyError { issues })
        }
    }

    fn validate(&self) -> Vec<TaxonomyIssue> {
        let mut issues = Vec::new();
        for e in self.entries.values() {
            let iri = e.canonical.as_str().to_string();
            if let Some(parent) = &e.parent {
                let ok = parent.as_str() == e.kind.root_iri()
                    || self.entries.get(parent).is_some_and(|p| p.kind == e.kind);
                if !ok {
                    issues.push(TaxonomyIssue::UnknownParent {
                        iri: iri.clone(),
                        parent: parent.as_str().into(),
                    });
                }
            }
            let mut check = |targets: &[Iri], property: &str, want: Kind| {
                for t in targets {
                    if self.entries.get(t).map(|x| x.kind) != Some(want) {
                        issues.push(TaxonomyIssue::DanglingReference {
                            iri: iri.clone(),
                            property: property.into(),
                            target: t.as_str().into(),
                        });
                    }
                }
            };
            check(e.default_unit.as_slice(), "m3:defaultUnit", Kind::Unit);
            check(&e.domains, "m3:validIn", Kind::Domain);
            check(&e.features, "m3:hasFeatureOfInterest", Kind::Feature);
            check(&e.measures, "m3:measures", Kind::MeasurementType);
            if e.default_unit.is_some() && e.kind != Kind::MeasurementType {
                issues.push(TaxonomyIssue::InvalidValue {
                    iri: iri.clone(),
                    property: "m3:defaultUnit".into(),
                    reason: "only measurement types carry a default unit".into(),
                });
            }
            if !e.measures.is_empty() && e.kind != Kind::SensorType {
                issues.push(TaxonomyIssue::InvalidValue {
                    iri: iri.clone(),
                    property: "m3:measures".into(),
                    reason: "only sensor types measure".into(),
                });
            }
        }
        issues.extend(self.find_cycles());
        issues.extend(self.find_label_clashes());
        issues
    }

    fn find_cycles(&self) -> Vec<TaxonomyIssue> {
        let mut reported: BTreeSet<BTreeSet<Iri>> = BTreeSet::new();
        let mut out = Vec::new();
        for start in self.entries.keys() {
            let mut path: Vec<&Iri> = vec![start];
            let mut cur = start;
            while let Some(parent) = self.entries.get(cur).and_then(|e| e.parent.as_ref()) {
                if let Some(pos) = path.iter().position(|p| *p == parent) {
                    let cycle: Vec<&Iri> = path[pos..].to_vec();
                    let key: BTreeSet<Iri> = cycle.iter().map(|i| (*i).clone()).collect();
                    if reported.insert(key) {
                        let mut names: Vec<String> = cycle.iter().map(|i| i.as_str().to_string()).collect();
                        names.push(parent.as_str().to_string());
                        out.push(TaxonomyIssue::CyclicHierarchy { cycle: names });
                    }
                    break;
                }
                path.push(parent);
                cur = parent;
            }
        }
        out
    }

    /// Two entries of one kind may share a normalized label only when their
    /// domain scopes are disjoint; an entry without domains is in the
    /// global scope.
    fn find_label_clashes(&self) -> Vec<TaxonomyIssue> {
        let mut out = Vec::new();
        for (label, iris) in &self.lookup {
            for kind in Kind::ALL {
                let group: Vec<&TaxonomyEntry> = iris
                    .iter()
                    .map(|i| &self.entries[i])
                    .filter(|e| e.kind == kind)
                    .collect();
                let mut scopes: BTreeMap<Option<&Iri>, Vec<String>> = BTreeMap::new();
                for e in &group {
                    if e.domains.is_empty() {
                        scopes.entry(None).or_default().push(e.canonical.as_str().into());
                    }
                    for d in &e.domains {
                        scopes.entry(Some(d)).or_default().push(e.canonical.as_str().into());
                    }
                }
                let mut clashing: BTreeSet<String> = BTreeSet::new();
                for members in scopes.values() {
                    if members.len() > 1 {
                        clashing.extend(members.iter().cloned());
                    }
                }
                if !clashing.is_empty() {
                    out.push(TaxonomyIssue::DuplicateLabelInScope {
                        label: label.clone(),
                        kind,
                        entries: clashing.into_iter().collect(),
                    });
                }
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn version(&self) -> Option<&str> {
        self.version.as_deref()
    }

    pub fn entries(&self) -> impl Iterator<Item = &TaxonomyEntry> {
        self.entries.values()
    }

    pub fn get(&self, iri: &Iri) -> Option<&TaxonomyEntry> {
        self.entries.get(iri)
    }

    pub fn get_str(&self, iri: &str) -> Option<&TaxonomyEntry> {
        Iri::new(iri).ok().and_then(|i| self.entries.get(&i).map(|e| e as _))
    }

    pub fn contains(&self, iri: &str) -> bool {
        self.get_str(iri).is_some()
    }

    /// Entries whose labels or synonyms normalize to `normalized`.
    pub fn lookup(&self, normalized: &str) -> impl Iterator<Item = &TaxonomyEntry> {
        self.lookup
            .get(normalized)
            .into_iter()
            .flatten()
            .map(|i| &self.entries[i])
    }

    pub fn lookup_table(&self) -> &BTreeMap<String, BTreeSet<Iri>> {
        &self.lookup
    }

    /// Maps a raw label onto the unique canonical entry of `kind`. When
    /// several entries match, they are narrowed by the context domain and
    /// then by the context feature; any remaining tie is an error.
    pub fn unify(&self, raw: &str, kind: Kind, ctx: &UnificationContext) -> Result<Iri, UnifyError> {
        let candidates: Vec<&TaxonomyEntry> = self
            .lookup(&normalize_label(raw))
            .filter(|e| e.kind == kind)
            .collect();
        self.narrow(raw, kind, candidates, ctx)
    }

    /// Measurement type produced by `sensor` in the given context.
    pub fn resolve_measurement(
        &self,
        sensor: &Iri,
        ctx: &UnificationContext,
    ) -> Result<Iri, UnifyError> {
        let raw = sensor.as_str().to_string();
        let entry = self.entries.get(sensor).ok_or(UnifyError::UnknownTerm {
            raw: raw.clone(),
            kind: Kind::SensorType,
        })?;
        let candidates = entry
            .measures
            .iter()
            .filter_map(|m| self.entries.get(m))
            .collect();
        self.narrow(&raw, Kind::MeasurementType, candidates, ctx)
    }

    fn narrow(
        &self,
        raw: &str,
        kind: Kind,
        mut candidates: Vec<&TaxonomyEntry>,
        ctx: &UnificationContext,
    ) -> Result<Iri, UnifyError> {
        let unknown = || UnifyError::UnknownTerm {
            raw: raw.to_string(),
            kind,
        };
        if candidates.len() > 1 {
            if let Some(d) = &ctx.domain {
                candidates.retain(|e| e.valid_in_domain(d));
            }
        }
        if candidates.len() > 1 {
            if let Some(f) = &ctx.feature {
                candidates.retain(|e| e.applies_to_feature(f));
            }
        }
        match candidates.as_slice() {
            [] => Err(unknown()),
            [one] => Ok(one.canonical.clone()),
            many => Err(UnifyError::AmbiguousTerm {
                raw: raw.to_string(),
                kind,
                candidates: many.iter().map(|e| e.canonical.as_str().to_string()).collect(),
            }),
        }
    }

    /// Entries reachable from `seeds` through parent, measures, default
    /// unit, domain and feature links.
    pub fn closure<'a>(&self, seeds: impl IntoIterator<Item = &'a Iri>) -> BTreeSet<Iri> {
        let mut seen = BTreeSet::new();
        let mut queue: VecDeque<Iri> = seeds.into_iter().cloned().collect();
        while let Some(iri) = queue.pop_front() {
            let Some(e) = self.entries.get(&iri) else {
                continue;
            };
            if !seen.insert(iri) {
                continue;
            }
            queue.extend(e.parent.iter().cloned());
            queue.extend(e.measures.iter().cloned());
            queue.extend(e.default_unit.iter().cloned());
            queue.extend(e.domains.iter().cloned());
            queue.extend(e.features.iter().cloned());
        }
        seen
    }

    /// Sub-taxonomy of the entries reachable from `seeds`.
    pub fn subset<'a>(&self, seeds: impl IntoIterator<Item = &'a Iri>) -> Taxonomy {
        let keep = self.closure(seeds);
        let entries = self
            .entries
            .iter()
            .filter(|(k, _)| keep.contains(*k))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        Taxonomy::build(entries, self.version.clone())
    }

    /// Turtle-ready encoding; `load_taxonomy(&t.to_graph())` reproduces `t`.
    pub fn to_graph(&self) -> Graph {
        let mut g = Graph::new();
        for (p, ns) in vocab::standard_prefixes() {
            g.set_prefix(p, ns);
        }
        g.set_prefix("skos", vocab::SKOS);
        g.set_prefix("ssn", vocab::SSN);
        let iri = |s: &str| Term::iri(s).expect("valid IRI");
        let mut add = |s: Term, p: &str, o: Term| {
            g.insert(Triple::new(s, iri(p), o).expect("valid triple"));
        };
        if let Some(v) = &self.version {
            let node = iri(&m3("taxonomy"));
            add(node.clone(), RDF_TYPE, iri(&m3("Taxonomy")));
            add(node, &m3("taxonomyVersion"), Term::string(v.clone()));
        }
        for e in self.entries.values() {
            let s = Term::Iri(e.canonical.clone());
            add(s.clone(), RDF_TYPE, iri(&e.kind.class_iri()));
            add(s.clone(), SKOS_PREF_LABEL, Term::string(e.labels[0].clone()));
            for l in &e.labels[1..] {
                add(s.clone(), RDFS_LABEL, Term::string(l.clone()));
            }
            for l in &e.synonyms {
                add(s.clone(), SKOS_ALT_LABEL, Term::string(l.clone()));
            }
            if let Some(p) = &e.parent {
                add(s.clone(), RDFS_SUBCLASS_OF, Term::Iri(p.clone()));
            }
            if let Some(u) = &e.default_unit {
                add(s.clone(), &m3("defaultUnit"), Term::Iri(u.clone()));
            }
            for (prop, list) in [
                ("validIn", &e.domains),
                ("hasFeatureOfInterest", &e.features),
                ("measures", &e.measures),
            ] {
                for o in list {
                    add(s.clone(), &m3(prop), Term::Iri(o.clone()));
                }
            }
        }
        g
    }
}

/// Free-function form of [`Taxonomy::unify`].
pub fn unify_term(raw: &str, kind: Kind, ctx: &UnificationContext, tax: &Taxonomy) -> Result<Iri, UnifyError> {
    tax.unify(raw, kind, ctx)
}
