//! Plain-scan references for label unification and template matching.

use std::collections::BTreeSet;

use m3_core::generator::Template;
use m3_core::rdf::Iri;
use m3_core::taxonomy::{Kind, Taxonomy, TaxonomyEntry, UnificationContext, UnifyError};

/// Independent label normalization: words of letters and digits,
/// lowercased, order ignored.
pub fn words(s: &str) -> Vec<String> {
    let mut w: Vec<String> = s
        .split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
        .collect();
    w.sort();
    w
}

#[derive(Debug, Clone, PartialEq)]
pub enum Unified {
    Unique(Iri),
    Unknown,
    Ambiguous(BTreeSet<String>),
}

impl From<Result<Iri, UnifyError>> for Unified {
    fn from(r: Result<Iri, UnifyError>) -> Self {
        match r {
            Ok(i) => Unified::Unique(i),
            Err(UnifyError::UnknownTerm { .. }) => Unified::Unknown,
            Err(UnifyError::AmbiguousTerm { candidates, .. }) => Unified::Ambiguous(candidates.into_iter().collect()),
        }
    }
}

/// Scans every entry: same kind, a label with the same words, then the
/// documented narrowing by domain and by feature while more than one
/// candidate remains.
pub fn unify_oracle(tax: &Taxonomy, raw: &str, kind: Kind, ctx: &UnificationContext) -> Unified {
    let target = words(raw);
    let mut c: Vec<&TaxonomyEntry> = tax
        .entries()
        .filter(|e| e.kind == kind)
        .filter(|e| e.labels.iter().chain(&e.synonyms).any(|l| words(l) == target))
        .collect();
    if c.len() > 1 {
        if let Some(d) = &ctx.domain {
            c.retain(|e| e.domains.is_empty() || e.domains.contains(d));
        }
    }
    if c.len() > 1 {
        if let Some(f) = &ctx.feature {
            c.retain(|e| e.features.is_empty() || e.features.contains(f));
        }
    }
    match c.as_slice() {
        [] => Unified::Unknown,
        [one] => Unified::Unique(one.canonical.clone()),
        many => Unified::Ambiguous(many.iter().map(|e| e.canonical.as_str().to_string()).collect()),
    }
}

/// Surface variants a user might type for `label`.
pub fn label_variants(label: &str) -> Vec<String> {
    let w: Vec<&str> = label.split_whitespace().collect();
    let mut rev = w.clone();
    rev.reverse();
    vec![
        label.to_string(),
        label.to_uppercase(),
        format!("  {}  ", w.join("   ")),
        w.join("-"),
        w.join("_"),
        rev.join(" "),
        label
            .split(' ')
            .map(|t| {
                let mut c = t.chars();
                c.next().map(|f| f.to_uppercase().collect::<String>() + c.as_str()).unwrap_or_default()
            })
            .collect::<Vec<_>>()
            .join(" "),
    ]
}

/// No context plus each domain of the taxonomy.
pub fn domain_contexts(tax: &Taxonomy) -> Vec<Option<Iri>> {
    std::iter::once(None)
        .chain(tax.entries().filter(|e| e.kind == Kind::Domain).map(|e| Some(e.canonical.clone())))
        .collect()
}

/// Compares unification of every label variant of every entry in every
/// domain context. Returns how many cases were checked.
pub fn check_all_label_variants(tax: &Taxonomy) -> Result<usize, String> {
    let domains = domain_contexts(tax);
    let mut checked = 0;
    for e in tax.entries() {
        for label in e.labels.iter().chain(&e.synonyms) {
            for v in label_variants(label) {
                for d in &domains {
                    let ctx = UnificationContext::new(d.clone(), None);
                    let got = Unified::from(tax.unify(&v, e.kind, &ctx));
                    let want = unify_oracle(tax, &v, e.kind, &ctx);
                    if got != want {
                        return Err(format!("{v:?} as {} in {d:?}: {got:?} != {want:?}", e.kind));
                    }
                    checked += 1;
                }
            }
        }
    }
    Ok(checked)
}

/// Every template sharing a sensor and a domain, ranked by the number of
/// shared items and then by id, computed by a plain scan.
pub fn match_oracle(sensors: &[Iri], domains: &[Iri], all: &[Template]) -> Vec<(usize, String)> {
    let mut out = Vec::new();
    for t in all {
        let s = sensors.iter().filter(|x| t.sensors.contains(x)).count();
        let d = domains.iter().filter(|x| t.domains.contains(x)).count();
        if s > 0 && d > 0 {
            out.push((s + d, t.id.as_str().to_string()));
        }
    }
    out.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
    out
}

pub fn subsets<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    (0..1usize << items.len())
        .map(|mask| items.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, t)| t.clone()).collect())
        .collect()
}

/// Matching against the oracle for every subset of the sensors and domains
/// the templates mention. Returns the number of subset pairs with a match.
pub fn check_matching_on_all_subsets(all: &[Template]) -> Result<usize, String> {
    let sensors: Vec<Iri> = all.iter().flat_map(|t| t.sensors.clone()).collect::<BTreeSet<_>>().into_iter().collect();
    let domains: Vec<Iri> = all.iter().flat_map(|t| t.domains.clone()).collect::<BTreeSet<_>>().into_iter().collect();
    if sensors.len() > 12 || domains.len() > 12 {
        return Err("subset enumeration would blow up".into());
    }
    let mut non_empty = 0;
    for s in &subsets(&sensors) {
        for d in &subsets(&domains) {
            let got: Vec<(usize, String)> = m3_core::generator::match_templates(s, d, all)
                .iter()
                .map(|m| (m.score(), m.template.id.as_str().to_string()))
                .collect();
            let want = match_oracle(s, d, all);
            if got != want {
                return Err(format!("sensors {s:?} domains {d:?}: {got:?} != {want:?}"));
            }
            non_empty += usize::from(!want.is_empty());
        }
    }
    Ok(non_empty)
}
