use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::RangeInclusive;

use super::term::{BlankNode, Term, Triple};

type Id = u32;
type Key = [Id; 3];

/// Borrowed view of a stored triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct TripleRef<'a> {
    pub subject: &'a Term,
    pub predicate: &'a Term,
    pub object: &'a Term,
}

impl TripleRef<'_> {
    pub fn to_triple(&self) -> Triple {
        Triple::new(self.subject.clone(), self.predicate.clone(), self.object.clone())
            .expect("stored triples are valid")
    }
}

/// In-memory triple store with SPO, POS and OSP indexes over interned terms.
///
/// Set semantics: inserting a triple that is already present is a no-op.
#[derive(Debug, Clone, Default)]
pub struct Graph {
    terms: Vec<Term>,
    ids: HashMap<Term, Id>,
    spo: BTreeSet<Key>,
    pos: BTreeSet<Key>,
    osp: BTreeSet<Key>,
    prefixes: BTreeMap<String, String>,
    merge_generation: u32,
}

fn range(a: Id, b: Option<Id>) -> RangeInclusive<Key> {
    match b {
        Some(b) => [a, b, 0]..=[a, b, Id::MAX],
        None => [a, 0, 0]..=[a, Id::MAX, Id::MAX],
    }
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.spo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spo.is_empty()
    }

    fn intern(&mut self, term: &Term) -> Id {
        if let Some(&id) = self.ids.get(term) {
            return id;
        }
        let id = self.terms.len() as Id;
        self.terms.push(term.clone());
        self.ids.insert(term.clone(), id);
        id
    }

    fn id_of(&self, term: &Term) -> Option<Id> {
        self.ids.get(term).copied()
    }

    /// Returns `true` when the triple was not already present.
    pub fn insert(&mut self, triple: Triple) -> bool {
        let s = self.intern(triple.subject());
        let p = self.intern(triple.predicate());
        let o = self.intern(triple.object());
        if !self.spo.insert([s, p, o]) {
            return false;
        }
        self.pos.insert([p, o, s]);
        self.osp.insert([o, s, p]);
        true
    }

    pub fn extend<I: IntoIterator<Item = Triple>>(&mut self, triples: I) -> usize {
        triples.into_iter().filter(|t| self.insert(t.clone())).count()
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.contains_terms(triple.subject(), triple.predicate(), triple.object())
    }

    pub fn contains_terms(&self, s: &Term, p: &Term, o: &Term) -> bool {
        match (self.id_of(s), self.id_of(p), self.id_of(o)) {
            (Some(s), Some(p), Some(o)) => self.spo.contains(&[s, p, o]),
            _ => false,
        }
    }

    fn view(&self, [s, p, o]: Key) -> TripleRef<'_> {
        TripleRef {
            subject: &self.terms[s as usize],
            predicate: &self.terms[p as usize],
            object: &self.terms[o as usize],
        }
    }

    /// All triples, in index order (deterministic for a given insertion history).
    pub fn iter(&self) -> impl Iterator<Item = TripleRef<'_>> + '_ {
        self.spo.iter().map(move |k| self.view(*k))
    }

    /// All triples sorted by term order; independent of insertion history.
    pub fn sorted_triples(&self) -> Vec<Triple> {
        self.triple_set().into_iter().collect()
    }

    pub fn triple_set(&self) -> BTreeSet<Triple> {
        self.iter().map(|t| t.to_triple()).collect()
    }

    /// Triples matching every bound position. The index is chosen from the
    /// bound positions: SPO for subject(+predicate), POS for predicate(+object),
    /// OSP for object(+subject).
    pub fn match_pattern<'a>(
        &'a self,
        s: Option<&Term>,
        p: Option<&Term>,
        o: Option<&Term>,
    ) -> Box<dyn Iterator<Item = TripleRef<'a>> + 'a> {
        let lookup = |t: Option<&Term>| match t {
            None => Ok(None),
            Some(t) => self.id_of(t).map(Some).ok_or(()),
        };
        let (Ok(s), Ok(p), Ok(o)) = (lookup(s), lookup(p), lookup(o)) else {
            return Box::new(std::iter::empty());
        };
        match (s, p, o) {
            (Some(s), Some(p), Some(o)) => {
                let hit = self.spo.contains(&[s, p, o]).then(|| self.view([s, p, o]));
                Box::new(hit.into_iter())
            }
            (Some(s), p, None) => Box::new(self.spo.range(range(s, p)).map(move |k| self.view(*k))),
            (Some(s), None, Some(o)) => Box::new(
                self.osp
                    .range(range(o, Some(s)))
                    .map(move |&[o, s, p]| self.view([s, p, o])),
            ),
            (None, Some(p), o) => Box::new(
                self.pos
                    .range(range(p, o))
                    .map(move |&[p, o, s]| self.view([s, p, o])),
            ),
            (None, None, Some(o)) => Box::new(
                self.osp
                    .range(range(o, None))
                    .map(move |&[o, s, p]| self.view([s, p, o])),
            ),
            (None, None, None) => Box::new(self.iter()),
        }
    }

    /// Number of triples matching the pattern, read from the same index
    /// `match_pattern` would use.
    pub fn count_matching(&self, s: Option<&Term>, p: Option<&Term>, o: Option<&Term>) -> usize {
        self.match_pattern(s, p, o).count()
    }

    /// Objects of `(subject, predicate, ?)`.
    pub fn objects<'a>(&'a self, subject: &Term, predicate: &Term) -> Vec<&'a Term> {
        self.match_pattern(Some(subject), Some(predicate), None)
            .map(|t| t.object)
            .collect()
    }

    /// Subjects of `(?, predicate, object)`.
    pub fn subjects<'a>(&'a self, predicate: &Term, object: &Term) -> Vec<&'a Term> {
        self.match_pattern(None, Some(predicate), Some(object))
            .map(|t| t.subject)
            .collect()
    }

    /// Every distinct term occurring in some triple.
    pub fn terms(&self) -> BTreeSet<&Term> {
        self.iter()
            .flat_map(|t| [t.subject, t.predicate, t.object])
            .collect()
    }

    pub fn blank_nodes(&self) -> BTreeSet<&BlankNode> {
        self.iter()
            .flat_map(|t| [t.subject, t.object])
            .filter_map(|t| match t {
                Term::BlankNode(b) => Some(b),
                _ => None,
            })
            .collect()
    }

    pub fn prefixes(&self) -> &BTreeMap<String, String> {
        &self.prefixes
    }

    pub fn set_prefix(&mut self, prefix: impl Into<String>, namespace: impl Into<String>) {
        self.prefixes.insert(prefix.into(), namespace.into());
    }

    /// Adds prefixes that are not yet declared; existing bindings win.
    pub fn add_missing_prefixes<'a, I>(&mut self, prefixes: I)
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        for (p, ns) in prefixes {
            self.prefixes
                .entry(p.to_string())
                .or_insert_with(|| ns.to_string());
        }
    }

    /// Checks that the three indexes hold exactly the same triples.
    pub fn indexes_consistent(&self) -> bool {
        self.spo.len() == self.pos.len()
            && self.spo.len() == self.osp.len()
            && self.spo.iter().all(|&[s, p, o]| {
                self.pos.contains(&[p, o, s]) && self.osp.contains(&[o, s, p])
            })
            && self.pos.iter().all(|&[p, o, s]| self.spo.contains(&[s, p, o]))
            && self.osp.iter().all(|&[o, s, p]| self.spo.contains(&[s, p, o]))
    }

    /// Same triple set, ignoring prefixes and interning order.
    pub fn same_triples(&self, other: &Graph) -> bool {
        self.len() == other.len() && self.iter().all(|t| other.contains_terms(t.subject, t.predicate, t.object))
    }

    /// Adds every triple of `source` to `self`. Blank nodes of `source` are
    /// relabeled `m<generation>b<k>` (skipping labels already in use) so they
    /// cannot capture nodes of `self`. Prefixes of `self` win on conflict.
    pub fn merge_from(&mut self, source: &Graph) {
        self.merge_generation += 1;
        let generation = self.merge_generation;
        let mut renames: HashMap<&BlankNode, Term> = HashMap::new();
        let mut counter = 0usize;
        for b in source.blank_nodes() {
            let fresh = loop {
                let candidate = Term::BlankNode(
                    BlankNode::new(format!("m{generation}b{counter}")).expect("valid label"),
                );
                counter += 1;
                if self.id_of(&candidate).is_none() {
                    break candidate;
                }
            };
            renames.insert(b, fresh);
        }
        let rename = |t: &Term| match t {
            Term::BlankNode(b) => renames[b].clone(),
            other => other.clone(),
        };
        for t in source.iter() {
            let triple = Triple::new(rename(t.subject), t.predicate.clone(), rename(t.object))
                .expect("renaming preserves validity");
            self.insert(triple);
        }
        for (p, ns) in &source.prefixes {
            self.prefixes.entry(p.clone()).or_insert_with(|| ns.clone());
        }
    }
}

/// Union of two graphs; see [`Graph::merge_from`].
pub fn merge(target: &Graph, source: &Graph) -> Graph {
    let mut out = target.clone();
    out.merge_from(source);
    out
}

impl PartialEq for Graph {
    /// Graphs are equal when they hold the same triples; prefixes are ignored.
    fn eq(&self, other: &Self) -> bool {
        self.same_triples(other)
    }
}

impl Eq for Graph {}

impl FromIterator<Triple> for Graph {
    fn from_iter<T: IntoIterator<Item = Triple>>(iter: T) -> Self {
        let mut g = Graph::new();
        g.extend(iter);
        g
    }
}
