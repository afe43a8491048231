//! Graph isomorphism up to blank-node relabeling.
//!
//! Blank nodes are first colored by iterated neighbourhood hashing; the
//! search then only tries bijections that preserve colors.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::hash::{Hash, Hasher};

use super::term::{BlankNode, Term};
use super::Graph;

type Color = u64;

#[derive(Hash)]
enum Slot<'a> {
    Ground(&'a Term),
    Blank(Color),
    Itself,
}

fn colors(g: &Graph) -> BTreeMap<&BlankNode, Color> {
    let blanks: Vec<&BlankNode> = g.blank_nodes().into_iter().collect();
    let mut color: HashMap<&BlankNode, Color> = blanks.iter().map(|b| (*b, 0)).collect();
    let mut classes = 1usize;
    for _ in 0..=blanks.len() {
        let mut next = HashMap::with_capacity(blanks.len());
        for &b in &blanks {
            let me = Term::BlankNode(b.clone());
            let slot = |t| slot_of(t, b, &color);
            let mut sigs: Vec<u64> = g
                .match_pattern(Some(&me), None, None)
                .map(|t| hash_of(&(0u8, slot(t.predicate), slot(t.object))))
                .chain(
                    g.match_pattern(None, None, Some(&me))
                        .map(|t| hash_of(&(1u8, slot(t.subject), slot(t.predicate)))),
                )
                .collect();
            sigs.sort_unstable();
            next.insert(b, hash_of(&(color[b], sigs)));
        }
        let new_classes = next.values().collect::<HashSet<_>>().len();
        color = next;
        if new_classes == classes {
            break;
        }
        classes = new_classes;
    }
    color.into_iter().collect()
}

fn slot_of<'t>(t: &'t Term, me: &BlankNode, color: &HashMap<&BlankNode, Color>) -> Slot<'t> {
    match t {
        Term::BlankNode(x) if x == me => Slot::Itself,
        Term::BlankNode(x) => Slot::Blank(color[x]),
        other => Slot::Ground(other),
    }
}

fn hash_of<T: Hash>(v: &T) -> u64 {
    let mut h = DefaultHasher::new();
    v.hash(&mut h);
    h.finish()
}

/// `true` when some bijection between the blank nodes of `a` and `b` maps
/// the triples of `a` exactly onto the triples of `b`.
pub fn is_isomorphic(a: &Graph, b: &Graph) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let ground = |t: &super::TripleRef<'_>| !t.subject.is_blank() && !t.object.is_blank();
    if !a
        .iter()
        .filter(ground)
        .all(|t| b.contains_terms(t.subject, t.predicate, t.object))
    {
        return false;
    }
    if a.iter().filter(ground).count() != b.iter().filter(ground).count() {
        return false;
    }
    let ca = colors(a);
    let cb = colors(b);
    let mut hist_a: Vec<Color> = ca.values().copied().collect();
    let mut hist_b: Vec<Color> = cb.values().copied().collect();
    hist_a.sort_unstable();
    hist_b.sort_unstable();
    if hist_a != hist_b {
        return false;
    }
    // Most constrained nodes first.
    let mut class_size: HashMap<Color, usize> = HashMap::new();
    for c in ca.values() {
        *class_size.entry(*c).or_default() += 1;
    }
    let mut order: Vec<&BlankNode> = ca.keys().copied().collect();
    order.sort_by_key(|n| (class_size[&ca[n]], ca[n]));
    let mut candidates: HashMap<Color, Vec<&BlankNode>> = HashMap::new();
    for (n, c) in &cb {
        candidates.entry(*c).or_default().push(n);
    }
    let mut mapping: HashMap<&BlankNode, &BlankNode> = HashMap::new();
    let mut used: HashSet<&BlankNode> = HashSet::new();
    search(a, b, &order, 0, &ca, &candidates, &mut mapping, &mut used)
}

#[allow(clippy::too_many_arguments)]
fn search<'a>(
    a: &'a Graph,
    b: &'a Graph,
    order: &[&'a BlankNode],
    depth: usize,
    ca: &BTreeMap<&'a BlankNode, Color>,
    candidates: &HashMap<Color, Vec<&'a BlankNode>>,
    mapping: &mut HashMap<&'a BlankNode, &'a BlankNode>,
    used: &mut HashSet<&'a BlankNode>,
) -> bool {
    let Some(&node) = order.get(depth) else {
        return true;
    };
    for &cand in &candidates[&ca[node]] {
        if used.contains(cand) {
            continue;
        }
        mapping.insert(node, cand);
        used.insert(cand);
        if consistent(a, b, node, mapping)
            && search(a, b, order, depth + 1, ca, candidates, mapping, used)
        {
            return true;
        }
        mapping.remove(node);
        used.remove(cand);
    }
    false
}

/// Every triple of `a` touching `node` whose blank nodes are all mapped
/// must exist in `b` under the mapping.
fn consistent(a: &Graph, b: &Graph, node: &BlankNode, mapping: &HashMap<&BlankNode, &BlankNode>) -> bool {
    let me = Term::BlankNode(node.clone());
    let map = |t: &Term| -> Option<Term> {
        match t {
            Term::BlankNode(x) => mapping.get(x).map(|y| Term::BlankNode((*y).clone())),
            other => Some(other.clone()),
        }
    };
    a.match_pattern(Some(&me), None, None)
        .chain(a.match_pattern(None, None, Some(&me)))
        .all(|t| match (map(t.subject), map(t.object)) {
            (Some(s), Some(o)) => b.contains_terms(&s, t.predicate, &o),
            _ => true,
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::parse_turtle;

    #[test]
    fn relabeled_graphs_are_isomorphic() {
        let a = parse_turtle(
            "@prefix e: <http://e.org/> . _:x e:p _:y . _:y e:p _:z . _:z e:q \"1\" .",
        )
        .unwrap();
        let b = parse_turtle(
            "@prefix e: <http://e.org/> . _:c e:p _:a . _:a e:p _:b . _:b e:q \"1\" .",
        )
        .unwrap();
        assert!(is_isomorphic(&a, &b));
    }

    #[test]
    fn structure_differences_are_detected() {
        let a = parse_turtle("@prefix e: <http://e.org/> . _:x e:p _:y . _:y e:p _:x .").unwrap();
        let b = parse_turtle("@prefix e: <http://e.org/> . _:x e:p _:x . _:y e:p _:y .").unwrap();
        assert!(!is_isomorphic(&a, &b));
        let c = parse_turtle("@prefix e: <http://e.org/> . e:a e:p _:y . _:y e:p _:x .").unwrap();
        assert!(!is_isomorphic(&a, &c));
    }

    #[test]
    fn regular_structures_need_search() {
        // Two 3-cycles vs one 6-cycle: every node has identical local shape.
        let a = parse_turtle(
            "@prefix e: <http://e.org/> . _:a e:p _:b . _:b e:p _:c . _:c e:p _:a . _:d e:p _:e . _:e e:p _:f . _:f e:p _:d .",
        )
        .unwrap();
        let b = parse_turtle(
            "@prefix e: <http://e.org/> . _:a e:p _:b . _:b e:p _:c . _:c e:p _:d . _:d e:p _:e . _:e e:p _:f . _:f e:p _:a .",
        )
        .unwrap();
        assert!(!is_isomorphic(&a, &b));
        assert!(is_isomorphic(&a, &a.clone()));
    }
}
