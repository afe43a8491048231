//! Whole-instance property checks shared by the property suites and the
//! acceptance run. Each returns the first violated property.

use std::collections::{BTreeMap, BTreeSet};

use m3_core::query::{execute, parse_query, Query};
use m3_core::rdf::{is_isomorphic, parse_ntriples, parse_turtle, serialize_ntriples, serialize_turtle, Graph, Term};
use m3_core::reasoner::{evaluators, Atom, Reasoning, RuleSet};

use crate::{closure_oracle, query_oracle, query_text};

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn closure(engine: &str, g: &Graph, rules: &RuleSet) -> Reasoning {
    evaluators().get(engine).expect("registered").evaluate(g, rules)
}

fn firings(r: &Reasoning) -> BTreeSet<(String, BTreeMap<String, Term>)> {
    r.log.iter().map(|d| (d.rule.clone(), d.bindings.clone())).collect()
}

/// Deterministic xorshift permutation of `items`.
pub fn shuffle<T>(items: &mut [T], seed: u64) {
    let mut s = seed | 1;
    for i in (1..items.len()).rev() {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        items.swap(i, (s % (i as u64 + 1)) as usize);
    }
}

/// Both engines terminate with the oracle's closure and firings, and agree
/// on their logs.
pub fn reasoners_agree(g: &Graph, rules: &RuleSet) -> Result<(), String> {
    let oracle = closure_oracle(g, rules);
    let semi = closure("semi-naive", g, rules);
    let naive = closure("naive", g, rules);
    ensure!(semi.graph.triple_set() == oracle.triples, "semi-naive closure differs from the oracle");
    ensure!(naive.graph.triple_set() == oracle.triples, "naive closure differs from the oracle");
    ensure!(firings(&semi) == oracle.firings, "semi-naive firings differ from the oracle");
    ensure!(firings(&naive) == oracle.firings, "naive firings differ from the oracle");
    ensure!(semi.log == naive.log, "engine logs differ");
    ensure!(semi.diagnostics == naive.diagnostics, "engine diagnostics differ");
    ensure!(semi.graph.indexes_consistent(), "closure indexes are inconsistent");
    Ok(())
}

/// Rules reversed and the triple patterns of every body rotated. Built-ins
/// stay last so their variables remain bound.
pub fn permute_rules(rules: &RuleSet, seed: u64) -> RuleSet {
    let mut out = rules.clone();
    out.rules.reverse();
    for (i, r) in out.rules.iter_mut().enumerate() {
        let (mut pats, builtins): (Vec<Atom>, Vec<Atom>) =
            r.body.drain(..).partition(|a| matches!(a, Atom::Pattern(_)));
        let k = (seed as usize).wrapping_add(i) % pats.len().max(1);
        pats.rotate_left(k);
        r.body = pats.into_iter().chain(builtins).collect();
    }
    RuleSet::new(out.rules).expect("permuting keeps rules valid")
}

/// Shuffled input triples, reordered rules and rotated body atoms give the
/// same closure and log.
pub fn closure_order_independent(g: &Graph, rules: &RuleSet, seed: u64) -> Result<(), String> {
    let base = closure("semi-naive", g, rules);
    let mut triples = g.sorted_triples();
    shuffle(&mut triples, seed);
    let shuffled: Graph = triples.into_iter().collect();
    let other = closure("semi-naive", &shuffled, &permute_rules(rules, seed));
    ensure!(base.graph.triple_set() == other.graph.triple_set(), "closure depends on input order");
    ensure!(base.log == other.log, "log depends on input order");
    Ok(())
}

/// More input never loses output, and closing a closure adds nothing.
pub fn closure_monotone(g: &Graph, extra: &Graph, rules: &RuleSet) -> Result<(), String> {
    let small = closure("semi-naive", g, rules);
    let mut bigger = g.clone();
    bigger.extend(extra.sorted_triples());
    let big = closure("semi-naive", &bigger, rules);
    ensure!(small.graph.triple_set().is_subset(&big.graph.triple_set()), "closure is not monotone");
    let again = closure("semi-naive", &small.graph, rules);
    ensure!(again.graph.triple_set() == small.graph.triple_set(), "closure is not idempotent");
    ensure!(g.triple_set().is_subset(&small.graph.triple_set()), "closure dropped input triples");
    Ok(())
}

/// Every reasoner property on one instance.
pub fn reasoner_case(g: &Graph, extra: &Graph, rules: &RuleSet, seed: u64) -> Result<(), String> {
    reasoners_agree(g, rules)?;
    closure_order_independent(g, rules, seed)?;
    closure_monotone(g, extra, rules)
}

/// The engine equals the oracle, and the rendered query reparses to the
/// same answers.
pub fn query_case(q: &Query, g: &Graph) -> Result<(), String> {
    let got = execute(q, g);
    let (vars, rows) = query_oracle(q, g);
    ensure!(got.vars == vars, "projected vars {:?} != {:?}", got.vars, vars);
    ensure!(got.rows == rows, "rows differ from the oracle for\n{}", query_text(q));
    let text = query_text(q);
    let reparsed = parse_query(&text).map_err(|e| format!("{e}\n{text}"))?;
    ensure!(execute(&reparsed, g).rows == rows, "reparsed query answers differently\n{text}");
    Ok(())
}

/// Turtle and N-Triples serializations parse back to isomorphic graphs, and
/// Turtle output is byte-stable.
pub fn round_trip_case(g: &Graph) -> Result<(), String> {
    let ttl = serialize_turtle(g);
    let back = parse_turtle(&ttl).map_err(|e| format!("{e}\n{ttl}"))?;
    ensure!(is_isomorphic(g, &back), "Turtle round trip is not isomorphic\n{ttl}");
    ensure!(serialize_turtle(&back) == ttl, "Turtle output is not stable\n{ttl}");
    let nt = serialize_ntriples(g);
    let back = parse_ntriples(&nt).map_err(|e| format!("{e}\n{nt}"))?;
    ensure!(is_isomorphic(g, &back), "N-Triples round trip is not isomorphic");
    ensure!(back.len() == g.len(), "N-Triples round trip changed the size");
    Ok(())
}
