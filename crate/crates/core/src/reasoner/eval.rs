use std::collections::{BTreeMap, BTreeSet};

use crate::rdf::{Graph, Triple};
use crate::registry::Named;

use super::{Atom, Bindings, BuiltinTypeError, Derivation, Evaluator, Reasoning, Rule, RuleSet, RuleTerm, TriplePattern};

/// Extends `b` with every way `pattern` matches a triple of `graph`.
fn extend(graph: &Graph, pattern: &TriplePattern, b: &Bindings, out: &mut Vec<Bindings>) {
    let resolve = |t: &RuleTerm| match t {
        RuleTerm::Var(v) => b.get(v).cloned(),
        RuleTerm::Const(c) => Some(c.clone()),
    };
    let (s, p, o) = (
        resolve(&pattern.subject),
        resolve(&pattern.predicate),
        resolve(&pattern.object),
    );
    for t in graph.match_pattern(s.as_ref(), p.as_ref(), o.as_ref()) {
        let mut next = b.clone();
        let ok = [
            (&pattern.subject, t.subject),
            (&pattern.predicate, t.predicate),
            (&pattern.object, t.object),
        ]
        .into_iter()
        .all(|(rt, term)| match rt {
            RuleTerm::Const(_) => true,
            RuleTerm::Var(v) => match next.get(v) {
                Some(bound) => bound == term,
                None => {
                    next.insert(v.clone(), term.clone());
                    true
                }
            },
        });
        if ok {
            out.push(next);
        }
    }
}

/// Per-rule type errors; the smallest message per rule is kept so the
/// report does not depend on evaluation order.
#[derive(Default)]
struct Diagnostics(BTreeMap<String, String>);

impl Diagnostics {
    fn record(&mut self, rule: &str, message: String) {
        match self.0.get_mut(rule) {
            Some(m) if *m <= message => {}
            Some(m) => *m = message,
            None => {
                self.0.insert(rule.to_string(), message);
            }
        }
    }

    fn into_vec(self) -> Vec<BuiltinTypeError> {
        self.0
            .into_iter()
            .map(|(rule, message)| BuiltinTypeError { rule, message })
            .collect()
    }
}

/// All bindings satisfying the body of `rule`. With `delta = Some((i, d))`
/// the `i`-th body atom must match a triple of `d`; the others match `full`.
fn solve(
    rule: &Rule,
    full: &Graph,
    delta: Option<(usize, &Graph)>,
    diags: &mut Diagnostics,
) -> Vec<Bindings> {
    let mut frontier = vec![Bindings::new()];
    if let Some((i, d)) = delta {
        let Atom::Pattern(p) = &rule.body[i] else {
            unreachable!("delta atom is a triple pattern")
        };
        let mut next = Vec::new();
        extend(d, p, &Bindings::new(), &mut next);
        frontier = next;
    }
    for (j, atom) in rule.body.iter().enumerate() {
        if frontier.is_empty() {
            break;
        }
        if delta.is_some_and(|(i, _)| i == j) {
            continue;
        }
        match atom {
            Atom::Pattern(p) => {
                let mut next = Vec::new();
                for b in &frontier {
                    extend(full, p, b, &mut next);
                }
                frontier = next;
            }
            Atom::Builtin(bi) => frontier.retain(|b| match bi.holds(b) {
                Ok(v) => v,
                Err(msg) => {
                    diags.record(&rule.name, msg);
                    false
                }
            }),
        }
    }
    frontier
}

fn heads(rule: &Rule, b: &Bindings) -> Vec<Triple> {
    let mut out: Vec<Triple> = rule.head.iter().filter_map(|h| h.instantiate(b)).collect();
    out.sort();
    out.dedup();
    out
}

fn finish(
    graph: Graph,
    rules: &RuleSet,
    found: BTreeSet<(String, Bindings)>,
    diags: Diagnostics,
) -> Reasoning {
    let log = found
        .into_iter()
        .map(|(name, bindings)| {
            let rule = rules.get(&name).expect("rule exists");
            Derivation {
                triples: heads(rule, &bindings),
                rule: name,
                bindings,
            }
        })
        .collect();
    Reasoning {
        graph,
        log,
        diagnostics: diags.into_vec(),
    }
}

fn with_rule_prefixes(graph: &Graph, rules: &RuleSet) -> Graph {
    let mut g = graph.clone();
    g.add_missing_prefixes(rules.prefixes.iter().map(|(p, ns)| (p.as_str(), ns.as_str())));
    g
}

/// Re-evaluates every rule against the whole graph until nothing changes.
pub struct NaiveEvaluator;

impl Named for NaiveEvaluator {
    fn name(&self) -> &'static str {
        "naive"
    }
}

impl Evaluator for NaiveEvaluator {
    fn evaluate(&self, graph: &Graph, rules: &RuleSet) -> Reasoning {
        let mut full = with_rule_prefixes(graph, rules);
        let mut diags = Diagnostics::default();
        loop {
            let mut found = BTreeSet::new();
            let mut new = Vec::new();
            for rule in &rules.rules {
                for b in solve(rule, &full, None, &mut diags) {
                    new.extend(heads(rule, &b).into_iter().filter(|t| !full.contains(t)));
                    found.insert((rule.name.clone(), b));
                }
            }
            if new.is_empty() {
                return finish(full, rules, found, diags);
            }
            full.extend(new);
        }
    }
}

/// Joins each rule once per body pattern against only the triples derived
/// in the previous round.
pub struct SemiNaiveEvaluator;

impl Named for SemiNaiveEvaluator {
    fn name(&self) -> &'static str {
        "semi-naive"
    }
}

impl Evaluator for SemiNaiveEvaluator {
    fn evaluate(&self, graph: &Graph, rules: &RuleSet) -> Reasoning {
        let mut full = with_rule_prefixes(graph, rules);
        let mut diags = Diagnostics::default();
        let mut found = BTreeSet::new();

        let mut fire = |rule: &Rule, bs: Vec<Bindings>, full: &Graph, out: &mut Graph| {
            for b in bs {
                if found.contains(&(rule.name.clone(), b.clone())) {
                    continue;
                }
                for t in heads(rule, &b) {
                    if !full.contains(&t) {
                        out.insert(t);
                    }
                }
                found.insert((rule.name.clone(), b));
            }
        };

        let mut delta = Graph::new();
        for rule in &rules.rules {
            let bs = solve(rule, &full, None, &mut diags);
            fire(rule, bs, &full, &mut delta);
        }
        while !delta.is_empty() {
            full.extend(delta.iter().map(|t| t.to_triple()));
            let mut next = Graph::new();
            for rule in &rules.rules {
                for (i, atom) in rule.body.iter().enumerate() {
                    if let Atom::Pattern(_) = atom {
                        let bs = solve(rule, &full, Some((i, &delta)), &mut diags);
                        fire(rule, bs, &full, &mut next);
                    }
                }
            }
            delta = next;
        }
        finish(full, rules, found, diags)
    }
}
