//! Reference implementations and generators shared by the test suites.
//!
//! The oracles here favour obviousness over speed: linear scans, nested
//! loops in textual order and `f64` arithmetic on lexical forms. They share
//! no evaluation code with the engine, only the data types.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use m3_core::query::{CmpOp, Expr, OrderBy, Query, QueryPattern, QueryTerm, Selection};
use m3_core::rdf::{Graph, Term, Triple};
use m3_core::reasoner::{Atom, Builtin, BuiltinArg, BuiltinOp, Rule, RuleSet, RuleTerm, TriplePattern};

pub mod checks;
pub mod vocab;

pub const EX: &str = "http://example.org/";
const XSD: &str = "http://www.w3.org/2001/XMLSchema#";

pub fn ex(local: &str) -> Term {
    Term::iri(format!("{EX}{local}")).expect("valid iri")
}

/// Numeric value read straight from the lexical form.
pub fn number(t: &Term) -> Option<f64> {
    let l = t.as_literal()?;
    let dt = l.datatype().as_str().strip_prefix(XSD)?;
    match dt {
        "integer" | "decimal" | "double" | "float" | "int" | "long" => l.lexical().trim().parse().ok(),
        _ => None,
    }
}

type Assignment = BTreeMap<String, Term>;

fn bind(slot: Option<&str>, value: &Term, a: &mut Assignment) -> bool {
    match slot {
        None => true,
        Some(v) => match a.get(v) {
            Some(old) => old == value,
            None => {
                a.insert(v.to_string(), value.clone());
                true
            }
        },
    }
}

// ---------------------------------------------------------------- rules

fn rule_term_matches(rt: &RuleTerm, value: &Term, a: &mut Assignment) -> bool {
    match rt {
        RuleTerm::Const(c) => c == value,
        RuleTerm::Var(v) => bind(Some(v), value, a),
    }
}

fn builtin_true(b: &Builtin, a: &Assignment) -> bool {
    let vals: Option<Vec<f64>> = b
        .args
        .iter()
        .map(|arg| match arg {
            BuiltinArg::Var(v) => a.get(v).and_then(number),
            BuiltinArg::Number(t) => number(t),
        })
        .collect();
    let Some(v) = vals else { return false };
    match b.op {
        BuiltinOp::GreaterThan => v[0] > v[1],
        BuiltinOp::LessThan => v[0] < v[1],
        BuiltinOp::Ge => v[0] >= v[1],
        BuiltinOp::Le => v[0] <= v[1],
        BuiltinOp::Equal => v[0] == v[1],
        BuiltinOp::NotEqual => v[0] != v[1],
        BuiltinOp::Interval => v[1] <= v[0] && v[0] < v[2],
    }
}

/// Every assignment satisfying the body, by trying every triple for every
/// pattern and checking built-ins once all patterns are placed.
fn body_assignments(rule: &Rule, triples: &[Triple]) -> Vec<Assignment> {
    let patterns: Vec<&TriplePattern> = rule.patterns().collect();
    // one scan per pattern for the triples its constants allow
    let candidates: Vec<Vec<&Triple>> = patterns
        .iter()
        .map(|p| {
            triples
                .iter()
                .filter(|t| rule_term_matches(&p.subject, t.subject(), &mut Assignment::new()))
                .filter(|t| rule_term_matches(&p.predicate, t.predicate(), &mut Assignment::new()))
                .filter(|t| rule_term_matches(&p.object, t.object(), &mut Assignment::new()))
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    fn go(i: usize, pats: &[&TriplePattern], cands: &[Vec<&Triple>], a: Assignment, out: &mut Vec<Assignment>) {
        if i == pats.len() {
            out.push(a);
            return;
        }
        for t in &cands[i] {
            let mut next = a.clone();
            let p = pats[i];
            if rule_term_matches(&p.subject, t.subject(), &mut next)
                && rule_term_matches(&p.predicate, t.predicate(), &mut next)
                && rule_term_matches(&p.object, t.object(), &mut next)
            {
                go(i + 1, pats, cands, next, out);
            }
        }
    }
    go(0, &patterns, &candidates, Assignment::new(), &mut out);
    out.retain(|a| {
        rule.body.iter().all(|atom| match atom {
            Atom::Pattern(_) => true,
            Atom::Builtin(b) => builtin_true(b, a),
        })
    });
    out
}

fn ground(rt: &RuleTerm, a: &Assignment) -> Term {
    match rt {
        RuleTerm::Const(c) => c.clone(),
        RuleTerm::Var(v) => a[v].clone(),
    }
}

/// Least fixpoint plus the (rule, bindings) pairs that fired in it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleClosure {
    pub triples: BTreeSet<Triple>,
    pub firings: BTreeSet<(String, Assignment)>,
}

pub fn closure_oracle(graph: &Graph, rules: &RuleSet) -> OracleClosure {
    let mut triples: BTreeSet<Triple> = graph.sorted_triples().into_iter().collect();
    loop {
        let snapshot: Vec<Triple> = triples.iter().cloned().collect();
        let mut firings = BTreeSet::new();
        let mut grew = false;
        for rule in &rules.rules {
            for a in body_assignments(rule, &snapshot) {
                for h in &rule.head {
                    let t = Triple::new(ground(&h.subject, &a), ground(&h.predicate, &a), ground(&h.object, &a));
                    if let Ok(t) = t {
                        grew |= triples.insert(t);
                    }
                }
                firings.insert((rule.name.clone(), a));
            }
        }
        if !grew {
            return OracleClosure { triples, firings };
        }
    }
}

// ---------------------------------------------------------------- queries

fn query_term_matches(qt: &QueryTerm, value: &Term, a: &mut Assignment) -> bool {
    match qt {
        QueryTerm::Const(c) => c == value,
        QueryTerm::Var(v) => bind(Some(v), value, a),
    }
}

fn value_of(qt: &QueryTerm, a: &Assignment) -> Term {
    match qt {
        QueryTerm::Const(c) => c.clone(),
        QueryTerm::Var(v) => a[v].clone(),
    }
}

/// `None` stands for a type error.
fn filter_value(e: &Expr, a: &Assignment) -> Option<bool> {
    match e {
        Expr::Cmp(op, l, r) => {
            let (l, r) = (value_of(l, a), value_of(r, a));
            match (number(&l), number(&r)) {
                (Some(x), Some(y)) => Some(match op {
                    CmpOp::Eq => x == y,
                    CmpOp::Ne => x != y,
                    CmpOp::Lt => x < y,
                    CmpOp::Le => x <= y,
                    CmpOp::Gt => x > y,
                    CmpOp::Ge => x >= y,
                }),
                _ => match op {
                    CmpOp::Eq => Some(l == r),
                    CmpOp::Ne => Some(l != r),
                    _ => None,
                },
            }
        }
        Expr::And(x, y) => {
            let (x, y) = (filter_value(x, a), filter_value(y, a));
            if x == Some(false) || y == Some(false) {
                Some(false)
            } else if x.is_none() || y.is_none() {
                None
            } else {
                Some(true)
            }
        }
        Expr::Or(x, y) => {
            let (x, y) = (filter_value(x, a), filter_value(y, a));
            if x == Some(true) || y == Some(true) {
                Some(true)
            } else if x.is_none() || y.is_none() {
                None
            } else {
                Some(false)
            }
        }
    }
}

fn order_key(a: &Term, b: &Term) -> Ordering {
    match (number(a), number(b)) {
        (Some(x), Some(y)) => x.partial_cmp(&y).unwrap_or(Ordering::Equal),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => a.to_string().cmp(&b.to_string()),
    }
}

/// Result rows of `query` computed by nested loops over the triple list in
/// pattern order, then filtering, sorting, de-duplication and truncation as
/// separate passes.
pub fn query_oracle(query: &Query, graph: &Graph) -> (Vec<String>, Vec<Vec<Term>>) {
    let triples = graph.sorted_triples();
    let mut sols: Vec<Assignment> = vec![Assignment::new()];
    for p in &query.patterns {
        let mut next = Vec::new();
        for a in &sols {
            for t in &triples {
                let mut b = a.clone();
                if query_term_matches(&p.subject, t.subject(), &mut b)
                    && query_term_matches(&p.predicate, t.predicate(), &mut b)
                    && query_term_matches(&p.object, t.object(), &mut b)
                {
                    next.push(b);
                }
            }
        }
        sols = next;
    }
    sols.retain(|a| query.filters.iter().all(|f| filter_value(f, a) == Some(true)));

    let mut all_vars: Vec<String> = Vec::new();
    for p in &query.patterns {
        for qt in [&p.subject, &p.predicate, &p.object] {
            if let QueryTerm::Var(v) = qt {
                if !all_vars.contains(v) {
                    all_vars.push(v.clone());
                }
            }
        }
    }
    let vars = match &query.selection {
        Selection::All => all_vars.clone(),
        Selection::Vars(v) => v.clone(),
    };
    let strings = |a: &Assignment, vs: &[String]| -> Vec<String> { vs.iter().map(|v| a[v].to_string()).collect() };
    sols.sort_by(|x, y| {
        let first = match &query.order_by {
            None => Ordering::Equal,
            Some(o) if o.descending => order_key(&y[&o.var], &x[&o.var]),
            Some(o) => order_key(&x[&o.var], &y[&o.var]),
        };
        first
            .then_with(|| strings(x, &vars).cmp(&strings(y, &vars)))
            .then_with(|| strings(x, &all_vars).cmp(&strings(y, &all_vars)))
    });
    let mut rows: Vec<Vec<Term>> = sols.iter().map(|a| vars.iter().map(|v| a[v].clone()).collect()).collect();
    if query.distinct {
        let mut seen = BTreeSet::new();
        rows.retain(|r| seen.insert(r.clone()));
    }
    if let Some(n) = query.limit {
        rows.truncate(n);
    }
    (vars, rows)
}

// ---------------------------------------------------------------- generators

fn local(prefix: &'static str, n: usize) -> impl Strategy<Value = Term> {
    (0..n).prop_map(move |i| ex(&format!("{prefix}{i}")))
}

pub fn numeric_literal() -> impl Strategy<Value = Term> {
    prop_oneof![
        (0i64..50).prop_map(|i| Term::typed(i.to_string(), &format!("{XSD}integer")).expect("valid")),
        (0i64..500).prop_map(|i| Term::typed(format!("{}.{}", i / 10, i % 10), &format!("{XSD}decimal")).expect("valid")),
    ]
}

pub fn object_term() -> impl Strategy<Value = Term> {
    prop_oneof![
        3 => local("n", 8),
        2 => numeric_literal(),
        1 => prop_oneof![Just("warm"), Just("cold"), Just("tëst \"q\"\n")].prop_map(Term::string),
        1 => (0..3usize).prop_map(|i| Term::blank(format!("b{i}")).expect("valid")),
    ]
}

pub fn subject_term() -> impl Strategy<Value = Term> {
    prop_oneof![4 => local("n", 8), 1 => (0..3usize).prop_map(|i| Term::blank(format!("b{i}")).expect("valid"))]
}

pub fn predicate_term() -> impl Strategy<Value = Term> {
    local("p", 4)
}

pub fn triple() -> impl Strategy<Value = Triple> {
    (subject_term(), predicate_term(), object_term()).prop_map(|(s, p, o)| Triple::new(s, p, o).expect("valid triple"))
}

pub fn graph(max: usize) -> impl Strategy<Value = Graph> {
    proptest::collection::vec(triple(), 0..=max).prop_map(|ts| ts.into_iter().collect())
}

/// A graph without blank nodes, so rule and query results can be compared
/// term for term.
pub fn ground_graph(max: usize) -> impl Strategy<Value = Graph> {
    let obj = prop_oneof![3 => local("n", 6), 2 => numeric_literal(), 1 => Just(Term::string("warm"))];
    proptest::collection::vec((local("n", 6), predicate_term(), obj), 0..=max).prop_map(|ts| {
        ts.into_iter()
            .map(|(s, p, o)| Triple::new(s, p, o).expect("valid"))
            .collect()
    })
}

/// Ground graph over a vocabulary small enough that random queries over it
/// usually have answers: four nodes, two predicates, a few numbers.
pub fn dense_graph(max: usize) -> impl Strategy<Value = Graph> {
    let obj = prop_oneof![3 => local("n", 4), 2 => numeric_literal(), 1 => Just(Term::string("warm"))];
    proptest::collection::vec((local("n", 4), local("p", 2), obj), 0..=max).prop_map(|ts| {
        ts.into_iter()
            .map(|(s, p, o)| Triple::new(s, p, o).expect("valid"))
            .collect()
    })
}

const VARS: [&str; 3] = ["x", "y", "z"];

// predicates and nodes are disjoint, so predicate positions get their own
// variable or nothing would ever join
fn rule_slot(node: bool) -> impl Strategy<Value = RuleTerm> {
    let konst = if node { local("n", 6).boxed() } else { predicate_term().boxed() };
    let var = if node { (0..VARS.len()).prop_map(|i| VARS[i].to_string()).boxed() } else { Just("p".to_string()).boxed() };
    prop_oneof![
        3 => var.prop_map(RuleTerm::Var),
        1 => konst.prop_map(RuleTerm::Const),
    ]
}

fn rule_pattern() -> impl Strategy<Value = TriplePattern> {
    (rule_slot(true), rule_slot(false), rule_slot(true)).prop_map(|(subject, predicate, object)| TriplePattern {
        subject,
        predicate,
        object,
    })
}

fn builtin_op() -> impl Strategy<Value = BuiltinOp> {
    proptest::sample::select(BuiltinOp::ALL.to_vec())
}

/// A safe rule: built-ins and head only use variables the body binds.
pub fn rule(name: String) -> impl Strategy<Value = Rule> {
    (
        proptest::collection::vec(rule_pattern(), 1..=3),
        proptest::option::of((builtin_op(), numeric_literal(), numeric_literal(), any::<prop::sample::Index>())),
        proptest::collection::vec((any::<prop::sample::Index>(), predicate_term(), any::<prop::sample::Index>()), 1..=2),
    )
        .prop_map(move |(body, builtin, heads)| {
            let mut bound: Vec<String> = Vec::new();
            for p in &body {
                for v in p.vars() {
                    if !bound.iter().any(|b| b == v) {
                        bound.push(v.to_string());
                    }
                }
            }
            let node = |idx: &prop::sample::Index, fallback: &str| -> RuleTerm {
                if bound.is_empty() {
                    RuleTerm::Const(ex(fallback))
                } else {
                    RuleTerm::Var(idx.get(&bound).clone())
                }
            };
            let head = heads
                .iter()
                .map(|(s, p, o)| TriplePattern {
                    subject: node(s, "n0"),
                    predicate: RuleTerm::Const(p.clone()),
                    object: node(o, "n1"),
                })
                .collect();
            let mut atoms: Vec<Atom> = body.into_iter().map(Atom::Pattern).collect();
            if let (Some((op, a, b, pick)), false) = (builtin, bound.is_empty()) {
                let v = pick.get(&bound).clone();
                let mut args = vec![BuiltinArg::Var(v), BuiltinArg::Number(a)];
                if op.arity() == 3 {
                    args.push(BuiltinArg::Number(b));
                }
                atoms.push(Atom::Builtin(Builtin { op, args }));
            }
            Rule { name: name.clone(), body: atoms, head }
        })
}

pub fn ruleset(max: usize) -> impl Strategy<Value = RuleSet> {
    (1..=max)
        .prop_flat_map(|n| (0..n).map(|i| rule(format!("r{i}"))).collect::<Vec<_>>())
        .prop_map(|rules| RuleSet::new(rules).expect("generated rules are safe"))
}

const QVARS: [&str; 4] = ["a", "b", "c", "d"];

fn query_slot(node: bool) -> impl Strategy<Value = QueryTerm> {
    let konst = if node { local("n", 4).boxed() } else { local("p", 2).boxed() };
    let var = if node { (0..QVARS.len()).prop_map(|i| QVARS[i].to_string()).boxed() } else { Just("p".to_string()).boxed() };
    prop_oneof![
        6 => var.prop_map(QueryTerm::Var),
        1 => konst.prop_map(QueryTerm::Const),
    ]
}

fn filter_expr(vars: Vec<String>) -> BoxedStrategy<Expr> {
    let leaf = {
        let vars = vars.clone();
        (
            proptest::sample::select(vars),
            proptest::sample::select(vec![CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge]),
            prop_oneof![numeric_literal(), local("n", 4)],
        )
            .prop_map(|(v, op, c)| Expr::Cmp(op, QueryTerm::Var(v), QueryTerm::Const(c)))
    };
    leaf.prop_recursive(2, 4, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::And(Box::new(a), Box::new(b))),
            (inner.clone(), inner).prop_map(|(a, b)| Expr::Or(Box::new(a), Box::new(b))),
        ]
    })
    .boxed()
}

/// A basic graph pattern query with optional filter, projection, DISTINCT,
/// ORDER BY and LIMIT.
pub fn query(max_patterns: usize) -> impl Strategy<Value = Query> {
    proptest::collection::vec(
        (query_slot(true), query_slot(false), prop_oneof![6 => query_slot(true), 1 => numeric_literal().prop_map(QueryTerm::Const)]),
        1..=max_patterns,
    )
    .prop_flat_map(|raw| {
        let patterns: Vec<QueryPattern> = raw
            .into_iter()
            .map(|(subject, predicate, object)| QueryPattern { subject, predicate, object })
            .collect();
        let mut vars: Vec<String> = Vec::new();
        for v in patterns.iter().flat_map(QueryPattern::vars) {
            if !vars.iter().any(|o| o == v) {
                vars.push(v.to_string());
            }
        }
        let filters = if vars.is_empty() {
            Just(Vec::new()).boxed()
        } else {
            proptest::option::weighted(0.4, filter_expr(vars.clone()))
                .prop_map(|f| f.into_iter().collect())
                .boxed()
        };
        let selection = if vars.is_empty() {
            Just(Selection::All).boxed()
        } else {
            prop_oneof![
                Just(Selection::All),
                proptest::sample::subsequence(vars.clone(), 1..=vars.len()).prop_map(Selection::Vars),
            ]
            .boxed()
        };
        let order = if vars.is_empty() {
            Just(None).boxed()
        } else {
            proptest::option::of((proptest::sample::select(vars.clone()), any::<bool>()))
                .prop_map(|o| o.map(|(var, descending)| OrderBy { var, descending }))
                .boxed()
        };
        (
            Just(patterns),
            filters,
            selection,
            any::<bool>(),
            order,
            proptest::option::weighted(0.3, 0usize..6),
        )
    })
    .prop_map(|(patterns, filters, selection, distinct, order_by, limit)| Query {
        prefixes: BTreeMap::new(),
        selection,
        distinct,
        patterns,
        filters,
        order_by,
        limit,
    })
}

/// Text of `query` in the supported SPARQL syntax, for feeding the parser
/// and the command line.
pub fn query_text(q: &Query) -> String {
    let term = |t: &QueryTerm| t.to_string();
    let mut s = String::from("SELECT ");
    if q.distinct {
        s.push_str("DISTINCT ");
    }
    match &q.selection {
        Selection::All => s.push('*'),
        Selection::Vars(vs) => s.push_str(&vs.iter().map(|v| format!("?{v}")).collect::<Vec<_>>().join(" ")),
    }
    s.push_str(" WHERE {\n");
    for p in &q.patterns {
        s.push_str(&format!("  {} {} {} .\n", term(&p.subject), term(&p.predicate), term(&p.object)));
    }
    for f in &q.filters {
        s.push_str(&format!("  FILTER ({f})\n"));
    }
    s.push('}');
    if let Some(o) = &q.order_by {
        if o.descending {
            s.push_str(&format!(" ORDER BY DESC(?{})", o.var));
        } else {
            s.push_str(&format!(" ORDER BY ?{}", o.var));
        }
    }
    if let Some(n) = q.limit {
        s.push_str(&format!(" LIMIT {n}"));
    }
    s
}
