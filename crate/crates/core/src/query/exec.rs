use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use crate::rdf::{Graph, Term};

use super::{CmpOp, Expr, Query, QueryPattern, QueryTerm, SolutionSet};

type Row = BTreeMap<String, Term>;

fn resolve(t: &QueryTerm, row: &Row) -> Option<Term> {
    match t {
        QueryTerm::Var(v) => row.get(v).cloned(),
        QueryTerm::Const(c) => Some(c.clone()),
    }
}

fn extend(graph: &Graph, p: &QueryPattern, row: &Row, out: &mut Vec<Row>) {
    let [s, pr, o] = p.terms().map(|t| resolve(t, row));
    for t in graph.match_pattern(s.as_ref(), pr.as_ref(), o.as_ref()) {
        let mut next = row.clone();
        let ok = p
            .terms()
            .into_iter()
            .zip([t.subject, t.predicate, t.object])
            .all(|(qt, term)| match qt {
                QueryTerm::Const(_) => true,
                QueryTerm::Var(v) => match next.get(v) {
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

/// Greedy join order: repeatedly take the pattern with the fewest matches
/// for its constant positions, preferring patterns connected to variables
/// already bound.
fn join_order(query: &Query, graph: &Graph) -> Vec<usize> {
    let estimate = |p: &QueryPattern| {
        let [s, pr, o] = p.terms().map(|t| match t {
            QueryTerm::Const(c) => Some(c),
            QueryTerm::Var(_) => None,
        });
        graph.count_matching(s, pr, o)
    };
    let estimates: Vec<usize> = query.patterns.iter().map(estimate).collect();
    let mut remaining: Vec<usize> = (0..query.patterns.len()).collect();
    let mut bound: BTreeSet<&str> = BTreeSet::new();
    let mut order = Vec::new();
    while !remaining.is_empty() {
        let connected = |i: &usize| query.patterns[*i].vars().any(|v| bound.contains(v));
        let pick = remaining
            .iter()
            .copied()
            .min_by_key(|i| (!connected(i) && !bound.is_empty(), estimates[*i], *i))
            .expect("non-empty");
        remaining.retain(|i| *i != pick);
        bound.extend(query.patterns[pick].vars());
        order.push(pick);
    }
    order
}

/// Three-valued filter result: `None` is a type error.
fn eval(e: &Expr, row: &Row) -> Option<bool> {
    match e {
        Expr::Cmp(op, a, b) => {
            let a = resolve(a, row)?;
            let b = resolve(b, row)?;
            compare(*op, &a, &b)
        }
        Expr::And(a, b) => match (eval(a, row), eval(b, row)) {
            (Some(false), _) | (_, Some(false)) => Some(false),
            (Some(true), Some(true)) => Some(true),
            _ => None,
        },
        Expr::Or(a, b) => match (eval(a, row), eval(b, row)) {
            (Some(true), _) | (_, Some(true)) => Some(true),
            (Some(false), Some(false)) => Some(false),
            _ => None,
        },
    }
}

/// Numbers compare by value. `=` and `!=` fall back to term identity for
/// anything else; ordering operators on non-numbers are type errors.
fn compare(op: CmpOp, a: &Term, b: &Term) -> Option<bool> {
    if let (Some(x), Some(y)) = (a.numeric(), b.numeric()) {
        let ord = x.partial_cmp(&y)?;
        return Some(match op {
            CmpOp::Eq => ord == Ordering::Equal,
            CmpOp::Ne => ord != Ordering::Equal,
            CmpOp::Lt => ord == Ordering::Less,
            CmpOp::Le => ord != Ordering::Greater,
            CmpOp::Gt => ord == Ordering::Greater,
            CmpOp::Ge => ord != Ordering::Less,
        });
    }
    match op {
        CmpOp::Eq => Some(a == b),
        CmpOp::Ne => Some(a != b),
        _ => None,
    }
}

/// Sort key for ORDER BY: numbers first by value, then other terms by
/// their N-Triples form.
fn order_cmp(a: &Term, b: &Term) -> Ordering {
    match (a.numeric(), b.numeric()) {
        (Some(x), Some(y)) => x.partial_cmp(&y).unwrap_or(Ordering::Equal),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => a.to_string().cmp(&b.to_string()),
    }
}

pub fn execute(query: &Query, graph: &Graph) -> SolutionSet {
    let mut rows = vec![Row::new()];
    for i in join_order(query, graph) {
        let mut next = Vec::new();
        for r in &rows {
            extend(graph, &query.patterns[i], r, &mut next);
        }
        rows = next;
        if rows.is_empty() {
            break;
        }
    }

    let mut filter_errors = 0;
    rows.retain(|r| {
        let mut keep = true;
        for f in &query.filters {
            match eval(f, r) {
                Some(true) => {}
                Some(false) => {
                    keep = false;
                    break;
                }
                None => {
                    filter_errors += 1;
                    keep = false;
                    break;
                }
            }
        }
        keep
    });

    let vars = query.projection();
    let all_vars = query.pattern_vars();
    let serialize = |r: &Row, vs: &[String]| -> Vec<String> { vs.iter().map(|v| r[v].to_string()).collect() };
    let mut keyed: Vec<(Vec<String>, Vec<String>, Row)> = rows
        .into_iter()
        .map(|r| (serialize(&r, &vars), serialize(&r, &all_vars), r))
        .collect();
    keyed.sort_by(|a, b| {
        let primary = match &query.order_by {
            Some(o) => {
                let c = order_cmp(&a.2[&o.var], &b.2[&o.var]);
                if o.descending {
                    c.reverse()
                } else {
                    c
                }
            }
            None => Ordering::Equal,
        };
        primary.then_with(|| a.0.cmp(&b.0)).then_with(|| a.1.cmp(&b.1))
    });

    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for (key, _, row) in keyed {
        if query.distinct && !seen.insert(key) {
            continue;
        }
        if query.limit.is_some_and(|n| out.len() >= n) {
            break;
        }
        out.push(vars.iter().map(|v| row[v].clone()).collect());
    }
    SolutionSet {
        vars,
        rows: out,
        filter_errors,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::query::parse_query;
    use crate::rdf::parse_turtle;

    const DATA: &str = r#"
        @prefix m3: <https://m3.example.org/vocab#> .
        @prefix ex: <http://example.org/> .
        ex:o1 m3:hasValue 38.7 ; ex:tag ex:hot .
        ex:o2 m3:hasValue 36.6 ; ex:tag ex:hot .
        ex:o3 m3:hasValue "warm" ; ex:tag ex:cold .
        ex:o4 m3:hasValue 40 ; ex:tag ex:hot .
    "#;

    fn run(q: &str) -> SolutionSet {
        execute(&parse_query(q).unwrap(), &parse_turtle(DATA).unwrap())
    }

    fn col(s: &SolutionSet, v: &str) -> Vec<String> {
        s.column(v).unwrap().into_iter().map(|t| t.to_string()).collect()
    }

    #[test]
    fn filter_and_type_errors() {
        let s = run("SELECT ?o WHERE { ?o m3:hasValue ?v FILTER (?v >= 38) }");
        assert_eq!(col(&s, "o"), vec!["<http://example.org/o1>", "<http://example.org/o4>"]);
        assert_eq!(s.filter_errors, 1);
        // error || true is true
        let s = run("PREFIX ex: <http://example.org/> SELECT ?o WHERE { ?o m3:hasValue ?v ; ex:tag ?t FILTER (?v > 100 || ?t = ex:cold) }");
        assert_eq!(col(&s, "o"), vec!["<http://example.org/o3>"]);
        assert_eq!(s.filter_errors, 0);
    }

    #[test]
    fn order_distinct_limit() {
        let s = run("SELECT ?v WHERE { ?o m3:hasValue ?v } ORDER BY DESC(?v)");
        let xsd = "http://www.w3.org/2001/XMLSchema#";
        assert_eq!(
            col(&s, "v"),
            // numbers sort before other terms, so DESC lists them last
            vec![
                "\"warm\"".to_string(),
                format!("\"40\"^^<{xsd}integer>"),
                format!("\"38.7\"^^<{xsd}decimal>"),
                format!("\"36.6\"^^<{xsd}decimal>"),
            ]
        );
        let s = run("PREFIX ex: <http://example.org/> SELECT DISTINCT ?t WHERE { ?o ex:tag ?t }");
        assert_eq!(col(&s, "t"), vec!["<http://example.org/cold>", "<http://example.org/hot>"]);
        let s = run("PREFIX ex: <http://example.org/> SELECT ?t WHERE { ?o ex:tag ?t } LIMIT 2");
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn trivial_cases() {
        let empty = Graph::new();
        let q = parse_query("SELECT ?s WHERE { ?s ?p ?o }").unwrap();
        assert!(execute(&q, &empty).is_empty());
        let s = run("SELECT * WHERE { <http://example.org/o1> <http://example.org/tag> <http://example.org/hot> }");
        assert_eq!(s.len(), 1);
        assert!(s.vars.is_empty());
        let s = run("SELECT * WHERE { }");
        assert_eq!(s.rows, vec![Vec::<Term>::new()]);
    }
}
