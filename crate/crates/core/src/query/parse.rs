use std::collections::BTreeSet;

use crate::rdf::cursor::{describe, Cursor, SyntaxError};
use crate::rdf::lex::Tok;
use crate::rdf::Term;
use crate::reasoner::default_rule_prefixes;
use crate::vocab::RDF_TYPE;

use super::{CmpOp, Expr, OrderBy, Query, QueryError, QueryPattern, QueryTerm, Selection};

impl From<SyntaxError> for QueryError {
    fn from(e: SyntaxError) -> Self {
        QueryError::Syntax {
            line: e.line,
            column: e.column,
            message: e.message,
        }
    }
}

/// Keywords of full SPARQL that this subset refuses.
const UNSUPPORTED: &[&str] = &[
    "OPTIONAL", "UNION", "MINUS", "GRAPH", "SERVICE", "BIND", "VALUES", "GROUP", "HAVING",
    "OFFSET", "CONSTRUCT", "ASK", "DESCRIBE", "FROM", "NOT", "EXISTS", "INSERT", "DELETE",
    "LOAD", "CLEAR", "BASE", "REDUCED", "AS", "COUNT", "SUM", "MIN", "MAX", "AVG", "SAMPLE",
    "REGEX", "STR", "LANG", "BOUND", "IF", "COALESCE", "IN",
];

fn unsupported_keyword(c: &Cursor) -> Option<QueryError> {
    match c.peek_tok() {
        Some(Tok::Word(w)) => UNSUPPORTED
            .iter()
            .find(|k| k.eq_ignore_ascii_case(w))
            .map(|k| QueryError::UnsupportedFeature(k.to_string())),
        _ => None,
    }
}

fn keyword(c: &mut Cursor, kw: &str) -> Result<(), QueryError> {
    if c.eat_keyword(kw) {
        return Ok(());
    }
    if let Some(e) = unsupported_keyword(c) {
        return Err(e);
    }
    Err(c.error_here(format!("expected {kw}, found {}", c.describe_next())).into())
}

/// Parses a query. The prefixes `m3`, `m3x`, `rdf`, `rdfs`, `unit` and
/// `xsd` are predeclared; `PREFIX` lines may add or override others.
pub fn parse_query(text: &str) -> Result<Query, QueryError> {
    let mut c = Cursor::new(text, default_rule_prefixes())?;
    c.prefix_block()?;
    keyword(&mut c, "SELECT")?;
    let distinct = c.eat_keyword("DISTINCT");
    let selection = if c.eat_punct("*") {
        Selection::All
    } else {
        let mut vars = Vec::new();
        while let Some(Tok::Var(v)) = c.peek_tok() {
            vars.push(v.clone());
            c.pos += 1;
        }
        if vars.is_empty() {
            if c.at_punct("(") {
                return Err(QueryError::UnsupportedFeature("projection expressions".into()));
            }
            return Err(c
                .error_here(format!("expected variables or '*' after SELECT, found {}", c.describe_next()))
                .into());
        }
        Selection::Vars(vars)
    };
    if unsupported_keyword(&c).is_some() {
        return Err(unsupported_keyword(&c).unwrap());
    }
    c.eat_keyword("WHERE");
    c.expect_punct("{")?;
    let mut patterns = Vec::new();
    let mut filters = Vec::new();
    group(&mut c, &mut patterns, &mut filters)?;
    c.expect_punct("}")?;

    let mut order_by = None;
    if c.eat_keyword("ORDER") {
        keyword(&mut c, "BY")?;
        let descending = if c.eat_keyword("DESC") {
            true
        } else {
            c.eat_keyword("ASC");
            false
        };
        let paren = c.eat_punct("(");
        let t = c.next()?;
        let Tok::Var(v) = &t.tok else {
            return Err(QueryError::UnsupportedFeature(format!(
                "ORDER BY on {}; only a single variable is supported",
                describe(&t.tok)
            )));
        };
        if paren {
            c.expect_punct(")")?;
        }
        if matches!(c.peek_tok(), Some(Tok::Var(_))) || c.at_keyword("ASC") || c.at_keyword("DESC") {
            return Err(QueryError::UnsupportedFeature("ORDER BY with several keys".into()));
        }
        order_by = Some(OrderBy {
            var: v.clone(),
            descending,
        });
    }
    let mut limit = None;
    if c.eat_keyword("LIMIT") {
        let t = c.next()?;
        let n = match &t.tok {
            Tok::Number(n) => n.parse::<usize>().ok(),
            _ => None,
        };
        limit = Some(n.ok_or_else(|| Cursor::error_at(&t, "LIMIT expects a non-negative integer"))?);
    }
    if !c.at_end() {
        if let Some(e) = unsupported_keyword(&c) {
            return Err(e);
        }
        return Err(c
            .error_here(format!("unexpected {} after query", c.describe_next()))
            .into());
    }

    let query = Query {
        prefixes: c.prefixes,
        selection,
        distinct,
        patterns,
        filters,
        order_by,
        limit,
    };
    check_vars(&query)?;
    Ok(query)
}

fn check_vars(q: &Query) -> Result<(), QueryError> {
    let known: BTreeSet<&str> = q.patterns.iter().flat_map(QueryPattern::vars).collect();
    let mut used: Vec<&str> = Vec::new();
    if let Selection::Vars(v) = &q.selection {
        used.extend(v.iter().map(String::as_str));
    }
    for f in &q.filters {
        used.extend(f.vars());
    }
    if let Some(o) = &q.order_by {
        used.push(&o.var);
    }
    match used.into_iter().find(|v| !known.contains(v)) {
        Some(v) => Err(QueryError::UnknownVariable(v.to_string())),
        None => Ok(()),
    }
}

fn group(c: &mut Cursor, patterns: &mut Vec<QueryPattern>, filters: &mut Vec<Expr>) -> Result<(), QueryError> {
    loop {
        if c.at_punct("}") || c.at_end() {
            return Ok(());
        }
        if c.eat_punct(".") {
            continue;
        }
        if c.eat_keyword("FILTER") {
            if c.at_keyword("NOT") || c.at_keyword("EXISTS") {
                return Err(unsupported_keyword(c).unwrap());
            }
            c.expect_punct("(")?;
            filters.push(or_expr(c)?);
            c.expect_punct(")")?;
            continue;
        }
        if let Some(e) = unsupported_keyword(c) {
            return Err(e);
        }
        if c.at_punct("{") {
            return Err(QueryError::UnsupportedFeature("nested group patterns".into()));
        }
        triples(c, patterns)?;
        if !c.at_punct("}") && !c.at_keyword("FILTER") && unsupported_keyword(c).is_none() {
            c.expect_punct(".")?;
        }
    }
}

fn triples(c: &mut Cursor, out: &mut Vec<QueryPattern>) -> Result<(), QueryError> {
    let subject = term(c, Position::Subject)?;
    loop {
        let predicate = term(c, Position::Predicate)?;
        loop {
            let object = term(c, Position::Object)?;
            out.push(QueryPattern {
                subject: subject.clone(),
                predicate: predicate.clone(),
                object,
            });
            if !c.eat_punct(",") {
                break;
            }
        }
        if !c.eat_punct(";") {
            return Ok(());
        }
        while c.eat_punct(";") {}
        if c.at_punct(".") || c.at_punct("}") {
            return Ok(());
        }
    }
}

#[derive(PartialEq, Clone, Copy)]
enum Position {
    Subject,
    Predicate,
    Object,
    Filter,
}

fn term(c: &mut Cursor, pos: Position) -> Result<QueryTerm, QueryError> {
    if let Some(e) = unsupported_keyword(c) {
        return Err(e);
    }
    let t = c.next()?;
    let out = match &t.tok {
        Tok::Var(v) => QueryTerm::Var(v.clone()),
        Tok::Word(w) if w == "a" && pos == Position::Predicate => {
            QueryTerm::Const(Term::iri(RDF_TYPE).expect("valid"))
        }
        Tok::Blank(_) => return Err(QueryError::UnsupportedFeature("blank nodes in patterns".into())),
        Tok::Punct("[") => return Err(QueryError::UnsupportedFeature("anonymous blank nodes".into())),
        Tok::Punct("(") if pos != Position::Filter => {
            return Err(QueryError::UnsupportedFeature("collections".into()))
        }
        Tok::Punct("^") => return Err(QueryError::UnsupportedFeature("property paths".into())),
        _ => {
            if let Some(iri) = c.iri(&t) {
                QueryTerm::Const(Term::Iri(iri?))
            } else if let Some(lit) = c.literal(&t) {
                if pos == Position::Predicate {
                    return Err(Cursor::error_at(&t, "a literal cannot be a predicate").into());
                }
                QueryTerm::Const(lit?)
            } else if let Tok::Word(w) = &t.tok {
                if c.at_punct("(") {
                    return Err(QueryError::UnsupportedFeature(format!("function {w}()")));
                }
                return Err(Cursor::error_at(&t, format!("unexpected word '{w}'")).into());
            } else {
                return Err(Cursor::error_at(&t, format!("expected a term, found {}", describe(&t.tok))).into());
            }
        }
    };
    if pos == Position::Predicate && ["/", "|", "*", "+"].iter().any(|p| c.at_punct(p)) {
        return Err(QueryError::UnsupportedFeature("property paths".into()));
    }
    if pos == Position::Subject {
        if let QueryTerm::Const(Term::Literal(_)) = out {
            return Err(Cursor::error_at(&t, "a literal cannot be a subject").into());
        }
    }
    Ok(out)
}

fn or_expr(c: &mut Cursor) -> Result<Expr, QueryError> {
    let mut left = and_expr(c)?;
    while c.eat_punct("||") {
        let right = and_expr(c)?;
        left = Expr::Or(Box::new(left), Box::new(right));
    }
    Ok(left)
}

fn and_expr(c: &mut Cursor) -> Result<Expr, QueryError> {
    let mut left = primary(c)?;
    while c.eat_punct("&&") {
        let right = primary(c)?;
        left = Expr::And(Box::new(left), Box::new(right));
    }
    Ok(left)
}

fn primary(c: &mut Cursor) -> Result<Expr, QueryError> {
    if c.eat_punct("(") {
        let e = or_expr(c)?;
        c.expect_punct(")")?;
        return Ok(e);
    }
    if c.at_punct("!") {
        return Err(QueryError::UnsupportedFeature("negation in FILTER".into()));
    }
    let left = term(c, Position::Filter)?;
    let op = [
        ("=", CmpOp::Eq),
        ("!=", CmpOp::Ne),
        ("<=", CmpOp::Le),
        (">=", CmpOp::Ge),
        ("<", CmpOp::Lt),
        (">", CmpOp::Gt),
    ]
    .into_iter()
    .find(|(p, _)| c.at_punct(p))
    .map(|(_, op)| op);
    let Some(op) = op else {
        if ["+", "-", "*", "/"].iter().any(|p| c.at_punct(p)) {
            return Err(QueryError::UnsupportedFeature("arithmetic in FILTER".into()));
        }
        return Err(c
            .error_here(format!("expected a comparison operator, found {}", c.describe_next()))
            .into());
    };
    c.pos += 1;
    let right = term(c, Position::Filter)?;
    Ok(Expr::Cmp(op, left, right))
}
