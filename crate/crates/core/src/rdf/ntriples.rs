//! N-Triples: one triple per line, ` .` terminator, UTF-8.

use super::lex::{tokenize, Tok, Token};
use super::term::{Iri, Literal, Term, Triple};
use super::{Graph, RdfError};

pub fn parse_ntriples(text: &str) -> Result<Graph, RdfError> {
    let mut graph = Graph::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let tokens = tokenize(line).map_err(|e| relocate(e, line_no))?;
        if tokens.is_empty() {
            continue;
        }
        let triple = parse_line(&tokens).map_err(|e| relocate(e, line_no))?;
        graph.insert(triple);
    }
    Ok(graph)
}

fn relocate(e: RdfError, line: usize) -> RdfError {
    match e {
        RdfError::Syntax { column, message, .. } => RdfError::Syntax {
            line,
            column,
            message,
        },
        other => other,
    }
}

fn error(t: &Token, message: impl Into<String>) -> RdfError {
    RdfError::Syntax {
        line: t.line,
        column: t.column,
        message: message.into(),
    }
}

fn parse_line(tokens: &[Token]) -> Result<Triple, RdfError> {
    let mut it = tokens.iter().peekable();
    let mut term = |what: &str, allow_blank: bool, allow_literal: bool| -> Result<Term, RdfError> {
        let t = it.next().ok_or_else(|| RdfError::Syntax {
            line: 1,
            column: 1,
            message: format!("missing {what}"),
        })?;
        let term = match &t.tok {
            Tok::Iri(i) => Term::iri(i.as_str()).map_err(|e| error(t, e.to_string()))?,
            Tok::Blank(b) if allow_blank => {
                Term::blank(b.as_str()).map_err(|e| error(t, e.to_string()))?
            }
            Tok::Str(s) if allow_literal => match it.peek().map(|t| &t.tok) {
                Some(Tok::At(lang)) => {
                    let lt = it.next().unwrap();
                    Term::Literal(Literal::lang(s.clone(), lang.as_str()).map_err(|e| error(lt, e.to_string()))?)
                }
                Some(Tok::Caret2) => {
                    it.next();
                    let dt = it.next().ok_or_else(|| error(t, "missing datatype"))?;
                    let Tok::Iri(dt_iri) = &dt.tok else {
                        return Err(error(dt, "datatype must be an IRI"));
                    };
                    let dt_iri = Iri::new(dt_iri.as_str()).map_err(|e| error(dt, e.to_string()))?;
                    Term::Literal(Literal::typed(s.clone(), dt_iri))
                }
                _ => Term::string(s.clone()),
            },
            other => return Err(error(t, format!("unexpected {other:?} as {what}"))),
        };
        Ok(term)
    };
    let s = term("subject", true, false)?;
    let p = term("predicate", false, false)?;
    let o = term("object", true, true)?;
    match it.next() {
        Some(Token {
            tok: Tok::Punct("."),
            ..
        }) => {}
        Some(t) => return Err(error(t, "expected '.'")),
        None => {
            let last = tokens.last().unwrap();
            return Err(error(last, "missing terminating '.'"));
        }
    }
    if let Some(t) = it.next() {
        return Err(error(t, "trailing content after '.'"));
    }
    Triple::new(s, p, o).map_err(|e| error(&tokens[0], e.to_string()))
}

/// Sorted N-Triples document; empty graph gives an empty document.
pub fn serialize_ntriples(graph: &Graph) -> String {
    let mut out = String::new();
    for t in graph.sorted_triples() {
        out.push_str(&t.to_string());
        out.push('\n');
    }
    out
}
