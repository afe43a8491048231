//! Turtle subset: `@prefix`/`PREFIX`, prefixed names, absolute IRIs, `a`,
//! blank node labels, typed/language literals, numeric and boolean
//! shorthands, `;` and `,` lists, `#` comments.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::vocab::{RDF_TYPE, XSD_BOOLEAN, XSD_DECIMAL, XSD_DOUBLE, XSD_INTEGER, XSD_STRING};

use super::lex::{tokenize, Tok, Token};
use super::term::{escape_string, xsd_for_number_lexical, Iri, Literal, Term, Triple};
use super::{Graph, RdfError};

pub fn parse_turtle(text: &str) -> Result<Graph, RdfError> {
    let tokens = tokenize(text)?;
    let mut p = TurtleParser {
        tokens: &tokens,
        pos: 0,
        graph: Graph::new(),
    };
    p.document()?;
    Ok(p.graph)
}

struct TurtleParser<'t> {
    tokens: &'t [Token],
    pos: usize,
    graph: Graph,
}

impl<'t> TurtleParser<'t> {
    fn peek(&self) -> Option<&'t Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Result<&'t Token, RdfError> {
        let t = self.tokens.get(self.pos).ok_or_else(|| self.eof_error())?;
        self.pos += 1;
        Ok(t)
    }

    fn eof_error(&self) -> RdfError {
        let (line, column) = self
            .tokens
            .last()
            .map(|t| (t.line, t.column))
            .unwrap_or((1, 1));
        RdfError::Syntax {
            line,
            column,
            message: "unexpected end of document".into(),
        }
    }

    fn error_at(t: &Token, message: impl Into<String>) -> RdfError {
        RdfError::Syntax {
            line: t.line,
            column: t.column,
            message: message.into(),
        }
    }

    fn expect_punct(&mut self, p: &str) -> Result<(), RdfError> {
        let t = self.next()?;
        match &t.tok {
            Tok::Punct(q) if *q == p => Ok(()),
            other => Err(Self::error_at(t, format!("expected '{p}', found {other:?}"))),
        }
    }

    fn at_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Some(Token { tok: Tok::Punct(q), .. }) if *q == p)
    }

    fn document(&mut self) -> Result<(), RdfError> {
        while let Some(t) = self.peek() {
            match &t.tok {
                Tok::At(d) if d == "prefix" => {
                    self.pos += 1;
                    self.prefix_body()?;
                    self.expect_punct(".")?;
                }
                Tok::Word(w) if w.eq_ignore_ascii_case("prefix") => {
                    self.pos += 1;
                    self.prefix_body()?;
                }
                Tok::At(d) if d == "base" => {
                    return Err(Self::error_at(t, "@base is not supported; use absolute IRIs"))
                }
                Tok::Word(w) if w.eq_ignore_ascii_case("base") => {
                    return Err(Self::error_at(t, "BASE is not supported; use absolute IRIs"))
                }
                _ => {
                    self.triples()?;
                    self.expect_punct(".")?;
                }
            }
        }
        Ok(())
    }

    fn prefix_body(&mut self) -> Result<(), RdfError> {
        let t = self.next()?;
        let Tok::PName(prefix, local) = &t.tok else {
            return Err(Self::error_at(t, "expected prefix name like 'ex:'"));
        };
        if !local.is_empty() {
            return Err(Self::error_at(t, "prefix declaration must end with ':'"));
        }
        let t = self.next()?;
        let Tok::Iri(ns) = &t.tok else {
            return Err(Self::error_at(t, "expected namespace IRI"));
        };
        Iri::new(ns.as_str()).map_err(|e| Self::error_at(t, e.to_string()))?;
        self.graph.set_prefix(prefix.clone(), ns.clone());
        Ok(())
    }

    fn triples(&mut self) -> Result<(), RdfError> {
        let subject = self.subject()?;
        loop {
            let verb = self.verb()?;
            loop {
                let start = self.peek().cloned();
                let object = self.object()?;
                let triple = Triple::new(subject.clone(), verb.clone(), object).map_err(|e| {
                    start
                        .as_ref()
                        .map(|t| Self::error_at(t, e.to_string()))
                        .unwrap_or(e)
                })?;
                self.graph.insert(triple);
                if self.at_punct(",") {
                    self.pos += 1;
                } else {
                    break;
                }
            }
            if self.at_punct(";") {
                while self.at_punct(";") {
                    self.pos += 1;
                }
                if self.at_punct(".") {
                    break;
                }
            } else {
                break;
            }
        }
        Ok(())
    }

    fn resolve_pname(&self, t: &Token, prefix: &str, local: &str) -> Result<Term, RdfError> {
        let ns = self
            .graph
            .prefixes()
            .get(prefix)
            .ok_or_else(|| RdfError::UnknownPrefix {
                prefix: prefix.to_string(),
                line: t.line,
                column: t.column,
            })?;
        Term::iri(format!("{ns}{local}")).map_err(|e| Self::error_at(t, e.to_string()))
    }

    fn iri_term(&self, t: &Token) -> Result<Option<Term>, RdfError> {
        match &t.tok {
            Tok::Iri(i) => Term::iri(i.as_str())
                .map(Some)
                .map_err(|e| Self::error_at(t, e.to_string())),
            Tok::PName(p, l) => self.resolve_pname(t, p, l).map(Some),
            _ => Ok(None),
        }
    }

    fn subject(&mut self) -> Result<Term, RdfError> {
        let t = self.next()?;
        if let Some(term) = self.iri_term(t)? {
            return Ok(term);
        }
        match &t.tok {
            Tok::Blank(b) => Term::blank(b.as_str()).map_err(|e| Self::error_at(t, e.to_string())),
            Tok::Punct("[") | Tok::Punct("(") => Err(Self::error_at(
                t,
                "anonymous blank nodes and collections are not supported",
            )),
            other => Err(Self::error_at(t, format!("expected subject, found {other:?}"))),
        }
    }

    fn verb(&mut self) -> Result<Term, RdfError> {
        let t = self.next()?;
        if let Tok::Word(w) = &t.tok {
            if w == "a" {
                return Ok(Term::iri(RDF_TYPE).expect("valid"));
            }
        }
        self.iri_term(t)?
            .ok_or_else(|| Self::error_at(t, format!("expected predicate, found {:?}", t.tok)))
    }

    fn object(&mut self) -> Result<Term, RdfError> {
        let t = self.next()?;
        if let Some(term) = self.iri_term(t)? {
            return Ok(term);
        }
        match &t.tok {
            Tok::Blank(b) => Term::blank(b.as_str()).map_err(|e| Self::error_at(t, e.to_string())),
            Tok::Str(s) => self.literal_tail(s.clone()),
            Tok::Number(n) => Term::typed(n.as_str(), xsd_for_number_lexical(n))
                .map_err(|e| Self::error_at(t, e.to_string())),
            Tok::Word(w) if w == "true" || w == "false" => {
                Ok(Term::typed(w.as_str(), XSD_BOOLEAN).expect("valid"))
            }
            Tok::Punct("[") | Tok::Punct("(") => Err(Self::error_at(
                t,
                "anonymous blank nodes and collections are not supported",
            )),
            other => Err(Self::error_at(t, format!("expected object, found {other:?}"))),
        }
    }

    fn literal_tail(&mut self, lexical: String) -> Result<Term, RdfError> {
        match self.peek().map(|t| &t.tok) {
            Some(Tok::At(tag)) => {
                let t = self.next()?;
                Literal::lang(lexical, tag.as_str())
                    .map(Term::Literal)
                    .map_err(|e| Self::error_at(t, e.to_string()))
            }
            Some(Tok::Caret2) => {
                self.pos += 1;
                let t = self.next()?;
                let dt = self
                    .iri_term(t)?
                    .ok_or_else(|| Self::error_at(t, "expected datatype IRI after '^^'"))?;
                let Term::Iri(dt) = dt else { unreachable!() };
                Ok(Term::Literal(Literal::typed(lexical, dt)))
            }
            _ => Ok(Term::string(lexical)),
        }
    }
}

fn is_local_name(s: &str) -> bool {
    let mut chars = s.chars();
    let first_ok = matches!(chars.next(), Some(c) if c.is_alphanumeric() || c == '_');
    first_ok
        && s.chars().all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.'))
        && !s.ends_with('.')
}

fn is_prefix_name(s: &str) -> bool {
    s.is_empty()
        || (s.chars().next().is_some_and(|c| c.is_alphabetic())
            && s.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '-'))
}

fn matches_shape(lex: &str, datatype: &str) -> bool {
    let body = lex.strip_prefix(['+', '-']).unwrap_or(lex);
    let digits = |s: &str| !s.is_empty() && s.chars().all(|c| c.is_ascii_digit());
    match datatype {
        XSD_INTEGER => digits(body),
        XSD_DECIMAL => match body.split_once('.') {
            Some((i, f)) => (i.is_empty() || digits(i)) && digits(f),
            None => false,
        },
        XSD_DOUBLE => {
            let Some((mant, exp)) = body.split_once(['e', 'E']) else {
                return false;
            };
            let exp = exp.strip_prefix(['+', '-']).unwrap_or(exp);
            let mant_ok = match mant.split_once('.') {
                Some((i, f)) => (i.is_empty() || digits(i)) && digits(f),
                None => digits(mant),
            };
            mant_ok && digits(exp)
        }
        XSD_BOOLEAN => lex == "true" || lex == "false",
        _ => false,
    }
}

/// Renders terms using the longest declared namespace that yields a valid
/// prefixed name.
pub(crate) struct Abbreviator<'a> {
    prefixes: Vec<(&'a str, &'a str)>,
}

impl<'a> Abbreviator<'a> {
    pub fn new(prefixes: &'a BTreeMap<String, String>) -> Self {
        let mut prefixes: Vec<(&str, &str)> = prefixes
            .iter()
            .filter(|(p, _)| is_prefix_name(p))
            .map(|(p, ns)| (p.as_str(), ns.as_str()))
            .collect();
        prefixes.sort_by(|a, b| b.1.len().cmp(&a.1.len()).then(a.0.cmp(b.0)));
        Abbreviator { prefixes }
    }

    pub fn iri(&self, iri: &str) -> String {
        for (p, ns) in &self.prefixes {
            if let Some(local) = iri.strip_prefix(ns) {
                if is_local_name(local) {
                    return format!("{p}:{local}");
                }
            }
        }
        format!("<{iri}>")
    }

    pub fn term(&self, term: &Term) -> String {
        match term {
            Term::Iri(i) => self.iri(i.as_str()),
            Term::BlankNode(_) => term.to_string(),
            Term::Literal(l) => {
                let dt = l.datatype().as_str();
                if l.language().is_none() && matches_shape(l.lexical(), dt) {
                    return l.lexical().to_string();
                }
                let mut s = String::from("\"");
                escape_string(l.lexical(), &mut s);
                s.push('"');
                if let Some(lang) = l.language() {
                    s.push('@');
                    s.push_str(lang);
                } else if dt != XSD_STRING {
                    s.push_str("^^");
                    s.push_str(&self.iri(dt));
                }
                s
            }
        }
    }
}

/// Deterministic Turtle: sorted prefix block, one subject block per subject,
/// `rdf:type` first, then predicates and objects in term order.
pub fn serialize_turtle(graph: &Graph) -> String {
    let mut out = String::new();
    for (p, ns) in graph.prefixes() {
        if is_prefix_name(p) {
            let _ = writeln!(out, "@prefix {p}: <{ns}> .");
        }
    }
    let triples = graph.sorted_triples();
    if triples.is_empty() {
        return out;
    }
    if !out.is_empty() {
        out.push('\n');
    }
    let abbr = Abbreviator::new(graph.prefixes());
    let mut by_subject: BTreeMap<&Term, BTreeMap<(bool, &Term), Vec<&Term>>> = BTreeMap::new();
    for t in &triples {
        let is_type = t.predicate().as_iri().is_some_and(|i| i.as_str() == RDF_TYPE);
        by_subject
            .entry(t.subject())
            .or_default()
            .entry((!is_type, t.predicate()))
            .or_default()
            .push(t.object());
    }
    let mut first = true;
    for (subject, preds) in by_subject {
        if !first {
            out.push('\n');
        }
        first = false;
        out.push_str(&abbr.term(subject));
        let n = preds.len();
        for (i, ((not_type, pred), objects)) in preds.into_iter().enumerate() {
            let verb = if !not_type { "a".to_string() } else { abbr.term(pred) };
            let objs: Vec<String> = objects.iter().map(|o| abbr.term(o)).collect();
            if i == 0 {
                let _ = write!(out, " {verb} {}", objs.join(" , "));
            } else {
                let _ = write!(out, "    {verb} {}", objs.join(" , "));
            }
            out.push_str(if i + 1 == n { " .\n" } else { " ;\n" });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vocab::RDF_LANG_STRING;

    #[test]
    fn single_statement_expands_prefixes() {
        let g = parse_turtle("@prefix m3: <http://example.org/m3#> . m3:a m3:b m3:c .").unwrap();
        assert_eq!(g.len(), 1);
        let t = &g.sorted_triples()[0];
        assert_eq!(t.subject(), &Term::iri("http://example.org/m3#a").unwrap());
        assert_eq!(t.object(), &Term::iri("http://example.org/m3#c").unwrap());
        assert_eq!(g.prefixes()["m3"], "http://example.org/m3#");
    }

    #[test]
    fn empty_document() {
        assert!(parse_turtle("").unwrap().is_empty());
        assert!(parse_turtle("# only a comment\n").unwrap().is_empty());
    }

    #[test]
    fn lists_literals_and_shorthands() {
        let src = r#"
            PREFIX ex: <http://e.org/>
            ex:s a ex:C , ex:D ;
                ex:v 38.7 , -2 , 1.5e3 , true ;
                ex:l "chat"@fr , "x"^^ex:dt , "plain" ;
                ex:b _:n1 ;
            .
        "#;
        let g = parse_turtle(src).unwrap();
        assert_eq!(g.len(), 10);
        let lits: Vec<Literal> = g
            .iter()
            .filter_map(|t| t.object.as_literal().cloned())
            .collect();
        let dt = |lex: &str| {
            lits.iter()
                .find(|l| l.lexical() == lex)
                .map(|l| l.datatype().as_str().to_string())
                .unwrap()
        };
        assert_eq!(dt("38.7"), XSD_DECIMAL);
        assert_eq!(dt("-2"), XSD_INTEGER);
        assert_eq!(dt("1.5e3"), XSD_DOUBLE);
        assert_eq!(dt("true"), XSD_BOOLEAN);
        assert_eq!(dt("chat"), RDF_LANG_STRING);
        assert_eq!(dt("plain"), XSD_STRING);
        assert_eq!(dt("x"), "http://e.org/dt");
    }

    #[test]
    fn unknown_prefix_is_reported_with_position() {
        let err = parse_turtle("@prefix a: <http://a/> .\nb:x a:p a:o .").unwrap_err();
        assert_eq!(
            err,
            RdfError::UnknownPrefix {
                prefix: "b".into(),
                line: 2,
                column: 1
            }
        );
    }

    #[test]
    fn syntax_errors() {
        for bad in [
            "<http://a/s> <http://a/p> <http://a/o>",
            "<http://a/s> <http://a/p> .",
            "\"lit\" <http://a/p> <http://a/o> .",
            "<http://a/s> \"p\" <http://a/o> .",
            "<http://a/s> <http://a/p> [ ] .",
            "@base <http://a/> .",
            "<rel> <http://a/p> <http://a/o> .",
        ] {
            assert!(
                matches!(parse_turtle(bad), Err(RdfError::Syntax { .. })),
                "should fail: {bad}"
            );
        }
    }

    #[test]
    fn serializer_groups_subjects() {
        let src = "@prefix ex: <http://e.org/> .\nex:s ex:p ex:o2 , ex:o1 ; a ex:C .";
        let g = parse_turtle(src).unwrap();
        let out = serialize_turtle(&g);
        assert_eq!(
            out,
            "@prefix ex: <http://e.org/> .\n\nex:s a ex:C ;\n    ex:p ex:o1 , ex:o2 .\n"
        );
        assert_eq!(parse_turtle(&out).unwrap(), g);
    }

    #[test]
    fn serializer_keeps_lexical_forms() {
        let src = r#"<http://e.org/s> <http://e.org/p> "38.70"^^<http://www.w3.org/2001/XMLSchema#decimal> , "1."^^<http://www.w3.org/2001/XMLSchema#decimal> , "a\\b\n" ."#;
        let g = parse_turtle(src).unwrap();
        let back = parse_turtle(&serialize_turtle(&g)).unwrap();
        assert_eq!(back, g);
    }
}
