use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rust_decimal::Decimal;

use crate::vocab::{
    RDF_LANG_STRING, XSD, XSD_DECIMAL, XSD_DOUBLE, XSD_INTEGER, XSD_STRING,
};

use super::RdfError;

/// An absolute IRI.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Iri(String);

impl Iri {
    pub fn new(iri: impl Into<String>) -> Result<Self, RdfError> {
        let iri = iri.into();
        if !is_absolute_iri(&iri) {
            return Err(RdfError::InvalidTerm(format!("not an absolute IRI: <{iri}>")));
        }
        Ok(Iri(iri))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

fn is_absolute_iri(s: &str) -> bool {
    let Some(colon) = s.find(':') else {
        return false;
    };
    let scheme = &s[..colon];
    let mut chars = scheme.chars();
    let scheme_ok = matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'));
    scheme_ok
        && !s.chars().any(|c| {
            c.is_whitespace() || c.is_control() || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\')
        })
}

/// Label of a blank node, without the `_:` marker.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlankNode(String);

impl BlankNode {
    pub fn new(label: impl Into<String>) -> Result<Self, RdfError> {
        let label = label.into();
        if !is_blank_label(&label) {
            return Err(RdfError::InvalidTerm(format!("invalid blank node label: _:{label}")));
        }
        Ok(BlankNode(label))
    }

    pub fn label(&self) -> &str {
        &self.0
    }
}

pub(crate) fn is_blank_label(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    lexical: String,
    datatype: Iri,
    language: Option<String>,
}

impl Literal {
    pub fn typed(lexical: impl Into<String>, datatype: Iri) -> Self {
        Literal {
            lexical: lexical.into(),
            datatype,
            language: None,
        }
    }

    pub fn string(lexical: impl Into<String>) -> Self {
        Self::typed(lexical, Iri(XSD_STRING.to_string()))
    }

    pub fn lang(lexical: impl Into<String>, tag: impl Into<String>) -> Result<Self, RdfError> {
        let tag = tag.into();
        if !is_lang_tag(&tag) {
            return Err(RdfError::InvalidTerm(format!("invalid language tag: @{tag}")));
        }
        Ok(Literal {
            lexical: lexical.into(),
            datatype: Iri(RDF_LANG_STRING.to_string()),
            language: Some(tag),
        })
    }

    /// An `xsd:decimal` in canonical lexical form: no trailing zeros beyond
    /// one fractional digit.
    pub fn decimal(value: Decimal) -> Self {
        Self::typed(canonical_decimal(value), Iri(XSD_DECIMAL.to_string()))
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn datatype(&self) -> &Iri {
        &self.datatype
    }

    pub fn language(&self) -> Option<&str> {
        self.language.as_deref()
    }

    /// Numeric value of the literal, if its datatype is numeric and its
    /// lexical form is valid. `"38.70"` and `"38.7"` yield equal values.
    pub fn numeric(&self) -> Option<Numeric> {
        let dt = self.datatype.as_str().strip_prefix(XSD)?;
        match dt {
            "integer" | "decimal" | "int" | "long" | "short" | "byte" | "nonNegativeInteger"
            | "positiveInteger" | "negativeInteger" | "nonPositiveInteger" => {
                let lex = self.lexical.trim();
                if !is_decimal_lexical(lex) {
                    return None;
                }
                Decimal::from_str(lex.strip_prefix('+').unwrap_or(lex))
                    .ok()
                    .map(Numeric::Exact)
            }
            "double" | "float" => parse_xsd_double(self.lexical.trim()).map(Numeric::Approx),
            _ => None,
        }
    }
}

pub(crate) fn is_lang_tag(tag: &str) -> bool {
    let mut parts = tag.split('-');
    let first_ok = parts
        .next()
        .map(|p| !p.is_empty() && p.chars().all(|c| c.is_ascii_alphabetic()))
        .unwrap_or(false);
    first_ok && parts.all(|p| !p.is_empty() && p.chars().all(|c| c.is_ascii_alphanumeric()))
}

fn is_decimal_lexical(s: &str) -> bool {
    let body = s.strip_prefix(['+', '-']).unwrap_or(s);
    let (int, frac) = match body.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (body, None),
    };
    let digits = |p: &str| p.chars().all(|c| c.is_ascii_digit());
    match frac {
        None => !int.is_empty() && digits(int),
        Some(f) => (!int.is_empty() || !f.is_empty()) && digits(int) && digits(f),
    }
}

fn parse_xsd_double(s: &str) -> Option<f64> {
    match s {
        "INF" | "+INF" => Some(f64::INFINITY),
        "-INF" => Some(f64::NEG_INFINITY),
        "NaN" => Some(f64::NAN),
        _ if s.chars().all(|c| c.is_ascii_digit() || matches!(c, '+' | '-' | '.' | 'e' | 'E')) => {
            s.parse().ok()
        }
        _ => None,
    }
}

/// Canonical `xsd:decimal` lexical form.
pub fn canonical_decimal(value: Decimal) -> String {
    let normalized = value.normalize();
    let s = normalized.to_string();
    if s.contains('.') {
        s
    } else {
        format!("{s}.0")
    }
}

/// Numeric value of a literal, used for comparisons in rule built-ins and
/// query filters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Numeric {
    Exact(Decimal),
    Approx(f64),
}

impl Numeric {
    pub fn as_f64(self) -> f64 {
        match self {
            Numeric::Exact(d) => d.to_string().parse().unwrap_or(f64::NAN),
            Numeric::Approx(f) => f,
        }
    }
}

impl PartialOrd for Numeric {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Numeric::Exact(a), Numeric::Exact(b)) => Some(a.cmp(b)),
            (a, b) => a.as_f64().partial_cmp(&b.as_f64()),
        }
    }
}

impl From<Decimal> for Numeric {
    fn from(d: Decimal) -> Self {
        Numeric::Exact(d)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Iri(Iri),
    BlankNode(BlankNode),
    Literal(Literal),
}

impl Term {
    pub fn iri(iri: impl Into<String>) -> Result<Term, RdfError> {
        Iri::new(iri).map(Term::Iri)
    }

    pub fn blank(label: impl Into<String>) -> Result<Term, RdfError> {
        BlankNode::new(label).map(Term::BlankNode)
    }

    pub fn string(lexical: impl Into<String>) -> Term {
        Term::Literal(Literal::string(lexical))
    }

    pub fn typed(lexical: impl Into<String>, datatype: &str) -> Result<Term, RdfError> {
        Ok(Term::Literal(Literal::typed(lexical, Iri::new(datatype)?)))
    }

    pub fn decimal(value: Decimal) -> Term {
        Term::Literal(Literal::decimal(value))
    }

    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(i) => Some(i),
            _ => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(l) => Some(l),
            _ => None,
        }
    }

    pub fn is_iri(&self) -> bool {
        matches!(self, Term::Iri(_))
    }

    pub fn is_blank(&self) -> bool {
        matches!(self, Term::BlankNode(_))
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Term::Literal(_))
    }

    pub fn numeric(&self) -> Option<Numeric> {
        self.as_literal().and_then(Literal::numeric)
    }
}

impl From<Iri> for Term {
    fn from(i: Iri) -> Self {
        Term::Iri(i)
    }
}

impl From<Literal> for Term {
    fn from(l: Literal) -> Self {
        Term::Literal(l)
    }
}

impl From<BlankNode> for Term {
    fn from(b: BlankNode) -> Self {
        Term::BlankNode(b)
    }
}

pub(crate) fn escape_string(s: &str, out: &mut String) {
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if c.is_control() => out.push_str(&format!("\\u{:04X}", c as u32)),
            c => out.push(c),
        }
    }
}

/// N-Triples rendering.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(i) => write!(f, "{i}"),
            Term::BlankNode(b) => write!(f, "_:{}", b.0),
            Term::Literal(l) => {
                let mut s = String::with_capacity(l.lexical.len() + 2);
                s.push('"');
                escape_string(&l.lexical, &mut s);
                s.push('"');
                if let Some(lang) = &l.language {
                    s.push('@');
                    s.push_str(lang);
                } else if l.datatype.as_str() != XSD_STRING {
                    s.push_str("^^");
                    s.push_str(&l.datatype.to_string());
                }
                f.write_str(&s)
            }
        }
    }
}

/// An RDF statement. Subjects are never literals, predicates are always IRIs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    subject: Term,
    predicate: Term,
    object: Term,
}

impl Triple {
    pub fn new(subject: Term, predicate: Term, object: Term) -> Result<Self, RdfError> {
        if subject.is_literal() {
            return Err(RdfError::InvalidTerm(format!("literal in subject position: {subject}")));
        }
        if !predicate.is_iri() {
            return Err(RdfError::InvalidTerm(format!("predicate must be an IRI: {predicate}")));
        }
        Ok(Triple {
            subject,
            predicate,
            object,
        })
    }

    pub fn subject(&self) -> &Term {
        &self.subject
    }

    pub fn predicate(&self) -> &Term {
        &self.predicate
    }

    pub fn object(&self) -> &Term {
        &self.object
    }

    pub fn into_parts(self) -> (Term, Term, Term) {
        (self.subject, self.predicate, self.object)
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

pub(crate) fn xsd_for_number_lexical(lex: &str) -> &'static str {
    if lex.contains(['e', 'E']) {
        XSD_DOUBLE
    } else if lex.contains('.') {
        XSD_DECIMAL
    } else {
        XSD_INTEGER
    }
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iri_must_be_absolute() {
        assert!(Iri::new("http://example.org/a").is_ok());
        assert!(Iri::new("urn:isbn:1").is_ok());
        assert!(Iri::new("relative/path").is_err());
        assert!(Iri::new("1http://x").is_err());
        assert!(Iri::new("http://ex ample.org").is_err());
    }

    #[test]
    fn numeric_values_compare_across_lexical_forms() {
        let a = Term::typed("38.70", XSD_DECIMAL).unwrap();
        let b = Term::typed("38.7", XSD_DECIMAL).unwrap();
        assert_ne!(a, b);
        assert_eq!(a.numeric(), b.numeric());
        let i = Term::typed("38", XSD_INTEGER).unwrap();
        let d = Term::typed("3.8e1", XSD_DOUBLE).unwrap();
        assert_eq!(
            i.numeric().unwrap().partial_cmp(&d.numeric().unwrap()),
            Some(Ordering::Equal)
        );
        assert!(Term::typed("abc", XSD_DECIMAL).unwrap().numeric().is_none());
        assert!(Term::string("1").numeric().is_none());
    }

    #[test]
    fn canonical_decimal_form() {
        assert_eq!(canonical_decimal(Decimal::from_str("38.0000").unwrap()), "38.0");
        assert_eq!(canonical_decimal(Decimal::from_str("38.70").unwrap()), "38.7");
        assert_eq!(canonical_decimal(Decimal::from_str("-0.5").unwrap()), "-0.5");
    }

    #[test]
    fn language_literals_use_lang_string() {
        let l = Literal::lang("chat", "fr").unwrap();
        assert_eq!(l.datatype().as_str(), RDF_LANG_STRING);
        assert!(Literal::lang("x", "").is_err());
    }

    #[test]
    fn ntriples_display() {
        let t = Triple::new(
            Term::iri("http://e.org/s").unwrap(),
            Term::iri("http://e.org/p").unwrap(),
            Term::string("a \"q\"\n"),
        )
        .unwrap();
        assert_eq!(t.to_string(), "<http://e.org/s> <http://e.org/p> \"a \\\"q\\\"\\n\" .");
    }

    #[test]
    fn triple_position_constraints() {
        let lit = Term::string("x");
        let iri = Term::iri("http://e.org/x").unwrap();
        assert!(Triple::new(lit.clone(), iri.clone(), iri.clone()).is_err());
        assert!(Triple::new(iri.clone(), lit, iri.clone()).is_err());
        assert!(Triple::new(Term::blank("b").unwrap(), iri.clone(), iri).is_ok());
    }
}
