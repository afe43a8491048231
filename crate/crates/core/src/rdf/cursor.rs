//! Token cursor shared by the rule and query parsers.

use std::collections::BTreeMap;

use crate::vocab::XSD_BOOLEAN;

use super::lex::{tokenize, Tok, Token};
use super::term::{xsd_for_number_lexical, Iri, Literal, Term};
use super::RdfError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl From<RdfError> for SyntaxError {
    fn from(e: RdfError) -> Self {
        match e {
            RdfError::Syntax {
                line,
                column,
                message,
            } => SyntaxError {
                line,
                column,
                message,
            },
            RdfError::UnknownPrefix {
                prefix,
                line,
                column,
            } => SyntaxError {
                line,
                column,
                message: format!("unknown prefix '{prefix}:'"),
            },
            RdfError::InvalidTerm(message) => SyntaxError {
                line: 1,
                column: 1,
                message,
            },
        }
    }
}

pub(crate) struct Cursor {
    tokens: Vec<Token>,
    pub pos: usize,
    pub prefixes: BTreeMap<String, String>,
}

impl Cursor {
    pub fn new(text: &str, prefixes: BTreeMap<String, String>) -> Result<Self, SyntaxError> {
        Ok(Cursor {
            tokens: tokenize(text)?,
            pos: 0,
            prefixes,
        })
    }

    pub fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    pub fn peek_tok(&self) -> Option<&Tok> {
        self.peek().map(|t| &t.tok)
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    pub fn next(&mut self) -> Result<Token, SyntaxError> {
        let t = self.tokens.get(self.pos).cloned().ok_or_else(|| self.eof_error())?;
        self.pos += 1;
        Ok(t)
    }

    pub fn eof_error(&self) -> SyntaxError {
        let (line, column) = self
            .tokens
            .last()
            .map(|t| (t.line, t.column))
            .unwrap_or((1, 1));
        SyntaxError {
            line,
            column,
            message: "unexpected end of input".into(),
        }
    }

    pub fn error_at(t: &Token, message: impl Into<String>) -> SyntaxError {
        SyntaxError {
            line: t.line,
            column: t.column,
            message: message.into(),
        }
    }

    /// Error positioned at the next token, or at the end of input.
    pub fn error_here(&self, message: impl Into<String>) -> SyntaxError {
        match self.peek() {
            Some(t) => Self::error_at(t, message),
            None => SyntaxError {
                message: message.into(),
                ..self.eof_error()
            },
        }
    }

    pub fn at_punct(&self, p: &str) -> bool {
        matches!(self.peek_tok(), Some(Tok::Punct(q)) if *q == p)
    }

    pub fn eat_punct(&mut self, p: &str) -> bool {
        let hit = self.at_punct(p);
        if hit {
            self.pos += 1;
        }
        hit
    }

    pub fn expect_punct(&mut self, p: &str) -> Result<(), SyntaxError> {
        if self.eat_punct(p) {
            return Ok(());
        }
        Err(self.error_here(format!("expected '{p}', found {}", self.describe_next())))
    }

    pub fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek_tok(), Some(Tok::Word(w)) if w.eq_ignore_ascii_case(kw))
    }

    pub fn eat_keyword(&mut self, kw: &str) -> bool {
        let hit = self.at_keyword(kw);
        if hit {
            self.pos += 1;
        }
        hit
    }

    pub fn describe_next(&self) -> String {
        match self.peek_tok() {
            None => "end of input".into(),
            Some(t) => describe(t),
        }
    }

    /// Consumes any leading `@prefix p: <ns> .` or `PREFIX p: <ns>` lines.
    pub fn prefix_block(&mut self) -> Result<(), SyntaxError> {
        loop {
            let turtle_style = matches!(self.peek_tok(), Some(Tok::At(d)) if d == "prefix");
            if !turtle_style && !self.at_keyword("prefix") {
                return Ok(());
            }
            self.pos += 1;
            let t = self.next()?;
            let Tok::PName(prefix, local) = &t.tok else {
                return Err(Self::error_at(&t, "expected prefix name like 'ex:'"));
            };
            if !local.is_empty() {
                return Err(Self::error_at(&t, "prefix declaration must end with ':'"));
            }
            let n = self.next()?;
            let Tok::Iri(ns) = &n.tok else {
                return Err(Self::error_at(&n, "expected namespace IRI"));
            };
            Iri::new(ns.as_str()).map_err(|e| Self::error_at(&n, e.to_string()))?;
            self.prefixes.insert(prefix.clone(), ns.clone());
            if turtle_style {
                self.expect_punct(".")?;
            }
        }
    }

    /// Resolves an IRI or prefixed-name token.
    pub fn iri(&self, t: &Token) -> Option<Result<Iri, SyntaxError>> {
        match &t.tok {
            Tok::Iri(i) => Some(Iri::new(i.as_str()).map_err(|e| Self::error_at(t, e.to_string()))),
            Tok::PName(p, l) => Some(match self.prefixes.get(p) {
                None => Err(Self::error_at(t, format!("unknown prefix '{p}:'"))),
                Some(ns) => Iri::new(format!("{ns}{l}")).map_err(|e| Self::error_at(t, e.to_string())),
            }),
            _ => None,
        }
    }

    /// Parses a literal starting at token `t` (already consumed), including
    /// any language tag or datatype suffix.
    pub fn literal(&mut self, t: &Token) -> Option<Result<Term, SyntaxError>> {
        match &t.tok {
            Tok::Str(s) => Some(self.literal_tail(s.clone())),
            Tok::Number(n) => Some(
                Term::typed(n.as_str(), xsd_for_number_lexical(n))
                    .map_err(|e| Self::error_at(t, e.to_string())),
            ),
            Tok::Word(w) if w == "true" || w == "false" => {
                Some(Ok(Term::typed(w.as_str(), XSD_BOOLEAN).expect("valid")))
            }
            _ => None,
        }
    }

    fn literal_tail(&mut self, lexical: String) -> Result<Term, SyntaxError> {
        match self.peek_tok() {
            Some(Tok::At(_)) => {
                let t = self.next()?;
                let Tok::At(tag) = &t.tok else { unreachable!() };
                Literal::lang(lexical, tag.as_str())
                    .map(Term::Literal)
                    .map_err(|e| Self::error_at(&t, e.to_string()))
            }
            Some(Tok::Caret2) => {
                self.pos += 1;
                let t = self.next()?;
                let dt = self
                    .iri(&t)
                    .ok_or_else(|| Self::error_at(&t, "expected datatype IRI after '^^'"))??;
                Ok(Term::Literal(Literal::typed(lexical, dt)))
            }
            _ => Ok(Term::string(lexical)),
        }
    }
}

pub(crate) fn describe(t: &Tok) -> String {
    match t {
        Tok::Iri(i) => format!("<{i}>"),
        Tok::PName(p, l) => format!("'{p}:{l}'"),
        Tok::Blank(b) => format!("'_:{b}'"),
        Tok::Str(s) => format!("string \"{s}\""),
        Tok::At(a) => format!("'@{a}'"),
        Tok::Caret2 => "'^^'".into(),
        Tok::Number(n) => format!("number {n}"),
        Tok::Var(v) => format!("variable ?{v}"),
        Tok::Word(w) => format!("'{w}'"),
        Tok::Punct(p) => format!("'{p}'"),
    }
}
