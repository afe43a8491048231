//! SPARQL subset: `SELECT [DISTINCT] (vars | *) WHERE { BGP + FILTER }`
//! with optional `ORDER BY` on one variable and `LIMIT`. Anything else is
//! rejected with [`QueryError::UnsupportedFeature`].

mod exec;
mod parse;
mod results;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::rdf::Term;

pub use exec::execute;
pub use parse::parse_query;
pub use results::{results_formats, CsvResults, JsonResults, ResultsFormat};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum QueryTerm {
    Var(String),
    Const(Term),
}

impl QueryTerm {
    pub fn var(&self) -> Option<&str> {
        match self {
            QueryTerm::Var(v) => Some(v),
            QueryTerm::Const(_) => None,
        }
    }
}

impl fmt::Display for QueryTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QueryTerm::Var(v) => write!(f, "?{v}"),
            QueryTerm::Const(t) => write!(f, "{t}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QueryPattern {
    pub subject: QueryTerm,
    pub predicate: QueryTerm,
    pub object: QueryTerm,
}

impl QueryPattern {
    pub fn terms(&self) -> [&QueryTerm; 3] {
        [&self.subject, &self.predicate, &self.object]
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.terms().into_iter().filter_map(QueryTerm::var)
    }
}

impl fmt::Display for QueryPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Cmp(CmpOp, QueryTerm, QueryTerm),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn vars(&self) -> Vec<&str> {
        match self {
            Expr::Cmp(_, a, b) => a.var().into_iter().chain(b.var()).collect(),
            Expr::And(a, b) | Expr::Or(a, b) => {
                let mut v = a.vars();
                v.extend(b.vars());
                v
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Cmp(op, a, b) => write!(f, "{a} {} {b}", op.symbol()),
            Expr::And(a, b) => write!(f, "({a} && {b})"),
            Expr::Or(a, b) => write!(f, "({a} || {b})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Selection {
    All,
    Vars(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderBy {
    pub var: String,
    pub descending: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    pub prefixes: BTreeMap<String, String>,
    pub selection: Selection,
    pub distinct: bool,
    pub patterns: Vec<QueryPattern>,
    pub filters: Vec<Expr>,
    pub order_by: Option<OrderBy>,
    pub limit: Option<usize>,
}

impl Query {
    /// Variables in order of first occurrence in the WHERE patterns.
    pub fn pattern_vars(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for v in self.patterns.iter().flat_map(QueryPattern::vars) {
            if !out.iter().any(|o| o == v) {
                out.push(v.to_string());
            }
        }
        out
    }

    /// Result columns.
    pub fn projection(&self) -> Vec<String> {
        match &self.selection {
            Selection::All => self.pattern_vars(),
            Selection::Vars(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum QueryError {
    #[error("query syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported query feature: {0}")]
    UnsupportedFeature(String),
    #[error("variable ?{0} does not occur in any triple pattern")]
    UnknownVariable(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionSet {
    pub vars: Vec<String>,
    /// Every row binds every variable, in `vars` order.
    pub rows: Vec<Vec<Term>>,
    /// Solutions dropped because a filter raised a type error.
    pub filter_errors: usize,
}

impl SolutionSet {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, var: &str) -> Option<Vec<&Term>> {
        let i = self.vars.iter().position(|v| v == var)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }
}
