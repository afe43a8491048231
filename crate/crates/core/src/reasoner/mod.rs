//! Forward-chaining rule engine.
//!
//! Rules are Horn clauses over triple patterns with numeric comparison
//! built-ins and no negation, so every rule set has a unique least fixpoint.
//! Two evaluators compute it: a plain naive iteration and a semi-naive one
//! that only joins against triples derived in the previous round.

mod eval;
mod parse;
mod validate;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::rdf::{Graph, Numeric, Term, Triple};
use crate::registry::{Named, Registry};

pub use eval::{NaiveEvaluator, SemiNaiveEvaluator};
pub use parse::{default_rule_prefixes, parse_rules};
pub use validate::{validate_ruleset_against_taxonomy, UnknownReference};

pub type Bindings = BTreeMap<String, Term>;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleTerm {
    Var(String),
    Const(Term),
}

impl RuleTerm {
    pub fn var(&self) -> Option<&str> {
        match self {
            RuleTerm::Var(v) => Some(v),
            RuleTerm::Const(_) => None,
        }
    }

    fn resolve<'a>(&'a self, b: &'a Bindings) -> Option<&'a Term> {
        match self {
            RuleTerm::Var(v) => b.get(v),
            RuleTerm::Const(t) => Some(t),
        }
    }
}

impl fmt::Display for RuleTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleTerm::Var(v) => write!(f, "?{v}"),
            RuleTerm::Const(t) => write!(f, "{t}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TriplePattern {
    pub subject: RuleTerm,
    pub predicate: RuleTerm,
    pub object: RuleTerm,
}

impl TriplePattern {
    pub fn vars(&self) -> impl Iterator<Item = &str> {
        [&self.subject, &self.predicate, &self.object]
            .into_iter()
            .filter_map(RuleTerm::var)
    }

    /// Ground instance under `b`, or `None` if a variable is unbound or the
    /// result is not a valid triple (e.g. a literal subject).
    pub fn instantiate(&self, b: &Bindings) -> Option<Triple> {
        Triple::new(
            self.subject.resolve(b)?.clone(),
            self.predicate.resolve(b)?.clone(),
            self.object.resolve(b)?.clone(),
        )
        .ok()
    }
}

impl fmt::Display for TriplePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {} {})", self.subject, self.predicate, self.object)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BuiltinOp {
    GreaterThan,
    LessThan,
    Ge,
    Le,
    Equal,
    NotEqual,
    /// `interval(?v, lo, hi)` holds when `lo <= v < hi`.
    Interval,
}

impl BuiltinOp {
    pub const ALL: [BuiltinOp; 7] = [
        BuiltinOp::GreaterThan,
        BuiltinOp::LessThan,
        BuiltinOp::Ge,
        BuiltinOp::Le,
        BuiltinOp::Equal,
        BuiltinOp::NotEqual,
        BuiltinOp::Interval,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BuiltinOp::GreaterThan => "greaterThan",
            BuiltinOp::LessThan => "lessThan",
            BuiltinOp::Ge => "ge",
            BuiltinOp::Le => "le",
            BuiltinOp::Equal => "equal",
            BuiltinOp::NotEqual => "notEqual",
            BuiltinOp::Interval => "interval",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            BuiltinOp::Interval => 3,
            _ => 2,
        }
    }

    pub fn from_name(name: &str) -> Option<BuiltinOp> {
        Self::ALL.into_iter().find(|op| op.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BuiltinArg {
    Var(String),
    Number(Term),
}

impl BuiltinArg {
    fn value(&self, b: &Bindings) -> Result<Numeric, String> {
        let term = match self {
            BuiltinArg::Var(v) => b.get(v).ok_or_else(|| format!("?{v} is unbound"))?,
            BuiltinArg::Number(t) => t,
        };
        term.numeric()
            .ok_or_else(|| format!("{term} is not a numeric literal"))
    }
}

impl fmt::Display for BuiltinArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuiltinArg::Var(v) => write!(f, "?{v}"),
            BuiltinArg::Number(t) => match t.as_literal() {
                Some(l) => f.write_str(l.lexical()),
                None => write!(f, "{t}"),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Builtin {
    pub op: BuiltinOp,
    pub args: Vec<BuiltinArg>,
}

impl Builtin {
    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.args.iter().filter_map(|a| match a {
            BuiltinArg::Var(v) => Some(v.as_str()),
            BuiltinArg::Number(_) => None,
        })
    }

    /// `Err` carries a type error message when an argument is not numeric.
    pub fn holds(&self, b: &Bindings) -> Result<bool, String> {
        let vals = self
            .args
            .iter()
            .map(|a| a.value(b))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| format!("{}: {e}", self.op.name()))?;
        use std::cmp::Ordering::*;
        let cmp = |a: Numeric, b: Numeric| a.partial_cmp(&b);
        Ok(match self.op {
            BuiltinOp::GreaterThan => cmp(vals[0], vals[1]) == Some(Greater),
            BuiltinOp::LessThan => cmp(vals[0], vals[1]) == Some(Less),
            BuiltinOp::Ge => matches!(cmp(vals[0], vals[1]), Some(Greater | Equal)),
            BuiltinOp::Le => matches!(cmp(vals[0], vals[1]), Some(Less | Equal)),
            BuiltinOp::Equal => cmp(vals[0], vals[1]) == Some(Equal),
            BuiltinOp::NotEqual => matches!(cmp(vals[0], vals[1]), Some(Less | Greater)),
            BuiltinOp::Interval => {
                matches!(cmp(vals[1], vals[0]), Some(Less | Equal))
                    && cmp(vals[0], vals[2]) == Some(Less)
            }
        })
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let args: Vec<String> = self.args.iter().map(ToString::to_string).collect();
        write!(f, "{}({})", self.op.name(), args.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Atom {
    Pattern(TriplePattern),
    Builtin(Builtin),
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Pattern(p) => p.fmt(f),
            Atom::Builtin(b) => b.fmt(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub name: String,
    pub body: Vec<Atom>,
    pub head: Vec<TriplePattern>,
}

impl Rule {
    pub fn patterns(&self) -> impl Iterator<Item = &TriplePattern> {
        self.body.iter().filter_map(|a| match a {
            Atom::Pattern(p) => Some(p),
            Atom::Builtin(_) => None,
        })
    }

    /// Checks range restriction and built-in safety.
    pub fn check_safety(&self) -> Result<(), RuleError> {
        let mut bound = std::collections::BTreeSet::new();
        for atom in &self.body {
            match atom {
                Atom::Pattern(p) => bound.extend(p.vars()),
                Atom::Builtin(b) => {
                    if let Some(v) = b.vars().find(|v| !bound.contains(v)) {
                        return Err(RuleError::Unsafe {
                            rule: self.name.clone(),
                            variable: v.to_string(),
                        });
                    }
                }
            }
        }
        for p in &self.head {
            if let Some(v) = p.vars().find(|v| !bound.contains(v)) {
                return Err(RuleError::Unsafe {
                    rule: self.name.clone(),
                    variable: v.to_string(),
                });
            }
        }
        Ok(())
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}:", self.name)?;
        for a in &self.body {
            write!(f, " {a}")?;
        }
        f.write_str(" ->")?;
        for h in &self.head {
            write!(f, " {h}")?;
        }
        f.write_str("]")
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RuleSet {
    pub rules: Vec<Rule>,
    /// Prefixes declared by the rule file, used when serializing results.
    pub prefixes: BTreeMap<String, String>,
}

impl RuleSet {
    pub fn new(rules: Vec<Rule>) -> Result<Self, RuleError> {
        let mut seen = std::collections::BTreeSet::new();
        for r in &rules {
            if !seen.insert(r.name.as_str()) {
                return Err(RuleError::DuplicateName(r.name.clone()));
            }
            r.check_safety()?;
        }
        Ok(RuleSet {
            rules,
            prefixes: BTreeMap::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.name == name)
    }

    /// Concatenates rule sets, rejecting duplicate names across them.
    pub fn union(sets: impl IntoIterator<Item = RuleSet>) -> Result<RuleSet, RuleError> {
        let mut rules = Vec::new();
        let mut prefixes = BTreeMap::new();
        for s in sets {
            rules.extend(s.rules);
            for (p, ns) in s.prefixes {
                prefixes.entry(p).or_insert(ns);
            }
        }
        let mut out = RuleSet::new(rules)?;
        out.prefixes = prefixes;
        Ok(out)
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum RuleError {
    #[error("rule syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsafe rule '{rule}': variable ?{variable} is not bound by an earlier triple pattern")]
    Unsafe { rule: String, variable: String },
    #[error("duplicate rule name '{0}'")]
    DuplicateName(String),
}

/// A built-in applied to a non-numeric binding. Reported once per rule.
#[derive(Debug, Clone, Error, PartialEq, Eq, PartialOrd, Ord)]
#[error("rule '{rule}': {message}")]
pub struct BuiltinTypeError {
    pub rule: String,
    pub message: String,
}

/// One distinct way a rule body was satisfied in the fixpoint.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Derivation {
    pub rule: String,
    pub bindings: Bindings,
    /// Head instances under `bindings` that are valid triples.
    pub triples: Vec<Triple>,
}

impl Derivation {
    /// `{"rule":..,"bindings":{..},"triples":[..]}` with terms in N-Triples
    /// syntax.
    pub fn to_json(&self) -> serde_json::Value {
        let bindings: serde_json::Map<String, serde_json::Value> = self
            .bindings
            .iter()
            .map(|(k, v)| (k.clone(), serde_json::Value::String(v.to_string())))
            .collect();
        serde_json::json!({
            "rule": self.rule,
            "bindings": bindings,
            "triples": self.triples.iter().map(|t| {
                let s = t.to_string();
                s.strip_suffix(" .").map(str::to_string).unwrap_or(s)
            }).collect::<Vec<_>>(),
        })
    }
}

#[derive(Debug, Clone)]
pub struct Reasoning {
    /// Input triples plus everything derived.
    pub graph: Graph,
    /// Sorted by rule name, then bindings.
    pub log: Vec<Derivation>,
    pub diagnostics: Vec<BuiltinTypeError>,
}

impl Reasoning {
    /// Triples in the fixpoint that were not in the input.
    pub fn derived_count(&self, input: &Graph) -> usize {
        self.graph.len() - input.len()
    }

    pub fn log_jsonl(&self) -> String {
        self.log
            .iter()
            .map(|d| d.to_json().to_string() + "\n")
            .collect()
    }
}

pub trait Evaluator: Named + Send + Sync {
    fn evaluate(&self, graph: &Graph, rules: &RuleSet) -> Reasoning;
}

pub const DEFAULT_EVALUATOR: &str = "semi-naive";

/// Registry holding `naive` and `semi-naive`.
pub fn evaluators() -> Registry<dyn Evaluator> {
    let mut reg: Registry<dyn Evaluator> = Registry::new();
    reg.register(Box::new(NaiveEvaluator))
        .register(Box::new(SemiNaiveEvaluator));
    reg
}

/// Least fixpoint of `graph` under `rules`, computed semi-naively. The
/// input graph is not modified.
pub fn apply_rules(graph: &Graph, rules: &RuleSet) -> Reasoning {
    SemiNaiveEvaluator.evaluate(graph, rules)
}
