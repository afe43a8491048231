//! Rule file syntax:
//!
//! ```text
//! ruleset := prefix* rule*
//! rule    := '[' NAME ':' atom+ '->' pattern+ ']'
//! atom    := pattern | BUILTIN '(' arg (',' arg)* ')'
//! pattern := '(' term term term ')'
//! ```
//!
//! Bare `type` and `a` mean `rdf:type`; any other bare word is a term in
//! the M3 vocabulary namespace.

use std::collections::BTreeMap;

use crate::rdf::cursor::{Cursor, SyntaxError};
use crate::rdf::lex::Tok;
use crate::rdf::Term;
use crate::vocab::{self, RDF_TYPE};

use super::{Atom, Builtin, BuiltinArg, BuiltinOp, Rule, RuleError, RuleSet, RuleTerm, TriplePattern};

impl From<SyntaxError> for RuleError {
    fn from(e: SyntaxError) -> Self {
        RuleError::Syntax {
            line: e.line,
            column: e.column,
            message: e.message,
        }
    }
}

/// Prefixes available in every rule file without declaration.
pub fn default_rule_prefixes() -> BTreeMap<String, String> {
    vocab::standard_prefixes()
        .into_iter()
        .map(|(p, ns)| (p.to_string(), ns.to_string()))
        .collect()
}

pub fn parse_rules(text: &str) -> Result<RuleSet, RuleError> {
    let mut c = Cursor::new(text, default_rule_prefixes())?;
    c.prefix_block()?;
    let mut rules: Vec<Rule> = Vec::new();
    while !c.at_end() {
        let rule = rule(&mut c)?;
        if rules.iter().any(|r| r.name == rule.name) {
            return Err(RuleError::DuplicateName(rule.name));
        }
        rule.check_safety()?;
        rules.push(rule);
    }
    Ok(RuleSet {
        rules,
        prefixes: c.prefixes,
    })
}

fn rule(c: &mut Cursor) -> Result<Rule, RuleError> {
    c.expect_punct("[")?;
    let t = c.next()?;
    let name = match &t.tok {
        Tok::PName(name, local) if local.is_empty() && !name.is_empty() => name.clone(),
        Tok::Word(name) => {
            let colon = c.next()?;
            if !matches!(&colon.tok, Tok::PName(p, l) if p.is_empty() && l.is_empty()) {
                return Err(Cursor::error_at(&colon, "expected ':' after rule name").into());
            }
            name.clone()
        }
        _ => return Err(Cursor::error_at(&t, "expected rule name followed by ':'").into()),
    };
    let mut body = Vec::new();
    while !c.at_punct("->") {
        if c.at_end() || c.at_punct("]") {
            return Err(c.error_here(format!("rule '{name}' is missing '->'")).into());
        }
        body.push(atom(c)?);
        c.eat_punct(",");
    }
    if body.is_empty() {
        return Err(c.error_here(format!("rule '{name}' has an empty body")).into());
    }
    c.expect_punct("->")?;
    let mut head = Vec::new();
    while !c.at_punct("]") {
        if c.at_end() {
            return Err(c.eof_error().into());
        }
        match atom(c)? {
            Atom::Pattern(p) => head.push(p),
            Atom::Builtin(b) => {
                return Err(c
                    .error_here(format!("built-in {} is not allowed in a rule head", b.op.name()))
                    .into())
            }
        }
        c.eat_punct(",");
    }
    if head.is_empty() {
        return Err(c.error_here(format!("rule '{name}' has an empty head")).into());
    }
    c.expect_punct("]")?;
    Ok(Rule { name, body, head })
}

fn atom(c: &mut Cursor) -> Result<Atom, RuleError> {
    if c.eat_punct("(") {
        let subject = term(c)?;
        let predicate = term(c)?;
        let object = term(c)?;
        c.expect_punct(")")?;
        return Ok(Atom::Pattern(TriplePattern {
            subject,
            predicate,
            object,
        }));
    }
    let t = c.next()?;
    let Tok::Word(w) = &t.tok else {
        return Err(Cursor::error_at(
            &t,
            format!("expected '(' or a built-in, found {}", crate::rdf::cursor::describe(&t.tok)),
        )
        .into());
    };
    let op = BuiltinOp::from_name(w)
        .ok_or_else(|| Cursor::error_at(&t, format!("unknown built-in '{w}'")))?;
    c.expect_punct("(")?;
    let mut args = Vec::new();
    loop {
        args.push(builtin_arg(c)?);
        if !c.eat_punct(",") {
            break;
        }
    }
    c.expect_punct(")")?;
    if args.len() != op.arity() {
        return Err(Cursor::error_at(
            &t,
            format!("{w} takes {} arguments, found {}", op.arity(), args.len()),
        )
        .into());
    }
    if op == BuiltinOp::Interval {
        if let (BuiltinArg::Number(lo), BuiltinArg::Number(hi)) = (&args[1], &args[2]) {
            let (lo, hi) = (lo.numeric().expect("numeric"), hi.numeric().expect("numeric"));
            if lo.partial_cmp(&hi).is_none_or(|o| o.is_gt()) {
                return Err(Cursor::error_at(&t, "interval requires lo <= hi").into());
            }
        }
    }
    Ok(Atom::Builtin(Builtin { op, args }))
}

fn builtin_arg(c: &mut Cursor) -> Result<BuiltinArg, RuleError> {
    let t = c.next()?;
    match &t.tok {
        Tok::Var(v) => Ok(BuiltinArg::Var(v.clone())),
        Tok::Number(_) | Tok::Str(_) => {
            let lit = c.literal(&t).expect("literal token")?;
            if lit.numeric().is_none() {
                return Err(Cursor::error_at(&t, format!("built-in argument {lit} is not numeric")).into());
            }
            Ok(BuiltinArg::Number(lit))
        }
        other => Err(Cursor::error_at(
            &t,
            format!(
                "built-in arguments must be variables or numbers, found {}",
                crate::rdf::cursor::describe(other)
            ),
        )
        .into()),
    }
}

fn term(c: &mut Cursor) -> Result<RuleTerm, RuleError> {
    let t = c.next()?;
    if let Tok::Var(v) = &t.tok {
        return Ok(RuleTerm::Var(v.clone()));
    }
    if let Some(iri) = c.iri(&t) {
        return Ok(RuleTerm::Const(Term::Iri(iri?)));
    }
    if let Some(lit) = c.literal(&t) {
        return Ok(RuleTerm::Const(lit?));
    }
    match &t.tok {
        Tok::Word(w) if w == "a" || w == "type" => Ok(RuleTerm::Const(Term::iri(RDF_TYPE).expect("valid"))),
        Tok::Word(w) => Term::iri(vocab::m3(w))
            .map(RuleTerm::Const)
            .map_err(|e| Cursor::error_at(&t, e.to_string()).into()),
        Tok::Blank(_) => Err(Cursor::error_at(&t, "blank nodes are not allowed in rules").into()),
        other => Err(Cursor::error_at(
            &t,
            format!("expected a term, found {}", crate::rdf::cursor::describe(other)),
        )
        .into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FEVER: &str = "@prefix health: <https://m3.example.org/health#> .\n\
        [fever: (?o type m3x:BodyTemperature) (?o hasValue ?v) ge(?v, 38.0) -> (?o type health:Fever)]";

    #[test]
    fn parses_fever_rule() {
        let rs = parse_rules(FEVER).unwrap();
        assert_eq!(rs.len(), 1);
        let r = &rs.rules[0];
        assert_eq!(r.name, "fever");
        assert_eq!(r.body.len(), 3);
        assert_eq!(r.head.len(), 1);
        assert_eq!(
            r.to_string(),
            "[fever: (?o <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <https://m3.example.org/m3-lite#BodyTemperature>) \
             (?o <https://m3.example.org/vocab#hasValue> ?v) ge(?v, 38.0) -> \
             (?o <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <https://m3.example.org/health#Fever>)]"
        );
    }

    #[test]
    fn round_trips_through_display() {
        let rs = parse_rules(FEVER).unwrap();
        let again = parse_rules(&rs.rules[0].to_string()).unwrap();
        assert_eq!(rs.rules, again.rules);
    }

    #[test]
    fn empty_and_comment_only() {
        assert!(parse_rules("").unwrap().is_empty());
        assert!(parse_rules("# nothing here\n").unwrap().is_empty());
    }

    #[test]
    fn unsafe_rules() {
        let head = parse_rules("[r: (?a p ?b) -> (?a q ?x)]");
        assert_eq!(
            head,
            Err(RuleError::Unsafe {
                rule: "r".into(),
                variable: "x".into()
            })
        );
        let builtin = parse_rules("[r: ge(?v, 1) (?a p ?v) -> (?a q ?v)]");
        assert!(matches!(builtin, Err(RuleError::Unsafe { .. })));
    }

    #[test]
    fn syntax_errors() {
        for (text, line) in [
            ("[r: (?a p ?b) (?a q ?b)]", 1),
            ("\n[r: (?a p ?b) -> ge(?b, 1)]", 2),
            ("[r: (?a p) -> (?a p ?a)]", 1),
            ("[r: (?a p ?b) bogus(?b, 1) -> (?a p ?b)]", 1),
            ("[r: (?a p ?b) interval(?b, 5, 1) -> (?a p ?b)]", 1),
            ("[r: (?a p ?b) ge(?b, \"x\") -> (?a p ?b)]", 1),
            ("[r: (?a nope:x ?b) -> (?a p ?b)]", 1),
            ("[r: (?a p ?b) -> (?a p ?b)", 1),
        ] {
            match parse_rules(text) {
                Err(RuleError::Syntax { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
        assert_eq!(
            parse_rules("[r: (?a p ?b) -> (?a q ?b)]\n[r: (?a p ?b) -> (?a q ?b)]"),
            Err(RuleError::DuplicateName("r".into()))
        );
    }

    #[test]
    fn named_with_separate_colon_and_commas() {
        let rs = parse_rules("[hot : (?o a m3x:AirTemperature), (?o hasValue ?v), interval(?v, 30, 60) -> (?o a <https://m3.example.org/weather#Hot>)]").unwrap();
        assert_eq!(rs.rules[0].name, "hot");
    }
}
