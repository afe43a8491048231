use std::collections::BTreeSet;

use crate::rdf::Term;
use crate::taxonomy::Taxonomy;
use crate::vocab::{self, M3, M3X, UNIT};

use super::{Atom, RuleSet, RuleTerm};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct UnknownReference {
    pub rule: String,
    pub iri: String,
}

fn governed(iri: &str) -> bool {
    [M3, M3X, UNIT].iter().any(|ns| iri.starts_with(ns))
}

/// Lists IRIs in the taxonomy-governed namespaces (`m3:`, `m3x:`, `unit:`)
/// that neither name a taxonomy entry nor belong to the shape vocabulary.
/// IRIs in other namespaces belong to domain knowledge and are not checked.
pub fn validate_ruleset_against_taxonomy(rules: &RuleSet, tax: &Taxonomy) -> Vec<UnknownReference> {
    let mut out = BTreeSet::new();
    for rule in &rules.rules {
        let patterns = rule
            .body
            .iter()
            .filter_map(|a| match a {
                Atom::Pattern(p) => Some(p),
                Atom::Builtin(_) => None,
            })
            .chain(&rule.head);
        for p in patterns {
            for t in [&p.subject, &p.predicate, &p.object] {
                let RuleTerm::Const(Term::Iri(iri)) = t else {
                    continue;
                };
                let iri = iri.as_str();
                if governed(iri) && !tax.contains(iri) && !vocab::is_m3_term(iri) {
                    out.insert(UnknownReference {
                        rule: rule.name.clone(),
                        iri: iri.to_string(),
                    });
                }
            }
        }
    }
    out.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::parse_turtle;
    use crate::reasoner::parse_rules;
    use crate::taxonomy::load_taxonomy;

    #[test]
    fn reports_unknown_governed_terms() {
        let tax = load_taxonomy(
            &parse_turtle(
                "@prefix m3: <https://m3.example.org/vocab#> .\n\
                 @prefix m3x: <https://m3.example.org/m3-lite#> .\n\
                 @prefix skos: <http://www.w3.org/2004/02/skos/core#> .\n\
                 m3x:BodyTemperature a m3:MeasurementType ; skos:prefLabel \"body temperature\" .",
            )
            .unwrap(),
        )
        .unwrap();
        let rules = parse_rules(
            "@prefix health: <https://m3.example.org/health#> .\n\
             [ok: (?o type m3x:BodyTemperature) (?o hasValue ?v) -> (?o type health:Fever)]\n\
             [bad: (?o type m3x:Bogus) (?o hasBogus ?v) -> (?o type health:Fever)]",
        )
        .unwrap();
        let report = validate_ruleset_against_taxonomy(&rules, &tax);
        let iris: Vec<&str> = report.iter().map(|r| r.iri.as_str()).collect();
        assert_eq!(
            iris,
            vec!["https://m3.example.org/m3-lite#Bogus", "https://m3.example.org/vocab#hasBogus"]
        );
        assert!(report.iter().all(|r| r.rule == "bad"));
        assert!(validate_ruleset_against_taxonomy(&RuleSet::default(), &tax).is_empty());
    }
}
