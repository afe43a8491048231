use std::collections::BTreeSet;

mod common;

use common::{catalog, taxonomy, templates};
use m3_core::generator::{materialize, verify_bundle};
use m3_core::knowledge::{resolve_ids, select_knowledge, EntryKind};
use m3_core::pipeline::{run, KnowledgeChoice, PipelineSpec};
use m3_core::rdf::Iri;
use m3_core::reasoner::{validate_ruleset_against_taxonomy, RuleSet};

#[test]
fn rule_sets_only_reference_known_taxonomy_terms() {
    let tax = taxonomy();
    for e in catalog().entries().filter(|e| e.kind == EntryKind::Ruleset) {
        let unknown = validate_ruleset_against_taxonomy(e.rules().unwrap(), &tax);
        assert!(unknown.is_empty(), "{}: {unknown:?}", e.id);
    }
}

#[test]
fn catalog_selection_follows_shared_namespaces() {
    let cat = catalog();
    let ids = |d: &str| -> Vec<String> {
        let domains: BTreeSet<Iri> = [Iri::new(format!("https://m3.example.org/m3-lite#{d}")).unwrap()].into();
        select_knowledge(&domains, &cat).iter().map(|e| e.id.clone()).collect()
    };
    assert_eq!(ids("Health"), ["health-ontology", "naturopathy-dataset"]);
    assert_eq!(ids("Weather"), ["season-food-dataset", "weather-ontology"]);
    // the smart home ontology reuses weather terms, so their definer comes along
    assert_eq!(ids("SmartHome"), ["smarthome-ontology", "weather-ontology"]);
}

#[test]
fn every_template_bundles_and_produces_results() {
    let tax = taxonomy();
    let cat = catalog();
    let all = templates(&cat, &tax);
    assert_eq!(all.len(), 8);
    for t in &all {
        let out = tempfile::tempdir().unwrap();
        let dir = out.path().join("bundle");
        let bundle = materialize(t, &cat, &tax, &dir).unwrap();
        let listed = verify_bundle(&dir).unwrap();
        assert_eq!(listed, bundle.files);

        let rules = RuleSet::union(
            t.rulesets.iter().map(|r| cat.get(r).unwrap().rules().unwrap().clone()),
        )
        .unwrap();
        let knowledge = resolve_ids(&t.knowledge, &cat).unwrap();
        let spec = PipelineSpec {
            taxonomy: &tax,
            readings: &t.sample_text,
            reading_format: "csv",
            rules: &rules,
            engine: "semi-naive",
            knowledge: KnowledgeChoice::Entries(&knowledge),
            query: &t.query,
            results_format: "csv",
        };
        let result = run(&spec).unwrap_or_else(|e| panic!("{}: {e}", t.id));
        assert!(!result.solutions.is_empty(), "{} produced no suggestions", t.id);
    }
}
