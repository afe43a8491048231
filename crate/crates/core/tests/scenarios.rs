//! The two thermometer scenarios end to end, plus the temperature band
//! boundaries of the shipped rules.

mod common;

use common::{catalog, data, taxonomy, templates};
use m3_core::annotator::{annotate, parse_readings};
use m3_core::generator::{match_templates, unify_request};
use m3_core::knowledge::{resolve_ids, Catalog};
use m3_core::pipeline::{run, KnowledgeChoice, PipelineSpec};
use m3_core::query::parse_query;
use m3_core::rdf::{Graph, Iri, Term, Triple};
use m3_core::reasoner::{apply_rules, parse_rules, RuleSet};
use m3_core::taxonomy::{Kind, Taxonomy, UnificationContext};

const HEADER: &str = "sensor,value,unit,timestamp,domain,feature,source\n";
const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
const M3: &str = "https://m3.example.org/vocab#";

fn iri(s: &str) -> Term {
    Term::iri(s).unwrap()
}

fn m3x(local: &str) -> Term {
    iri(&format!("https://m3.example.org/m3-lite#{local}"))
}

fn rules(cat: &Catalog, ids: &[&str]) -> RuleSet {
    RuleSet::union(ids.iter().map(|id| cat.get(id).unwrap().rules().unwrap().clone())).unwrap()
}

fn annotated(line: &str, tax: &Taxonomy) -> Graph {
    annotate(&parse_readings(&format!("{HEADER}{line}\n"), "csv").unwrap(), tax).unwrap()
}

fn has_value() -> Term {
    iri(&format!("{M3}hasValue"))
}

/// Subject and value of the only `hasValue` triple.
fn only_value(g: &Graph) -> (Term, Term) {
    let hits: Vec<(Term, Term)> = g
        .match_pattern(None, Some(&has_value()), None)
        .map(|t| (t.subject.clone(), t.object.clone()))
        .collect();
    assert_eq!(hits.len(), 1, "expected one observation");
    hits[0].clone()
}

fn single_observation(g: &Graph) -> Term {
    only_value(g).0
}

fn types_of(g: &Graph, s: &Term) -> Vec<Term> {
    g.objects(s, &iri(RDF_TYPE)).into_iter().cloned().collect()
}

#[test]
fn csv_reading_parses_with_exact_value() {
    let r = parse_readings(&format!("{HEADER}thermometer,38.7,Cel,2016-09-01T10:00:00Z,health,body,dev1\n"), "csv").unwrap();
    assert_eq!(r.len(), 1);
    assert_eq!(r[0].value.to_string(), "38.7");
    assert_eq!(r[0].sensor_label, "thermometer");
    assert_eq!(r[0].domain_hint.as_deref(), Some("health"));
    assert_eq!(r[0].feature_hint.as_deref(), Some("body"));
    assert_eq!(r[0].timestamp_lexical(), "2016-09-01T10:00:00Z");
}

#[test]
fn same_value_gets_a_different_type_per_domain() {
    let tax = taxonomy();
    let a = annotated("thermometer,38.7,Cel,2016-09-01T10:00:00Z,health,body,dev1", &tax);
    let b = annotated("thermometer,38.7,Cel,2016-09-01T10:00:00Z,weather,,dev1", &tax);
    let (oa, ob) = (single_observation(&a), single_observation(&b));
    assert_eq!(types_of(&a, &oa), vec![m3x("BodyTemperature")]);
    assert_eq!(types_of(&b, &ob), vec![m3x("AirTemperature")]);
    let decimal = Term::typed("38.7", "http://www.w3.org/2001/XMLSchema#decimal").unwrap();
    assert_eq!(only_value(&a).1, decimal);
    assert_eq!(only_value(&b).1, decimal);
    assert!(a.contains_terms(&oa, &iri(&format!("{M3}hasUnit")), &iri("https://m3.example.org/unit#Cel")));

    // exactly one sensor node, typed with the domain-specific sensor type
    let sensors = a.subjects(&iri(RDF_TYPE), &m3x("BodyThermometer"));
    assert_eq!(sensors.len(), 1);
    assert!(a.contains_terms(&oa, &iri(&format!("{M3}observedBy")), sensors[0]));
}

#[test]
fn measurement_label_depends_on_context() {
    let tax = taxonomy();
    let body = UnificationContext::new(
        Some(Iri::new("https://m3.example.org/m3-lite#Health").unwrap()),
        Some(Iri::new("https://m3.example.org/m3-lite#Body").unwrap()),
    );
    let weather = UnificationContext::new(Some(Iri::new("https://m3.example.org/m3-lite#Weather").unwrap()), None);
    assert_eq!(Term::Iri(tax.unify("temperature", Kind::MeasurementType, &body).unwrap()), m3x("BodyTemperature"));
    assert_eq!(Term::Iri(tax.unify("temperature", Kind::MeasurementType, &weather).unwrap()), m3x("AirTemperature"));
    let rain = tax.unify("rainfall sensor", Kind::SensorType, &weather).unwrap();
    assert_eq!(rain, tax.unify("precipitation sensor", Kind::SensorType, &weather).unwrap());
}

#[test]
fn fever_and_hot_are_derived() {
    let tax = taxonomy();
    let cat = catalog();
    let both = rules(&cat, &["health-rules", "weather-rules"]);
    let a = annotated("thermometer,38.7,Cel,2016-09-01T10:00:00Z,health,body,dev1", &tax);
    let b = annotated("thermometer,38.7,Cel,2016-09-01T10:00:00Z,weather,,dev1", &tax);
    let ra = apply_rules(&a, &both);
    let rb = apply_rules(&b, &both);
    let fever = iri("https://m3.example.org/health#Fever");
    let hot = iri("https://m3.example.org/weather#Hot");
    let (oa, ob) = (single_observation(&a), single_observation(&b));
    assert!(ra.graph.contains_terms(&oa, &iri(RDF_TYPE), &fever));
    assert!(!ra.graph.contains_terms(&oa, &iri(RDF_TYPE), &hot));
    assert!(rb.graph.contains_terms(&ob, &iri(RDF_TYPE), &hot));
    assert!(!rb.graph.contains_terms(&ob, &iri(RDF_TYPE), &fever));
    assert!(rb.log.iter().any(|d| d.rule == "hot-day"));
    assert!(ra.log.iter().any(|d| d.rule == "fever"));
}

#[test]
fn single_rule_and_two_pattern_query_parse() {
    let r = parse_rules(
        "@prefix health: <https://m3.example.org/health#> .\n\
         [fever: (?o type m3x:BodyTemperature) (?o hasValue ?v) ge(?v, 38.0) -> (?o type health:Fever)]",
    )
    .unwrap();
    assert_eq!(r.len(), 1);
    let q = parse_query(
        "PREFIX health: <https://m3.example.org/health#>\n\
         PREFIX nat: <https://m3.example.org/naturopathy#>\n\
         SELECT ?r WHERE { ?o a health:Fever . ?r nat:treatsSymptom health:Fever . }",
    )
    .unwrap();
    assert_eq!(q.patterns.len(), 2);
}

/// Conditions derived for one reading under all shipped temperature rules.
fn conditions(value: &str, unit: &str, domain: &str, feature: &str) -> Vec<String> {
    let tax = taxonomy();
    let cat = catalog();
    let all = rules(&cat, &["health-rules", "weather-rules", "home-rules", "food-safety-rules"]);
    let g = annotated(&format!("thermometer,{value},{unit},2016-09-01T10:00:00Z,{domain},{feature},dev1"), &tax);
    let obs = single_observation(&g);
    let r = apply_rules(&g, &all);
    let mut out: Vec<String> = types_of(&r.graph, &obs)
        .into_iter()
        .filter(|t| !types_of(&g, &obs).contains(t))
        .map(|t| t.as_iri().unwrap().as_str().rsplit(['#', '/']).next().unwrap().to_string())
        .collect();
    out.sort();
    out
}

#[test]
fn body_temperature_bands_meet_exactly_at_their_limits() {
    let c = |v: &str, u: &str| conditions(v, u, "health", "body");
    assert_eq!(c("38.0", "Cel"), ["Fever"]);
    assert_eq!(c("38", "Cel"), ["Fever"]);
    assert_eq!(c("38.00", "Cel"), ["Fever"]);
    assert_eq!(c("37.99", "Cel"), ["NormalTemperature"]);
    assert_eq!(c("35.0", "Cel"), ["NormalTemperature"]);
    assert_eq!(c("34.99", "Cel"), ["Hypothermia"]);
    // (100.4 - 32) * 5 / 9 is exactly 38 in decimal arithmetic
    assert_eq!(c("100.4", "F"), ["Fever"]);
    assert_eq!(c("100.38", "°F"), ["NormalTemperature"]);
}

#[test]
fn air_temperature_bands_meet_exactly_at_their_limits() {
    let c = |v: &str| conditions(v, "celsius", "weather", "");
    assert_eq!(c("30"), ["Hot"]);
    assert_eq!(c("29.99"), ["Mild"]);
    assert_eq!(c("10"), ["Mild"]);
    assert_eq!(c("9.9"), ["Cold"]);
}

#[test]
fn thermometer_requests_pick_the_domain_template() {
    let tax = taxonomy();
    let cat = catalog();
    let all = templates(&cat, &tax);
    let ids = |domain: &str| -> Vec<String> {
        let (s, d) = unify_request(&["thermometer".into()], &[domain.into()], &tax).unwrap();
        match_templates(&s, &d, &all)
            .iter()
            .map(|m| m.template.id.as_str().rsplit('#').next().unwrap().to_string())
            .collect()
    };
    let health = ids("health");
    assert!(health.contains(&"HomeRemedies".to_string()), "{health:?}");
    let weather = ids("weather");
    assert!(weather.contains(&"SeasonFood".to_string()), "{weather:?}");
    assert!(!weather.contains(&"HomeRemedies".to_string()));
}

#[test]
fn fixture_pipelines_suggest_domain_specific_items() {
    let tax = taxonomy();
    let cat = catalog();
    let both = rules(&cat, &["health-rules", "weather-rules"]);
    let query = parse_query(&std::fs::read_to_string(data().join("fixtures/suggestions.rq")).unwrap()).unwrap();
    let mut results = Vec::new();
    for path in ["path-a", "path-b"] {
        let readings = std::fs::read_to_string(data().join("fixtures").join(path).join("readings.csv")).unwrap();
        let spec = PipelineSpec {
            taxonomy: &tax,
            readings: &readings,
            reading_format: "csv",
            rules: &both,
            engine: "semi-naive",
            knowledge: KnowledgeChoice::ObservedDomains(&cat),
            query: &query,
            results_format: "csv",
        };
        let out = run(&spec).unwrap();
        let conditions: Vec<String> = out.solutions.column("condition").unwrap().iter().map(|t| t.to_string()).collect();
        results.push(conditions);
    }
    assert!(!results[0].is_empty() && results[0].iter().all(|c| c.contains("health#Fever")));
    assert!(!results[1].is_empty() && results[1].iter().all(|c| c.contains("weather#Hot")));
    let explicit = resolve_ids(&["health-ontology".into()], &cat).unwrap();
    assert_eq!(explicit.len(), 1);
}

#[test]
fn annotation_is_deterministic() {
    let tax = taxonomy();
    let line = "thermometer,38.7,Cel,2016-09-01T10:00:00Z,health,body,dev1";
    assert_eq!(annotated(line, &tax), annotated(line, &tax));
    let t = Triple::new(iri("http://example.org/a"), iri(RDF_TYPE), m3x("Health")).unwrap();
    assert!(!annotated(line, &tax).contains(&t));
}
