//! Acceptance run: one PASS or FAIL line per criterion, non-zero exit if
//! any fails. Property criteria use a fixed RNG seed so verdicts are
//! reproducible; the property suites in the core crate explore fresh seeds.

mod common;

use std::cell::Cell;
use std::path::Path;
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

use common::*;
use m3_core::generator::{load_template_catalog, verify_bundle};
use m3_core::knowledge::{load_catalog, Catalog};
use m3_core::rdf::{parse_turtle, Graph, Term};
use m3_core::taxonomy::{load_taxonomy, Kind, Taxonomy, UnificationContext};
use m3_testkit::{self as tk, checks, vocab};

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
const INSTANCES: u32 = 256;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, format!("took {elapsed:.2?}, limit {limit:?}"))
}

fn graph_at(p: &Path) -> Result<Graph, String> {
    parse_turtle(&read(p)).map_err(|e| format!("{}: {e}", p.display()))
}

fn iri(s: &str) -> Term {
    Term::iri(s).expect("valid IRI")
}

/// Subjects typed `ty` in `g`.
fn typed(g: &Graph, ty: &str) -> Vec<Term> {
    g.subjects(&iri(RDF_TYPE), &iri(ty)).into_iter().cloned().collect()
}

/// All rdf:type objects of observations (subjects with a value).
fn observation_types(g: &Graph) -> Vec<String> {
    let has_value = iri("https://m3.example.org/vocab#hasValue");
    let mut out: Vec<String> = g
        .match_pattern(None, Some(&has_value), None)
        .flat_map(|t| g.objects(t.subject, &iri(RDF_TYPE)).into_iter().map(|o| o.to_string()).collect::<Vec<_>>())
        .collect();
    out.sort();
    out
}

/// Every suggestion (second column) is described by the named dataset.
fn from_dataset(rows: &[Vec<String>], dataset: &str) -> Result<(), String> {
    let g = graph_at(&data().join("knowledge").join(dataset))?;
    let subjects: Vec<String> = g.sorted_triples().iter().map(|t| t.subject().to_string()).collect();
    match rows.iter().find(|r| !subjects.contains(&r[1])) {
        Some(r) => Err(format!("{} is not in {dataset}", r[1])),
        None => Ok(()),
    }
}

/// Runs a fixture and checks it against oracles and goldens; returns the
/// output directory and the run time.
fn fixture_run(name: &str) -> Result<(tempfile::TempDir, Duration), String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let start = Instant::now();
    let out = run_fixture(name, dir.path());
    let elapsed = start.elapsed();
    ensure(out.code == 0, format!("exit {}: {}", out.code, out.stderr))?;
    check_against_oracles(dir.path())?;
    check_goldens(name, dir.path())?;
    Ok((dir, elapsed))
}

fn path_a() -> Verdict {
    let (dir, elapsed) = fixture_run("path-a")?;
    within(elapsed, Duration::from_secs(1))?;
    let annotated = graph_at(&dir.path().join("annotated.ttl"))?;
    ensure(!typed(&annotated, "https://m3.example.org/m3-lite#BodyTemperature").is_empty(), "no BodyTemperature observation")?;
    let enriched = graph_at(&dir.path().join("enriched.ttl"))?;
    ensure(!typed(&enriched, "https://m3.example.org/health#Fever").is_empty(), "no Fever derivation")?;
    let rows = csv_rows(&read(&dir.path().join("results.csv")));
    ensure(!rows.is_empty(), "no remedy rows")?;
    from_dataset(&rows, "naturopathy-dataset.ttl")?;
    Ok(format!("{} remedy rows, matches goldens and oracles, {elapsed:.0?}", rows.len()))
}

fn path_b() -> Verdict {
    let (b, elapsed) = fixture_run("path-b")?;
    within(elapsed, Duration::from_secs(1))?;
    let (a, _) = fixture_run("path-a")?;
    let enriched_b = graph_at(&b.path().join("enriched.ttl"))?;
    ensure(!typed(&enriched_b, "https://m3.example.org/weather#Hot").is_empty(), "no Hot derivation")?;
    let rows = csv_rows(&read(&b.path().join("results.csv")));
    ensure(!rows.is_empty(), "no season food rows")?;
    from_dataset(&rows, "season-food-dataset.ttl")?;
    let enriched_a = graph_at(&a.path().join("enriched.ttl"))?;
    let (ta, tb) = (observation_types(&enriched_a), observation_types(&enriched_b));
    ensure(ta != tb && ta.iter().all(|t| !tb.contains(t)), format!("types overlap: {ta:?} vs {tb:?}"))?;
    let (da, db) = (read(&a.path().join("derivations.jsonl")), read(&b.path().join("derivations.jsonl")));
    ensure(da != db, "identical derivations for both domains")?;
    Ok(format!("{} season food rows, disjoint observation types, {elapsed:.0?}", rows.len()))
}

fn boundary() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let conf = fixture("path-a").join("pipeline.conf");
    let fever = |value: &str| -> Result<bool, String> {
        let input = dir.path().join(format!("{value}.csv"));
        std::fs::write(
            &input,
            format!("sensor,value,unit,timestamp,domain,feature,source\nthermometer,{value},Cel,2026-01-15T08:00:00Z,health,body,wrist-01\n"),
        )
        .map_err(|e| e.to_string())?;
        let out_dir = dir.path().join(value);
        let out = m3(&["run", "--config", s(&conf), "--in", s(&input), "--out-dir", s(&out_dir)]);
        ensure(out.code == 0, out.stderr)?;
        Ok(!typed(&graph_at(&out_dir.join("enriched.ttl"))?, "https://m3.example.org/health#Fever").is_empty())
    };
    ensure(fever("38.0")?, "38.0 did not derive Fever")?;
    ensure(!fever("37.99")?, "37.99 derived Fever")?;
    Ok("38.0 is Fever, 37.99 is not".into())
}

fn runner() -> TestRunner {
    TestRunner::new_with_rng(
        Config {
            cases: INSTANCES,
            failure_persistence: None,
            ..Config::default()
        },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

/// Runs `check` over generated instances; returns how many ran.
fn fuzz<S: Strategy>(strategy: S, check: impl Fn(S::Value) -> Result<(), String>) -> Result<u32, String> {
    let count = Cell::new(0u32);
    runner()
        .run(&strategy, |v| {
            count.set(count.get() + 1);
            check(v).map_err(TestCaseError::fail)
        })
        .map_err(|e| e.to_string())?;
    let n = count.get();
    ensure(n >= 200, format!("only {n} instances ran"))?;
    Ok(n)
}

fn reasoner_properties() -> Verdict {
    let start = Instant::now();
    let n = fuzz(
        (tk::ground_graph(50), tk::ground_graph(10), tk::ruleset(10), any::<u64>()),
        |(g, extra, rules, seed)| checks::reasoner_case(&g, &extra, &rules, seed),
    )?;
    within(start.elapsed(), Duration::from_secs(30))?;
    Ok(format!("{n} instances, {:.1?}", start.elapsed()))
}

fn query_oracle() -> Verdict {
    let start = Instant::now();
    let nonempty = Cell::new(0u32);
    let n = fuzz((tk::dense_graph(40), tk::query(4)), |(g, q)| {
        checks::query_case(&q, &g)?;
        nonempty.set(nonempty.get() + u32::from(!m3_core::query::execute(&q, &g).is_empty()));
        Ok(())
    })?;
    within(start.elapsed(), Duration::from_secs(30))?;
    Ok(format!("{n} instances ({} with rows), {:.1?}", nonempty.get(), start.elapsed()))
}

fn round_trip() -> Verdict {
    let start = Instant::now();
    let n = fuzz(tk::graph(200), |g| checks::round_trip_case(&g))?;
    Ok(format!("{n} graphs, {:.1?}", start.elapsed()))
}

fn shipped() -> (Taxonomy, Catalog) {
    let tax = load_taxonomy(&parse_turtle(&read(&data().join("taxonomy/m3-lite.ttl"))).expect("taxonomy parses"))
        .expect("taxonomy loads");
    let cat = load_catalog(&data().join("knowledge/catalog.toml")).expect("catalog loads");
    (tax, cat)
}

fn synonym_closure() -> Verdict {
    let (tax, _) = shipped();
    let mut labels = 0;
    for e in tax.entries() {
        let ctx = UnificationContext::new(e.domains.first().cloned(), e.features.first().cloned());
        for l in e.labels.iter().chain(&e.synonyms) {
            let got = tax.unify(l, e.kind, &ctx).map_err(|err| format!("{l:?}: {err}"))?;
            ensure(got == e.canonical, format!("{l:?} gave {got}, expected {}", e.canonical))?;
            labels += 1;
        }
    }
    let variants = vocab::check_all_label_variants(&tax)?;
    let none = UnificationContext::default();
    let rain = tax.unify("rainfall sensor", Kind::SensorType, &none).map_err(|e| e.to_string())?;
    let precip = tax.unify("precipitation sensor", Kind::SensorType, &none).map_err(|e| e.to_string())?;
    ensure(rain == precip, format!("{rain} != {precip}"))?;
    Ok(format!("{labels} labels, {variants} variants agree with the oracle, rainfall = precipitation"))
}

fn matching() -> Verdict {
    let (tax, cat) = shipped();
    let dir = data().join("templates");
    let graph = graph_at(&dir.join("catalog.ttl"))?;
    let templates = load_template_catalog(&graph, &dir, &cat, &tax).map_err(|e| e.to_string())?;
    ensure(templates.len() == 8, format!("{} templates", templates.len()))?;
    let hits = vocab::check_matching_on_all_subsets(&templates)?;
    Ok(format!("8 templates, every subset agrees ({hits} with matches)"))
}

/// Commands of the runbook's code block.
fn runbook_commands(readme: &str) -> Vec<Vec<String>> {
    readme
        .lines()
        .skip_while(|l| !l.starts_with("```sh"))
        .skip(1)
        .take_while(|l| !l.starts_with("```"))
        .filter_map(|l| l.strip_prefix("m3 "))
        .map(|l| l.split_whitespace().map(String::from).collect())
        .collect()
}

fn bundles() -> Verdict {
    let start = Instant::now();
    let root = tempfile::tempdir().map_err(|e| e.to_string())?;
    let list = with_template_env(root.path(), &["templates", "list"]);
    ensure(list.code == 0, list.stderr)?;
    let ids: Vec<&str> = list.stdout.lines().filter_map(|l| l.split('\t').next()).collect();
    ensure(ids.len() == 8, format!("{} templates listed", ids.len()))?;
    for id in &ids {
        let dir = root.path().join(id.trim_matches(['<', '>']).rsplit('#').next().unwrap_or("bundle"));
        let gen = with_template_env(root.path(), &["templates", "gen", "--id", id, "--out", s(&dir)]);
        ensure(gen.code == 0, format!("{id}: {}", gen.stderr))?;
        verify_bundle(&dir).map_err(|p| format!("{id}: {}", p.join("; ")))?;
        let steps = runbook_commands(&read(&dir.join("README.md")));
        ensure(steps.len() == 4, format!("{id}: runbook has {} commands", steps.len()))?;
        std::fs::create_dir_all(dir.join("out")).map_err(|e| e.to_string())?;
        for step in &steps {
            // the bundle is run with no outside configuration
            let args: Vec<&str> = step.iter().map(String::as_str).collect();
            let out = m3_in(&dir, &args, &[]);
            ensure(out.code == 0, format!("{id}: m3 {}: {}", step.join(" "), out.stderr))?;
        }
        let rows = csv_rows(&read(&dir.join("out/results.csv")));
        ensure(!rows.is_empty(), format!("{id}: no results"))?;
    }
    within(start.elapsed(), Duration::from_secs(20))?;
    Ok(format!("{} bundles verified and run, {:.1?}", ids.len(), start.elapsed()))
}

fn composition() -> Verdict {
    for name in FIXTURES {
        let (a, b) = (
            tempfile::tempdir().map_err(|e| e.to_string())?,
            tempfile::tempdir().map_err(|e| e.to_string())?,
        );
        let out = run_fixture(name, a.path());
        ensure(out.code == 0, out.stderr)?;
        stage_fixture(name, b.path()).map_err(|o| format!("{name}: {}", o.stderr))?;
        for art in ARTIFACTS {
            ensure(
                std::fs::read(a.path().join(art)).ok() == std::fs::read(b.path().join(art)).ok(),
                format!("{name}/{art} differs"),
            )?;
        }
    }
    Ok(format!("{} artifacts identical on both fixtures", ARTIFACTS.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("healthcare path end to end", path_a),
        ("weather path end to end", path_b),
        ("fever threshold boundary", boundary),
        ("reasoner properties", reasoner_properties),
        ("query equals exhaustive enumeration", query_oracle),
        ("parser round trip", round_trip),
        ("taxonomy synonym closure", synonym_closure),
        ("template matching vs brute force", matching),
        ("bundle self-sufficiency", bundles),
        ("run equals stage composition", composition),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
