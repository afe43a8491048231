#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::Command;

use m3_core::query::{parse_query, results_formats, SolutionSet};
use m3_core::rdf::{parse_turtle, Term};
use m3_core::reasoner::{parse_rules, RuleSet};
use m3_testkit::{closure_oracle, query_oracle};

pub const FIXTURES: [&str; 2] = ["path-a", "path-b"];
pub const ARTIFACTS: [&str; 5] = ["annotated.ttl", "enriched.ttl", "derivations.jsonl", "merged.ttl", "results.csv"];
pub const RULES: [&str; 2] = ["health.rules", "weather.rules"];

pub fn data() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn fixture(name: &str) -> PathBuf {
    data().join("fixtures").join(name)
}

pub fn rule_file(name: &str) -> PathBuf {
    data().join("knowledge/rules").join(name)
}

#[derive(Debug)]
pub struct Out {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the binary with a clean `M3_*` environment plus `env`.
pub fn m3_in(cwd: &Path, args: &[&str], env: &[(&str, &Path)]) -> Out {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_m3"));
    cmd.current_dir(cwd).args(args);
    for var in ["M3_TAXONOMY", "M3_KNOWLEDGE_MANIFEST", "M3_TEMPLATES", "RUST_LOG"] {
        cmd.env_remove(var);
    }
    for (k, v) in env {
        cmd.env(k, v);
    }
    let o = cmd.output().expect("binary runs");
    Out {
        code: o.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&o.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&o.stderr).into_owned(),
    }
}

pub fn m3(args: &[&str]) -> Out {
    m3_in(&data(), args, &[])
}

pub fn s(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

/// Sources for the template commands.
pub fn template_env() -> Vec<(&'static str, PathBuf)> {
    vec![
        ("M3_TAXONOMY", data().join("taxonomy/m3-lite.ttl")),
        ("M3_KNOWLEDGE_MANIFEST", data().join("knowledge/catalog.toml")),
        ("M3_TEMPLATES", data().join("templates/catalog.ttl")),
    ]
}

pub fn with_template_env(cwd: &Path, args: &[&str]) -> Out {
    let env = template_env();
    let refs: Vec<(&str, &Path)> = env.iter().map(|(k, v)| (*k, v.as_path())).collect();
    m3_in(cwd, args, &refs)
}

/// `m3 run` over a fixture, writing into `out`.
pub fn run_fixture(name: &str, out: &Path) -> Out {
    let conf = fixture(name).join("pipeline.conf");
    m3(&["run", "--config", s(&conf), "--out-dir", s(out)])
}

/// The same pipeline as separate subcommands. Stops at the first failure.
pub fn stage_fixture(name: &str, out: &Path) -> Result<(), Out> {
    let d = data();
    let f = fixture(name);
    let o = |n: &str| out.join(n);
    std::fs::create_dir_all(out).expect("out dir");
    let (h, w) = (rule_file(RULES[0]), rule_file(RULES[1]));
    let steps: Vec<Vec<String>> = vec![
        vec!["annotate", "--taxonomy", s(&d.join("taxonomy/m3-lite.ttl")), "--in", s(&f.join("readings.csv")), "--format", "csv", "--out", s(&o("annotated.ttl"))],
        vec!["reason", "--in", s(&o("annotated.ttl")), "--rules", s(&h), "--rules", s(&w), "--engine", "semi-naive", "--out", s(&o("enriched.ttl")), "--log", s(&o("derivations.jsonl"))],
        vec!["knowledge", "merge", "--manifest", s(&d.join("knowledge/catalog.toml")), "--in", s(&o("enriched.ttl")), "--out", s(&o("merged.ttl"))],
        vec!["query", "--in", s(&o("merged.ttl")), "--query", s(&d.join("fixtures/suggestions.rq")), "--out", "csv", "--output", s(&o("results.csv"))],
    ]
    .into_iter()
    .map(|v| v.into_iter().map(String::from).collect())
    .collect();
    for step in &steps {
        let args: Vec<&str> = step.iter().map(String::as_str).collect();
        let r = m3(&args);
        if r.code != 0 {
            return Err(r);
        }
    }
    Ok(())
}

pub fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

/// Checks a fixture's artifacts in `dir` against the brute-force oracles:
/// the enriched graph and derivation log against the closure oracle, the
/// results against the query oracle over the merged graph.
pub fn check_against_oracles(dir: &Path) -> Result<(), String> {
    let parse = |name: &str| parse_turtle(&read(&dir.join(name))).map_err(|e| format!("{name}: {e}"));
    let annotated = parse("annotated.ttl")?;
    let enriched = parse("enriched.ttl")?;
    let merged = parse("merged.ttl")?;
    let rules = RuleSet::union(RULES.iter().map(|r| parse_rules(&read(&rule_file(r))).expect("shipped rules parse")))
        .expect("shipped rules combine");

    let oracle = closure_oracle(&annotated, &rules);
    if enriched.triple_set() != oracle.triples {
        return Err("enriched.ttl differs from the closure oracle".into());
    }
    if !enriched.triple_set().is_subset(&merged.triple_set()) {
        return Err("merged.ttl lost enriched triples".into());
    }
    let mut logged = BTreeSet::new();
    for line in read(&dir.join("derivations.jsonl")).lines() {
        let v: serde_json::Value = serde_json::from_str(line).map_err(|e| format!("derivations.jsonl: {e}"))?;
        let rule = v["rule"].as_str().ok_or("entry without rule")?.to_string();
        let bindings: Vec<(String, String)> = v["bindings"]
            .as_object()
            .ok_or("entry without bindings")?
            .iter()
            .map(|(k, t)| (k.clone(), t.as_str().unwrap_or_default().to_string()))
            .collect();
        logged.insert((rule, bindings));
    }
    let expected: BTreeSet<(String, Vec<(String, String)>)> = oracle
        .firings
        .iter()
        .map(|(r, a)| (r.clone(), a.iter().map(|(k, t): (&String, &Term)| (k.clone(), t.to_string())).collect()))
        .collect();
    if logged != expected {
        return Err(format!("derivation log {logged:?} differs from oracle firings {expected:?}"));
    }

    let query = parse_query(&read(&data().join("fixtures/suggestions.rq"))).expect("fixture query parses");
    let (vars, rows) = query_oracle(&query, &merged);
    let want = results_formats().get("csv").expect("csv registered").write(&SolutionSet {
        vars,
        rows,
        filter_errors: 0,
    });
    if read(&dir.join("results.csv")) != want {
        return Err("results.csv differs from the query oracle".into());
    }
    Ok(())
}

/// Byte comparison with the checked-in goldens. With `M3_BLESS` set the
/// goldens are rewritten instead.
pub fn check_goldens(name: &str, dir: &Path) -> Result<(), String> {
    let expected = fixture(name).join("expected");
    let bless = std::env::var_os("M3_BLESS").is_some();
    for a in ARTIFACTS {
        let got = read(&dir.join(a));
        let golden = expected.join(a);
        if bless {
            std::fs::create_dir_all(&expected).expect("expected dir");
            std::fs::write(&golden, &got).expect("bless golden");
        } else if std::fs::read_to_string(&golden).map_err(|e| format!("{}: {e}", golden.display()))? != got {
            return Err(format!("{name}/{a} differs from its golden"));
        }
    }
    Ok(())
}

/// Data rows of a CSV result, header excluded.
pub fn csv_rows(text: &str) -> Vec<Vec<String>> {
    let mut r = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    r.records().map(|rec| rec.expect("valid csv").iter().map(String::from).collect()).collect()
}
