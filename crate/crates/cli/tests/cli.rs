//! Exit codes, partial output and setting precedence of the binary.

mod common;

use std::fs;

use common::*;

#[test]
fn help_succeeds_and_no_arguments_is_a_usage_error() {
    assert_eq!(m3(&["--help"]).code, 0);
    assert_eq!(m3(&["--version"]).code, 0);
    assert_eq!(m3(&[]).code, 64);
    assert_eq!(m3(&["annotate", "--bogus"]).code, 64);
}

#[test]
fn templates_list_shows_the_catalog() {
    let out = with_template_env(&data(), &["templates", "list"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(out.stdout.lines().count(), 8, "{}", out.stdout);
    assert!(out.stdout.contains("HomeRemedies"));
}

#[test]
fn templates_match_ranks_the_domain_template_first() {
    let out = with_template_env(&data(), &["templates", "match", "--sensors", "thermometer", "--domains", "health", "--json"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    let ids: Vec<&str> = v.as_array().unwrap().iter().map(|m| m["template"].as_str().unwrap()).collect();
    assert!(ids.iter().any(|i| i.ends_with("#HomeRemedies")), "{ids:?}");
    assert!(!ids.iter().any(|i| i.ends_with("#SeasonFood")), "{ids:?}");
}

#[test]
fn unknown_template_exits_with_the_template_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = with_template_env(dir.path(), &["templates", "gen", "--id", "NoSuchThing", "--out", "bundle"]);
    assert_eq!(out.code, 5, "{}", out.stderr);
    assert!(!dir.path().join("bundle").exists());
}

#[test]
fn listed_ids_are_accepted_by_gen() {
    let dir = tempfile::tempdir().unwrap();
    let list = with_template_env(dir.path(), &["templates", "list"]);
    let id = list.stdout.lines().next().unwrap().split('\t').next().unwrap().to_string();
    let out = with_template_env(dir.path(), &["templates", "gen", "--id", &id, "--out", "bundle"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(dir.path().join("bundle/manifest.json").exists());
}

#[test]
fn missing_rules_stop_after_annotation_with_a_marker() {
    let dir = tempfile::tempdir().unwrap();
    let conf = fixture("path-a").join("pipeline.conf");
    let missing = dir.path().join("absent.rules");
    let out_dir = dir.path().join("out");
    let out = m3(&["run", "--config", s(&conf), "--rules", s(&missing), "--out-dir", s(&out_dir)]);
    assert_eq!(out.code, 3, "{}", out.stderr);
    assert!(out_dir.join("annotated.ttl").exists());
    assert!(!out_dir.join("enriched.ttl").exists());
    let marker = read(&out_dir.join("PIPELINE_INCOMPLETE"));
    assert!(marker.starts_with("exit 3:"), "{marker}");

    // a later successful run clears the marker
    let ok = run_fixture("path-a", &out_dir);
    assert_eq!(ok.code, 0, "{}", ok.stderr);
    assert!(!out_dir.join("PIPELINE_INCOMPLETE").exists());
}

#[test]
fn unreadable_inputs_report_the_stage_that_needed_them() {
    let dir = tempfile::tempdir().unwrap();
    let conf = fixture("path-a").join("pipeline.conf");
    let absent = dir.path().join("absent");
    let cases: [(&str, i32); 4] = [("--in", 1), ("--taxonomy", 2), ("--query", 4), ("--manifest", 6)];
    for (flag, code) in cases {
        let out_dir = dir.path().join(flag.trim_start_matches('-'));
        let out = m3(&["run", "--config", s(&conf), flag, s(&absent), "--out-dir", s(&out_dir)]);
        assert_eq!(out.code, code, "{flag}: {}", out.stderr);
    }
}

#[test]
fn header_only_readings_give_an_empty_result() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("readings.csv");
    fs::write(&input, "sensor,value,unit,timestamp,domain,feature,source\n").unwrap();
    let conf = fixture("path-a").join("pipeline.conf");
    let out_dir = dir.path().join("out");
    let out = m3(&["run", "--config", s(&conf), "--in", s(&input), "--out-dir", s(&out_dir)]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let results = read(&out_dir.join("results.csv"));
    assert_eq!(results.lines().count(), 1, "{results}");
    assert!(csv_rows(&results).is_empty());
}

#[test]
fn bad_readings_exit_with_the_ingest_or_annotate_code() {
    let dir = tempfile::tempdir().unwrap();
    let tax = data().join("taxonomy/m3-lite.ttl");
    let garbled = dir.path().join("garbled.csv");
    fs::write(&garbled, "sensor,value\nthermometer,not-a-number\n").unwrap();
    assert_eq!(m3(&["annotate", "--taxonomy", s(&tax), "--in", s(&garbled)]).code, 1);
    let unknown = dir.path().join("unknown.csv");
    fs::write(
        &unknown,
        "sensor,value,unit,timestamp,domain,feature,source\nbarometer,1013,hPa,2026-01-01T00:00:00Z,weather,,x\n",
    )
    .unwrap();
    assert_eq!(m3(&["annotate", "--taxonomy", s(&tax), "--in", s(&unknown)]).code, 2);
}

#[test]
fn flags_override_config_which_overrides_env() {
    let dir = tempfile::tempdir().unwrap();
    let conf = fixture("path-a").join("pipeline.conf");
    let bogus = dir.path().join("bogus.ttl");
    fs::write(&bogus, "this is not turtle").unwrap();
    let good = data().join("taxonomy/m3-lite.ttl");

    // config beats a broken env value
    let out = m3_in(&data(), &["run", "--config", s(&conf), "--out-dir", s(&dir.path().join("a"))], &[("M3_TAXONOMY", &bogus)]);
    assert_eq!(out.code, 0, "{}", out.stderr);

    // a broken flag beats a good config value
    let out = m3(&["run", "--config", s(&conf), "--taxonomy", s(&bogus), "--out-dir", s(&dir.path().join("b"))]);
    assert_eq!(out.code, 2, "{}", out.stderr);

    // without flag or config the env value is used
    let bare = dir.path().join("bare.conf");
    let text = read(&conf).lines().filter(|l| !l.starts_with("taxonomy")).collect::<Vec<_>>().join("\n");
    let fixture_dir = fixture("path-a");
    let text = text.replace("\"readings.csv\"", &format!("{:?}", s(&fixture_dir.join("readings.csv"))))
        .replace("\"../../", &format!("\"{}/", s(&data())))
        .replace("\"../suggestions.rq\"", &format!("{:?}", s(&data().join("fixtures/suggestions.rq"))));
    fs::write(&bare, text).unwrap();
    let out = m3_in(&data(), &["run", "--config", s(&bare), "--out-dir", s(&dir.path().join("c"))], &[("M3_TAXONOMY", &good)]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let out = m3_in(&data(), &["run", "--config", s(&bare), "--out-dir", s(&dir.path().join("d"))], &[("M3_TAXONOMY", &bogus)]);
    assert_eq!(out.code, 2, "{}", out.stderr);
    let out = m3(&["run", "--config", s(&bare), "--out-dir", s(&dir.path().join("e"))]);
    assert_eq!(out.code, 64, "{}", out.stderr);
}

#[test]
fn query_format_follows_flag_then_extension() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    assert_eq!(run_fixture("path-a", &out_dir).code, 0);
    let merged = out_dir.join("merged.ttl");
    let q = data().join("fixtures/suggestions.rq");
    let json = m3(&["query", "--in", s(&merged), "--query", s(&q), "--out", "json"]);
    assert_eq!(json.code, 0, "{}", json.stderr);
    let v: serde_json::Value = serde_json::from_str(&json.stdout).unwrap();
    assert_eq!(v["results"]["bindings"].as_array().unwrap().len(), 3);
    let file = dir.path().join("r.json");
    assert_eq!(m3(&["query", "--in", s(&merged), "--query", s(&q), "--output", s(&file)]).code, 0);
    assert!(read(&file).trim_start().starts_with('{'));
    let csv = m3(&["query", "--in", s(&merged), "--query", s(&q)]);
    assert_eq!(csv.stdout, read(&out_dir.join("results.csv")));
}

#[test]
fn rules_validate_checks_vocabulary() {
    let tax = data().join("taxonomy/m3-lite.ttl");
    let out = m3(&["rules", "validate", "--rules", s(&rule_file("health.rules")), "--taxonomy", s(&tax)]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.rules");
    fs::write(&bad, "[r: (?o type m3x:NoSuchType) -> (?o type m3x:Body)]\n").unwrap();
    assert_eq!(m3(&["rules", "validate", "--rules", s(&bad), "--taxonomy", s(&tax)]).code, 3);
    fs::write(&bad, "[r: (?o type -> ]\n").unwrap();
    assert_eq!(m3(&["rules", "validate", "--rules", s(&bad)]).code, 3);
}
