use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use log::{info, warn};
use serde_json::json;

use m3_core::generator::{find_template, match_templates, materialize, unify_request};
use m3_core::knowledge::{build_cross_domain_graph, resolve_ids, select_knowledge, observed_domains, KnowledgeEntry};
use m3_core::pipeline::{annotate_stage, merge_stage, query_stage, reason_stage, KnowledgeChoice};
use m3_core::rdf::{parse_turtle, Graph, Iri};
use m3_core::reasoner::{validate_ruleset_against_taxonomy, DEFAULT_EVALUATOR};
use m3_core::taxonomy::{Kind, Taxonomy, UnificationContext};

use crate::config::{env_path, required_path, ConfigFile, ENV_KNOWLEDGE_MANIFEST, ENV_TAXONOMY, ENV_TEMPLATES};
use crate::error::{from_pipeline, CliError, CliResult, Stage};
use crate::io::{self, read_graph};
use crate::{
    AnnotateArgs, KnowledgeCommand, QueryArgs, ReasonArgs, RulesCommand, RunArgs, TemplateSources,
    TemplatesCommand, INCOMPLETE_MARKER,
};

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => io::write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn annotate(a: AnnotateArgs) -> CliResult<()> {
    let tax = io::read_taxonomy(&required_path(a.taxonomy, "--taxonomy", ENV_TAXONOMY)?)?;
    let text = io::read_for(&a.input, Stage::Ingest)?;
    let format = io::reading_format(a.format.as_deref(), &a.input);
    let ttl = annotate_stage(&text, &format, &tax).map_err(from_pipeline)?;
    emit(a.out.as_deref(), &ttl)
}

fn report_diagnostics(diags: &[m3_core::reasoner::BuiltinTypeError]) {
    for d in diags {
        warn!("{d}");
    }
}

pub fn reason(a: ReasonArgs) -> CliResult<()> {
    let graph = read_graph(&a.input, Stage::Reason)?;
    let rules = io::read_rules(&a.rules)?;
    let out = reason_stage(&graph, &rules, &a.engine).map_err(from_pipeline)?;
    report_diagnostics(&out.diagnostics);
    info!("derived {} triples with {} rules", out.derived, rules.len());
    if let Some(log) = &a.log {
        io::write(log, &out.derivations)?;
    }
    emit(a.out.as_deref(), &out.enriched)
}

pub fn query(a: QueryArgs) -> CliResult<()> {
    let graph = read_graph(&a.input, Stage::Query)?;
    let q = io::read_query(&a.query)?;
    let format = io::results_format(a.format.as_deref(), a.output.as_deref());
    let (text, solutions) = query_stage(&graph, &q, &format).map_err(from_pipeline)?;
    if solutions.filter_errors > 0 {
        warn!("{} solutions dropped by filter type errors", solutions.filter_errors);
    }
    emit(a.output.as_deref(), &text)
}

fn parse_domains(raw: &[String], taxonomy: Option<PathBuf>) -> CliResult<BTreeSet<Iri>> {
    let mut tax: Option<Taxonomy> = None;
    let mut out = BTreeSet::new();
    for d in raw {
        if d.contains("://") {
            out.insert(Iri::new(d.as_str()).map_err(CliError::usage)?);
            continue;
        }
        if tax.is_none() {
            let path = taxonomy
                .clone()
                .or_else(|| env_path(ENV_TAXONOMY))
                .ok_or_else(|| CliError::usage(format!("domain label '{d}' needs --taxonomy (or {ENV_TAXONOMY})")))?;
            tax = Some(io::read_taxonomy(&path)?);
        }
        let iri = tax
            .as_ref()
            .expect("loaded above")
            .unify(d, Kind::Domain, &UnificationContext::default())
            .map_err(|e| CliError::new(Stage::Knowledge, e))?;
        out.insert(iri);
    }
    Ok(out)
}

pub fn knowledge(k: KnowledgeCommand) -> CliResult<()> {
    match k {
        KnowledgeCommand::Validate(m) => {
            let cat = io::read_catalog(&required_path(m.manifest, "--manifest", ENV_KNOWLEDGE_MANIFEST)?)?;
            println!("{} entries ok", cat.len());
            Ok(())
        }
        KnowledgeCommand::Select {
            manifest,
            domains,
            input,
            taxonomy,
        } => {
            let cat = io::read_catalog(&required_path(manifest.manifest, "--manifest", ENV_KNOWLEDGE_MANIFEST)?)?;
            let mut wanted = parse_domains(&domains, taxonomy)?;
            if let Some(p) = input {
                wanted.extend(observed_domains(&read_graph(&p, Stage::Knowledge)?));
            }
            for e in select_knowledge(&wanted, &cat) {
                println!("{}", e.id);
            }
            Ok(())
        }
        KnowledgeCommand::Merge {
            manifest,
            input,
            ids,
            out,
        } => {
            let cat = io::read_catalog(&required_path(manifest.manifest, "--manifest", ENV_KNOWLEDGE_MANIFEST)?)?;
            let graph = read_graph(&input, Stage::Knowledge)?;
            let entries: Vec<&KnowledgeEntry> = if ids.is_empty() {
                KnowledgeChoice::ObservedDomains(&cat).entries(&graph)
            } else {
                resolve_ids(&ids, &cat).map_err(|e| CliError::new(Stage::Knowledge, e))?
            };
            let merged = build_cross_domain_graph(&entries, &graph).map_err(|e| CliError::new(Stage::Knowledge, e))?;
            for (ns, users) in &merged.shared_namespaces {
                info!("shared namespace {ns}: {}", users.join(", "));
            }
            let text = merge_stage(&graph, KnowledgeChoice::Entries(&entries)).map_err(from_pipeline)?;
            emit(out.as_deref(), &text)
        }
    }
}

pub fn rules(r: RulesCommand) -> CliResult<()> {
    let RulesCommand::Validate { rules, taxonomy } = r;
    let set = io::read_rules(&rules)?;
    if let Some(t) = taxonomy.or_else(|| env_path(ENV_TAXONOMY)) {
        let tax = io::read_taxonomy(&t)?;
        let unknown = validate_ruleset_against_taxonomy(&set, &tax);
        if !unknown.is_empty() {
            let list: Vec<String> = unknown.iter().map(|u| format!("{}: <{}>", u.rule, u.iri)).collect();
            return Err(CliError::new(
                Stage::Reason,
                format!("unknown vocabulary: {}", list.join(", ")),
            ));
        }
    }
    println!("{} rules ok", set.len());
    Ok(())
}

struct Loaded {
    taxonomy: Taxonomy,
    catalog: m3_core::knowledge::Catalog,
    templates: Vec<m3_core::generator::Template>,
}

fn load_sources(s: TemplateSources) -> CliResult<Loaded> {
    let taxonomy = io::read_taxonomy(&required_path(s.taxonomy, "--taxonomy", ENV_TAXONOMY)?)?;
    let catalog = io::read_catalog(&required_path(s.manifest, "--manifest", ENV_KNOWLEDGE_MANIFEST)?)?;
    let templates = io::read_templates(&required_path(s.templates, "--templates", ENV_TEMPLATES)?, &catalog, &taxonomy)?;
    Ok(Loaded {
        taxonomy,
        catalog,
        templates,
    })
}

pub fn templates(t: TemplatesCommand) -> CliResult<()> {
    match t {
        TemplatesCommand::List(s) => {
            let l = load_sources(s)?;
            for t in &l.templates {
                println!("{}\t{}", t.id, t.title);
            }
            Ok(())
        }
        TemplatesCommand::Match {
            sources,
            sensors,
            domains,
            json,
        } => {
            let l = load_sources(sources)?;
            let (sensors, domains) =
                unify_request(&sensors, &domains, &l.taxonomy).map_err(|e| CliError::new(Stage::Template, e))?;
            let matches = match_templates(&sensors, &domains, &l.templates);
            if json {
                let v: Vec<_> = matches
                    .iter()
                    .map(|m| {
                        json!({
                            "template": m.template.id.as_str(),
                            "title": m.template.title,
                            "matched_sensors": m.matched_sensors,
                            "matched_domains": m.matched_domains,
                            "score": m.score(),
                        })
                    })
                    .collect();
                println!("{}", serde_json::to_string_pretty(&v).expect("serializable"));
            } else {
                for m in &matches {
                    println!("{}\t{}\t{}", m.score(), m.template.id, m.template.title);
                }
            }
            Ok(())
        }
        TemplatesCommand::Gen { sources, id, out } => {
            let l = load_sources(sources)?;
            let t = find_template(&l.templates, &id).map_err(|e| CliError::new(Stage::Template, e))?;
            let bundle = materialize(t, &l.catalog, &l.taxonomy, &out).map_err(|e| CliError::new(Stage::Template, e))?;
            println!("wrote {} files to {}", bundle.files.len() + 1, bundle.dir.display());
            Ok(())
        }
    }
}

struct RunPlan {
    taxonomy: PathBuf,
    input: PathBuf,
    format: String,
    rules: Vec<PathBuf>,
    engine: String,
    manifest: Option<PathBuf>,
    ids: Vec<String>,
    query: PathBuf,
    results_format: String,
    out_dir: PathBuf,
}

fn plan(a: RunArgs) -> CliResult<RunPlan> {
    let cfg = match &a.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let v = &cfg.values;
    let missing = |name: &str| CliError::usage(format!("{name} is required (flag or config)"));
    let taxonomy = a
        .taxonomy
        .or_else(|| cfg.path(&v.taxonomy))
        .or_else(|| env_path(ENV_TAXONOMY))
        .ok_or_else(|| missing("taxonomy"))?;
    let input = a.input.or_else(|| cfg.path(&v.input)).ok_or_else(|| missing("input"))?;
    let format = a
        .format
        .or_else(|| v.input_format.clone())
        .unwrap_or_else(|| io::reading_format(None, &input));
    let rules = if a.rules.is_empty() {
        v.rules.iter().flatten().map(|r| cfg.base.join(r)).collect()
    } else {
        a.rules
    };
    let manifest = a
        .manifest
        .or_else(|| cfg.path(&v.knowledge_manifest))
        .or_else(|| env_path(ENV_KNOWLEDGE_MANIFEST));
    let ids = if a.ids.is_empty() { v.knowledge.clone().unwrap_or_default() } else { a.ids };
    let query = a.query.or_else(|| cfg.path(&v.query)).ok_or_else(|| missing("query"))?;
    Ok(RunPlan {
        taxonomy,
        input,
        format,
        rules,
        engine: a.engine.or_else(|| v.engine.clone()).unwrap_or_else(|| DEFAULT_EVALUATOR.into()),
        manifest,
        ids,
        query,
        results_format: a.results_format.or_else(|| v.results_format.clone()).unwrap_or_else(|| "csv".into()),
        out_dir: a
            .out_dir
            .or_else(|| cfg.path(&v.output_dir))
            .unwrap_or_else(|| PathBuf::from("out")),
    })
}

fn reparse(text: &str) -> CliResult<Graph> {
    parse_turtle(text).map_err(|e| CliError::new(Stage::Io, e))
}

fn run_stages(p: &RunPlan) -> CliResult<()> {
    let out = |name: &str| p.out_dir.join(name);
    // inputs load just before the stage that needs them, so earlier
    // artifacts survive a later failure
    let readings = io::read_for(&p.input, Stage::Ingest)?;
    let tax = io::read_taxonomy(&p.taxonomy)?;
    let annotated = annotate_stage(&readings, &p.format, &tax).map_err(from_pipeline)?;
    io::write(&out("annotated.ttl"), &annotated)?;

    let rules = io::read_rules(&p.rules)?;
    let reasoned = reason_stage(&reparse(&annotated)?, &rules, &p.engine).map_err(from_pipeline)?;
    report_diagnostics(&reasoned.diagnostics);
    io::write(&out("enriched.ttl"), &reasoned.enriched)?;
    io::write(&out("derivations.jsonl"), &reasoned.derivations)?;

    let enriched = reparse(&reasoned.enriched)?;
    let catalog = p.manifest.as_deref().map(io::read_catalog).transpose()?;
    let merged = match &catalog {
        Some(cat) if p.ids.is_empty() => merge_stage(&enriched, KnowledgeChoice::ObservedDomains(cat)),
        Some(cat) => {
            let entries = resolve_ids(&p.ids, cat).map_err(|e| CliError::new(Stage::Knowledge, e))?;
            merge_stage(&enriched, KnowledgeChoice::Entries(&entries))
        }
        None if p.ids.is_empty() => merge_stage(&enriched, KnowledgeChoice::Entries(&[])),
        None => return Err(CliError::usage("knowledge ids given without a knowledge manifest")),
    }
    .map_err(from_pipeline)?;
    io::write(&out("merged.ttl"), &merged)?;

    let query = io::read_query(&p.query)?;
    let (results, _) = query_stage(&reparse(&merged)?, &query, &p.results_format).map_err(from_pipeline)?;
    io::write(&out(&format!("results.{}", p.results_format)), &results)
}

pub fn run(a: RunArgs) -> CliResult<()> {
    let plan = plan(a)?;
    let marker = plan.out_dir.join(INCOMPLETE_MARKER);
    if marker.exists() {
        std::fs::remove_file(&marker).map_err(|e| CliError::io(&marker, e))?;
    }
    let result = run_stages(&plan);
    if let Err(e) = &result {
        io::write(&marker, &format!("exit {}: {}\n", e.stage.exit_code(), e.message))?;
    }
    result
}
