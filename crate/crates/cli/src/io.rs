//! File helpers shared by the commands: every failure carries the path and
//! maps to the matching exit status.

use std::fs;
use std::path::{Path, PathBuf};

use m3_core::generator::{load_template_catalog, Template};
use m3_core::knowledge::{load_catalog, Catalog};
use m3_core::query::{parse_query, Query};
use m3_core::rdf::{format_for_path, parse_turtle, Graph};
use m3_core::reasoner::{parse_rules, RuleSet};
use m3_core::taxonomy::{load_taxonomy, Taxonomy};

use crate::error::{CliError, CliResult, Stage};

/// Reads an output of an earlier step or a free-standing file; failures
/// are I/O errors.
pub fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// Reads an input owned by `stage`; an unreadable file fails that stage.
pub fn read_for(path: &Path, stage: Stage) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::new(stage, format!("{}: {e}", path.display())))
}

/// Writes `text`, creating missing parent directories.
pub fn write(path: &Path, text: &str) -> CliResult<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Parses a graph file, choosing the syntax from its extension.
pub fn read_graph(path: &Path, stage: Stage) -> CliResult<Graph> {
    let text = read_for(path, stage)?;
    format_for_path(path)
        .parse(&text)
        .map_err(|e| CliError::new(stage, format!("{}: {e}", path.display())))
}

pub fn read_taxonomy(path: &Path) -> CliResult<Taxonomy> {
    let g = read_graph(path, Stage::Annotate)?;
    load_taxonomy(&g).map_err(|e| CliError::new(Stage::Annotate, format!("{}: {e}", path.display())))
}

pub fn read_rules(paths: &[PathBuf]) -> CliResult<RuleSet> {
    let mut sets = Vec::new();
    for p in paths {
        let text = read_for(p, Stage::Reason)?;
        sets.push(parse_rules(&text).map_err(|e| CliError::new(Stage::Reason, format!("{}: {e}", p.display())))?);
    }
    RuleSet::union(sets).map_err(|e| CliError::new(Stage::Reason, e))
}

pub fn read_query(path: &Path) -> CliResult<Query> {
    let text = read_for(path, Stage::Query)?;
    parse_query(&text).map_err(|e| CliError::new(Stage::Query, format!("{}: {e}", path.display())))
}

pub fn read_catalog(path: &Path) -> CliResult<Catalog> {
    if !path.is_file() {
        return Err(CliError::new(Stage::Knowledge, format!("{}: no such file", path.display())));
    }
    load_catalog(path).map_err(|e| CliError::new(Stage::Knowledge, format!("{}: {e}", path.display())))
}

pub fn read_templates(path: &Path, catalog: &Catalog, tax: &Taxonomy) -> CliResult<Vec<Template>> {
    let text = read_for(path, Stage::Template)?;
    let g = parse_turtle(&text).map_err(|e| CliError::new(Stage::Template, format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    load_template_catalog(&g, base, catalog, tax).map_err(|e| CliError::new(Stage::Template, e))
}

/// Reading format from an explicit name or the file extension.
pub fn reading_format(explicit: Option<&str>, path: &Path) -> String {
    match explicit {
        Some(f) => f.to_string(),
        None => match path.extension().and_then(|e| e.to_str()) {
            Some("json") => "json".into(),
            _ => "csv".into(),
        },
    }
}

/// Results format from an explicit name or the output file extension.
pub fn results_format(explicit: Option<&str>, output: Option<&Path>) -> String {
    match explicit {
        Some(f) => f.to_string(),
        None => match output.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
            Some("json") => "json".into(),
            _ => "csv".into(),
        },
    }
}
