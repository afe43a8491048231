#![allow(dead_code)]

use std::path::{Path, PathBuf};

use m3_core::generator::{load_template_catalog, Template};
use m3_core::knowledge::{load_catalog, Catalog};
use m3_core::rdf::parse_turtle;
use m3_core::taxonomy::{load_taxonomy, Taxonomy};

pub fn data() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn taxonomy() -> Taxonomy {
    let text = std::fs::read_to_string(data().join("taxonomy/m3-lite.ttl")).unwrap();
    load_taxonomy(&parse_turtle(&text).unwrap()).unwrap()
}

pub fn catalog() -> Catalog {
    load_catalog(&data().join("knowledge/catalog.toml")).unwrap()
}

pub fn templates(cat: &Catalog, tax: &Taxonomy) -> Vec<Template> {
    let dir = data().join("templates");
    let g = parse_turtle(&std::fs::read_to_string(dir.join("catalog.ttl")).unwrap()).unwrap();
    load_template_catalog(&g, &dir, cat, tax).unwrap()
}
