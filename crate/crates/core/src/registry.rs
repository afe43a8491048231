//! Name-keyed registry of interchangeable strategies.
//!
//! Each pluggable family in the crate (RDF syntaxes, reading formats,
//! rule evaluators, result writers) is a trait; implementations are boxed
//! and registered under a stable name so callers can pick one at runtime
//! from a CLI flag or a config value.

use std::collections::BTreeMap;
use std::fmt;

/// Something that can be looked up by name.
pub trait Named {
    fn name(&self) -> &'static str;
}

pub struct Registry<T: ?Sized + Named> {
    entries: BTreeMap<&'static str, Box<T>>,
}

impl<T: ?Sized + Named> Default for Registry<T> {
    fn default() -> Self {
        Self {
            entries: BTreeMap::new(),
        }
    }
}

impl<T: ?Sized + Named> Registry<T> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers `item` under its own name, replacing any previous entry.
    pub fn register(&mut self, item: Box<T>) -> &mut Self {
        self.entries.insert(item.name(), item);
        self
    }

    pub fn get(&self, name: &str) -> Option<&T> {
        self.entries.get(name).map(|b| b.as_ref())
    }

    /// Like [`Registry::get`] but reports the known names on failure.
    pub fn resolve(&self, name: &str) -> Result<&T, UnknownStrategy> {
        self.get(name).ok_or_else(|| UnknownStrategy {
            requested: name.to_string(),
            known: self.names().map(str::to_string).collect(),
        })
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownStrategy {
    pub requested: String,
    pub known: Vec<String>,
}

impl fmt::Display for UnknownStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "unknown strategy '{}' (available: {})",
            self.requested,
            self.known.join(", ")
        )
    }
}

impl std::error::Error for UnknownStrategy {}
