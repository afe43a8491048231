//! Setting resolution: command-line flag, then configuration file, then
//! environment variable.

use std::path::{Path, PathBuf};

use m3_core::generator::PipelineFile;

use crate::error::{CliError, CliResult};
use crate::io;

pub const ENV_TAXONOMY: &str = "M3_TAXONOMY";
pub const ENV_KNOWLEDGE_MANIFEST: &str = "M3_KNOWLEDGE_MANIFEST";
pub const ENV_TEMPLATES: &str = "M3_TEMPLATES";

pub fn env_path(var: &str) -> Option<PathBuf> {
    std::env::var_os(var).filter(|v| !v.is_empty()).map(PathBuf::from)
}

/// `flag`, else `env`; missing means a usage error naming both.
pub fn required_path(flag: Option<PathBuf>, flag_name: &str, env: &str) -> CliResult<PathBuf> {
    flag.or_else(|| env_path(env))
        .ok_or_else(|| CliError::usage(format!("{flag_name} is required (or set {env})")))
}

/// A parsed `pipeline.conf` and the directory its relative paths hang off.
#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    pub values: PipelineFile,
    pub base: PathBuf,
}

impl ConfigFile {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = io::read(path)?;
        let values: PipelineFile =
            toml::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
        Ok(ConfigFile {
            values,
            base: path.parent().map(Path::to_path_buf).unwrap_or_default(),
        })
    }

    pub fn path(&self, value: &Option<String>) -> Option<PathBuf> {
        value.as_ref().map(|v| self.base.join(v))
    }
}
