use std::fmt;
use std::path::Path;

/// Process exit status per failing stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Ingest,
    Annotate,
    Reason,
    Query,
    Template,
    Knowledge,
    Usage,
    Io,
}

impl Stage {
    pub fn exit_code(self) -> i32 {
        match self {
            Stage::Ingest => 1,
            Stage::Annotate => 2,
            Stage::Reason => 3,
            Stage::Query => 4,
            Stage::Template => 5,
            Stage::Knowledge => 6,
            Stage::Usage => 64,
            Stage::Io => 74,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{message}")]
pub struct CliError {
    pub stage: Stage,
    pub message: String,
}

impl CliError {
    pub fn new(stage: Stage, message: impl fmt::Display) -> Self {
        CliError {
            stage,
            message: message.to_string(),
        }
    }

    pub fn usage(message: impl fmt::Display) -> Self {
        Self::new(Stage::Usage, message)
    }

    pub fn io(path: &Path, e: impl fmt::Display) -> Self {
        Self::new(Stage::Io, format!("{}: {e}", path.display()))
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Maps a library pipeline error to the stage that produced it.
pub fn from_pipeline(e: m3_core::pipeline::PipelineError) -> CliError {
    use m3_core::pipeline::PipelineError as P;
    let stage = match &e {
        P::Ingest(_) => Stage::Ingest,
        P::Annotate(_) => Stage::Annotate,
        P::Knowledge(_) => Stage::Knowledge,
        P::Strategy(_) => Stage::Usage,
        P::Intermediate(_) => Stage::Io,
    };
    CliError::new(stage, e)
}
