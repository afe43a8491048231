//! Command-line front end. Every subcommand maps onto one library stage;
//! `run` chains them from a configuration file.

mod commands;
pub mod config;
pub mod error;
pub mod io;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use error::{CliError, CliResult, Stage};

/// File written into the output directory when `run` stops early.
pub const INCOMPLETE_MARKER: &str = "PIPELINE_INCOMPLETE";

#[derive(Debug, Parser)]
#[command(name = "m3", version, about = "Annotate, reason over and query sensor data")]
pub struct Cli {
    /// More log output on stderr; repeat for more detail
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Turn raw readings into RDF observations.
    Annotate(AnnotateArgs),
    /// Apply rule sets to a graph until nothing new is derived.
    Reason(ReasonArgs),
    /// Run a query over a graph.
    Query(QueryArgs),
    /// Inspect the knowledge catalog or merge entries into a graph.
    #[command(subcommand)]
    Knowledge(KnowledgeCommand),
    /// Check rule files.
    #[command(subcommand)]
    Rules(RulesCommand),
    /// List, match and generate application templates.
    #[command(subcommand)]
    Templates(TemplatesCommand),
    /// Run every stage from a configuration file.
    Run(RunArgs),
}

#[derive(Debug, Args)]
pub struct AnnotateArgs {
    /// Taxonomy graph [env: M3_TAXONOMY]
    #[arg(long)]
    pub taxonomy: Option<PathBuf>,
    #[arg(long = "in")]
    pub input: PathBuf,
    /// csv or json; defaults from the input extension
    #[arg(long)]
    pub format: Option<String>,
    /// Turtle output; stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReasonArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Rule file; repeat for several
    #[arg(long, required = true)]
    pub rules: Vec<PathBuf>,
    #[arg(long, default_value = m3_core::reasoner::DEFAULT_EVALUATOR)]
    pub engine: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Derivation log, one JSON object per line
    #[arg(long)]
    pub log: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub query: PathBuf,
    /// csv or json; defaults from the output extension, else csv
    #[arg(long, visible_alias = "out")]
    pub format: Option<String>,
    /// Results file; stdout when omitted
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ManifestArg {
    /// Knowledge catalog [env: M3_KNOWLEDGE_MANIFEST]
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum KnowledgeCommand {
    /// Load every entry and report problems.
    Validate(ManifestArg),
    /// Print the entries chosen for some domains.
    Select {
        #[command(flatten)]
        manifest: ManifestArg,
        /// Domain labels or IRIs, comma separated
        #[arg(long, value_delimiter = ',', required_unless_present = "input")]
        domains: Vec<String>,
        /// Take the domains observed in this graph instead
        #[arg(long = "in")]
        input: Option<PathBuf>,
        /// Taxonomy used to unify domain labels [env: M3_TAXONOMY]
        #[arg(long)]
        taxonomy: Option<PathBuf>,
    },
    /// Merge entries into a graph. Without --ids the entries are selected
    /// for the domains the graph observes.
    Merge {
        #[command(flatten)]
        manifest: ManifestArg,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_delimiter = ',')]
        ids: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum RulesCommand {
    /// Parse rule files and, given a taxonomy, check their vocabulary.
    Validate {
        #[arg(long, required = true)]
        rules: Vec<PathBuf>,
        #[arg(long)]
        taxonomy: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct TemplateSources {
    /// Template catalog [env: M3_TEMPLATES]
    #[arg(long)]
    pub templates: Option<PathBuf>,
    /// [env: M3_KNOWLEDGE_MANIFEST]
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// [env: M3_TAXONOMY]
    #[arg(long)]
    pub taxonomy: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum TemplatesCommand {
    List(TemplateSources),
    /// Rank templates against sensors and domains.
    Match {
        #[command(flatten)]
        sources: TemplateSources,
        /// Sensor labels or IRIs, comma separated
        #[arg(long, value_delimiter = ',', required = true)]
        sensors: Vec<String>,
        /// Domain labels or IRIs, comma separated
        #[arg(long, value_delimiter = ',', required = true)]
        domains: Vec<String>,
        #[arg(long)]
        json: bool,
    },
    /// Materialize a template into an empty directory.
    Gen {
        #[command(flatten)]
        sources: TemplateSources,
        /// Template IRI or local name
        #[arg(long)]
        id: String,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args, Default)]
pub struct RunArgs {
    /// Pipeline configuration; flags override its values
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub taxonomy: Option<PathBuf>,
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub rules: Vec<PathBuf>,
    #[arg(long)]
    pub engine: Option<String>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub ids: Vec<String>,
    #[arg(long)]
    pub query: Option<PathBuf>,
    #[arg(long)]
    pub results_format: Option<String>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

pub fn execute(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Annotate(a) => commands::annotate(a),
        Command::Reason(a) => commands::reason(a),
        Command::Query(a) => commands::query(a),
        Command::Knowledge(k) => commands::knowledge(k),
        Command::Rules(r) => commands::rules(r),
        Command::Templates(t) => commands::templates(t),
        Command::Run(a) => commands::run(a),
    }
}

/// Parses `args` and runs the command, returning the process exit code.
/// Messages go to stderr; command output to stdout or files.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { Stage::Usage.exit_code() } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    // a second call in the same process (tests) keeps the first logger
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).try_init();
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.stage.exit_code()
        }
    }
}
