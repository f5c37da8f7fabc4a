//! Errors raised by the scenario parser, the runner and the emitters.

use std::path::PathBuf;

use thiserror::Error;

/// Scenario-file errors. Each variant has a stable machine-readable
/// [`code`](ScenarioError::code).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("line {line}, column {column}: syntax error: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("line {line}: unknown section [{section}]{hint}")]
    UnknownSection {
        line: usize,
        section: String,
        hint: String,
    },

    #[error("line {line}: unknown key `{key}` in [{section}]")]
    UnknownKey { line: usize, section: String, key: String },

    #[error("line {line}: duplicate {what} `{name}`")]
    Duplicate { line: usize, what: &'static str, name: String },

    #[error("missing required key `{key}` in [{section}]")]
    MissingKey { section: String, key: String },

    #[error("line {line}: `{key}` must be {expected}")]
    Type {
        line: usize,
        key: String,
        expected: &'static str,
    },

    #[error("{}`{key}`: {message}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
    Domain {
        line: Option<usize>,
        key: String,
        message: String,
    },
}

impl ScenarioError {
    pub fn code(&self) -> &'static str {
        match self {
            ScenarioError::Syntax { .. } => "syntax",
            ScenarioError::UnknownSection { .. } => "unknown-section",
            ScenarioError::UnknownKey { .. } => "unknown-key",
            ScenarioError::Duplicate { .. } => "duplicate",
            ScenarioError::MissingKey { .. } => "missing-key",
            ScenarioError::Type { .. } => "type",
            ScenarioError::Domain { .. } => "domain",
        }
    }

    /// Line the error refers to, when it has one.
    pub fn line(&self) -> Option<usize> {
        match self {
            ScenarioError::Syntax { line, .. }
            | ScenarioError::UnknownSection { line, .. }
            | ScenarioError::UnknownKey { line, .. }
            | ScenarioError::Duplicate { line, .. }
            | ScenarioError::Type { line, .. } => Some(*line),
            ScenarioError::Domain { line, .. } => *line,
            ScenarioError::MissingKey { .. } => None,
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),

    #[error("{context}: {source}")]
    Core {
        context: String,
        #[source]
        source: qdsim_core::Error,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("output: {0}")]
    Output(String),
}

impl CliError {
    pub(crate) fn core(context: impl Into<String>) -> impl FnOnce(qdsim_core::Error) -> CliError {
        let context = context.into();
        move |source| CliError::Core { context, source }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
