use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use serde_json::Value;

/// One checked claim.
#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub claim: String,
    pub holds: bool,
    pub tolerance: f64,
    pub max_error: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Verdict {
    pub fn new(claim: impl Into<String>, holds: bool, tolerance: f64, max_error: f64) -> Self {
        Verdict {
            claim: claim.into(),
            holds,
            tolerance,
            max_error,
            witness: None,
        }
    }

    pub fn with_witness(mut self, w: impl Into<String>) -> Self {
        self.witness = Some(w.into());
        self
    }
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    /// Input name to SHA-256 of the file contents.
    pub inputs: BTreeMap<String, String>,
    pub seed: u64,
    pub results: Value,
    pub verdicts: Vec<Verdict>,
}

impl RunReport {
    pub fn all_hold(&self) -> bool {
        self.verdicts.iter().all(|v| v.holds)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureKind {
    Parse,
    Precondition,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: FailureKind,
    pub message: String,
}

impl CliError {
    pub fn parse(message: impl fmt::Display) -> Self {
        CliError {
            kind: FailureKind::Parse,
            message: message.to_string(),
        }
    }

    pub fn precondition(message: impl fmt::Display) -> Self {
        CliError {
            kind: FailureKind::Precondition,
            message: message.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            FailureKind::Parse => 2,
            FailureKind::Precondition => 3,
        }
    }
}

impl From<simplicial_covers::Error> for CliError {
    fn from(e: simplicial_covers::Error) -> Self {
        CliError::precondition(e)
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
