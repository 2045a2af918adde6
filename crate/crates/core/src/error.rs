use thiserror::Error;

use crate::degree::ParseDegreeError;

#[derive(Debug, Error)]
pub enum Error {
    #[error("model has no states")]
    NoStates,
    #[error("model has no actions")]
    NoActions,
    #[error("duplicate {kind} `{name}`")]
    Duplicate { kind: &'static str, name: String },
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("`{0}` is a reserved symbol")]
    ReservedSymbol(String),
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("not a fuzzy equivalence relation: {law} fails at {witness}")]
    NotEquivalence { law: &'static str, witness: String },
    #[error("malformed compact fuzzy partition: {0}")]
    MalformedPartition(String),
    #[error("infeasible generator spec: {0}")]
    InfeasibleSpec(String),
    #[error("{context}: {source}")]
    Degree {
        context: String,
        #[source]
        source: ParseDegreeError,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{0}")]
    Document(String),
    #[error("{field}: {source}")]
    Field {
        field: String,
        #[source]
        source: Box<Error>,
    },
    #[error("engines disagree on instance with seed {seed}: {left} vs {right}")]
    DigestMismatch { seed: u64, left: String, right: String },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Attaches the path of the document field the error arose in.
    pub fn in_field(self, field: impl Into<String>) -> Error {
        Error::Field { field: field.into(), source: Box::new(self) }
    }
}

pub(crate) trait Context<T> {
    fn field(self, field: impl FnOnce() -> String) -> Result<T>;
}

impl<T> Context<T> for Result<T> {
    fn field(self, field: impl FnOnce() -> String) -> Result<T> {
        self.map_err(|e| e.in_field(field()))
    }
}
