use thiserror::Error;

use crate::lexicon::Layer;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("line {line}: label `{label}` is not declared for the {layer} layer")]
    UndeclaredLabel {
        line: usize,
        layer: Layer,
        label: String,
    },

    #[error("line {line}: penalty factor {value} outside [0, 1)")]
    PfOutOfRange { line: usize, value: f64 },

    #[error("line {line}: duplicate constraint id `{id}`")]
    DuplicateConstraint { line: usize, id: String },

    #[error("accessor scope violation: {0}")]
    AccessorScope(String),

    #[error("lexicon line {line}: {message}")]
    Lexicon { line: usize, message: String },

    #[error("category `{category}` of `{form}` is not declared by the grammar")]
    UndeclaredCategory { form: String, category: String },

    #[error("the grammar declares no labels for the {0} layer")]
    MissingLabels(Layer),

    #[error("empty sentence")]
    EmptySentence,

    #[error("refusing to remove the last candidate of {0}")]
    LastCandidate(String),

    #[error("assignment is incomplete: expected {expected} relations, got {got}")]
    IncompleteAssignment { expected: usize, got: usize },

    #[error("search budget of {0} expanded nodes exceeded")]
    SearchBudgetExceeded(u64),

    #[error("{0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
