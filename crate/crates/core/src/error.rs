use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("every disease has zero prior probability for this patient")]
    DegeneratePrior,
    #[error("findings are impossible under every disease (all Bayes numerators are zero)")]
    InconsistentEvidence,
    #[error("unknown disease `{0}`")]
    UnknownDisease(String),
    #[error("unknown symptom `{id}` ({context})")]
    UnknownSymptom { id: String, context: String },
    #[error("symptom `{symptom}` is not caused by disease `{disease}`")]
    NotCaused { disease: String, symptom: String },
    #[error("no utility entry for disease `{0}`")]
    MissingUtility(String),
    #[error("invalid patient: {0}")]
    InvalidPatient(String),
    #[error("invalid prior: {0}")]
    InvalidPrior(String),
    #[error("invalid findings: {0}")]
    InvalidFindings(String),
    #[error("enumeration needs {vars} binary variables, limit is {limit}")]
    EnumerationTooLarge { vars: usize, limit: usize },
    #[error("no classes requested")]
    EmptyClasses,
    #[error("regression is undefined: {0}")]
    UndefinedFit(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("need at least {needed} cases, got {got}")]
    InsufficientData { needed: usize, got: usize },
}
