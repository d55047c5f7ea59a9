use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("edge {0} is a self-loop")]
    SelfLoop(usize),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("edge set is empty")]
    EmptyEdgeSet,
    #[error("edge subset is empty")]
    EmptySubset,
    #[error("vertex sets overlap")]
    OverlappingVertexSets,
    #[error("polynomial variable sets differ")]
    VariableMismatch,
    #[error("exterior generator sets differ")]
    GeneratorMismatch,
    #[error("chart constraint violated: {0}")]
    ConstraintViolated(String),
    #[error("Schwinger parameter must be positive")]
    NonPositiveT,
    #[error("quadrature did not converge: estimate {value:e} with error {error:e} after {evaluations} evaluations")]
    NonConvergence { value: f64, error: f64, evaluations: usize },
    #[error("form degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: i64, found: i64 },
    #[error("coincident points")]
    CoincidentPoints,
    #[error("epsilon must be positive")]
    NonPositiveEpsilon,
    #[error("graph is not Laman in dimension {0}")]
    NotLaman(usize),
    #[error("parse error at line {line}: {msg}")]
    ParseError { line: usize, msg: String },
    #[error("division by the zero polynomial")]
    ZeroDenominator,
    #[error("negative power of a non-monomial in substitution")]
    NonMonomialInverse,
    #[error("identity violated: {0}")]
    AssertionFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
