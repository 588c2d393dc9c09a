use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("operands are expanded around different base points")]
    BasePointMismatch,
    #[error("valid order exhausted: {0}")]
    DegenerateSeries(String),
    #[error("rebase distance {distance} is not inside the estimated radius {radius}")]
    OutsideRadius { distance: f64, radius: f64 },
    #[error("need at least {needed} coefficients, got {got}")]
    TooFewCoefficients { needed: usize, got: usize },
    #[error("coefficient function has a pole at the base point and the state is not pole-cleared")]
    PoleAtBasePoint,
    #[error("evaluation at a pole (x = {0})")]
    PoleEvaluation(f64),
    #[error("transformation is singular: {0}")]
    TransformSingular(String),
    #[error("dependency cone needs {needed} constants, only {supplied} supplied")]
    DependencyConeViolation { needed: usize, supplied: usize },
    #[error("need {needed} integration constants, only {supplied} supplied")]
    MissingConstants { needed: usize, supplied: usize },
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("a = 0 propagation needs a top-level closure row")]
    ClosureRequired,
    #[error("outside the domain: {0}")]
    DomainError(String),
    #[error("moment system is forward-recursive (c != 0); backward solution does not apply")]
    WrongDirection,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
