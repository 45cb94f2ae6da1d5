use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point lies outside the domain of {0}")]
    DomainViolation(String),
    #[error("jets live at different base points or orders")]
    BaseMismatch,
    #[error("division by a jet whose value {0:e} is numerically zero")]
    DivisionNearZero(f64),
    #[error("value {0} is not positive real within tolerance")]
    BranchViolation(String),
    #[error("degenerate value {0:e}")]
    DegenerateValue(f64),
    #[error("derivative of total order {needed} requested from a jet of order {available}")]
    OrderExceeded { needed: usize, available: usize },
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("metric condition number {0:e} exceeds the limit")]
    IllConditioned(f64),
    #[error("direction vector is zero")]
    ZeroVector,
    #[error("vector field is not holomorphic (max |dbar X| = {0:e})")]
    NotHolomorphic(f64),
    #[error("identity is only implemented for lambda = -1, got {0}")]
    UnsupportedLambda(f64),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid ray direction: {0}")]
    InvalidDirection(String),
    #[error("finite-difference stencil leaves the domain")]
    StencilOutsideDomain,
    #[error("quadrature did not converge for ({a}, {b}) with {nodes} nodes")]
    QuadratureNotConverged { a: usize, b: usize, nodes: usize },
    #[error("kernel series tail {tail:e} too large relative to partial sum {sum:e}")]
    TailTooLarge { tail: f64, sum: f64 },
    #[error("F is not positive at x = {0}")]
    NonPositiveF(f64),
    #[error("malformed norm table: {0}")]
    TableFormat(String),
    #[error("i/o failure: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// Stable variant name, used in machine-readable reports.
    pub fn name(&self) -> &'static str {
        match self {
            Error::DomainViolation(_) => "DomainViolation",
            Error::BaseMismatch => "BaseMismatch",
            Error::DivisionNearZero(_) => "DivisionNearZero",
            Error::BranchViolation(_) => "BranchViolation",
            Error::DegenerateValue(_) => "DegenerateValue",
            Error::OrderExceeded { .. } => "OrderExceeded",
            Error::NotPositiveDefinite => "NotPositiveDefinite",
            Error::IllConditioned(_) => "IllConditioned",
            Error::ZeroVector => "ZeroVector",
            Error::NotHolomorphic(_) => "NotHolomorphic",
            Error::UnsupportedLambda(_) => "UnsupportedLambda",
            Error::InvalidParams(_) => "InvalidParams",
            Error::InvalidDirection(_) => "InvalidDirection",
            Error::StencilOutsideDomain => "StencilOutsideDomain",
            Error::QuadratureNotConverged { .. } => "QuadratureNotConverged",
            Error::TailTooLarge { .. } => "TailTooLarge",
            Error::NonPositiveF(_) => "NonPositiveF",
            Error::TableFormat(_) => "TableFormat",
            Error::Io(_) => "IoFailure",
        }
    }
}
