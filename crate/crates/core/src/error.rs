use thiserror::Error;

/// Errors raised by the certification library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not positive semidefinite (minimum eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("{what} did not converge (best residual {residual:e})")]
    NoConvergence { what: &'static str, residual: f64 },

    #[error("polynomial is unstable (margin {margin:e})")]
    Unstable { margin: f64 },

    #[error("trigonometric polynomial is not positive on the torus (margin {margin:e})")]
    NotPositive { margin: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("degree {degree} exceeds the symmetrization degree {d}")]
    DegreeExceeds { degree: usize, d: usize },

    #[error("degree {d} exceeds the configured cap {cap}")]
    DegreeCap { d: usize, cap: usize },

    #[error("polynomial has degree zero")]
    ConstantPolynomial,

    #[error("polynomial vanishes at the origin")]
    VanishesAtOrigin,

    #[error("evaluation at a pole of {0}")]
    Pole(&'static str),

    #[error("block structure violated: off-block mass {mass:e}")]
    BlockStructure { mass: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable variant name for machine-readable reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotPsd { .. } => "NotPsd",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::Unstable { .. } => "Unstable",
            Error::NotPositive { .. } => "NotPositive",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::DegreeExceeds { .. } => "DegreeExceeds",
            Error::DegreeCap { .. } => "DegreeCap",
            Error::ConstantPolynomial => "ConstantPolynomial",
            Error::VanishesAtOrigin => "VanishesAtOrigin",
            Error::Pole(_) => "Pole",
            Error::BlockStructure { .. } => "BlockStructure",
            Error::InvalidInput(_) => "InvalidInput",
            Error::Json(_) => "Json",
            Error::Io(_) => "Io",
        }
    }

    /// Margin carried by stability and positivity failures.
    pub fn margin(&self) -> Option<f64> {
        match self {
            Error::Unstable { margin } | Error::NotPositive { margin } => Some(*margin),
            _ => None,
        }
    }
}
