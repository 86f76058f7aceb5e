use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid Gaussian state: {0}")]
    InvalidState(String),
    #[error("beamsplitter transmissivity {0} outside (0, 1]")]
    InvalidTransmissivity(f64),
    #[error("detection efficiency {0} outside (0, 1]")]
    InvalidEfficiency(f64),
    #[error("filter width must be positive and finite, got {0}")]
    InvalidFilter(f64),
    #[error("{what}: quadrature did not converge (estimate {estimate}, error {error})")]
    QuadratureNonConvergence { what: &'static str, estimate: f64, error: f64 },
    #[error("operator has no integrable characteristic function: {0}")]
    NonIntegrableOperator(String),
    #[error("kernel does not decay fast enough for Fock projection: {0}")]
    DivergentKernel(String),
    #[error("value {value} outside the tabulated range [{min}, {max}]")]
    InsufficientRange { value: f64, min: f64, max: f64 },
    #[error("at least 2 samples are needed, got {0}")]
    InsufficientSamples(usize),
    #[error("length mismatch: {left} coefficients vs {right} probabilities")]
    LengthMismatch { left: usize, right: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
