use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("field length {got} does not match grid size {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("grid does not resolve the Raman band: Nyquist {nyquist:.3} < component centre {center:.3}")]
    UnresolvedRamanBand { nyquist: f64, center: f64 },

    #[error("thermal occupation is singular at zero frequency")]
    ZeroFrequency,

    #[error("negative fluorescence {value:e} at frequency {omega:.4}")]
    NegativeFluorescence { omega: f64, value: f64 },

    #[error("soliton window too narrow: edge amplitude {edge:e} exceeds {limit:e}")]
    WindowTooNarrow { edge: f64, limit: f64 },

    #[error("non-finite field at zeta = {zeta:.5} (trajectory seed {seed:#018x})")]
    NonFinite { zeta: f64, seed: u64 },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("snapshot grids do not match: {0}")]
    SnapshotMismatch(String),

    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }
}
