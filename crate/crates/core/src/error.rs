use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The requested quantity is not defined for these parameters
    /// (for example g² of an undriven atom).
    #[error("model undefined: {0}")]
    UndefinedModel(String),

    #[error("integrator step size underflow at t = {t:e} (non-finite or stiff input)")]
    StepSize { t: f64 },

    #[error("grid spacing {spacing:e} is coarser than the required {required:e}")]
    Resolution { spacing: f64, required: f64 },

    #[error("expected at least {needed} peaks, found {found}")]
    PeakFinding { needed: usize, found: usize },

    #[error("measured width {measured:e} does not exceed instrument width {instrument:e}")]
    NonPhysical { measured: f64, instrument: f64 },

    #[error("records are not sorted by (trial_id, t) at index {0}")]
    Unsorted(usize),

    #[error("degenerate fit: {0}")]
    FitDegenerate(String),

    #[error("singular curvature matrix (parameters not identifiable)")]
    SingularCurvature,

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
