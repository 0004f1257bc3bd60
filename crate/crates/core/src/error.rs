use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("insufficient samples: need at least {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("unsupported observable `{label}`: {reason}")]
    UnsupportedObservable { label: String, reason: &'static str },

    #[error("centroid trajectory left the tabulated range [{min}, {max}] at q = {q}")]
    GridEscape { q: f64, min: f64, max: f64 },

    #[error("time grid too coarse: dt * omega = {0} exceeds 0.2")]
    GridTooCoarse(f64),

    #[error("eigenstate {state} leaks to the grid boundary (amplitude {amplitude:e})")]
    BoundaryLeak { state: usize, amplitude: f64 },

    #[error("retained spectrum incomplete at this temperature: weight of last state {0:e}")]
    SpectralIncomplete(f64),

    #[error("spectral correlator has imaginary residue {0:e}")]
    ImaginaryResidue(f64),

    #[error("adaptive quadrature did not reach tolerance (estimated error {0:e})")]
    QuadratureFailure(f64),

    #[error("config error at line {line}, column {column}: {message}")]
    Config {
        line: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

/// Non-fatal diagnostics attached to ensembles and tables and mirrored into
/// run metadata.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum Warning {
    /// Post-burn-in acceptance rate outside [0.05, 0.95].
    NonErgodic { acceptance: f64, context: String },
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Warning::NonErgodic {
                acceptance,
                context,
            } => write!(
                f,
                "non-ergodic sampling ({context}): acceptance rate {acceptance:.3}"
            ),
        }
    }
}
