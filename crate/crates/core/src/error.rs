//! Error taxonomy shared by the solver crates.

/// Everything that can go wrong in the core solvers.
///
/// Variants are deliberately coarse: callers branch on the kind, humans read
/// the message.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Parameter gate for the stratified enhanced-dissipation regime failed
    /// (needs beta > 1/2 and max(nu,kappa)/min(nu,kappa) < 4 beta - 1,
    /// both strict).
    #[error("parameter gate failed: {reason}")]
    ParameterGate { reason: String },

    /// A mode was passed to an operation that cannot handle it
    /// (k = 0 where shear-driven machinery is required, l = 0 where the
    /// streak scaling is singular, or the excluded mean mode).
    #[error("degenerate mode (k = {k}, l = {l}): {reason}")]
    DegenerateMode { k: i32, l: i32, reason: String },

    /// The adaptive step controller drove the step below the hard floor.
    #[error("step size underflow at t = {t}: proposed h = {h}")]
    StepSizeUnderflow { t: f64, h: f64 },

    /// A diagnostic needs more (or more evenly spaced) samples than the
    /// trajectory carries.
    #[error("insufficient sampling: {reason}")]
    InsufficientSampling { reason: String },

    /// Conjugate-symmetry validation of initial data failed.
    #[error("symmetry violation: {reason}")]
    SymmetryViolation { reason: String },

    /// Quadrature could not reach the requested accuracy, or the grid
    /// truncates the data.
    #[error("quadrature error: {reason}")]
    Quadrature { reason: String },

    /// A config or function input failed validation. `field` names the
    /// offending entry.
    #[error("invalid {field}: {reason}")]
    Validation { field: String, reason: String },

    /// Config text could not be parsed. Line numbers are 1-based.
    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

impl Error {
    pub(crate) fn validation(field: &str, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.to_string(),
            reason: reason.into(),
        }
    }
}

pub type Result<V> = core::result::Result<V, Error>;
