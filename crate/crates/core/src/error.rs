use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),

    #[error("size mismatch: expected {expected} values, found {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("parameter `{name}` = {value} outside {expected}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("multiplier `{name}` is not finite at |ξ| = {at}")]
    NonFiniteSymbol {
        name: alloc::string::String,
        at: f64,
    },

    #[error("grid has {points} points, brute-force limit is {limit}")]
    GridTooLarge { points: usize, limit: usize },

    #[error("reference integrator failed: {0}")]
    IntegratorFailure(&'static str),

    #[error("t_end = {t_end} exceeds the box-validity horizon {horizon}")]
    HorizonViolation { t_end: f64, horizon: f64 },

    #[error("snapshot spacing {spacing} is too coarse (limit {limit})")]
    InsufficientDensity { spacing: f64, limit: f64 },

    #[error("trajectory does not carry state snapshots")]
    MissingStates,

    #[error("non-finite value encountered at t = {time}")]
    BlowUp { time: f64 },

    #[error("fit window [{lo}, {hi}] holds {samples} samples, need at least {required}")]
    FitWindow {
        lo: f64,
        hi: f64,
        samples: usize,
        required: usize,
    },

    #[error("norm is not positive at t = {time}")]
    NonPositiveNorm { time: f64 },

    #[error("no theoretical rate is attached to quantity `{0}`")]
    UnsupportedQuantity(&'static str),

    #[error("hypothesis max(a, b) > 1 fails for a = {a}, b = {b}")]
    HypothesisFailed { a: f64, b: f64 },
}

pub(crate) fn check_param(
    name: &'static str,
    value: f64,
    ok: bool,
    expected: &'static str,
) -> Result<()> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            expected,
        })
    }
}
