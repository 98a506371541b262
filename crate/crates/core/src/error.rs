use thiserror::Error;

/// Errors raised by map construction, the solvers and the verification tools.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// `|b_1| >= 1`: no exterior conformal map of a bounded domain has this form.
    #[error("first Laurent coefficient |b1| = {0} must be < 1")]
    CoefficientTooLarge(f64),

    #[error("map is not injective: {0}")]
    NotInjective(String),

    #[error("point {re} + {im}i lies inside the closed unit disk")]
    InsideUnitDisk { re: f64, im: f64 },

    #[error("Newton inversion did not converge for z = {re} + {im}i")]
    InversionFailed { re: f64, im: f64 },

    /// `|b_Omega| > 2 - sqrt(3)`: the closed-form interface parameter turns negative.
    #[error("|b| = {0} outside the closed-form range [0, 2 - sqrt(3)]")]
    Inadmissible(f64),

    #[error("interface parameter is negative somewhere (gamma0 = {gamma0}, gamma2 = {gamma2})")]
    NegativeInterface { gamma0: f64, gamma2: f64 },

    #[error("calibration failed: {0}")]
    CalibrationFailed(String),

    #[error("boundary point at angle {0} is a corner; beta is unbounded there")]
    CornerPoint(f64),

    #[error("map has a corner; a corner-graded mesh is required")]
    GradingRequired,

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("ill-conditioned system (condition estimate {0:e})")]
    IllConditioned(f64),

    #[error("evaluation point is too close to the boundary (distance {distance:e}, minimum {minimum:e})")]
    TooClose { distance: f64, minimum: f64 },

    #[error("{0}")]
    Degenerate(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
