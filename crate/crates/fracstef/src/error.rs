use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("sample length {got} does not match grid ({want} nodes)")]
    LengthMismatch { got: usize, want: usize },

    #[error("quadrature did not reach tolerance {tol:e} on [{a}, {b}] (error estimate {err:e})")]
    QuadratureFailure { a: f64, b: f64, tol: f64, err: f64 },

    #[error("series did not converge after {terms} terms (z = {z})")]
    SeriesNonConvergence { terms: usize, z: f64 },

    #[error("root bracket failure after {widenings} widenings on [0, {hi}]")]
    BracketFailure { widenings: usize, hi: f64 },

    #[error("CFL violation at t = {t}: Courant number {nu:.3} exceeds {max:.3} (s = {s:.4}, s_dot = {s_dot:.4})")]
    CflViolation { t: f64, nu: f64, max: f64, s: f64, s_dot: f64 },

    #[error("implicit system is numerically singular at t = {t} (pivot {pivot:e})")]
    SingularSystem { t: f64, pivot: f64 },

    #[error("front stagnated for {window} steps after t = {t} with nontrivial data")]
    FrontStagnation { t: f64, window: usize },

    #[error("fixed-point iteration did not converge in {iters} iterations (last update {last:e})")]
    FixedPointNonConvergence { iters: usize, last: f64 },

    #[error("front ordering violated by {violation:e} at t = {t} between members b = {b_hi} and b = {b_lo}")]
    OrderingViolation { t: f64, violation: f64, b_hi: f64, b_lo: f64 },

    #[error("artifact format error: {0}")]
    ArtifactFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
