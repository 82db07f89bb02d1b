use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate spectrum: {0}; perturb the detunings or the initial state slightly")]
    DegenerateSpectrum(String),

    #[error("root finder did not converge after {iterations} iterations (residual {residual:e})")]
    RootsNotConverged {
        iterations: usize,
        residual: f64,
        best: Vec<num_complex::Complex64>,
    },

    #[error("series cannot reach the requested accuracy: truncation estimate {estimate:e} with {nterms} terms")]
    SeriesAccuracy { estimate: f64, nterms: usize },

    #[error("oracle norm drift {drift:e} at tau = {tau} exceeds {limit:e} (n_modes {n_modes}, u_max {u_max}, dt {dt})")]
    OracleDiverged {
        drift: f64,
        tau: f64,
        limit: f64,
        n_modes: usize,
        u_max: f64,
        dt: f64,
    },

    #[error("coherence undefined: mean populations {p1:e}, {p2:e}")]
    UndefinedCoherence { p1: f64, p2: f64 },
}
