use thiserror::Error;

/// Errors raised by the numeric kernel, the distribution families and the fitting layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("integration did not converge within {subdivisions} subdivisions: estimate {estimate:e}, error {error:e}")]
    Integration {
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },

    #[error("invalid bracket [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    Bracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("optimization failed: {0}")]
    Optimization(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("moment of order {order} is undefined for nu = {nu}")]
    MomentUndefined { order: u32, nu: f64 },

    #[error("invalid data: {0}")]
    Data(String),

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("hazard overflow at t = {t}: survival is numerically zero (last finite hazard {last_finite})")]
    HazardOverflow { t: f64, last_finite: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
