//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("quadrature failed to converge: {context} (error estimate {err_est:.3e}, requested {requested:.3e})")]
    QuadratureNonConvergence {
        context: String,
        err_est: f64,
        requested: f64,
    },

    #[error("nearly degenerate resolvent roots (min separation {separation:.3e}); the partial-fraction basis is ill-conditioned here")]
    DegenerateRoots { separation: f64 },

    #[error("numeric instability: {0}")]
    Numeric(String),

    #[error("no plateau: {quantity} still changing by {rel_change:.3e} at t = {t_max:.3} (tolerance {tol:.1e})")]
    NoPlateau {
        quantity: String,
        rel_change: f64,
        t_max: f64,
        tol: f64,
    },

    #[error("structural error in rate construction: {0}")]
    Structural(String),

    #[error("integration diverged at step {step} (t = {t:.6})")]
    IntegrationDiverged { step: usize, t: f64 },

    #[error("rate estimate unavailable: {0}")]
    EstimateUnavailable(String),
}
