use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Domain(String),

    #[error("quadrature did not converge after {subdivisions} subdivisions (estimate {estimate:e}, error {error:e})")]
    NonConvergence {
        subdivisions: usize,
        estimate: f64,
        error: f64,
    },

    #[error("iteration did not converge within {iterations} steps (last |f| = {residual:e})")]
    IterationLimit { iterations: usize, residual: f64 },

    #[error("non-finite value encountered at x = {at}")]
    NonFinite { at: f64 },

    #[error("pole {pole} lies outside the open interval ({a}, {b})")]
    PoleOutsideInterval { pole: f64, a: f64, b: f64 },

    #[error("no sign change on bracket [{a}, {b}]")]
    NoSignChange { a: f64, b: f64 },

    #[error("derivative vanished at z = {re} + {im}i")]
    DerivativeVanished { re: f64, im: f64 },

    #[error("singular 2x2 system (|det| = {det_abs:e})")]
    SingularMatrix { det_abs: f64 },

    #[error("t0 = {re} + {im}i is off the principal branch of the loop integral")]
    Branch { re: f64, im: f64 },

    #[error("two-body amplitude pole at t0 = {t0} (|1 + lambda I| = {denom_abs:e})")]
    EtaPole { t0: f64, denom_abs: f64 },

    #[error("no pair pole found for lambda = {lambda}")]
    NoPoleFound { lambda: f64 },

    #[error("three-body resonance singularity at t0 = {t0}, rho = {rho} (|det| = {det_abs:e})")]
    ResonanceSingularity { t0: f64, rho: f64, det_abs: f64 },

    #[error("singular points on the t0 integration path: {t0:?}")]
    SingularPath { t0: Vec<f64> },

    #[error("diagonal of an exchange structure must vanish identically")]
    NonZeroDiagonal,
}
