use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("partially clustered detunings (min gap {min_gap:e} below tolerance {tol:e}, spread {spread:e}); perturb or resample")]
    MixedDegeneracy { min_gap: f64, spread: f64, tol: f64 },

    #[error("detunings closer than degeneracy tolerance (min gap {min_gap:e}, tol {tol:e})")]
    DegenerateDetunings { min_gap: f64, tol: f64 },

    #[error("couplings differ across emitters; this formula needs a uniform coupling")]
    NonuniformCoupling,

    #[error("series has (near) zero constant term {c0:e}; no inverse")]
    SingularSeries { c0: f64 },

    #[error("grid spacing {spacing} too coarse (limit {limit})")]
    GridTooCoarse { spacing: f64, limit: f64 },

    #[error("finite centre-of-mass width is not supported; use mu = infinity")]
    FiniteMuUnsupported,

    #[error("adaptive quadrature did not converge (estimated error {error:e}, target {target:e})")]
    QuadratureNotConverged { error: f64, target: f64 },

    #[error("integration contour violates ordering rule: {0}")]
    ContourViolation(String),

    #[error("contour truncation did not converge (last change {change:e})")]
    TruncationNotConverged { change: f64 },

    #[error("detuning resampling gave up after {attempts} consecutive rejections")]
    ResampleLimitExceeded { attempts: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
