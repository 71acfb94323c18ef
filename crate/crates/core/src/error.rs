use thiserror::Error;

/// Failures raised by state construction, fidelity and Fisher-information routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("covariance matrix violates the uncertainty principle (det = {det}, min eigenvalue = {min_eig})")]
    Unphysical { det: f64, min_eig: f64 },

    #[error("fidelity denominator degenerate ({0:e})")]
    DegenerateFidelity(f64),

    #[error("fidelity {0} exceeds 1 beyond rounding tolerance")]
    FidelityAboveOne(f64),

    #[error("covariance determinant {0:e} too small to invert")]
    SingularCovariance(f64),

    #[error("purity derivative {dp:e} is nonzero at the pure-state boundary (1 - P^4 = {gap:e})")]
    PurityBoundary { dp: f64, gap: f64 },

    #[error("supplied thermal-number derivative implies P' = {supplied}, covariance implies {derived}")]
    InconsistentDerivative { supplied: f64, derived: f64 },

    #[error("Fisher information {0:e} too small: parameter is not estimable")]
    ZeroInformation(f64),

    #[error("Fisher matrix is singular; unidentifiable combination: {combination}")]
    SingularFisher { combination: String },

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositiveSemidefinite(f64),

    #[error("matrix shape mismatch: {0}")]
    Shape(String),

    #[error("finite-difference step {h:e} too small: 1 - F = {deviation:e}")]
    StepTooSmall { h: f64, deviation: f64 },

    #[error("smoothness check failed: dF/de at 0 is {slope:e} (allowed {bound:e})")]
    SmoothnessViolation { slope: f64, bound: f64 },

    #[error("{0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite",
        })
    }
}
