use thiserror::Error;

/// Failures of the number-basis engine.
#[derive(Debug, Error)]
pub enum FockError {
    #[error(transparent)]
    Core(#[from] qcrb_core::Error),

    #[error("truncation at n_max = {n_max} leaves tail mass {tail:e} (cap {cap:e})")]
    Truncation { n_max: usize, tail: f64, cap: f64 },

    #[error("n_max = {n_max} outside the supported range [{min}, {max}]")]
    CutoffRange { n_max: usize, min: usize, max: usize },

    #[error("no convergence below n_max = {n_max}: results moved by {delta:e} over {step} extra levels")]
    NotConverged { n_max: usize, delta: f64, step: usize },

    #[error("density matrix has eigenvalue {0:e} below the tolerance")]
    NegativeEigenvalue(f64),

    #[error("dimension mismatch: {0} vs {1}")]
    Dimension(usize, usize),

    #[error("the two SLD forms of entry ({i}, {j}) disagree: {derivative_form} vs {anticommutator_form}")]
    SldForms {
        i: usize,
        j: usize,
        derivative_form: f64,
        anticommutator_form: f64,
    },

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),
}

pub type Result<T> = std::result::Result<T, FockError>;
