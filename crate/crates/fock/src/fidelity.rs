//! Uhlmann fidelity between truncated density matrices.

use faer::{Mat, Side};

use crate::error::{FockError, Result};
use crate::sld::{spectrum, NEGATIVE_TOL};
use crate::state::{hermitize, FockDensityMatrix, C64};

/// Fidelities above `1 + FIDELITY_TOL` are reported as errors.
pub const FIDELITY_TOL: f64 = 1e-9;

/// `F = (tr √(√ρ₁ ρ₂ √ρ₁))²`.
///
/// `√ρ₁` comes from the eigendecomposition of `ρ₁` with rounding-level
/// negative eigenvalues set to zero; the outer root uses the eigenvalues of
/// the Hermitian product.
pub fn uhlmann_fidelity(a: &FockDensityMatrix, b: &FockDensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(FockError::Dimension(a.dim(), b.dim()));
    }
    let spec = spectrum(a.entries())?;
    let v = &spec.vectors;
    let n = a.dim();
    let scaled: Mat<C64> = Mat::from_fn(n, n, |i, j| v[(i, j)] * spec.values[j].max(0.0).sqrt());
    let root = &scaled * v.adjoint();
    let inner = hermitize(&(&(&root * b.entries()) * &root));
    let mu = inner
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| FockError::Eigen(format!("{e:?}")))?;
    let lowest = mu.iter().copied().fold(f64::INFINITY, f64::min);
    if lowest < -NEGATIVE_TOL {
        return Err(FockError::NegativeEigenvalue(lowest));
    }
    let f = mu.iter().map(|m| m.max(0.0).sqrt()).sum::<f64>().powi(2);
    if f > 1.0 + FIDELITY_TOL {
        return Err(qcrb_core::Error::FidelityAboveOne(f).into());
    }
    Ok(f)
}
