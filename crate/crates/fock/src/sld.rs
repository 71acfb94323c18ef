//! Symmetric logarithmic derivatives and the number-basis Fisher matrix.

use faer::{Mat, Side};
use qcrb_core::FisherMatrix;

use crate::error::{FockError, Result};
use crate::state::{hermitize, FockDensityMatrix, C64};

/// Eigenvalues below this (times the largest) are treated as a null space.
pub const EIGEN_CUT: f64 = 1e-12;
/// Most negative eigenvalue accepted for a density matrix.
pub const NEGATIVE_TOL: f64 = 1e-10;
/// Allowed relative disagreement between `tr(∂ᵢρ Lⱼ)` and `½tr(ρ{Lᵢ, Lⱼ})`.
pub const FORM_TOL: f64 = 1e-8;

/// Spectral decomposition of a density matrix.
pub(crate) struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: Mat<C64>,
}

pub(crate) fn spectrum(m: &Mat<C64>) -> Result<Spectrum> {
    let evd = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| FockError::Eigen(format!("{e:?}")))?;
    let s = evd.S();
    let values: Vec<f64> = (0..m.nrows()).map(|i| s[i].re).collect();
    let vectors = evd.U().to_owned();
    let lowest = values.iter().copied().fold(f64::INFINITY, f64::min);
    if lowest < -NEGATIVE_TOL {
        return Err(FockError::NegativeEigenvalue(lowest));
    }
    Ok(Spectrum { values, vectors })
}

impl Spectrum {
    fn cut(&self) -> f64 {
        EIGEN_CUT * self.values.iter().copied().fold(0.0, f64::max)
    }

    /// `L = 2 Σ ⟨m|∂ρ|n⟩/(λₘ+λₙ) |m⟩⟨n|` over pairs with `λₘ+λₙ` above the cut,
    /// returned in the number basis.
    fn sld(&self, drho: &Mat<C64>) -> Mat<C64> {
        let v = &self.vectors;
        let x = &(v.adjoint() * drho) * v;
        let cut = self.cut();
        let l = Mat::from_fn(x.nrows(), x.ncols(), |m, n| {
            let denom = self.values[m] + self.values[n];
            if denom > cut {
                x[(m, n)] * (2.0 / denom)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        hermitize(&(&(v * &l) * v.adjoint()))
    }
}

fn check_dims(rho: &FockDensityMatrix, m: &Mat<C64>) -> Result<()> {
    if m.nrows() != rho.dim() || m.ncols() != rho.dim() {
        return Err(FockError::Dimension(rho.dim(), m.nrows()));
    }
    Ok(())
}

/// Symmetric logarithmic derivative solving `∂ρ = ½(ρL + Lρ)`.
pub fn sld(rho: &FockDensityMatrix, drho: &Mat<C64>) -> Result<Mat<C64>> {
    check_dims(rho, drho)?;
    Ok(spectrum(rho.entries())?.sld(drho))
}

/// `Re tr(A B)` without forming the product.
fn trace_product(a: &Mat<C64>, b: &Mat<C64>) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for j in 0..n {
        for i in 0..n {
            acc += (a[(i, j)] * b[(j, i)]).re;
        }
    }
    acc
}

/// Fisher matrix `Iᵢⱼ = tr(∂ᵢρ Lⱼ)`, checked entrywise against
/// `½ tr(ρ (LᵢLⱼ + LⱼLᵢ))`.
pub fn fisher_matrix_fock(
    rho: &FockDensityMatrix,
    drhos: &[(String, Mat<C64>)],
) -> Result<FisherMatrix> {
    for (_, d) in drhos {
        check_dims(rho, d)?;
    }
    let spec = spectrum(rho.entries())?;
    let slds: Vec<Mat<C64>> = drhos.iter().map(|(_, d)| spec.sld(d)).collect();
    let rho_l: Vec<Mat<C64>> = slds.iter().map(|l| rho.entries() * l).collect();

    let p = drhos.len();
    let mut entries = vec![vec![0.0; p]; p];
    for i in 0..p {
        for j in 0..p {
            entries[i][j] = trace_product(&drhos[i].1, &slds[j]);
        }
    }
    for i in 0..p {
        for j in i..p {
            // tr(ρ Lⱼ Lᵢ) is the conjugate of tr(ρ Lᵢ Lⱼ), so the symmetrized
            // form is the real part of either.
            let anti = trace_product(&rho_l[i], &slds[j]);
            let scale = (entries[i][i].abs() * entries[j][j].abs()).sqrt().max(1.0);
            if (anti - entries[i][j]).abs() > FORM_TOL * scale {
                return Err(FockError::SldForms {
                    i,
                    j,
                    derivative_form: entries[i][j],
                    anticommutator_form: anti,
                });
            }
        }
    }
    let labels = drhos.iter().map(|(l, _)| l.clone()).collect();
    Ok(FisherMatrix::new(labels, entries)?)
}
