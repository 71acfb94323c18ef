//! Fisher information of parameter families from number-basis density
//! matrices, with a truncation convergence check.

use faer::Mat;
use qcrb_core::{Family, FisherMatrix, ParamFamily, StateParams};

use crate::error::{FockError, Result};
use crate::sld::fisher_matrix_fock;
use crate::state::{FockBuilder, C64};

/// Extra levels used to confirm that a result is truncation converged.
pub const CONVERGENCE_STEP: usize = 20;
/// Largest accepted change between `n_max` and `n_max + CONVERGENCE_STEP`,
/// relative to `max(1, |I|)`.
pub const CONVERGENCE_TOL: f64 = 1e-6;
/// Relative central-difference step for `∂ρ`.
pub const RELATIVE_STEP: f64 = 1e-4;

#[derive(Debug, Clone)]
pub struct FockFisher {
    pub matrix: FisherMatrix,
    /// Cutoff of the reported matrix.
    pub n_max: usize,
    /// Largest entry change against the smaller cutoff.
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockQfi {
    pub value: f64,
    pub n_max: usize,
    pub delta: f64,
}

/// Central-difference step for a family, kept inside its domain.
pub fn fock_step(f: &ParamFamily) -> f64 {
    let t = f.point();
    let h = RELATIVE_STEP * t.abs().max(1.0);
    match f.name() {
        Family::NTh | Family::Sigma2 if t > 0.0 => h.min(0.5 * t),
        Family::Purity => h.min(0.5 * (1.0 - t)).min(0.5 * t),
        Family::LossEta if t > 0.0 => h.min(0.5 * t).min(0.5 * (1.0 - t)),
        _ => h,
    }
}

/// Number-basis oracle with a reusable operator cache.
#[derive(Debug, Default)]
pub struct FockOracle {
    builder: FockBuilder,
}

impl FockOracle {
    pub fn new(builder: FockBuilder) -> Self {
        Self { builder }
    }

    pub fn builder(&mut self) -> &mut FockBuilder {
        &mut self.builder
    }

    /// Fisher matrices of several families through the same state, one per
    /// cutoff. Every cutoff is cut from the same working-space builds.
    pub fn fisher_nested(
        &mut self,
        families: &[ParamFamily],
        cutoffs: &[usize],
    ) -> Result<Vec<FisherMatrix>> {
        let first = families
            .first()
            .ok_or_else(|| qcrb_core::Error::Shape("no families given".into()))?;
        let rhos = self.builder.build_nested(&first.params()?, cutoffs)?;
        for rho in &rhos {
            if rho.tail_mass() > self.builder.tail_cap() {
                return Err(FockError::Truncation {
                    n_max: rho.n_max(),
                    tail: rho.tail_mass(),
                    cap: self.builder.tail_cap(),
                });
            }
        }
        let mut drhos: Vec<Vec<(String, Mat<C64>)>> = vec![Vec::new(); cutoffs.len()];
        for f in families {
            let h = fock_step(f);
            let plus = self
                .builder
                .build_nested(&f.params_at(f.point() + h)?, cutoffs)?;
            let minus = self
                .builder
                .build_nested(&f.params_at(f.point() - h)?, cutoffs)?;
            let inv = 1.0 / (2.0 * h);
            for (k, (p, m)) in plus.iter().zip(&minus).enumerate() {
                let d = Mat::from_fn(p.dim(), p.dim(), |i, j| {
                    (p.entries()[(i, j)] - m.entries()[(i, j)]) * inv
                });
                drhos[k].push((f.name().to_string(), d));
            }
        }
        rhos.iter()
            .zip(&drhos)
            .map(|(rho, d)| fisher_matrix_fock(rho, d))
            .collect()
    }

    /// Fisher matrix of several families through the same state at a fixed cutoff.
    pub fn fisher_at(&mut self, families: &[ParamFamily], n_max: usize) -> Result<FisherMatrix> {
        Ok(self.fisher_nested(families, &[n_max])?.remove(0))
    }

    /// Fisher matrix at the adaptive cutoff, confirmed against
    /// `n_max + CONVERGENCE_STEP`; the cutoff grows until the two agree.
    pub fn fisher(&mut self, families: &[ParamFamily]) -> Result<FockFisher> {
        let first = families
            .first()
            .ok_or_else(|| qcrb_core::Error::Shape("no families given".into()))?;
        let hard_cap = self.builder.hard_cap();
        let top = hard_cap.saturating_sub(CONVERGENCE_STEP);
        let mut n_max = self.builder.adaptive_cutoff(&first.params()?)?.min(top);
        loop {
            let next = n_max + CONVERGENCE_STEP;
            let mut pair = self.fisher_nested(families, &[n_max, next])?;
            let fine = pair.pop().expect("two cutoffs");
            let coarse = pair.pop().expect("two cutoffs");
            let p = fine.dim();
            let mut delta = 0.0f64;
            let mut scale = 1.0f64;
            for i in 0..p {
                for j in 0..p {
                    delta = delta.max((fine.get(i, j) - coarse.get(i, j)).abs());
                    scale = scale.max(fine.get(i, j).abs());
                }
            }
            if delta <= CONVERGENCE_TOL * scale {
                return Ok(FockFisher {
                    matrix: fine,
                    n_max: next,
                    delta,
                });
            }
            if n_max >= top {
                return Err(FockError::NotConverged {
                    n_max: next,
                    delta,
                    step: CONVERGENCE_STEP,
                });
            }
            n_max = (n_max + n_max / 4).min(top);
        }
    }

    /// Single-family Fisher information.
    pub fn family_qfi(&mut self, f: &ParamFamily) -> Result<FockQfi> {
        let r = self.fisher(std::slice::from_ref(f))?;
        Ok(FockQfi {
            value: r.matrix.get(0, 0),
            n_max: r.n_max,
            delta: r.delta,
        })
    }

    /// Fisher matrix over the given state-parameter axes at `base`.
    pub fn fisher_wrt(&mut self, base: &StateParams, axes: &[Family]) -> Result<FockFisher> {
        let families = axes
            .iter()
            .map(|&a| ParamFamily::at_base(a, *base))
            .collect::<qcrb_core::Result<Vec<_>>>()?;
        self.fisher(&families)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_amplitude() {
        let mut o = FockOracle::default();
        let f = ParamFamily::at_base(Family::Alpha, StateParams::default()).unwrap();
        let r = o.family_qfi(&f).unwrap();
        assert!((r.value - 4.0).abs() < 1e-7, "{r:?}");
    }

    #[test]
    fn constant_family_is_zero() {
        let mut o = FockOracle::default();
        let base = StateParams::new(0.5, 0.2, 0.3, 0.4, 0.5);
        let f = ParamFamily::at_base(Family::Constant, base).unwrap();
        let r = o.fisher(&[f, f]).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(r.matrix.get(i, j), 0.0);
            }
        }
    }

    #[test]
    fn five_parameter_matrix() {
        let base = StateParams::new(0.5, 0.2, 0.3, 0.4, 0.5);
        let mut o = FockOracle::default();
        let fock = o.fisher_wrt(&base, &Family::FIVE).unwrap();
        let (state, ds) = qcrb_core::derivatives_wrt(&base, &Family::FIVE).unwrap();
        let exact = qcrb_core::qfi_matrix(&state, &ds).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let scale = (exact.get(i, i) * exact.get(j, j)).sqrt();
                let diff = (fock.matrix.get(i, j) - exact.get(i, j)).abs();
                assert!(
                    diff <= 1e-4 * scale,
                    "({i}, {j}): {} vs {}",
                    fock.matrix.get(i, j),
                    exact.get(i, j)
                );
            }
        }
    }
}
