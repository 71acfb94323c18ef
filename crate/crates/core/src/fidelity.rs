//! Closed-form Uhlmann fidelity and Bures distance between single-mode Gaussian states.

use crate::error::{Error, Result};
use crate::gaussian::GaussianState;

/// Fidelities this far above 1 are treated as rounding and clamped.
pub const FIDELITY_CLAMP_TOL: f64 = 1e-9;

const MIN_SUM_DET: f64 = 1e-200;
const MIN_DENOMINATOR: f64 = 1e-300;

/// `F(ρ₁, ρ₂) = (tr √(√ρ₁ ρ₂ √ρ₁))²` for two Gaussian states.
///
/// With `Δ = det(Σ₁+Σ₂)` and `δ = (|Σ₁|−1)(|Σ₂|−1)` this is
/// `2 exp(−½ ΔXᵀ(Σ₁+Σ₂)⁻¹ΔX) / (√(Δ+δ) − √δ)`. The denominator is evaluated
/// as `Δ / (√(Δ+δ) + √δ)` so nearly identical mixed states do not cancel.
pub fn fidelity(a: &GaussianState, b: &GaussianState) -> Result<f64> {
    let sum = a.cov().add(&b.cov());
    let sum_det = sum.det();
    if !(sum_det >= MIN_SUM_DET) {
        return Err(Error::SingularCovariance(sum_det));
    }
    let dx = a.mean().sub(b.mean());
    let exponent = -0.5 * sum.inverse().bilinear(dx, dx);

    // Both determinants are ≥ 1 for physical states; rounding can push a pure
    // state's determinant a hair below.
    let delta = ((a.cov().det() - 1.0) * (b.cov().det() - 1.0)).max(0.0);
    let root_delta = delta.sqrt();
    let denominator = sum_det / ((sum_det + delta).sqrt() + root_delta);
    if !(denominator >= MIN_DENOMINATOR) {
        return Err(Error::DegenerateFidelity(denominator));
    }

    let f = 2.0 * exponent.exp() / denominator;
    if f > 1.0 + FIDELITY_CLAMP_TOL || !f.is_finite() {
        return Err(Error::FidelityAboveOne(f));
    }
    Ok(f.min(1.0))
}

/// `d_B = √2 · √(1 − √F)`.
pub fn bures_distance(a: &GaussianState, b: &GaussianState) -> Result<f64> {
    Ok(bures_from_fidelity(fidelity(a, b)?))
}

pub(crate) fn bures_from_fidelity(f: f64) -> f64 {
    // 1 − √F written as (1 − F)/(1 + √F) keeps precision for F near 1.
    let gap = (1.0 - f) / (1.0 + f.sqrt());
    (2.0 * gap).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{from_params, CovMat, QuadVec, StateParams};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn coherent(x: f64, p: f64) -> GaussianState {
        GaussianState::new(QuadVec::new(x, p), CovMat::IDENTITY).unwrap()
    }

    #[test]
    fn identical_states_have_unit_fidelity() {
        for p in [
            StateParams::default(),
            StateParams::new(1.0, 0.3, 0.5, 0.7, 0.5),
            StateParams::new(2.0, -1.0, -1.2, 0.1, 4.0),
        ] {
            let s = from_params(&p).unwrap();
            assert_relative_eq!(fidelity(&s, &s).unwrap(), 1.0, epsilon = 1e-13);
            assert!(bures_distance(&s, &s).unwrap() < 1e-6);
        }
    }

    #[test]
    fn coherent_pair() {
        // |<0|α=1>|² = e^{-1}
        let f = fidelity(&coherent(0.0, 0.0), &coherent(2.0, 0.0)).unwrap();
        assert_relative_eq!(f, (-1.0f64).exp(), max_relative = 1e-15);
        let d = bures_distance(&coherent(0.0, 0.0), &coherent(2.0, 0.0)).unwrap();
        assert_relative_eq!(d, (2.0 - 2.0 * (-0.5f64).exp()).sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn thermal_versus_vacuum() {
        // For a thermal state ν(n) the only overlap with |0> is p0 = 1/(n+1).
        let th = from_params(&StateParams::new(0.0, 0.0, 0.0, 0.0, 1.0)).unwrap();
        let f = fidelity(&th, &GaussianState::vacuum()).unwrap();
        assert_relative_eq!(f, 0.5, max_relative = 1e-15);
    }

    #[test]
    fn far_apart_states_reach_sqrt2() {
        // |Δα|² = 50 → F = e^{-50}
        let d = bures_distance(&coherent(0.0, 0.0), &coherent(2.0 * 50f64.sqrt(), 0.0)).unwrap();
        assert!((d - 2f64.sqrt()).abs() < 1e-9);
        assert!(d < 2f64.sqrt());
    }

    #[test]
    fn pure_boundary_is_continuous() {
        // One pure state (|Σ| = 1 exactly) against mixed states approaching purity.
        let pure = from_params(&StateParams::new(0.4, 0.2, 0.3, 0.1, 0.0)).unwrap();
        let at = |n: f64| {
            let s = from_params(&StateParams::new(0.45, 0.2, 0.3, 0.1, n)).unwrap();
            fidelity(&pure, &s).unwrap()
        };
        let f0 = at(0.0);
        for n in [1e-4, 1e-6, 1e-8, 1e-10] {
            assert!((at(n) - f0).abs() < 10.0 * n, "n = {n}");
        }
    }

    fn params() -> impl Strategy<Value = StateParams> {
        (0.0..3.0f64, -7.0..7.0f64, -1.5..1.5f64, -7.0..7.0f64, 0.0..4.0f64)
            .prop_map(|(a, psi, r, chi, n)| StateParams::new(a, psi, r, chi, n))
    }

    proptest! {
        #[test]
        fn symmetric_and_bounded(p in params(), q in params()) {
            let a = from_params(&p).unwrap();
            let b = from_params(&q).unwrap();
            let fab = fidelity(&a, &b).unwrap();
            let fba = fidelity(&b, &a).unwrap();
            prop_assert!((fab - fba).abs() <= 1e-14 * fab.max(1e-300));
            prop_assert!((0.0..=1.0).contains(&fab));
            let d = bures_distance(&a, &b).unwrap();
            prop_assert!((0.0..=2f64.sqrt()).contains(&d));
        }

        #[test]
        fn invariant_under_common_displacement_and_rotation(
            p in params(), q in params(), shift in -3.0..3.0f64, phi in -3.0..3.0f64
        ) {
            let a = from_params(&p).unwrap();
            let b = from_params(&q).unwrap();
            let moved = |pp: &StateParams| {
                let mut pp = *pp;
                pp.psi += phi;
                let s = from_params(&pp).unwrap();
                GaussianState::new(s.mean().add(QuadVec::new(shift, -0.5 * shift)), s.cov()).unwrap()
            };
            let f = fidelity(&a, &b).unwrap();
            let g = fidelity(&moved(&p), &moved(&q)).unwrap();
            prop_assert!((f - g).abs() <= 1e-12 * f.max(1e-3), "{} vs {}", f, g);
        }
    }
}
