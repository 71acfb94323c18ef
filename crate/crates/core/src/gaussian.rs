//! Single-mode Gaussian states in quadrature phase space.
//!
//! Units are fixed to ħ = 2 throughout: the vacuum has identity covariance and
//! the quadratures are `x = a† + a`, `p = i(a† − a)`. A state is fully described
//! by its mean quadrature vector and its symmetric 2×2 covariance matrix.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{check_finite, Error, Result};

/// Default tolerance on `det Σ ≥ 1 − tol` when checking the uncertainty principle.
pub const DEFAULT_PHYS_TOL: f64 = 1e-9;

/// Mean quadrature vector `(x, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct QuadVec {
    pub x: f64,
    pub p: f64,
}

impl QuadVec {
    pub const ZERO: QuadVec = QuadVec { x: 0.0, p: 0.0 };

    pub fn new(x: f64, p: f64) -> Self {
        Self { x, p }
    }

    pub fn scale(self, k: f64) -> Self {
        Self::new(k * self.x, k * self.p)
    }

    pub fn sub(self, other: Self) -> Self {
        Self::new(self.x - other.x, self.p - other.p)
    }

    pub fn add(self, other: Self) -> Self {
        Self::new(self.x + other.x, self.p + other.p)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.p.is_finite()
    }
}

/// Symmetric 2×2 covariance matrix; the off-diagonal is stored once.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovMat {
    pub xx: f64,
    pub xp: f64,
    pub pp: f64,
}

impl CovMat {
    pub const IDENTITY: CovMat = CovMat {
        xx: 1.0,
        xp: 0.0,
        pp: 1.0,
    };
    pub const ZERO: CovMat = CovMat {
        xx: 0.0,
        xp: 0.0,
        pp: 0.0,
    };

    pub fn new(xx: f64, xp: f64, pp: f64) -> Self {
        Self { xx, xp, pp }
    }

    pub fn diag(xx: f64, pp: f64) -> Self {
        Self::new(xx, 0.0, pp)
    }

    pub fn det(&self) -> f64 {
        self.xx * self.pp - self.xp * self.xp
    }

    pub fn trace(&self) -> f64 {
        self.xx + self.pp
    }

    pub fn scale(&self, k: f64) -> Self {
        Self::new(k * self.xx, k * self.xp, k * self.pp)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.xx + other.xx, self.xp + other.xp, self.pp + other.pp)
    }

    /// Inverse by the adjugate formula. Caller guarantees a nonzero determinant.
    pub fn inverse(&self) -> Self {
        let d = self.det();
        Self::new(self.pp / d, -self.xp / d, self.xx / d)
    }

    pub fn apply(&self, v: QuadVec) -> QuadVec {
        QuadVec::new(self.xx * v.x + self.xp * v.p, self.xp * v.x + self.pp * v.p)
    }

    /// `uᵀ C v`.
    pub fn bilinear(&self, u: QuadVec, v: QuadVec) -> f64 {
        let cv = self.apply(v);
        u.x * cv.x + u.p * cv.p
    }

    /// Eigenvalues `(min, max)`.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let half_tr = 0.5 * self.trace();
        let half_diff = 0.5 * (self.xx - self.pp);
        let rad = half_diff.hypot(self.xp);
        (half_tr - rad, half_tr + rad)
    }

    pub fn is_finite(&self) -> bool {
        self.xx.is_finite() && self.xp.is_finite() && self.pp.is_finite()
    }

    pub fn as_array(&self) -> [[f64; 2]; 2] {
        [[self.xx, self.xp], [self.xp, self.pp]]
    }
}

/// True iff `c` is positive definite and satisfies `det c ≥ 1 − tol`.
pub fn is_physical(c: &CovMat, tol: f64) -> bool {
    c.is_finite() && c.xx > 0.0 && c.det() > 0.0 && c.det() >= 1.0 - tol
}

/// A single-mode Gaussian state. Construction validates physicality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FlatState", into = "FlatState")]
pub struct GaussianState {
    mean: QuadVec,
    cov: CovMat,
}

impl GaussianState {
    pub fn new(mean: QuadVec, cov: CovMat) -> Result<Self> {
        Self::with_tolerance(mean, cov, DEFAULT_PHYS_TOL)
    }

    pub fn with_tolerance(mean: QuadVec, cov: CovMat, tol: f64) -> Result<Self> {
        if !mean.is_finite() {
            return Err(Error::InvalidParameter {
                name: "mean",
                value: if mean.x.is_finite() { mean.p } else { mean.x },
                reason: "must be finite",
            });
        }
        if !is_physical(&cov, tol) {
            return Err(Error::Unphysical {
                det: cov.det(),
                min_eig: cov.eigenvalues().0,
            });
        }
        Ok(Self { mean, cov })
    }

    pub fn vacuum() -> Self {
        Self {
            mean: QuadVec::ZERO,
            cov: CovMat::IDENTITY,
        }
    }

    pub fn mean(&self) -> QuadVec {
        self.mean
    }

    pub fn cov(&self) -> CovMat {
        self.cov
    }

    pub fn purity(&self) -> f64 {
        purity(self)
    }
}

/// Flat JSON layout: `{"mean_x","mean_p","cov_xx","cov_xp","cov_pp"}`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FlatState {
    mean_x: f64,
    mean_p: f64,
    cov_xx: f64,
    cov_xp: f64,
    cov_pp: f64,
}

impl From<GaussianState> for FlatState {
    fn from(s: GaussianState) -> Self {
        Self {
            mean_x: s.mean.x,
            mean_p: s.mean.p,
            cov_xx: s.cov.xx,
            cov_xp: s.cov.xp,
            cov_pp: s.cov.pp,
        }
    }
}

impl TryFrom<FlatState> for GaussianState {
    type Error = Error;

    fn try_from(f: FlatState) -> Result<Self> {
        GaussianState::new(
            QuadVec::new(f.mean_x, f.mean_p),
            CovMat::new(f.cov_xx, f.cov_xp, f.cov_pp),
        )
    }
}

/// Physical parameters of a squeezed displaced thermal state
/// `ρ = R(ψ) D(α) S(r, χ) ν(n_th) S† D† R†`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StateParams {
    /// Displacement amplitude, `α ≥ 0`.
    pub alpha: f64,
    /// Rotation phase.
    pub psi: f64,
    /// Squeezing magnitude; `σ = e^{−r}`.
    pub r: f64,
    /// Squeezing direction.
    pub chi: f64,
    /// Thermal photon number of the core state, `n_th ≥ 0`.
    pub n_th: f64,
}

impl StateParams {
    pub fn new(alpha: f64, psi: f64, r: f64, chi: f64, n_th: f64) -> Self {
        Self {
            alpha,
            psi,
            r,
            chi,
            n_th,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_finite("alpha", self.alpha)?;
        check_finite("psi", self.psi)?;
        check_finite("r", self.r)?;
        check_finite("chi", self.chi)?;
        check_finite("n_th", self.n_th)?;
        if self.alpha < 0.0 {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: self.alpha,
                reason: "must be non-negative",
            });
        }
        if self.n_th < 0.0 {
            return Err(Error::InvalidParameter {
                name: "n_th",
                value: self.n_th,
                reason: "must be non-negative",
            });
        }
        Ok(())
    }

    pub fn sigma(&self) -> f64 {
        (-self.r).exp()
    }

    pub fn sigma2(&self) -> f64 {
        (-2.0 * self.r).exp()
    }

    /// Sets the squeezing through `σ = e^{−r}`.
    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.r = -sigma.ln();
        self
    }

    /// Purity of the thermal core, `P₀ = 1/(2 n_th + 1)`.
    pub fn purity0(&self) -> f64 {
        1.0 / (2.0 * self.n_th + 1.0)
    }
}

/// Builds the Gaussian state for the given physical parameters.
///
/// The mean is `2α(cos ψ, sin ψ)` and the covariance is the squeezed thermal
/// ellipse `(2n_th+1)·diag(σ², σ⁻²)` rotated by `χ + ψ`.
pub fn from_params(p: &StateParams) -> Result<GaussianState> {
    p.validate()?;
    let mean = QuadVec::new(
        2.0 * p.alpha * p.psi.cos(),
        2.0 * p.alpha * p.psi.sin(),
    );
    let cov = rotated_ellipse(2.0 * p.n_th + 1.0, p.sigma2(), p.chi + p.psi);
    GaussianState::new(mean, cov)
}

/// `k · R(φ) diag(s2, 1/s2) R(φ)ᵀ`.
pub(crate) fn rotated_ellipse(k: f64, s2: f64, phi: f64) -> CovMat {
    let (s, c) = phi.sin_cos();
    let a = s2;
    let b = 1.0 / s2;
    CovMat::new(
        k * (a * c * c + b * s * s),
        k * (a - b) * s * c,
        k * (a * s * s + b * c * c),
    )
}

/// `tr ρ² = (det Σ)^{−1/2}`.
pub fn purity(s: &GaussianState) -> f64 {
    1.0 / s.cov.det().sqrt()
}

/// Wigner function of the state at a phase-space point.
pub fn wigner(s: &GaussianState, point: QuadVec) -> f64 {
    let d = point.sub(s.mean);
    let det = s.cov.det();
    let q = s.cov.inverse().bilinear(d, d);
    (-0.5 * q).exp() / (2.0 * PI * det.sqrt())
}

fn check_eta(eta: f64) -> Result<f64> {
    check_finite("eta", eta)?;
    if !(0.0..1.0).contains(&eta) {
        return Err(Error::InvalidParameter {
            name: "eta",
            value: eta,
            reason: "attenuation must lie in [0, 1)",
        });
    }
    Ok(eta)
}

/// The amplitude-squeezed input of the loss model: real amplitude `α₀`,
/// variance `σ²` in the amplitude quadrature, `ψ = χ = 0`, pure.
pub fn loss_input(alpha0: f64, sigma: f64) -> Result<GaussianState> {
    check_finite("alpha0", alpha0)?;
    check_finite("sigma", sigma)?;
    if alpha0 < 0.0 {
        return Err(Error::InvalidParameter {
            name: "alpha0",
            value: alpha0,
            reason: "must be non-negative",
        });
    }
    if sigma <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "sigma",
            value: sigma,
            reason: "must be positive",
        });
    }
    let s2 = sigma * sigma;
    GaussianState::new(QuadVec::new(2.0 * alpha0, 0.0), CovMat::diag(s2, 1.0 / s2))
}

/// Attenuation by `η` of an amplitude-squeezed real-amplitude state
/// (as produced by [`loss_input`]).
///
/// Returns amplitude `√(1−η)·α₀` and covariance
/// `diag(σ² + η(1−σ²), 1/σ² + η(1−1/σ²))`. Inputs of any other shape are
/// rejected; use [`apply_loss_general`] for those.
pub fn apply_loss(s0: &GaussianState, eta: f64) -> Result<GaussianState> {
    let eta = check_eta(eta)?;
    let m = s0.mean();
    let c = s0.cov();
    let scale = 1.0 + m.x.abs();
    if m.p.abs() > 1e-12 * scale || c.xp.abs() > 1e-12 * c.trace() || (c.det() - 1.0).abs() > 1e-9
    {
        return Err(Error::Domain(
            "apply_loss expects a pure amplitude-squeezed state with real amplitude (psi = chi = 0, n_th = 0)"
                .into(),
        ));
    }
    let s2 = c.xx;
    let inv_s2 = 1.0 / s2;
    let t = (1.0 - eta).sqrt();
    let cov = CovMat::diag(s2 + eta * (1.0 - s2), inv_s2 + eta * (1.0 - inv_s2));
    GaussianState::new(QuadVec::new(t * m.x, 0.0), cov)
}

/// Pure-loss channel on an arbitrary state: `Σ → (1−η)Σ + η·I`, mean scaled by `√(1−η)`.
pub fn apply_loss_general(s: &GaussianState, eta: f64) -> Result<GaussianState> {
    let eta = check_eta(eta)?;
    let cov = s
        .cov()
        .scale(1.0 - eta)
        .add(&CovMat::IDENTITY.scale(eta));
    GaussianState::new(s.mean().scale((1.0 - eta).sqrt()), cov)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    /// Scalar transcription of the general covariance matrix, written out
    /// entry by entry instead of as a rotated ellipse.
    fn cov_scalar(p: &StateParams) -> (f64, f64, f64) {
        let k = 2.0 * p.n_th + 1.0;
        let s2 = (-2.0 * p.r).exp();
        let ph = p.chi + p.psi;
        let xx = k * (s2 * ph.cos().powi(2) + ph.sin().powi(2) / s2);
        let xp = k * 0.5 * (s2 - 1.0 / s2) * (2.0 * p.chi + 2.0 * p.psi).sin();
        let pp = k * (ph.cos().powi(2) / s2 + s2 * ph.sin().powi(2));
        (xx, xp, pp)
    }

    #[test]
    fn vacuum_from_default_params() {
        let s = from_params(&StateParams::default()).unwrap();
        assert_eq!(s.mean(), QuadVec::ZERO);
        assert_eq!(s.cov(), CovMat::IDENTITY);
        assert_eq!(purity(&s), 1.0);
    }

    #[test]
    fn thermal_state_has_purity_one_third() {
        let s = from_params(&StateParams::new(0.0, 0.0, 0.0, 0.0, 1.0)).unwrap();
        assert_eq!(s.cov(), CovMat::IDENTITY.scale(3.0));
        assert_relative_eq!(purity(&s), 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn displacement_along_p() {
        let s = from_params(&StateParams::new(1.0, PI / 2.0, 0.0, 0.0, 0.0)).unwrap();
        assert!(s.mean().x.abs() < 1e-15);
        assert_relative_eq!(s.mean().p, 2.0);
        assert_relative_eq!(s.cov().xx, 1.0, epsilon = 1e-15);
        assert!(s.cov().xp.abs() < 1e-15);
    }

    #[test]
    fn squeezed_pure_state_is_pure() {
        for r in [-1.5, -0.3, 0.2, 1.0, 2.5] {
            let s = from_params(&StateParams::new(0.7, 0.4, r, 1.1, 0.0)).unwrap();
            assert_relative_eq!(purity(&s), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn rejects_bad_params() {
        assert!(from_params(&StateParams::new(-0.1, 0.0, 0.0, 0.0, 0.0)).is_err());
        assert!(from_params(&StateParams::new(0.0, 0.0, 0.0, 0.0, -1.0)).is_err());
        assert!(from_params(&StateParams::new(f64::NAN, 0.0, 0.0, 0.0, 0.0)).is_err());
        assert!(from_params(&StateParams::new(0.0, 0.0, f64::INFINITY, 0.0, 0.0)).is_err());
    }

    #[test]
    fn physicality_checks() {
        assert!(is_physical(&CovMat::IDENTITY, 1e-12));
        assert!(!is_physical(&CovMat::diag(0.5, 0.5), 1e-12));
        assert!(!is_physical(&CovMat::diag(-2.0, -2.0), 1e-12));
        assert!(!is_physical(&CovMat::new(1.0, 2.0, 1.0), 1e-12));
        assert!(GaussianState::new(QuadVec::ZERO, CovMat::diag(0.5, 0.5)).is_err());
    }

    #[test]
    fn wigner_point_values() {
        let v = GaussianState::vacuum();
        assert_relative_eq!(wigner(&v, QuadVec::ZERO), 1.0 / (2.0 * PI));
        assert_relative_eq!(
            wigner(&v, QuadVec::new(2.0, 0.0)),
            (-2.0f64).exp() / (2.0 * PI),
            max_relative = 1e-15
        );
        let s = from_params(&StateParams::new(1.2, 0.3, 0.4, -0.2, 0.8)).unwrap();
        assert_relative_eq!(
            wigner(&s, s.mean()),
            1.0 / (2.0 * PI * s.cov().det().sqrt()),
            max_relative = 1e-14
        );
    }

    #[test]
    fn wigner_integrates_to_one() {
        let s = from_params(&StateParams::new(0.5, 0.9, 0.6, 0.3, 0.4)).unwrap();
        let c = s.cov();
        let (sx, sp) = (c.xx.sqrt(), c.pp.sqrt());
        let n = 800;
        let (hx, hp) = (16.0 * sx / n as f64, 16.0 * sp / n as f64);
        let mut total = 0.0;
        for i in 0..=n {
            for j in 0..=n {
                let x = s.mean().x - 8.0 * sx + i as f64 * hx;
                let p = s.mean().p - 8.0 * sp + j as f64 * hp;
                let wx = if i == 0 || i == n { 0.5 } else { 1.0 };
                let wp = if j == 0 || j == n { 0.5 } else { 1.0 };
                total += wx * wp * wigner(&s, QuadVec::new(x, p));
            }
        }
        total *= hx * hp;
        assert!((total - 1.0).abs() < 1e-6, "integral {total}");
    }

    #[test]
    fn loss_examples() {
        let s0 = loss_input(1.3, 0.6).unwrap();
        assert_eq!(apply_loss(&s0, 0.0).unwrap(), s0);

        let s = apply_loss(&loss_input(2.0, 1.0).unwrap(), 0.5).unwrap();
        assert_relative_eq!(s.mean().x, 2.0 * 2f64.sqrt(), max_relative = 1e-15);
        assert_eq!(s.mean().p, 0.0);
        assert_relative_eq!(s.cov().xx, 1.0);
        assert_relative_eq!(s.cov().pp, 1.0);

        let near = apply_loss(&s0, 1.0 - 1e-12).unwrap();
        assert!(near.mean().x.abs() < 1e-5);
        assert_relative_eq!(near.cov().xx, 1.0, epsilon = 1e-10);
        assert_relative_eq!(near.cov().pp, 1.0, epsilon = 1e-10);

        assert!(apply_loss(&s0, 1.0).is_err());
        assert!(apply_loss(&s0, -0.1).is_err());
        let rotated = from_params(&StateParams::new(1.0, 0.5, 0.3, 0.0, 0.0)).unwrap();
        assert!(apply_loss(&rotated, 0.3).is_err());
    }

    #[test]
    fn loss_matches_general_channel_on_its_domain() {
        let s0 = loss_input(0.9, 1.7).unwrap();
        for eta in [0.05, 0.3, 0.77] {
            let a = apply_loss(&s0, eta).unwrap();
            let b = apply_loss_general(&s0, eta).unwrap();
            assert_relative_eq!(a.cov().xx, b.cov().xx, max_relative = 1e-14);
            assert_relative_eq!(a.cov().pp, b.cov().pp, max_relative = 1e-14);
            assert_relative_eq!(a.mean().x, b.mean().x, max_relative = 1e-14);
        }
    }

    #[test]
    fn json_layout() {
        let s = from_params(&StateParams::new(0.0, 0.0, 0.0, 0.0, 1.0)).unwrap();
        let v: serde_json::Value = serde_json::to_value(s).unwrap();
        for key in ["mean_x", "mean_p", "cov_xx", "cov_xp", "cov_pp"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        let back: GaussianState = serde_json::from_value(v).unwrap();
        assert_eq!(back, s);
        let bad = r#"{"mean_x":0,"mean_p":0,"cov_xx":0.5,"cov_xp":0,"cov_pp":0.5}"#;
        assert!(serde_json::from_str::<GaussianState>(bad).is_err());

        let p: StateParams =
            serde_json::from_str(r#"{"alpha":1.5,"psi":0.1,"r":0.2,"chi":0.3,"n_th":0.4}"#)
                .unwrap();
        assert_eq!(p, StateParams::new(1.5, 0.1, 0.2, 0.3, 0.4));
    }

    fn params() -> impl Strategy<Value = StateParams> {
        (0.0..5.0f64, -10.0..10.0f64, -2.0..2.0f64, -10.0..10.0f64, 0.0..10.0f64)
            .prop_map(|(a, psi, r, chi, n)| StateParams::new(a, psi, r, chi, n))
    }

    proptest! {
        #[test]
        fn covariance_matches_scalar_formula(p in params()) {
            let c = from_params(&p).unwrap().cov();
            let (xx, xp, pp) = cov_scalar(&p);
            let scale = xx.abs().max(pp.abs());
            prop_assert!((c.xx - xx).abs() <= 1e-12 * scale);
            prop_assert!((c.xp - xp).abs() <= 1e-12 * scale);
            prop_assert!((c.pp - pp).abs() <= 1e-12 * scale);
        }

        #[test]
        fn states_are_physical_with_thermal_purity(p in params()) {
            let s = from_params(&p).unwrap();
            prop_assert!(is_physical(&s.cov(), 1e-9));
            let k = 2.0 * p.n_th + 1.0;
            prop_assert!((s.cov().det() - k * k).abs() <= 1e-12 * k * k * (4.0 * p.r.abs()).exp());
            prop_assert!((purity(&s) - 1.0 / k).abs() <= 1e-10 / k);
        }

        #[test]
        fn loss_preserves_physicality(a in 0.0..3.0f64, sigma in 0.2..4.0f64, eta in 0.0..0.999f64) {
            let s = apply_loss(&loss_input(a, sigma).unwrap(), eta).unwrap();
            prop_assert!(is_physical(&s.cov(), 1e-9));
            let pur = purity(&s);
            prop_assert!(pur > 0.0 && pur <= 1.0 + 1e-12);
        }
    }
}
