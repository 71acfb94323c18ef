//! Named one-parameter families of Gaussian states, with hand-derived state
//! derivatives and the closed-form Fisher information for each.
//!
//! All families except `loss_eta` move one coordinate of the decomposition
//! `R(ψ) D(α) S(r, χ) ν(n_th)`. Writing `K = 2n_th+1`, `σ² = e^{−2r}`,
//! `φ = χ + ψ`, the covariance is `K·R(φ) diag(σ², σ⁻²) R(φ)ᵀ` and the mean is
//! `2α(cos ψ, sin ψ)`. `loss_eta` attenuates an amplitude-squeezed state.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_finite, Error, Result};
use crate::gaussian::{
    apply_loss, from_params, loss_input, rotated_ellipse, CovMat, GaussianState, QuadVec,
    StateParams,
};
use crate::qfi::StateDerivative;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Alpha,
    Psi,
    Sigma2,
    R,
    Chi,
    NTh,
    Purity,
    LossEta,
    /// A curve along which the state does not change; zero information.
    Constant,
}

impl Family {
    /// The eight physical families.
    pub const ALL: [Family; 8] = [
        Family::Alpha,
        Family::Psi,
        Family::Sigma2,
        Family::R,
        Family::Chi,
        Family::NTh,
        Family::Purity,
        Family::LossEta,
    ];

    /// Axes of the full five-parameter Fisher matrix.
    pub const FIVE: [Family; 5] = [
        Family::Alpha,
        Family::Psi,
        Family::R,
        Family::Chi,
        Family::NTh,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Alpha => "alpha",
            Family::Psi => "psi",
            Family::Sigma2 => "sigma2",
            Family::R => "r",
            Family::Chi => "chi",
            Family::NTh => "n_th",
            Family::Purity => "purity",
            Family::LossEta => "loss_eta",
            Family::Constant => "constant",
        }
    }

    /// Parameters that can sit on an axis of a state-parameter Fisher matrix.
    pub fn is_state_axis(self) -> bool {
        !matches!(self, Family::LossEta | Family::Constant)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "alpha" => Family::Alpha,
            "psi" | "phase" => Family::Psi,
            "sigma2" => Family::Sigma2,
            "r" => Family::R,
            "chi" => Family::Chi,
            "n_th" | "nth" => Family::NTh,
            "purity" => Family::Purity,
            "loss_eta" | "eta" | "loss" => Family::LossEta,
            "constant" => Family::Constant,
            other => return Err(Error::Domain(format!("unknown family `{other}`"))),
        })
    }
}

/// Input of the loss model: real amplitude `α₀` and amplitude-quadrature
/// standard deviation `σ` (so the variance is `σ²`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossBase {
    pub alpha0: f64,
    pub sigma: f64,
}

impl Default for LossBase {
    fn default() -> Self {
        Self {
            alpha0: 0.0,
            sigma: 1.0,
        }
    }
}

/// Parameters describing the state at one point of a family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FamilyPoint {
    State(StateParams),
    Loss { base: LossBase, eta: f64 },
}

impl FamilyPoint {
    pub fn gaussian(&self) -> Result<GaussianState> {
        match *self {
            FamilyPoint::State(p) => from_params(&p),
            FamilyPoint::Loss { base, eta } => {
                apply_loss(&loss_input(base.alpha0, base.sigma)?, eta)
            }
        }
    }
}

/// A family together with the fixed parameters and the evaluation point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamFamily {
    name: Family,
    base: StateParams,
    loss: LossBase,
    point: f64,
}

impl ParamFamily {
    /// Family `name` through `base`, evaluated at `point` (the value of the
    /// family's own parameter, which overrides the matching field of `base`).
    pub fn new(name: Family, base: StateParams, point: f64) -> Result<Self> {
        if name == Family::LossEta {
            return Err(Error::Domain(
                "loss_eta is built with ParamFamily::loss".into(),
            ));
        }
        base.validate()?;
        let f = Self {
            name,
            base,
            loss: LossBase::default(),
            point,
        };
        f.check_point(point)?;
        Ok(f)
    }

    /// Family evaluated at the value its parameter already has in `base`.
    pub fn at_base(name: Family, base: StateParams) -> Result<Self> {
        let point = match name {
            Family::Alpha => base.alpha,
            Family::Psi => base.psi,
            Family::Sigma2 => base.sigma2(),
            Family::R => base.r,
            Family::Chi => base.chi,
            Family::NTh => base.n_th,
            Family::Purity => base.purity0(),
            Family::Constant => 0.0,
            Family::LossEta => {
                return Err(Error::Domain(
                    "loss_eta is built with ParamFamily::loss".into(),
                ))
            }
        };
        Self::new(name, base, point)
    }

    /// Attenuation family through the amplitude-squeezed state `(α₀, σ)`.
    pub fn loss(alpha0: f64, sigma: f64, eta: f64) -> Result<Self> {
        loss_input(alpha0, sigma)?;
        let f = Self {
            name: Family::LossEta,
            base: StateParams::default(),
            loss: LossBase { alpha0, sigma },
            point: eta,
        };
        f.check_point(eta)?;
        if eta == 0.0 && sigma != 1.0 {
            return Err(Error::Domain(
                "loss_eta at eta = 0 requires sigma = 1 (the information has a 1/eta pole)".into(),
            ));
        }
        Ok(f)
    }

    pub fn name(&self) -> Family {
        self.name
    }

    pub fn point(&self) -> f64 {
        self.point
    }

    pub fn base(&self) -> StateParams {
        self.base
    }

    pub fn loss_base(&self) -> LossBase {
        self.loss
    }

    /// Same family and base, different evaluation point.
    pub fn with_point(&self, point: f64) -> Result<Self> {
        match self.name {
            Family::LossEta => Self::loss(self.loss.alpha0, self.loss.sigma, point),
            name => Self::new(name, self.base, point),
        }
    }

    fn check_point(&self, t: f64) -> Result<()> {
        check_finite("point", t)?;
        let bad = |reason| {
            Err(Error::InvalidParameter {
                name: "point",
                value: t,
                reason,
            })
        };
        match self.name {
            Family::NTh if t < 0.0 => bad("thermal photon number must be non-negative"),
            Family::Sigma2 if t <= 0.0 => bad("sigma^2 must be positive"),
            Family::Purity if !(t > 0.0 && t <= 1.0) => bad("purity must lie in (0, 1]"),
            Family::LossEta if !(0.0..1.0).contains(&t) => bad("eta must lie in [0, 1)"),
            _ => Ok(()),
        }
    }

    /// Parameters of the state at family coordinate `t`.
    ///
    /// For `alpha` a negative coordinate is the same curve continued through
    /// the origin: amplitude `|t|` at phase `ψ + π`.
    pub fn params_at(&self, t: f64) -> Result<FamilyPoint> {
        self.check_point(t)?;
        let mut p = self.base;
        match self.name {
            Family::Alpha => {
                p.alpha = t.abs();
                if t < 0.0 {
                    p.psi += std::f64::consts::PI;
                }
            }
            Family::Psi => p.psi = t,
            Family::Sigma2 => p.r = -0.5 * t.ln(),
            Family::R => p.r = t,
            Family::Chi => p.chi = t,
            Family::NTh => p.n_th = t,
            Family::Purity => p.n_th = 0.5 * (1.0 / t - 1.0),
            Family::Constant => {}
            Family::LossEta => {
                return Ok(FamilyPoint::Loss {
                    base: self.loss,
                    eta: t,
                })
            }
        }
        Ok(FamilyPoint::State(p))
    }

    pub fn state_at(&self, t: f64) -> Result<GaussianState> {
        self.params_at(t)?.gaussian()
    }

    pub fn state(&self) -> Result<GaussianState> {
        self.state_at(self.point)
    }

    /// Parameters at the evaluation point.
    pub fn params(&self) -> Result<FamilyPoint> {
        self.params_at(self.point)
    }

    fn state_params(&self) -> StateParams {
        match self.params() {
            Ok(FamilyPoint::State(p)) => p,
            _ => self.base,
        }
    }

    /// Default finite-difference step for numerical oracles.
    pub fn default_step(&self) -> f64 {
        match self.name {
            Family::NTh | Family::Purity => 1e-5,
            _ => 1e-4 * self.point.abs().max(1.0),
        }
    }

    /// Largest step `h` for which `point ± 2h` stays inside the family's domain.
    pub fn max_step(&self) -> f64 {
        let t = self.point;
        match self.name {
            Family::NTh | Family::Sigma2 => 0.5 * t,
            Family::Purity => 0.5 * t.min(1.0 - t),
            Family::LossEta => 0.5 * t.min(1.0 - t),
            _ => f64::INFINITY,
        }
    }

    /// The state at the evaluation point and its exact derivative with
    /// respect to the family parameter.
    pub fn analytic_derivative(&self) -> Result<(GaussianState, StateDerivative)> {
        let state = self.state()?;
        if self.name == Family::LossEta {
            return Ok((state, self.loss_derivative()));
        }
        let p = self.state_params();
        let k = 2.0 * p.n_th + 1.0;
        let s2 = p.sigma2();
        let phi = p.chi + p.psi;
        let (sp, cp) = p.psi.sin_cos();
        let d = match self.name {
            // ∂/∂α of 2α(cos ψ, sin ψ); the covariance does not depend on α.
            // The base phase is used so the continuation through α < 0 keeps
            // the same direction.
            Family::Alpha => {
                let (sb, cb) = self.base.psi.sin_cos();
                StateDerivative::new(QuadVec::new(2.0 * cb, 2.0 * sb), CovMat::ZERO, 0.0)
            }
            // ψ turns the mean and, through φ = χ + ψ, the ellipse.
            Family::Psi => StateDerivative::new(
                QuadVec::new(-2.0 * p.alpha * sp, 2.0 * p.alpha * cp),
                ellipse_angle_derivative(k, s2, phi),
                0.0,
            ),
            Family::Chi => {
                StateDerivative::new(QuadVec::ZERO, ellipse_angle_derivative(k, s2, phi), 0.0)
            }
            Family::Sigma2 => {
                StateDerivative::new(QuadVec::ZERO, ellipse_sigma2_derivative(k, s2, phi), 0.0)
            }
            // σ² = e^{−2r} ⇒ ∂σ²/∂r = −2σ²
            Family::R => StateDerivative::new(
                QuadVec::ZERO,
                ellipse_sigma2_derivative(k, s2, phi).scale(-2.0 * s2),
                0.0,
            ),
            // Σ is linear in K = 2n+1: ∂Σ/∂n = 2Σ/K
            Family::NTh => StateDerivative::new(
                QuadVec::ZERO,
                rotated_ellipse(2.0, s2, phi),
                1.0,
            ),
            // K = 1/P ⇒ ∂Σ/∂P = −K·Σ and ∂n/∂P = −1/(2P²)
            Family::Purity => {
                let pur = 1.0 / k;
                StateDerivative::new(
                    QuadVec::ZERO,
                    rotated_ellipse(-k * k, s2, phi),
                    -0.5 / (pur * pur),
                )
            }
            Family::Constant => StateDerivative::ZERO,
            Family::LossEta => unreachable!(),
        };
        Ok((state, d))
    }

    /// Mean `√(1−η)(2α₀, 0)` and covariance `diag(σ²+η(1−σ²), σ⁻²+η(1−σ⁻²))`
    /// give `∂X̄ = (−α₀/√(1−η), 0)` and `∂Σ = diag(1−σ², 1−σ⁻²)`. The purity
    /// change follows from the covariance.
    fn loss_derivative(&self) -> StateDerivative {
        let LossBase { alpha0, sigma } = self.loss;
        let s2 = sigma * sigma;
        StateDerivative::new(
            QuadVec::new(-alpha0 / (1.0 - self.point).sqrt(), 0.0),
            CovMat::diag(1.0 - s2, 1.0 - 1.0 / s2),
            0.0,
        )
    }

    /// Closed-form quantum Fisher information at the evaluation point.
    pub fn closed_form_qfi(&self) -> Result<f64> {
        if self.name == Family::LossEta {
            return loss_eta_qfi(self.loss.alpha0, self.loss.sigma, self.point);
        }
        let p = self.state_params();
        let p0 = p.purity0();
        let s2 = p.sigma2();
        let s4 = s2 * s2;
        let (sc, cc) = p.chi.sin_cos();
        let squeeze_term = (1.0 - s4).powi(2) / ((1.0 + p0 * p0) * s4);
        Ok(match self.name {
            Family::Alpha => 4.0 * p0 * (cc * cc / s2 + s2 * sc * sc),
            Family::Psi => {
                4.0 * p0 * p.alpha * p.alpha * (s2 * cc * cc + sc * sc / s2) + squeeze_term
            }
            Family::Sigma2 => 1.0 / ((1.0 + p0 * p0) * s4),
            Family::R => 4.0 / (1.0 + p0 * p0),
            Family::Chi => squeeze_term,
            Family::NTh => {
                let n = p.n_th;
                if n <= 0.0 {
                    return Err(Error::Domain(
                        "thermal-number information diverges at n_th = 0".into(),
                    ));
                }
                1.0 / (n + n * n)
            }
            Family::Purity => {
                if p0 >= 1.0 {
                    return Err(Error::Domain(
                        "purity information diverges at P = 1".into(),
                    ));
                }
                1.0 / (p0 * p0 - p0.powi(4))
            }
            Family::Constant => 0.0,
            Family::LossEta => unreachable!(),
        })
    }
}

/// `∂Σ/∂φ` for `Σ = K·R(φ) diag(σ², σ⁻²) R(φ)ᵀ`.
fn ellipse_angle_derivative(k: f64, s2: f64, phi: f64) -> CovMat {
    let (s, c) = (2.0 * phi).sin_cos();
    let diff = s2 - 1.0 / s2;
    CovMat::new(-k * diff * s, k * diff * c, k * diff * s)
}

/// `∂Σ/∂(σ²)` for the same ellipse.
fn ellipse_sigma2_derivative(k: f64, s2: f64, phi: f64) -> CovMat {
    let (s, c) = phi.sin_cos();
    let inv4 = 1.0 / (s2 * s2);
    CovMat::new(
        k * (c * c - s * s * inv4),
        k * (1.0 + inv4) * s * c,
        k * (s * s - c * c * inv4),
    )
}

/// Fisher information for the attenuation `η` of an amplitude-squeezed state.
pub fn loss_eta_qfi(alpha0: f64, sigma: f64, eta: f64) -> Result<f64> {
    let s2 = sigma * sigma;
    let u = (1.0 - s2).powi(2);
    let mean_part = alpha0 * alpha0 / (s2 + eta * (1.0 - s2));
    let noise_part = if u == 0.0 {
        0.0
    } else if eta <= 0.0 {
        return Err(Error::Domain(
            "loss information diverges at eta = 0 for sigma != 1".into(),
        ));
    } else {
        (1.0 - 2.0 * eta * (1.0 - eta)) * u / (2.0 * eta * (2.0 * s2 + eta * (1.0 - eta) * u))
    };
    Ok((mean_part + noise_part) / (1.0 - eta))
}

/// Loss information in the angle `φ` with `1 − η = cos²φ`, by the chain rule
/// `I_φ = I_η (dη/dφ)² = I_η sin²(2φ)`.
pub fn loss_angle_qfi(alpha0: f64, sigma: f64, phi: f64) -> Result<f64> {
    let eta = phi.sin().powi(2);
    Ok(loss_eta_qfi(alpha0, sigma, eta)? * (2.0 * phi).sin().powi(2))
}

/// Closed-form off-diagonal entry of the five-parameter Fisher matrix.
///
/// Only `(χ, ψ)`, equal to `I_χ`, and `(α, ψ)`, equal to
/// `2P₀α(σ⁻² − σ²) sin 2χ`, are nonzero.
pub fn off_diagonal_closed_form(i: Family, j: Family, base: &StateParams) -> Result<f64> {
    for f in [i, j] {
        if !f.is_state_axis() || f == Family::Purity {
            return Err(Error::Domain(format!(
                "`{f}` is not one of the five state parameters"
            )));
        }
    }
    if i == j {
        return Err(Error::Domain("off-diagonal entry needs two distinct parameters".into()));
    }
    base.validate()?;
    let pair = |a, b| (i == a && j == b) || (i == b && j == a);
    if pair(Family::Chi, Family::Psi) {
        ParamFamily::at_base(Family::Chi, *base)?.closed_form_qfi()
    } else if pair(Family::Alpha, Family::Psi) {
        let s2 = base.sigma2();
        Ok(2.0 * base.purity0() * base.alpha * (1.0 / s2 - s2) * (2.0 * base.chi).sin())
    } else {
        Ok(0.0)
    }
}

/// The state at `base` and its derivatives along each requested axis.
pub fn derivatives_wrt(
    base: &StateParams,
    axes: &[Family],
) -> Result<(GaussianState, Vec<(String, StateDerivative)>)> {
    let state = from_params(base)?;
    let ds = axes
        .iter()
        .map(|&f| {
            if !f.is_state_axis() {
                return Err(Error::Domain(format!(
                    "`{f}` cannot be used as a Fisher-matrix axis"
                )));
            }
            let (_, d) = ParamFamily::at_base(f, *base)?.analytic_derivative()?;
            Ok((f.name().to_string(), d))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((state, ds))
}
