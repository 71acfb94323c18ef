//! Numerical Fisher information from the curvature of the closed-form fidelity.
//!
//! This is an oracle for the analytic engine: it never looks at state
//! derivatives, only at fidelities between the state at `θ₀` and its
//! neighbours along the curve.

use crate::error::{Error, Result};
use crate::families::ParamFamily;
use crate::fidelity::{bures_from_fidelity, fidelity};
use crate::gaussian::GaussianState;

/// Deviations `|1 − F|` below this are indistinguishable from rounding.
const CONSTANT_GAP: f64 = 8.0 * f64::EPSILON;
/// Smallest usable deviation `|1 − F|` for a second difference.
const MIN_GAP: f64 = 1e3 * f64::EPSILON;
/// Largest tolerated `|F(+h) − F(−h)| / (2 − F(+h) − F(−h))`.
const MAX_ASYMMETRY: f64 = 0.5;
/// Step tuning aims for `1 − F(h)` near this value.
pub const TARGET_GAP: f64 = 1e-6;

/// Second-difference estimate of the Fisher information.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdEstimate {
    /// Richardson-extrapolated estimate.
    pub value: f64,
    /// `−2 · [F(+h) − 2 + F(−h)] / h²`
    pub coarse: f64,
    /// Same with `h/2`.
    pub fine: f64,
    pub h: f64,
    /// Central first difference `[F(+h) − F(−h)] / 2h`, which must vanish.
    pub slope: f64,
}

impl FdEstimate {
    fn zero(h: f64) -> Self {
        Self {
            value: 0.0,
            coarse: 0.0,
            fine: 0.0,
            h,
            slope: 0.0,
        }
    }
}

/// One-sided Bures-distance estimate `4 (d_B(θ₀, θ₀+h) / h)²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuresEstimate {
    /// First-order Richardson combination `2·E(h/2) − E(h)`.
    pub value: f64,
    pub at_h: f64,
    pub at_half_h: f64,
    pub h: f64,
}

/// Moments equal up to a few ulps: the curve has not moved.
fn same_state(a: &GaussianState, b: &GaussianState) -> bool {
    let close = |x: f64, y: f64| (x - y).abs() <= 4.0 * f64::EPSILON * x.abs().max(y.abs()).max(1.0);
    let (ma, mb) = (a.mean(), b.mean());
    let (ca, cb) = (a.cov(), b.cov());
    close(ma.x, mb.x)
        && close(ma.p, mb.p)
        && close(ca.xx, cb.xx)
        && close(ca.xp, cb.xp)
        && close(ca.pp, cb.pp)
}

fn check_step(h: f64) -> Result<()> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("finite-difference step must be positive, got {h}")))
    }
}

/// `I = −2 ∂²F(θ₀, θ₀+ε)/∂ε²` by central second differences at `h` and `h/2`
/// combined by one Richardson step.
///
/// The first difference is checked first: a curve whose fidelity has a
/// nonzero slope at `ε = 0` does not define a Fisher information.
pub fn qfi_from_fidelity<S>(states: S, theta0: f64, h: f64) -> Result<FdEstimate>
where
    S: Fn(f64) -> Result<GaussianState>,
{
    check_step(h)?;
    let s0 = states(theta0)?;
    let f = |t: f64| -> Result<f64> { fidelity(&s0, &states(t)?) };
    let (fp, fm) = (f(theta0 + h)?, f(theta0 - h)?);
    let (fp2, fm2) = (f(theta0 + 0.5 * h)?, f(theta0 - 0.5 * h)?);

    if [theta0 + h, theta0 - h].iter().all(|&t| states(t).is_ok_and(|s| same_state(&s, &s0))) {
        return Ok(FdEstimate::zero(h));
    }
    let gaps = [1.0 - fp, 1.0 - fm, 1.0 - fp2, 1.0 - fm2];
    let largest = gaps.iter().fold(0.0f64, |m, g| m.max(g.abs()));
    if largest < MIN_GAP {
        return Err(Error::StepTooSmall {
            h,
            deviation: largest,
        });
    }

    let coarse = -2.0 * ((fp - 1.0) + (fm - 1.0)) / (h * h);
    let slope = (fp - fm) / (2.0 * h);
    let bound = 10.0 * h * coarse.abs().max(1.0);
    // A smooth curve has F(+h) − F(−h) = O(h³) against 2 − F(+h) − F(−h) = O(h²);
    // a kink makes the two comparable whatever the step.
    let asymmetry = (fp - fm).abs() / (2.0 - fp - fm);
    if slope.abs() > bound || asymmetry > MAX_ASYMMETRY {
        return Err(Error::SmoothnessViolation { slope, bound });
    }
    let smallest = gaps.iter().fold(f64::INFINITY, |m, g| m.min(g.abs()));
    if smallest < MIN_GAP {
        return Err(Error::StepTooSmall {
            h,
            deviation: smallest,
        });
    }
    let hh = 0.5 * h;
    let fine = -2.0 * ((fp2 - 1.0) + (fm2 - 1.0)) / (hh * hh);
    Ok(FdEstimate {
        value: (4.0 * fine - coarse) / 3.0,
        coarse,
        fine,
        h,
        slope,
    })
}

/// `I ≈ 4 (d_B(θ₀, θ₀+h)/h)²`, evaluated at `h` and `h/2`.
pub fn qfi_from_bures<S>(states: S, theta0: f64, h: f64) -> Result<BuresEstimate>
where
    S: Fn(f64) -> Result<GaussianState>,
{
    check_step(h)?;
    let s0 = states(theta0)?;
    let f1 = fidelity(&s0, &states(theta0 + h)?)?;
    let f2 = fidelity(&s0, &states(theta0 + 0.5 * h)?)?;
    if states(theta0 + h).is_ok_and(|s| same_state(&s, &s0)) {
        return Ok(BuresEstimate {
            value: 0.0,
            at_h: 0.0,
            at_half_h: 0.0,
            h,
        });
    }
    let smallest = (1.0 - f1).abs().min((1.0 - f2).abs());
    // The Bures distance is linear in h, so cancellation sets in at 1 − F ~ ε.
    if smallest < MIN_GAP {
        return Err(Error::StepTooSmall {
            h,
            deviation: smallest,
        });
    }
    let est = |f: f64, step: f64| 4.0 * (bures_from_fidelity(f) / step).powi(2);
    let at_h = est(f1, h);
    let at_half_h = est(f2, 0.5 * h);
    Ok(BuresEstimate {
        value: 2.0 * at_half_h - at_h,
        at_h,
        at_half_h,
        h,
    })
}

/// Picks a step so that `1 − F(θ₀, θ₀ ± h)` is close to [`TARGET_GAP`],
/// starting from `h0` and never exceeding `h_max`.
///
/// Returns `None` when the state does not move even at `h_max`.
pub fn tune_step<S>(states: S, theta0: f64, h0: f64, h_max: f64) -> Result<Option<f64>>
where
    S: Fn(f64) -> Result<GaussianState>,
{
    check_step(h0)?;
    let s0 = states(theta0)?;
    let gap = |h: f64| -> Result<f64> {
        let a = 1.0 - fidelity(&s0, &states(theta0 + h)?)?;
        let b = 1.0 - fidelity(&s0, &states(theta0 - h)?)?;
        Ok(a.abs().min(b.abs()))
    };
    let mut h = h0.min(h_max);
    let mut g = gap(h)?;
    if g <= CONSTANT_GAP {
        h = h_max.min(1e3 * h0);
        g = gap(h)?;
        if g <= CONSTANT_GAP {
            return Ok(None);
        }
    }
    // 1 − F grows like h², two rescalings are enough to land near the target.
    for _ in 0..2 {
        h = (h * (TARGET_GAP / g).sqrt()).min(h_max);
        g = gap(h)?;
    }
    Ok(Some(h))
}

fn family_step(f: &ParamFamily) -> Result<Option<f64>> {
    let h_max = f.max_step().min(0.1 * f.point().abs().max(1.0));
    tune_step(|t| f.state_at(t), f.point(), f.default_step(), h_max)
}

/// Fidelity-curvature oracle along a family with a tuned step.
pub fn family_qfi_fd(f: &ParamFamily) -> Result<FdEstimate> {
    match family_step(f)? {
        Some(h) => qfi_from_fidelity(|t| f.state_at(t), f.point(), h),
        None => Ok(FdEstimate::zero(f.default_step())),
    }
}

/// Bures-distance oracle along a family with a tuned step.
pub fn family_qfi_bures(f: &ParamFamily) -> Result<BuresEstimate> {
    let h = family_step(f)?.unwrap_or_else(|| f.default_step());
    qfi_from_bures(|t| f.state_at(t), f.point(), h)
}
