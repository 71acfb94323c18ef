//! Phase sensitivity of pure states at a fixed mean photon number.
//!
//! A pure state with `χ = 0` and `N = α² + sinh²r` photons is split between
//! the coherent amplitude (`α² = fN`) and phase squeezing
//! (`sinh²r = (1−f)N`, with `r ≤ 0` so the phase quadrature is narrowed).
//! The split `f` is chosen to maximize the phase information.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{Family, ParamFamily};
use crate::gaussian::StateParams;
use crate::optimize::golden_section_max;

/// Bracket tolerance on the split fraction.
pub const SPLIT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SqueezeMode {
    /// Optimize the split between displacement and squeezing.
    Optimal,
    /// All photons in the coherent amplitude (`r = 0`).
    CoherentOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseScalingRow {
    pub n_total: f64,
    /// Fraction of photons in the coherent amplitude.
    pub split: f64,
    pub alpha: f64,
    pub r: f64,
    pub info: f64,
    pub delta_psi_min: f64,
}

fn params_for_split(n_total: f64, split: f64) -> StateParams {
    let split = split.clamp(0.0, 1.0);
    let alpha = (split * n_total).sqrt();
    // `0.0 -` rather than negation keeps r = +0 when there is no squeezing.
    let r = 0.0 - ((1.0 - split) * n_total).sqrt().asinh();
    StateParams::new(alpha, 0.0, r, 0.0, 0.0)
}

fn phase_info(p: StateParams) -> Result<f64> {
    ParamFamily::at_base(Family::Psi, p)?.closed_form_qfi()
}

/// Best phase information for `n_total` photons under the given mode.
pub fn optimal_phase_allocation(n_total: f64, mode: SqueezeMode) -> Result<PhaseScalingRow> {
    if !(n_total > 0.0 && n_total.is_finite()) {
        return Err(Error::Domain(format!(
            "total photon number must be positive, got {n_total}"
        )));
    }
    let split = match mode {
        SqueezeMode::CoherentOnly => 1.0,
        SqueezeMode::Optimal => {
            let objective =
                |f: f64| phase_info(params_for_split(n_total, f)).unwrap_or(f64::NEG_INFINITY);
            golden_section_max(objective, 0.0, 1.0, SPLIT_TOL)?.x
        }
    };
    let p = params_for_split(n_total, split);
    let info = phase_info(p)?;
    Ok(PhaseScalingRow {
        n_total,
        split,
        alpha: p.alpha,
        r: p.r,
        info,
        delta_psi_min: info.sqrt().recip(),
    })
}

/// One row per photon number, in input order.
pub fn phase_scaling(n_totals: &[f64], mode: SqueezeMode) -> Result<Vec<PhaseScalingRow>> {
    n_totals
        .iter()
        .map(|&n| optimal_phase_allocation(n, mode))
        .collect()
}

/// Least-squares line through `(ln x, ln y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn log_log_fit(xs: &[f64], ys: &[f64]) -> Result<LogLogFit> {
    if xs.len() != ys.len() {
        return Err(Error::Shape(format!("{} x values, {} y values", xs.len(), ys.len())));
    }
    if xs.len() < 2 {
        return Err(Error::Domain("a fit needs at least two points".into()));
    }
    if xs.iter().chain(ys).any(|v| !(*v > 0.0)) {
        return Err(Error::Domain("log-log fit needs positive data".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ly.iter().map(|y| (y - my).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain("all x values are equal".into()));
    }
    let slope = sxy / sxx;
    // Rounding can push a perfect fit a few ulps above 1.
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).min(1.0) };
    Ok(LogLogFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
    })
}

/// Fit of `δψ_min` against `N` over the rows.
pub fn fit_rows(rows: &[PhaseScalingRow]) -> Result<LogLogFit> {
    let xs: Vec<f64> = rows.iter().map(|r| r.n_total).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.delta_psi_min).collect();
    log_log_fit(&xs, &ys)
}

/// `count` photon numbers spaced evenly in `log N` from `lo` to `hi`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && count >= 2) {
        return Err(Error::Domain(format!(
            "log grid needs 0 < lo < hi and count >= 2, got {lo}, {hi}, {count}"
        )));
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect())
}
