//! Golden-section search for scalar maxima on a closed interval.

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_9;
const MAX_ITER: usize = 500;

/// Location and value of a maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
}

/// Maximizes a unimodal `f` on `[lo, hi]` until the bracket is narrower than
/// `tol`. The endpoints are compared against the interior optimum, so
/// monotone functions return the better endpoint.
pub fn golden_section_max<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<Maximum>
where
    F: Fn(f64) -> f64,
{
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::Domain(format!("invalid bracket [{lo}, {hi}]")));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }

    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut iterations = 0;
    while b - a > tol && iterations < MAX_ITER {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        iterations += 1;
    }

    let mut best = if fc >= fd {
        Maximum { x: c, value: fc, iterations }
    } else {
        Maximum { x: d, value: fd, iterations }
    };
    for x in [lo, hi] {
        let v = f(x);
        if v > best.value {
            best = Maximum { x, value: v, iterations };
        }
    }
    if !best.value.is_finite() {
        return Err(Error::Domain(format!("objective is not finite at x = {}", best.x)));
    }
    Ok(best)
}
