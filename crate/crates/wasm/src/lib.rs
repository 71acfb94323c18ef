//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every export takes plain numbers and returns a flat `Float64Array`, so the
//! page needs no serialization layer. The work happens in the `compute`
//! functions, which also run natively under `cargo test`.

use wasm_bindgen::prelude::*;

pub mod compute;

fn js(r: Result<Vec<f64>, String>) -> Result<Vec<f64>, JsError> {
    r.map_err(|e| JsError::new(&e))
}

/// Wigner function on a `size × size` grid over `[-extent, extent]²`.
/// Row-major, with `p` decreasing down the rows so it draws upright.
#[wasm_bindgen]
pub fn wigner_grid(
    alpha: f64,
    psi: f64,
    r: f64,
    chi: f64,
    n_th: f64,
    extent: f64,
    size: usize,
) -> Result<Vec<f64>, JsError> {
    js(compute::wigner_grid(
        compute::State { alpha, psi, r, chi, n_th },
        extent,
        size,
    ))
}

/// Fisher information of `family` along a sweep of one state input, as
/// `[x0, I0, x1, I1, ...]`. Undefined points come back as NaN.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn qfi_curve(
    family: &str,
    input: &str,
    start: f64,
    stop: f64,
    count: usize,
    alpha: f64,
    psi: f64,
    r: f64,
    chi: f64,
    n_th: f64,
) -> Result<Vec<f64>, JsError> {
    js(compute::qfi_curve(
        family,
        input,
        (start, stop, count),
        compute::State { alpha, psi, r, chi, n_th },
    ))
}

/// Rows `[N, split, alpha, r, I_psi, delta_psi_min]` back to back, for
/// `count` photon numbers spaced logarithmically over `[n_lo, n_hi]`.
#[wasm_bindgen]
pub fn phase_scaling_table(
    n_lo: f64,
    n_hi: f64,
    count: usize,
    coherent_only: bool,
) -> Result<Vec<f64>, JsError> {
    js(compute::phase_scaling_table(n_lo, n_hi, count, coherent_only))
}

/// `[slope, intercept, r²]` of `ln y` against `ln x`.
#[wasm_bindgen]
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> Result<Vec<f64>, JsError> {
    js(compute::log_log_slope(xs, ys))
}
