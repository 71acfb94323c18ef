use qcrb_core::scaling::{log_grid, log_log_fit, phase_scaling, SqueezeMode};
use qcrb_core::{from_params, wigner, Family, ParamFamily, QuadVec, StateParams};

type Result<T> = std::result::Result<T, String>;

#[derive(Debug, Clone, Copy)]
pub struct State {
    pub alpha: f64,
    pub psi: f64,
    pub r: f64,
    pub chi: f64,
    pub n_th: f64,
}

impl State {
    fn params(self) -> StateParams {
        StateParams::new(self.alpha, self.psi, self.r, self.chi, self.n_th)
    }
}

fn text(e: qcrb_core::Error) -> String {
    e.to_string()
}

pub fn wigner_grid(s: State, extent: f64, size: usize) -> Result<Vec<f64>> {
    if size < 2 || !(extent > 0.0 && extent.is_finite()) {
        return Err("grid needs size >= 2 and a positive extent".into());
    }
    let state = from_params(&s.params()).map_err(text)?;
    let step = 2.0 * extent / (size - 1) as f64;
    let mut out = Vec::with_capacity(size * size);
    for row in 0..size {
        let p = extent - row as f64 * step;
        for col in 0..size {
            let x = -extent + col as f64 * step;
            out.push(wigner(&state, QuadVec::new(x, p)));
        }
    }
    Ok(out)
}

fn set_input(p: &mut StateParams, input: &str, v: f64) -> Result<()> {
    match input {
        "alpha" => p.alpha = v,
        "psi" => p.psi = v,
        "r" => p.r = v,
        "chi" => p.chi = v,
        "n_th" | "nth" => p.n_th = v,
        other => return Err(format!("cannot sweep `{other}`")),
    }
    Ok(())
}

/// For the loss family the sweep always runs over `eta`, with `alpha` as the
/// input amplitude and `e^{-r}` as the input width.
pub fn qfi_curve(
    family: &str,
    input: &str,
    (start, stop, count): (f64, f64, usize),
    s: State,
) -> Result<Vec<f64>> {
    let family: Family = family.parse().map_err(text)?;
    if count < 2 {
        return Err("a curve needs at least two points".into());
    }
    let mut out = Vec::with_capacity(2 * count);
    for i in 0..count {
        let x = start + (stop - start) * i as f64 / (count - 1) as f64;
        let f = if family == Family::LossEta {
            ParamFamily::loss(s.alpha, (-s.r).exp(), x)
        } else {
            let mut p = s.params();
            set_input(&mut p, input, x)?;
            ParamFamily::at_base(family, p)
        };
        let info = f.and_then(|f| f.closed_form_qfi()).unwrap_or(f64::NAN);
        out.extend([x, info]);
    }
    Ok(out)
}

pub fn phase_scaling_table(n_lo: f64, n_hi: f64, count: usize, coherent_only: bool) -> Result<Vec<f64>> {
    let grid = log_grid(n_lo, n_hi, count).map_err(text)?;
    let mode = if coherent_only {
        SqueezeMode::CoherentOnly
    } else {
        SqueezeMode::Optimal
    };
    let rows = phase_scaling(&grid, mode).map_err(text)?;
    Ok(rows
        .iter()
        .flat_map(|r| [r.n_total, r.split, r.alpha, r.r, r.info, r.delta_psi_min])
        .collect())
}

pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> Result<Vec<f64>> {
    let fit = log_log_fit(xs, ys).map_err(text)?;
    Ok(vec![fit.slope, fit.intercept, fit.r_squared])
}
