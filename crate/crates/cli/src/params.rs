//! State-parameter flags, the optional `--params` file and scan knobs.

use std::path::PathBuf;
use std::str::FromStr;

use clap::Args;
use qcrb_core::{Family, LossBase, ParamFamily, StateParams};

use crate::error::{CliError, Result};

#[derive(Args, Debug, Clone, Default)]
pub struct StateFlags {
    /// JSON file with any of `alpha`, `psi`, `r`, `chi`, `n_th`; flags override it.
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Displacement amplitude (α ≥ 0).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Rotation phase ψ.
    #[arg(long)]
    pub psi: Option<f64>,
    /// Squeezing magnitude, σ = e^{−r}.
    #[arg(long)]
    pub r: Option<f64>,
    /// Squeezing direction χ.
    #[arg(long)]
    pub chi: Option<f64>,
    /// Thermal photon number of the core state.
    #[arg(long = "nth", visible_alias = "n-th")]
    pub nth: Option<f64>,
    /// Squeezing as σ = e^{−r}; for `loss_eta`, the input amplitude width.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Input amplitude of the loss model.
    #[arg(long)]
    pub alpha0: Option<f64>,
    /// Attenuation η ∈ [0, 1) of the loss model.
    #[arg(long)]
    pub eta: Option<f64>,
}

/// Fully resolved inputs: the state parameters and the loss model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inputs {
    pub state: StateParams,
    pub loss: LossBase,
    pub eta: f64,
}

fn positive_sigma(sigma: f64) -> Result<f64> {
    if sigma > 0.0 && sigma.is_finite() {
        Ok(sigma)
    } else {
        Err(CliError::Usage(format!("--sigma must be positive, got {sigma}")))
    }
}

impl StateFlags {
    pub fn resolve(&self) -> Result<Inputs> {
        let mut state = match &self.params {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|source| CliError::ParamsFile {
                    path: path.clone(),
                    source,
                })?;
                serde_json::from_str(&text).map_err(|source| CliError::ParamsJson {
                    path: path.clone(),
                    source,
                })?
            }
            None => StateParams::default(),
        };
        if self.r.is_some() && self.sigma.is_some() {
            return Err(CliError::Usage("give either --r or --sigma, not both".into()));
        }
        let overrides = [
            (self.alpha, &mut state.alpha),
            (self.psi, &mut state.psi),
            (self.r, &mut state.r),
            (self.chi, &mut state.chi),
            (self.nth, &mut state.n_th),
        ];
        for (flag, field) in overrides {
            if let Some(v) = flag {
                *field = v;
            }
        }
        let mut loss = LossBase::default();
        if let Some(sigma) = self.sigma {
            let sigma = positive_sigma(sigma)?;
            state.r = -sigma.ln();
            loss.sigma = sigma;
        }
        if let Some(a0) = self.alpha0 {
            loss.alpha0 = a0;
        }
        let inputs = Inputs {
            state,
            loss,
            eta: self.eta.unwrap_or(0.0),
        };
        inputs.state.validate()?;
        Ok(inputs)
    }
}

impl Inputs {
    /// `family` evaluated at these inputs.
    pub fn family(&self, family: Family) -> Result<ParamFamily> {
        Ok(match family {
            Family::LossEta => ParamFamily::loss(self.loss.alpha0, self.loss.sigma, self.eta)?,
            f => ParamFamily::at_base(f, self.state)?,
        })
    }
}

/// A scalar input that a scan can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Knob {
    Alpha,
    Psi,
    R,
    Chi,
    NTh,
    Sigma,
    Sigma2,
    Purity,
    Alpha0,
    Eta,
}

impl FromStr for Knob {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "alpha" => Knob::Alpha,
            "psi" => Knob::Psi,
            "r" => Knob::R,
            "chi" => Knob::Chi,
            "nth" | "n_th" => Knob::NTh,
            "sigma" => Knob::Sigma,
            "sigma2" => Knob::Sigma2,
            "purity" => Knob::Purity,
            "alpha0" => Knob::Alpha0,
            "eta" | "loss_eta" => Knob::Eta,
            other => return Err(CliError::Usage(format!("cannot vary `{other}`"))),
        })
    }
}

impl Knob {
    pub fn apply(self, inputs: &mut Inputs, v: f64) -> Result<()> {
        let s = &mut inputs.state;
        match self {
            Knob::Alpha => s.alpha = v,
            Knob::Psi => s.psi = v,
            Knob::R => s.r = v,
            Knob::Chi => s.chi = v,
            Knob::NTh => s.n_th = v,
            Knob::Sigma => {
                let sigma = positive_sigma(v)?;
                s.r = -sigma.ln();
                inputs.loss.sigma = sigma;
            }
            Knob::Sigma2 => s.r = -0.5 * positive_sigma(v)?.ln(),
            Knob::Purity => {
                if !(v > 0.0 && v <= 1.0) {
                    return Err(CliError::Usage(format!("purity must lie in (0, 1], got {v}")));
                }
                s.n_th = 0.5 * (1.0 / v - 1.0);
            }
            Knob::Alpha0 => inputs.loss.alpha0 = v,
            Knob::Eta => inputs.eta = v,
        }
        Ok(())
    }
}

/// `name=start:stop:count`, an inclusive linear grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VarySpec {
    pub knob: Knob,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl FromStr for VarySpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || CliError::Usage(format!("malformed --vary `{s}`, expected name=start:stop:count"));
        let (name, range) = s.split_once('=').ok_or_else(bad)?;
        let parts: Vec<&str> = range.split(':').collect();
        let [start, stop, count] = parts[..] else {
            return Err(bad());
        };
        let start: f64 = start.trim().parse().map_err(|_| bad())?;
        let stop: f64 = stop.trim().parse().map_err(|_| bad())?;
        let count: usize = count.trim().parse().map_err(|_| bad())?;
        if !start.is_finite() || !stop.is_finite() {
            return Err(bad());
        }
        if count < 2 {
            return Err(CliError::Usage(format!("--vary needs count >= 2, got {count}")));
        }
        Ok(Self {
            knob: name.parse()?,
            start,
            stop,
            count,
        })
    }
}

impl VarySpec {
    pub fn grid(&self) -> Vec<f64> {
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * i as f64 / last
                }
            })
            .collect()
    }
}
