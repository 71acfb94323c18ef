//! Seeded agreement checks between the closed forms, the generic engine and
//! a numerical oracle.

use clap::ValueEnum;
use qcrb_core::fd_oracle::family_qfi_fd;
use qcrb_core::families::off_diagonal_closed_form;
use qcrb_core::{derivatives_wrt, qfi_matrix, qfi_single, Family, ParamFamily, StateParams};
use qcrb_fock::FockOracle;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;

/// Closed form against the generic engine.
pub const GENERIC_TOL: f64 = 1e-10;
/// Closed form against either numerical oracle.
pub const ORACLE_TOL: f64 = 1e-4;
/// Absolute tolerance where the reference value is exactly zero.
pub const ZERO_ABS_TOL: f64 = 1e-8;
/// The thermal-number and purity families diverge at `n_th = 0`; samples for
/// them (and for the five-parameter matrix, which contains `n_th`) start here.
pub const MIN_NTH_FAMILY: f64 = 0.05;

/// Random stream reserved for the five-parameter matrix samples.
const MATRIX_STREAM: u64 = 1 << 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleKind {
    /// Curvature of the closed-form fidelity.
    Fd,
    /// Truncated number-basis density matrices.
    Fock,
}

/// Sampling box for random parameter points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regime {
    pub alpha_max: f64,
    pub r_max: f64,
    pub nth_max: f64,
    pub eta_min: f64,
    pub eta_max: f64,
}

impl Regime {
    pub const GENERAL: Regime = Regime {
        alpha_max: 5.0,
        r_max: 1.5,
        nth_max: 5.0,
        eta_min: 0.05,
        eta_max: 0.95,
    };

    /// Small enough for number-basis truncation.
    pub const FOCK: Regime = Regime {
        alpha_max: 2.0,
        r_max: 1.0,
        nth_max: 3.0,
        eta_min: 0.05,
        eta_max: 0.95,
    };

    pub fn for_oracle(kind: Option<OracleKind>) -> Regime {
        match kind {
            Some(OracleKind::Fock) => Regime::FOCK,
            _ => Regime::GENERAL,
        }
    }

    pub fn sample_params<R: Rng>(&self, rng: &mut R, nth_min: f64) -> StateParams {
        use std::f64::consts::PI;
        StateParams::new(
            rng.gen_range(0.0..=self.alpha_max),
            rng.gen_range(-PI..PI),
            rng.gen_range(-self.r_max..=self.r_max),
            rng.gen_range(-PI..PI),
            rng.gen_range(nth_min..=self.nth_max),
        )
    }

    /// A random point of `family` inside the box.
    pub fn sample_family<R: Rng>(&self, family: Family, rng: &mut R) -> Result<ParamFamily> {
        Ok(match family {
            Family::LossEta => {
                let alpha0 = rng.gen_range(0.0..=self.alpha_max);
                let sigma = rng.gen_range(-self.r_max..=self.r_max).exp();
                let eta = rng.gen_range(self.eta_min..=self.eta_max);
                ParamFamily::loss(alpha0, sigma, eta)?
            }
            Family::NTh | Family::Purity => {
                ParamFamily::at_base(family, self.sample_params(rng, MIN_NTH_FAMILY))?
            }
            f => ParamFamily::at_base(f, self.sample_params(rng, 0.0))?,
        })
    }
}

/// Generator for one family's samples, independent of which other families
/// are checked alongside it.
pub fn family_rng(seed: u64, family: Family) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(family as u64);
    rng
}

/// `|value − reference| / |reference|`, or the absolute error when the
/// reference is zero.
pub fn relative_error(value: f64, reference: f64) -> f64 {
    if reference == 0.0 {
        value.abs()
    } else {
        (value - reference).abs() / reference.abs()
    }
}

/// Agreement test with `tol` relative, or [`ZERO_ABS_TOL`] absolute at zero.
pub fn agrees(value: f64, reference: f64, tol: f64) -> bool {
    let err = relative_error(value, reference);
    if reference == 0.0 {
        err <= ZERO_ABS_TOL
    } else {
        err <= tol
    }
}

/// Engine state for one worker thread.
enum Engine {
    Fd,
    Fock(Box<FockOracle>),
}

impl Engine {
    fn new(kind: OracleKind) -> Self {
        match kind {
            OracleKind::Fd => Engine::Fd,
            OracleKind::Fock => Engine::Fock(Box::default()),
        }
    }

    fn qfi(&mut self, f: &ParamFamily) -> std::result::Result<f64, String> {
        match self {
            Engine::Fd => family_qfi_fd(f).map(|e| e.value).map_err(|e| e.to_string()),
            Engine::Fock(o) => o.family_qfi(f).map(|r| r.value).map_err(|e| e.to_string()),
        }
    }
}

/// Closed form and generic engine at one family point.
pub fn closed_and_generic(f: &ParamFamily) -> qcrb_core::Result<(f64, f64)> {
    let closed = f.closed_form_qfi()?;
    let (state, d) = f.analytic_derivative()?;
    Ok((closed, qfi_single(&state, &d)?))
}

/// Oracle value for one family point.
pub fn oracle_qfi(kind: OracleKind, f: &ParamFamily) -> std::result::Result<f64, String> {
    Engine::new(kind).qfi(f)
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct PointOutcome {
    generic_err: f64,
    generic_ok: bool,
    oracle_err: Option<f64>,
    oracle_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyCheck {
    pub family: String,
    pub points: usize,
    /// Largest relative error of the generic engine (absolute where the
    /// closed form is zero).
    pub max_rel_generic: f64,
    /// Same for the oracle.
    pub max_rel_oracle: Option<f64>,
    pub failures: usize,
    pub first_error: Option<String>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixCheck {
    pub points: usize,
    /// Largest `|ΔI_ij| / √(I_ii I_jj)` of the oracle against the closed forms.
    pub max_scaled_oracle: f64,
    /// Same for the generic engine.
    pub max_scaled_generic: f64,
    /// Largest cutoff the oracle needed.
    pub max_n_max: usize,
    pub failures: usize,
    pub first_error: Option<String>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub oracle: Option<OracleKind>,
    pub seed: u64,
    pub points_per_family: usize,
    pub families: Vec<FamilyCheck>,
    pub matrix: Option<MatrixCheck>,
    pub passed: bool,
    pub first_failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckConfig {
    pub oracle: Option<OracleKind>,
    pub families: Vec<Family>,
    pub seed: u64,
    pub points: usize,
    /// Base points for the five-parameter matrix (oracle `fock` only).
    pub matrix_points: usize,
}

impl CheckConfig {
    /// Point counts used by the acceptance thresholds.
    pub fn standard(oracle: Option<OracleKind>, families: Vec<Family>, seed: u64) -> Self {
        let (points, matrix_points) = match oracle {
            None => (1000, 0),
            Some(OracleKind::Fd) => (100, 0),
            Some(OracleKind::Fock) => (20, 20),
        };
        Self {
            oracle,
            families,
            seed,
            points,
            matrix_points,
        }
    }
}

fn check_family(cfg: &CheckConfig, family: Family) -> Result<FamilyCheck> {
    let regime = Regime::for_oracle(cfg.oracle);
    let mut rng = family_rng(cfg.seed, family);
    let samples = (0..cfg.points)
        .map(|_| regime.sample_family(family, &mut rng))
        .collect::<Result<Vec<_>>>()?;

    let evaluate = |engine: &mut Option<Engine>, f: &ParamFamily| -> std::result::Result<PointOutcome, String> {
        let (closed, generic) = closed_and_generic(f).map_err(|e| e.to_string())?;
        let mut out = PointOutcome {
            generic_err: relative_error(generic, closed),
            generic_ok: agrees(generic, closed, GENERIC_TOL),
            oracle_err: None,
            oracle_ok: true,
        };
        if let Some(engine) = engine {
            let v = engine.qfi(f)?;
            out.oracle_err = Some(relative_error(v, closed));
            out.oracle_ok = agrees(v, closed, ORACLE_TOL);
        }
        Ok(out)
    };
    let outcomes: Vec<_> = samples
        .par_iter()
        .map_init(|| cfg.oracle.map(Engine::new), |e, f| (f, evaluate(e, f)))
        .collect();

    let mut check = FamilyCheck {
        family: family.name().to_string(),
        points: cfg.points,
        max_rel_generic: 0.0,
        max_rel_oracle: cfg.oracle.map(|_| 0.0),
        failures: 0,
        first_error: None,
        passed: true,
    };
    for (f, outcome) in outcomes {
        match outcome {
            Ok(o) => {
                check.max_rel_generic = check.max_rel_generic.max(o.generic_err);
                if let (Some(m), Some(e)) = (check.max_rel_oracle.as_mut(), o.oracle_err) {
                    *m = m.max(e);
                }
                if !(o.generic_ok && o.oracle_ok) {
                    check.failures += 1;
                }
            }
            Err(msg) => {
                check.failures += 1;
                check
                    .first_error
                    .get_or_insert_with(|| format!("at {:?}: {msg}", f.params()));
            }
        }
    }
    check.passed = check.failures == 0;
    Ok(check)
}

/// Closed-form five-parameter (or any state-axis) Fisher matrix.
pub fn closed_form_matrix(base: &StateParams, axes: &[Family]) -> qcrb_core::Result<Vec<Vec<f64>>> {
    let n = axes.len();
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        m[i][i] = ParamFamily::at_base(axes[i], *base)?.closed_form_qfi()?;
        for j in (i + 1)..n {
            let v = off_diagonal_closed_form(axes[i], axes[j], base)?;
            m[i][j] = v;
            m[j][i] = v;
        }
    }
    Ok(m)
}

/// Largest entrywise `|a_ij − b_ij| / √(b_ii b_jj)`.
pub fn max_scaled_difference(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let n = b.len();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let scale = (b[i][i] * b[j][j]).sqrt();
            let d = (a[i][j] - b[i][j]).abs();
            worst = worst.max(if scale > 0.0 { d / scale } else { d });
        }
    }
    worst
}

fn check_matrix(cfg: &CheckConfig) -> Result<MatrixCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(MATRIX_STREAM);
    let bases: Vec<StateParams> = (0..cfg.matrix_points)
        .map(|_| Regime::FOCK.sample_params(&mut rng, MIN_NTH_FAMILY))
        .collect();
    let axes = Family::FIVE;
    let outcomes: Vec<_> = bases
        .par_iter()
        .map_init(FockOracle::default, |oracle, base| {
            let mut run = || -> std::result::Result<(f64, f64, usize), String> {
                let closed = closed_form_matrix(base, &axes).map_err(|e| e.to_string())?;
                let (state, ds) = derivatives_wrt(base, &axes).map_err(|e| e.to_string())?;
                let generic = qfi_matrix(&state, &ds).map_err(|e| e.to_string())?;
                let fock = oracle.fisher_wrt(base, &axes).map_err(|e| e.to_string())?;
                Ok((
                    max_scaled_difference(&fock.matrix.entries, &closed),
                    max_scaled_difference(&generic.entries, &closed),
                    fock.n_max,
                ))
            };
            (base, run())
        })
        .collect();
    let mut check = MatrixCheck {
        points: cfg.matrix_points,
        max_scaled_oracle: 0.0,
        max_scaled_generic: 0.0,
        max_n_max: 0,
        failures: 0,
        first_error: None,
        passed: true,
    };
    for (base, outcome) in outcomes {
        match outcome {
            Ok((oracle, generic, n_max)) => {
                check.max_scaled_oracle = check.max_scaled_oracle.max(oracle);
                check.max_scaled_generic = check.max_scaled_generic.max(generic);
                check.max_n_max = check.max_n_max.max(n_max);
                if oracle > ORACLE_TOL || generic > GENERIC_TOL {
                    check.failures += 1;
                }
            }
            Err(msg) => {
                check.failures += 1;
                check.first_error.get_or_insert_with(|| format!("at {base:?}: {msg}"));
            }
        }
    }
    check.passed = check.failures == 0;
    Ok(check)
}

pub fn run_check(cfg: &CheckConfig) -> Result<CheckReport> {
    let families = cfg
        .families
        .iter()
        .map(|&f| check_family(cfg, f))
        .collect::<Result<Vec<_>>>()?;
    let matrix = if cfg.oracle == Some(OracleKind::Fock) && cfg.matrix_points > 0 {
        Some(check_matrix(cfg)?)
    } else {
        None
    };
    let first_failure = families
        .iter()
        .find(|f| !f.passed)
        .map(|f| f.family.clone())
        .or_else(|| matrix.as_ref().filter(|m| !m.passed).map(|_| "five-parameter matrix".into()));
    Ok(CheckReport {
        oracle: cfg.oracle,
        seed: cfg.seed,
        points_per_family: cfg.points,
        families,
        matrix,
        passed: first_failure.is_none(),
        first_failure,
    })
}
