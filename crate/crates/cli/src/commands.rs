//! Subcommand implementations. Each writes its stdout payload to `out`.

use std::io::Write;
use std::path::Path;

use qcrb_core::scaling::{fit_rows, phase_scaling, LogLogFit, PhaseScalingRow, SqueezeMode};
use qcrb_core::{
    crb_matrix, crb_single, derivatives_wrt, is_physical, qfi_matrix, Error, Family,
    GaussianState, StateParams,
};
use qcrb_fock::FockOracle;
use rayon::prelude::*;
use serde::Serialize;

use crate::app::{
    CheckArgs, Cli, Command, PhaseScalingArgs, QfiArgs, QfiMatrixArgs, QfiOracle, ScanArgs,
    StateArgs,
};
use crate::check::{closed_and_generic, run_check, CheckConfig, OracleKind};
use crate::error::{CliError, Result};
use crate::format::{csv_writer, fmt_f64, to_json};

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::State(a) => cmd_state(&a, out),
        Command::Qfi(a) => cmd_qfi(&a, out),
        Command::QfiMatrix(a) => cmd_qfi_matrix(&a, out),
        Command::Scan(a) => cmd_scan(&a, out),
        Command::PhaseScaling(a) => cmd_phase_scaling(&a, out),
        Command::Check(a) => cmd_check(&a, out),
    }
}

fn emit<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    writeln!(out, "{}", to_json(value)).map_err(|source| CliError::Output {
        path: "<stdout>".into(),
        source,
    })
}

fn parse_family(name: &str) -> Result<Family> {
    name.parse::<Family>()
        .map_err(|_| CliError::Usage(format!("unknown family `{name}`")))
}

/// `1/(Q·I)`, infinite when the parameter carries no information.
fn bound(info: f64, q: u64) -> Result<f64> {
    match crb_single(info, q) {
        Ok(v) => Ok(v),
        Err(Error::ZeroInformation(_)) => Ok(f64::INFINITY),
        Err(e) => Err(e.into()),
    }
}

#[derive(Serialize)]
struct StateReport {
    params: StateParams,
    state: GaussianState,
    purity: f64,
    physical: bool,
}

fn cmd_state(a: &StateArgs, out: &mut dyn Write) -> Result<()> {
    let inputs = a.state.resolve()?;
    let state = qcrb_core::from_params(&inputs.state)?;
    emit(
        out,
        &StateReport {
            params: inputs.state,
            state,
            purity: state.purity(),
            physical: is_physical(&state.cov(), qcrb_core::gaussian::DEFAULT_PHYS_TOL),
        },
    )
}

#[derive(Serialize)]
#[allow(non_snake_case)]
struct QfiReport {
    family: &'static str,
    I_closed: f64,
    I_generic: f64,
    I_oracle: Option<f64>,
    crb: f64,
    Q: u64,
}

fn cmd_qfi(a: &QfiArgs, out: &mut dyn Write) -> Result<()> {
    let family = parse_family(&a.family)?;
    let f = a.state.resolve()?.family(family)?;
    let (closed, generic) = closed_and_generic(&f)?;
    let oracle = match a.oracle {
        QfiOracle::None => None,
        QfiOracle::Fd => Some(
            qcrb_core::fd_oracle::family_qfi_fd(&f)
                .map_err(|e| CliError::Oracle(e.to_string()))?
                .value,
        ),
        QfiOracle::Fock => Some(
            FockOracle::default()
                .family_qfi(&f)
                .map_err(|e| CliError::Oracle(e.to_string()))?
                .value,
        ),
    };
    emit(
        out,
        &QfiReport {
            family: family.name(),
            I_closed: closed,
            I_generic: generic,
            I_oracle: oracle,
            crb: bound(closed, a.q)?,
            Q: a.q,
        },
    )
}

#[derive(Serialize)]
#[allow(non_snake_case)]
struct MatrixReport {
    labels: Vec<String>,
    fisher: Vec<Vec<f64>>,
    Q: u64,
    /// `I⁻¹/Q`, absent when the matrix is singular.
    crb: Option<Vec<Vec<f64>>>,
    singular: bool,
    /// Parameter combination that carries no information.
    unidentifiable: Option<String>,
}

fn cmd_qfi_matrix(a: &QfiMatrixArgs, out: &mut dyn Write) -> Result<()> {
    if a.wrt.len() < 2 {
        return Err(CliError::Usage("--wrt needs at least two parameters".into()));
    }
    let mut axes = Vec::with_capacity(a.wrt.len());
    for name in &a.wrt {
        let f = parse_family(name)?;
        if axes.contains(&f) {
            return Err(CliError::Usage(format!("parameter `{f}` given twice")));
        }
        axes.push(f);
    }
    let inputs = a.state.resolve()?;
    let (state, ds) = derivatives_wrt(&inputs.state, &axes)?;
    let fisher = qfi_matrix(&state, &ds)?;
    let (crb, unidentifiable) = match crb_matrix(&fisher, a.q) {
        Ok(b) => (Some(b.entries), None),
        Err(Error::SingularFisher { combination }) => (None, Some(combination)),
        Err(e) => return Err(e.into()),
    };
    emit(
        out,
        &MatrixReport {
            labels: fisher.labels.clone(),
            fisher: fisher.entries,
            Q: a.q,
            singular: crb.is_none(),
            crb,
            unidentifiable,
        },
    )
}

/// Writes `fill`'s output to `path` through a temporary file in the same
/// directory, so a failure never leaves a partial file behind.
fn write_atomically(
    path: &Path,
    fill: impl FnOnce(&mut dyn Write) -> Result<()>,
) -> Result<()> {
    let io_err = |source| CliError::Output {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    fill(tmp.as_file_mut())?;
    tmp.as_file_mut().flush().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

fn to_destination(
    path: Option<&Path>,
    out: &mut dyn Write,
    fill: impl FnOnce(&mut dyn Write) -> Result<()>,
) -> Result<()> {
    match path {
        Some(p) => write_atomically(p, fill),
        None => fill(out),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub theta: f64,
    pub closed: f64,
    pub generic: f64,
    pub crb: f64,
}

/// Rows of a scan, in grid order.
pub fn scan_rows(a: &ScanArgs) -> Result<Vec<ScanRow>> {
    let family = parse_family(&a.family)?;
    let spec = a.vary_spec()?;
    let base = a.state.resolve()?;
    spec.grid()
        .par_iter()
        .map(|&theta| {
            let mut inputs = base;
            spec.knob.apply(&mut inputs, theta)?;
            let (closed, generic) = closed_and_generic(&inputs.family(family)?)?;
            Ok(ScanRow {
                theta,
                closed,
                generic,
                crb: bound(closed, a.q)?,
            })
        })
        .collect()
}

fn cmd_scan(a: &ScanArgs, out: &mut dyn Write) -> Result<()> {
    let rows = scan_rows(a)?;
    to_destination(a.out.as_deref(), out, |w| {
        let mut csv = csv_writer(w);
        csv.write_record(["theta", "I_closed", "I_generic", "crb"])?;
        for r in &rows {
            csv.write_record([r.theta, r.closed, r.generic, r.crb].map(fmt_f64))?;
        }
        csv.flush().map_err(csv::Error::from)?;
        Ok(())
    })
}

#[derive(Serialize)]
struct ScalingReport {
    mode: SqueezeMode,
    rows: usize,
    fit: Option<LogLogFit>,
}

/// Rows and (for two or more photon numbers) the fit of `ln δψ` on `ln N`.
pub fn scaling_rows(a: &PhaseScalingArgs) -> Result<(Vec<PhaseScalingRow>, Option<LogLogFit>)> {
    if let Some(bad) = a.n_total.iter().find(|n| !(**n > 0.0 && n.is_finite())) {
        return Err(CliError::Usage(format!(
            "total photon numbers must be positive, got {bad}"
        )));
    }
    let mode = if a.coherent_only {
        SqueezeMode::CoherentOnly
    } else {
        SqueezeMode::Optimal
    };
    let rows = phase_scaling(&a.n_total, mode)?;
    let fit = if rows.len() >= 2 {
        Some(fit_rows(&rows)?)
    } else {
        None
    };
    Ok((rows, fit))
}

fn cmd_phase_scaling(a: &PhaseScalingArgs, out: &mut dyn Write) -> Result<()> {
    let (rows, fit) = scaling_rows(a)?;
    let write_csv = |w: &mut dyn Write| -> Result<()> {
        let mut csv = csv_writer(w);
        csv.write_record(["N", "split", "alpha", "r", "I_psi", "delta_psi_min"])?;
        for r in &rows {
            csv.write_record([r.n_total, r.split, r.alpha, r.r, r.info, r.delta_psi_min].map(fmt_f64))?;
        }
        csv.flush().map_err(csv::Error::from)?;
        Ok(())
    };
    let report = ScalingReport {
        mode: if a.coherent_only {
            SqueezeMode::CoherentOnly
        } else {
            SqueezeMode::Optimal
        },
        rows: rows.len(),
        fit,
    };
    match &a.out {
        Some(path) => {
            write_atomically(path, write_csv)?;
            emit(out, &report)
        }
        None => {
            write_csv(out)?;
            eprintln!("{}", to_json(&report));
            Ok(())
        }
    }
}

fn parse_families(list: &str) -> Result<Vec<Family>> {
    if list.trim().eq_ignore_ascii_case("all") {
        return Ok(Family::ALL.to_vec());
    }
    let families = list
        .split(',')
        .map(parse_family)
        .collect::<Result<Vec<_>>>()?;
    if families.is_empty() {
        return Err(CliError::Usage("no families given".into()));
    }
    Ok(families)
}

fn cmd_check(a: &CheckArgs, out: &mut dyn Write) -> Result<()> {
    let families = parse_families(&a.families)?;
    let all = Family::ALL.iter().all(|f| families.contains(f));
    let mut cfg = CheckConfig::standard(Some(a.oracle), families, a.seed);
    if let Some(p) = a.points {
        cfg.points = p;
    }
    cfg.matrix_points = match (a.matrix_points, a.oracle) {
        (Some(m), OracleKind::Fock) => m,
        (Some(_), OracleKind::Fd) => {
            return Err(CliError::Usage("--matrix-points needs --oracle fock".into()))
        }
        (None, _) if all => cfg.matrix_points,
        (None, _) => 0,
    };
    let report = run_check(&cfg)?;
    emit(out, &report)?;
    match report.first_failure {
        Some(name) => Err(CliError::CheckFailed(name)),
        None => Ok(()),
    }
}
