//! Quantum Fisher information of Gaussian states and the Cramér–Rao bounds it implies.
//!
//! For a state with covariance `Σ`, purity `P` and mean `X̄`, the Fisher
//! information along parameters `i`, `j` is
//!
//! ```text
//! I_ij = ½ tr(Σ⁻¹∂ᵢΣ Σ⁻¹∂ⱼΣ)/(1+P²) + 2 ∂ᵢP ∂ⱼP/(1−P⁴) + ∂ᵢX̄ᵀ Σ⁻¹ ∂ⱼX̄
//! ```
//!
//! The three terms carry the information in the noise ellipse, in the purity
//! and in the motion of the mean.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{CovMat, GaussianState, QuadVec};

/// Below this gap `1 − P⁴` the state counts as pure.
pub const PURE_GAP: f64 = 1e-10;
/// Largest `|P'|` accepted at the pure boundary.
pub const PURE_DP_TOL: f64 = 1e-8;
/// Smallest covariance determinant accepted for inversion.
pub const MIN_COV_DET: f64 = 1e-12;
/// Tolerance on negative eigenvalues of a Fisher matrix.
pub const PSD_TOL: f64 = 1e-10;
/// Relative eigenvalue floor below which a Fisher matrix counts as singular.
pub const SINGULAR_REL: f64 = 1e-12;

const NEG_CLAMP: f64 = 1e-12;

/// Derivative of a state with respect to one parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateDerivative {
    pub d_mean: QuadVec,
    pub d_cov: CovMat,
    /// Derivative of the thermal photon number. Zero means "derive the purity
    /// change from the covariance"; nonzero values are cross-checked against it.
    pub d_nth: f64,
}

impl StateDerivative {
    pub const ZERO: StateDerivative = StateDerivative {
        d_mean: QuadVec::ZERO,
        d_cov: CovMat::ZERO,
        d_nth: 0.0,
    };

    pub fn new(d_mean: QuadVec, d_cov: CovMat, d_nth: f64) -> Self {
        Self {
            d_mean,
            d_cov,
            d_nth,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d_mean.is_finite() && self.d_cov.is_finite() && self.d_nth.is_finite() {
            Ok(())
        } else {
            Err(Error::Domain("state derivative has non-finite entries".into()))
        }
    }
}

/// Purity and inverse covariance, shared by every matrix entry.
struct Workspace {
    inv: CovMat,
    purity: f64,
    /// `1 − P⁴`
    gap: f64,
}

impl Workspace {
    fn new(s: &GaussianState) -> Result<Self> {
        let det = s.cov().det();
        if !(det >= MIN_COV_DET) {
            return Err(Error::SingularCovariance(det));
        }
        let purity = 1.0 / det.sqrt();
        let p2 = purity * purity;
        Ok(Self {
            inv: s.cov().inverse(),
            purity,
            gap: (1.0 - p2) * (1.0 + p2),
        })
    }

    /// `Σ⁻¹ ∂Σ` as a general 2×2 matrix.
    fn whitened(&self, d: &StateDerivative) -> [[f64; 2]; 2] {
        mat_mul(self.inv.as_array(), d.d_cov.as_array())
    }

    /// `∂P` from Jacobi's formula `∂P = −½ P tr(Σ⁻¹∂Σ)`, or from `∂n_th` via
    /// `P = 1/(2n_th+1)` when supplied; the two must agree.
    fn purity_derivative(&self, d: &StateDerivative, m: &[[f64; 2]; 2]) -> Result<f64> {
        let derived = -0.5 * self.purity * (m[0][0] + m[1][1]);
        if d.d_nth == 0.0 {
            return Ok(derived);
        }
        let supplied = -2.0 * self.purity * self.purity * d.d_nth;
        if (supplied - derived).abs() > 1e-8 * supplied.abs().max(1.0) {
            return Err(Error::InconsistentDerivative { supplied, derived });
        }
        Ok(supplied)
    }
}

struct Prepared {
    whitened: [[f64; 2]; 2],
    d_purity: f64,
    d_mean: QuadVec,
}

fn prepare(ws: &Workspace, d: &StateDerivative) -> Result<Prepared> {
    d.validate()?;
    let whitened = ws.whitened(d);
    let d_purity = ws.purity_derivative(d, &whitened)?;
    if ws.gap < PURE_GAP && d_purity.abs() > PURE_DP_TOL {
        return Err(Error::PurityBoundary {
            dp: d_purity,
            gap: ws.gap,
        });
    }
    Ok(Prepared {
        whitened,
        d_purity,
        d_mean: d.d_mean,
    })
}

fn pair_entry(ws: &Workspace, a: &Prepared, b: &Prepared) -> f64 {
    let p2 = ws.purity * ws.purity;
    let noise = 0.5 * trace_of_product(&a.whitened, &b.whitened) / (1.0 + p2);
    let purity = if ws.gap < PURE_GAP {
        0.0
    } else {
        2.0 * a.d_purity * b.d_purity / ws.gap
    };
    let displacement = ws.inv.bilinear(a.d_mean, b.d_mean);
    noise + purity + displacement
}

fn clamp_diagonal(v: f64) -> f64 {
    if (-NEG_CLAMP..0.0).contains(&v) {
        0.0
    } else {
        v
    }
}

/// Quantum Fisher information for a single parameter.
pub fn qfi_single(s: &GaussianState, d: &StateDerivative) -> Result<f64> {
    let ws = Workspace::new(s)?;
    let prep = prepare(&ws, d)?;
    Ok(clamp_diagonal(pair_entry(&ws, &prep, &prep)))
}

/// The three additive contributions to a single-parameter QFI.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QfiTerms {
    pub noise: f64,
    pub purity: f64,
    pub displacement: f64,
}

impl QfiTerms {
    pub fn total(&self) -> f64 {
        self.noise + self.purity + self.displacement
    }
}

/// Same as [`qfi_single`], split into its three terms.
pub fn qfi_terms(s: &GaussianState, d: &StateDerivative) -> Result<QfiTerms> {
    let ws = Workspace::new(s)?;
    let prep = prepare(&ws, d)?;
    let p2 = ws.purity * ws.purity;
    Ok(QfiTerms {
        noise: 0.5 * trace_of_product(&prep.whitened, &prep.whitened) / (1.0 + p2),
        purity: if ws.gap < PURE_GAP {
            0.0
        } else {
            2.0 * prep.d_purity * prep.d_purity / ws.gap
        },
        displacement: ws.inv.bilinear(prep.d_mean, prep.d_mean),
    })
}

/// Purity derivative implied by a state derivative (`−½ P tr(Σ⁻¹∂Σ)` unless `d_nth` is given).
pub fn purity_derivative(s: &GaussianState, d: &StateDerivative) -> Result<f64> {
    let ws = Workspace::new(s)?;
    let m = ws.whitened(d);
    ws.purity_derivative(d, &m)
}

/// Symmetric positive-semidefinite Fisher matrix with labelled axes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FisherMatrix {
    pub labels: Vec<String>,
    /// Row-major entries.
    pub entries: Vec<Vec<f64>>,
}

impl FisherMatrix {
    /// Validates shape, symmetry and positive semidefiniteness. Entries are
    /// symmetrized (averaged with the transpose) after the symmetry check.
    pub fn new(labels: Vec<String>, entries: Vec<Vec<f64>>) -> Result<Self> {
        let n = labels.len();
        if entries.len() != n || entries.iter().any(|row| row.len() != n) {
            return Err(Error::Shape(format!(
                "{} labels but a {}-row matrix",
                n,
                entries.len()
            )));
        }
        let scale = entries
            .iter()
            .flatten()
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(1.0);
        let mut sym = entries;
        for i in 0..n {
            for j in (i + 1)..n {
                let (a, b) = (sym[i][j], sym[j][i]);
                if !a.is_finite() || !b.is_finite() || (a - b).abs() > 1e-8 * scale {
                    return Err(Error::Shape(format!(
                        "entries ({i},{j}) = {a} and ({j},{i}) = {b} are not symmetric"
                    )));
                }
                let m = 0.5 * (a + b);
                sym[i][j] = m;
                sym[j][i] = m;
            }
        }
        let out = Self {
            labels,
            entries: sym,
        };
        let min = out.min_eigenvalue();
        if min < -PSD_TOL {
            return Err(Error::NotPositiveSemidefinite(min));
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i][j]
    }

    /// Entry by parameter names.
    pub fn entry(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.labels.iter().position(|l| l == a)?;
        let j = self.labels.iter().position(|l| l == b)?;
        Some(self.entries[i][j])
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| self.entries[i][j])
    }

    pub fn eigen(&self) -> SymmetricEigen<f64, nalgebra::Dyn> {
        self.to_matrix().symmetric_eigen()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        if self.dim() == 0 {
            return 0.0;
        }
        self.eigen().eigenvalues.min()
    }
}

/// Fisher matrix for several parameters, one labelled derivative per axis.
pub fn qfi_matrix(s: &GaussianState, ds: &[(String, StateDerivative)]) -> Result<FisherMatrix> {
    let ws = Workspace::new(s)?;
    let prepared = ds
        .iter()
        .map(|(_, d)| prepare(&ws, d))
        .collect::<Result<Vec<_>>>()?;
    let n = ds.len();
    let mut entries = vec![vec![0.0; n]; n];
    for i in 0..n {
        entries[i][i] = clamp_diagonal(pair_entry(&ws, &prepared[i], &prepared[i]));
        for j in (i + 1)..n {
            let v = pair_entry(&ws, &prepared[i], &prepared[j]);
            entries[i][j] = v;
            entries[j][i] = v;
        }
    }
    FisherMatrix::new(ds.iter().map(|(l, _)| l.clone()).collect(), entries)
}

/// Lower bound `1/(Q·I)` on the variance of an estimator from `q` repetitions.
pub fn crb_single(info: f64, q: u64) -> Result<f64> {
    if q == 0 {
        return Err(Error::Domain("number of measurements Q must be positive".into()));
    }
    if !(info > 1e-300) {
        return Err(Error::ZeroInformation(info));
    }
    Ok(1.0 / (q as f64 * info))
}

/// Covariance lower bound `I⁻¹/Q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceBound {
    pub labels: Vec<String>,
    pub entries: Vec<Vec<f64>>,
}

/// Matrix Cramér–Rao bound. Fails when the Fisher matrix is singular, naming
/// the parameter combination that carries no information.
pub fn crb_matrix(f: &FisherMatrix, q: u64) -> Result<CovarianceBound> {
    if q == 0 {
        return Err(Error::Domain("number of measurements Q must be positive".into()));
    }
    let n = f.dim();
    if n == 0 {
        return Err(Error::Shape("empty Fisher matrix".into()));
    }
    let eig = f.eigen();
    let (imin, &lmin) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    let lmax = eig.eigenvalues.max();
    if !(lmax > 0.0) || lmin <= SINGULAR_REL * lmax {
        let v = eig.eigenvectors.column(imin);
        return Err(Error::SingularFisher {
            combination: describe_combination(&f.labels, v.iter().copied()),
        });
    }
    let inv = &eig.eigenvectors
        * DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / (q as f64 * l)))
        * eig.eigenvectors.transpose();
    let entries = (0..n)
        .map(|i| (0..n).map(|j| 0.5 * (inv[(i, j)] + inv[(j, i)])).collect())
        .collect();
    Ok(CovarianceBound {
        labels: f.labels.clone(),
        entries,
    })
}

fn describe_combination(labels: &[String], coeffs: impl Iterator<Item = f64>) -> String {
    let coeffs: Vec<f64> = coeffs.collect();
    let max = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let mut terms = Vec::new();
    for (l, c) in labels.iter().zip(&coeffs) {
        if c.abs() > 1e-6 * max {
            terms.push(format!("{c:+.4}*{l}"));
        }
    }
    terms.join(" ")
}

fn mat_mul(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn trace_of_product(a: &[[f64; 2]; 2], b: &[[f64; 2]; 2]) -> f64 {
    a[0][0] * b[0][0] + a[0][1] * b[1][0] + a[1][0] * b[0][1] + a[1][1] * b[1][1]
}
