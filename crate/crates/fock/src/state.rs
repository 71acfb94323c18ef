//! Density matrices of displaced squeezed thermal states in a truncated
//! number basis.
//!
//! `ρ = R(ψ) D(α) R(χ) S(r) ν S(r)ᵀ R(χ)† D(α)ᵀ R(ψ)†` with `R(θ) = e^{iθ a†a}`,
//! real `α`, `S(r) = exp(r/2 (a² − a†²))` and `ν` the thermal state. The
//! conjugation `R(χ) S(r) R(χ)†` is the squeezer with complex parameter
//! `r e^{2iχ}`; the trailing `R(χ)†` drops out because `ν` is rotation
//! invariant. With this convention the quadrature moments match
//! `qcrb_core::from_params` (x variance `σ² = e^{−2r}` along angle `χ + ψ`).
//!
//! `D` and `S` are exponentiated densely in a work space somewhat larger than
//! the requested cutoff, then the state is cut to `n_max` and renormalized.

use std::collections::HashMap;
use std::sync::Arc;

use faer::{c64, Mat};
use qcrb_core::{CovMat, FamilyPoint, GaussianState, QuadVec, StateParams};

use crate::error::{FockError, Result};
use crate::expm::expm;

pub type C64 = c64;

/// Largest probability allowed above the cutoff.
pub const DEFAULT_TAIL_CAP: f64 = 1e-10;
pub const MIN_N_MAX: usize = 8;
pub const DEFAULT_HARD_CAP: usize = 1000;

/// Cached exponentials are dropped wholesale past this many entries.
const CACHE_LIMIT: usize = 24;

/// Truncated number-basis density matrix.
#[derive(Debug, Clone)]
pub struct FockDensityMatrix {
    entries: Mat<C64>,
    tail_mass: f64,
}

impl FockDensityMatrix {
    /// Wraps a Hermitian, unit-trace matrix.
    pub fn from_entries(entries: Mat<C64>, tail_mass: f64) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(FockError::Dimension(entries.nrows(), entries.ncols()));
        }
        Ok(Self { entries, tail_mass })
    }

    /// `N_max + 1`.
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn n_max(&self) -> usize {
        self.dim() - 1
    }

    pub fn entries(&self) -> &Mat<C64> {
        &self.entries
    }

    /// `1 − tr` before renormalization.
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.entries[(i, i)]).sum()
    }

    /// `max |ρ − ρ†|`.
    pub fn hermiticity_error(&self) -> f64 {
        let e = &self.entries;
        let n = self.dim();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| (e[(i, j)] - e[(j, i)].conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Quadrature mean and covariance (`ħ = 2`).
    pub fn moments(&self) -> (QuadVec, CovMat) {
        let e = &self.entries;
        let mut a = C64::new(0.0, 0.0);
        let mut a2 = C64::new(0.0, 0.0);
        let mut number = 0.0;
        for n in 0..self.dim() {
            let nf = n as f64;
            number += nf * e[(n, n)].re;
            if n >= 1 {
                a += nf.sqrt() * e[(n, n - 1)];
            }
            if n >= 2 {
                a2 += (nf * (nf - 1.0)).sqrt() * e[(n, n - 2)];
            }
        }
        let mean = QuadVec::new(2.0 * a.re, 2.0 * a.im);
        let cov = CovMat::new(
            2.0 * a2.re + 2.0 * number + 1.0 - mean.x * mean.x,
            2.0 * a2.im - mean.x * mean.p,
            -2.0 * a2.re + 2.0 * number + 1.0 - mean.p * mean.p,
        );
        (mean, cov)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Generator {
    Displacement,
    Squeezing,
}

/// Builds states at fixed cutoffs, caching `D(α)` and `S(r)`.
#[derive(Debug)]
pub struct FockBuilder {
    tail_cap: f64,
    hard_cap: usize,
    cache: HashMap<(Generator, u64, usize), Arc<Mat<f64>>>,
}

impl Default for FockBuilder {
    fn default() -> Self {
        Self::new(DEFAULT_TAIL_CAP, DEFAULT_HARD_CAP)
    }
}

/// Internal working dimension for a requested cutoff.
fn work_dim(n_max: usize) -> usize {
    n_max + 1 + (n_max / 4).max(40)
}

impl FockBuilder {
    pub fn new(tail_cap: f64, hard_cap: usize) -> Self {
        Self {
            tail_cap,
            hard_cap,
            cache: HashMap::new(),
        }
    }

    pub fn tail_cap(&self) -> f64 {
        self.tail_cap
    }

    pub fn hard_cap(&self) -> usize {
        self.hard_cap
    }

    fn check_cutoff(&self, n_max: usize) -> Result<()> {
        if n_max < MIN_N_MAX || n_max > self.hard_cap {
            return Err(FockError::CutoffRange {
                n_max,
                min: MIN_N_MAX,
                max: self.hard_cap,
            });
        }
        Ok(())
    }

    fn exponential(&mut self, kind: Generator, value: f64, dim: usize) -> Arc<Mat<f64>> {
        let key = (kind, value.to_bits(), dim);
        if let Some(m) = self.cache.get(&key) {
            return Arc::clone(m);
        }
        let mut g = Mat::<f64>::zeros(dim, dim);
        match kind {
            // α (a† − a)
            Generator::Displacement => {
                for n in 0..dim - 1 {
                    let v = value * ((n + 1) as f64).sqrt();
                    g[(n + 1, n)] = v;
                    g[(n, n + 1)] = -v;
                }
            }
            // r/2 (a² − a†²)
            Generator::Squeezing => {
                for n in 0..dim.saturating_sub(2) {
                    let v = 0.5 * value * (((n + 1) * (n + 2)) as f64).sqrt();
                    g[(n, n + 2)] = v;
                    g[(n + 2, n)] = -v;
                }
            }
        }
        let m = Arc::new(expm(&g));
        if self.cache.len() >= CACHE_LIMIT {
            self.cache.clear();
        }
        self.cache.insert(key, Arc::clone(&m));
        m
    }

    /// State at exactly `n_max`, rejected when the tail mass exceeds the cap.
    pub fn build(&mut self, p: &StateParams, n_max: usize) -> Result<FockDensityMatrix> {
        let rho = self.build_unchecked(p, n_max)?;
        self.check_tail(rho)
    }

    fn check_tail(&self, rho: FockDensityMatrix) -> Result<FockDensityMatrix> {
        if rho.tail_mass > self.tail_cap {
            return Err(FockError::Truncation {
                n_max: rho.n_max(),
                tail: rho.tail_mass,
                cap: self.tail_cap,
            });
        }
        Ok(rho)
    }

    /// State at `n_max` without the tail check (neighbouring points of a
    /// finite difference share the base point's cutoff).
    pub fn build_unchecked(&mut self, p: &StateParams, n_max: usize) -> Result<FockDensityMatrix> {
        self.check_cutoff(n_max)?;
        Ok(truncate(&self.work_state(p, work_dim(n_max))?, n_max))
    }

    /// Unnormalized state on the full `m`-level working space.
    fn work_state(&mut self, p: &StateParams, m: usize) -> Result<Mat<C64>> {
        p.validate()?;
        let q = p.n_th / (p.n_th + 1.0);
        let mut weight = 1.0 / (p.n_th + 1.0);
        let mut thermal = Vec::with_capacity(m);
        for _ in 0..m {
            thermal.push(weight);
            weight *= q;
        }

        // S ν Sᵀ
        let mut re = if p.r == 0.0 {
            Mat::from_fn(m, m, |i, j| if i == j { thermal[i] } else { 0.0 })
        } else {
            let s = self.exponential(Generator::Squeezing, p.r, m);
            let scaled = Mat::from_fn(m, m, |i, j| s[(i, j)] * thermal[j]);
            &scaled * s.transpose()
        };
        let mut im = Mat::<f64>::zeros(m, m);
        rotate(&mut re, &mut im, p.chi);
        if p.alpha != 0.0 {
            let d = self.exponential(Generator::Displacement, p.alpha, m);
            re = &(d.as_ref() * &re) * d.transpose();
            if p.chi != 0.0 {
                im = &(d.as_ref() * &im) * d.transpose();
            }
        }
        rotate(&mut re, &mut im, p.psi);
        Ok(Mat::from_fn(m, m, |i, j| C64::new(re[(i, j)], im[(i, j)])))
    }

    fn work_point(&mut self, point: &FamilyPoint, m: usize) -> Result<Mat<C64>> {
        match *point {
            FamilyPoint::State(p) => self.work_state(&p, m),
            FamilyPoint::Loss { base, eta } => {
                check_eta(eta)?;
                let input = StateParams::new(base.alpha0, 0.0, -base.sigma.ln(), 0.0, 0.0);
                Ok(attenuate_entries(&self.work_state(&input, m)?, eta))
            }
        }
    }

    /// Any family point at `n_max`, including attenuated states.
    pub fn build_point(&mut self, point: &FamilyPoint, n_max: usize) -> Result<FockDensityMatrix> {
        let rho = self.build_point_unchecked(point, n_max)?;
        self.check_tail(rho)
    }

    pub fn build_point_unchecked(
        &mut self,
        point: &FamilyPoint,
        n_max: usize,
    ) -> Result<FockDensityMatrix> {
        Ok(self.build_nested(point, &[n_max])?.remove(0))
    }

    /// The same state truncated at several cutoffs, all cut from one working
    /// space sized for the largest. No tail check.
    pub fn build_nested(
        &mut self,
        point: &FamilyPoint,
        cutoffs: &[usize],
    ) -> Result<Vec<FockDensityMatrix>> {
        let largest = cutoffs
            .iter()
            .copied()
            .max()
            .ok_or_else(|| qcrb_core::Error::Shape("no cutoffs given".into()))?;
        for &n in cutoffs {
            self.check_cutoff(n)?;
        }
        let full = self.work_point(point, work_dim(largest))?;
        Ok(cutoffs.iter().map(|&n| truncate(&full, n)).collect())
    }

    /// Smallest cutoff whose tail mass is below the cap. The tail at every
    /// cutoff is read off one build at a moment-based guess, which grows by
    /// 25 % until it covers the answer.
    pub fn adaptive_cutoff(&mut self, point: &FamilyPoint) -> Result<usize> {
        let mut guess = estimate_n_max(&point.gaussian()?, self.tail_cap).min(self.hard_cap);
        loop {
            let full = self.work_point(point, work_dim(guess))?;
            let mut kept = 0.0;
            for n in 0..=guess {
                kept += full[(n, n)].re;
                if n >= MIN_N_MAX && 1.0 - kept <= self.tail_cap {
                    return Ok(n);
                }
            }
            if guess == self.hard_cap {
                return Err(FockError::Truncation {
                    n_max: guess,
                    tail: 1.0 - kept,
                    cap: self.tail_cap,
                });
            }
            guess = (guess + guess.div_ceil(4)).min(self.hard_cap);
        }
    }

    /// State at the adaptive cutoff.
    pub fn build_adaptive(&mut self, point: &FamilyPoint) -> Result<FockDensityMatrix> {
        let n_max = self.adaptive_cutoff(point)?;
        self.build_point(point, n_max)
    }
}

/// Leading `(n_max+1)`-level block of a working-space state, renormalized.
///
/// The working-space transforms are orthogonal, so everything missing from
/// the kept block (including the thermal weight beyond the working space)
/// lies above the cutoff.
fn truncate(full: &Mat<C64>, n_max: usize) -> FockDensityMatrix {
    let k = n_max + 1;
    let kept: f64 = (0..k).map(|i| full[(i, i)].re).sum();
    let entries = Mat::from_fn(k, k, |i, j| full[(i, j)] / kept);
    FockDensityMatrix {
        entries: hermitize(&entries),
        tail_mass: (1.0 - kept).max(0.0),
    }
}

/// Conjugation by `e^{iθ a†a}`: entry `(m, n)` picks up `e^{iθ(m−n)}`.
fn rotate(re: &mut Mat<f64>, im: &mut Mat<f64>, theta: f64) {
    if theta == 0.0 {
        return;
    }
    let n = re.nrows();
    for i in 0..n {
        for j in 0..n {
            let (s, c) = (theta * (i as f64 - j as f64)).sin_cos();
            let (a, b) = (re[(i, j)], im[(i, j)]);
            re[(i, j)] = a * c - b * s;
            im[(i, j)] = a * s + b * c;
        }
    }
}

pub(crate) fn hermitize(m: &Mat<C64>) -> Mat<C64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5)
}

fn check_eta(eta: f64) -> Result<()> {
    if !(0.0..1.0).contains(&eta) {
        return Err(qcrb_core::Error::InvalidParameter {
            name: "eta",
            value: eta,
            reason: "must lie in [0, 1)",
        }
        .into());
    }
    Ok(())
}

/// `ρ'_{mn} = Σ_k c_{mk} c_{nk} ρ_{m+k,n+k}` with
/// `c_{mk} = √C(m+k,k) (1−η)^{m/2} η^{k/2}`, without renormalization.
fn attenuate_entries(src: &Mat<C64>, eta: f64) -> Mat<C64> {
    let dim = src.nrows();
    if eta == 0.0 {
        return src.clone();
    }
    let mut ln_fact = vec![0.0f64; 2 * dim + 1];
    for k in 1..ln_fact.len() {
        ln_fact[k] = ln_fact[k - 1] + (k as f64).ln();
    }
    let (ln_keep, ln_lose) = ((1.0 - eta).ln(), eta.ln());
    let coef = Mat::from_fn(dim, dim, |m, k| {
        let ln_binom = ln_fact[m + k] - ln_fact[k] - ln_fact[m];
        (0.5 * (ln_binom + m as f64 * ln_keep + k as f64 * ln_lose)).exp()
    });
    Mat::from_fn(dim, dim, |m, n| {
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..dim - m.max(n) {
            acc += src[(m + k, n + k)] * (coef[(m, k)] * coef[(n, k)]);
        }
        acc
    })
}

/// Attenuation by `η`: a beam splitter of transmissivity `1 − η` with vacuum.
///
/// `ρ'_{mn} = Σ_k √(C(m+k,k) C(n+k,k)) (1−η)^{(m+n)/2} η^k ρ_{m+k,n+k}`.
/// Loss only moves population down, so the cutoff is kept.
pub fn attenuate(rho: &FockDensityMatrix, eta: f64) -> Result<FockDensityMatrix> {
    check_eta(eta)?;
    if eta == 0.0 {
        return Ok(rho.clone());
    }
    let out = attenuate_entries(rho.entries(), eta);
    let dim = out.nrows();
    let trace: f64 = (0..dim).map(|i| out[(i, i)].re).sum();
    let out = Mat::from_fn(dim, dim, |i, j| out[(i, j)] / trace);
    Ok(FockDensityMatrix {
        entries: hermitize(&out),
        tail_mass: rho.tail_mass(),
    })
}

/// Cutoff guess from the moments: the photon-number tail of a Gaussian state
/// with largest covariance eigenvalue `λ` decays like `((λ−1)/(λ+1))ⁿ`,
/// and displacement shifts it by about `|α|² + a few |α|√λ`.
pub fn estimate_n_max(s: &GaussianState, tail_cap: f64) -> usize {
    let (_, lambda) = s.cov().eigenvalues();
    let ratio = (lambda - 1.0) / (lambda + 1.0);
    let spread = if ratio > 1e-6 {
        ((0.1 * tail_cap).ln() / ratio.ln()).max(0.0)
    } else {
        0.0
    };
    let mean = s.mean();
    let alpha2 = 0.25 * (mean.x * mean.x + mean.p * mean.p);
    let shift = alpha2 + 6.0 * alpha2.sqrt() * lambda.sqrt() + 12.0;
    ((spread + shift).ceil() as usize).max(MIN_N_MAX)
}

/// State at a fixed cutoff under the default tail cap.
pub fn build_state(p: &StateParams, n_max: usize) -> Result<FockDensityMatrix> {
    FockBuilder::default().build(p, n_max)
}
