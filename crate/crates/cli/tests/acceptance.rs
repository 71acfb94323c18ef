//! Acceptance suite. Prints one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p qcrb-cli --test acceptance`. A criterion listed in
//! `KNOWN_FAILURES` must still fail; every other criterion must pass.

use std::time::{Duration, Instant};

use qcrb_cli::check::{
    closed_form_matrix, family_rng, relative_error, run_check, CheckConfig, OracleKind, Regime,
};
use qcrb_core::fd_oracle::family_qfi_fd;
use qcrb_core::families::{loss_angle_qfi, off_diagonal_closed_form};
use qcrb_core::qfi::purity_derivative;
use qcrb_core::scaling::{fit_rows, log_grid, phase_scaling, SqueezeMode};
use qcrb_core::{
    derivatives_wrt, fidelity, from_params, qfi_matrix, qfi_single, Family, FamilyPoint,
    GaussianState, ParamFamily, StateDerivative, StateParams,
};
use qcrb_fock::{uhlmann_fidelity, FockBuilder};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_100_419;

/// Criteria that cannot pass, with the reason. See the README.
const KNOWN_FAILURES: &[(&str, &str)] = &[(
    "6a",
    "the optimal split puts nearly all photons into squeezing, giving I ~ 8N(N+1) and slope -1",
)];

struct Outcome {
    id: &'static str,
    title: &'static str,
    passed: bool,
    detail: String,
    elapsed: Duration,
}

fn timed(
    id: &'static str,
    title: &'static str,
    limit: Option<Duration>,
    f: impl FnOnce() -> (bool, String),
) -> Outcome {
    let start = Instant::now();
    let (mut passed, mut detail) = f();
    let elapsed = start.elapsed();
    if let Some(limit) = limit {
        if elapsed > limit {
            passed = false;
        }
        detail = format!("{detail}; runtime {:.2?} (limit {:?})", elapsed, limit);
    }
    Outcome {
        id,
        title,
        passed,
        detail,
        elapsed,
    }
}

fn check_summary(cfg: &CheckConfig) -> (bool, String) {
    let report = run_check(cfg).expect("sampling succeeds");
    let worst_generic = report
        .families
        .iter()
        .map(|f| f.max_rel_generic)
        .fold(0.0, f64::max);
    let worst_oracle = report
        .families
        .iter()
        .filter_map(|f| f.max_rel_oracle)
        .fold(0.0, f64::max);
    let mut detail = format!(
        "{} families x {} points, max rel err generic {worst_generic:.2e}",
        report.families.len(),
        report.points_per_family
    );
    if cfg.oracle.is_some() {
        detail += &format!(", oracle {worst_oracle:.2e}");
    }
    if let Some(m) = &report.matrix {
        detail += &format!(
            ", 5x5 matrix {} points max scaled err {:.2e} (n_max <= {})",
            m.points, m.max_scaled_oracle, m.max_n_max
        );
    }
    for f in report.families.iter().filter(|f| !f.passed) {
        detail += &format!(
            "; {} failed {} points{}",
            f.family,
            f.failures,
            f.first_error.as_deref().map(|e| format!(" ({e})")).unwrap_or_default()
        );
    }
    if let Some(m) = report.matrix.as_ref().filter(|m| !m.passed) {
        detail += &format!("; matrix failed {} points {:?}", m.failures, m.first_error);
    }
    (report.passed, detail)
}

fn criterion_1() -> Outcome {
    timed(
        "1",
        "closed form vs generic engine, 8 families x 1000 points, rel <= 1e-10",
        Some(Duration::from_secs(5)),
        || check_summary(&CheckConfig::standard(None, Family::ALL.to_vec(), SEED)),
    )
}

fn criterion_2() -> Outcome {
    timed(
        "2",
        "fidelity-curvature oracle, 8 families x 100 points, rel <= 1e-4",
        Some(Duration::from_secs(30)),
        || check_summary(&CheckConfig::standard(Some(OracleKind::Fd), Family::ALL.to_vec(), SEED)),
    )
}

fn criterion_3() -> Outcome {
    timed(
        "3",
        "number-basis oracle, 8 families x 20 points + 5x5 matrix, rel <= 1e-4",
        Some(Duration::from_secs(600)),
        || {
            check_summary(&CheckConfig::standard(
                Some(OracleKind::Fock),
                Family::ALL.to_vec(),
                SEED,
            ))
        },
    )
}

fn criterion_4() -> Outcome {
    timed(
        "4",
        "closed-form vs Uhlmann fidelity, 200 pairs, |dF| <= 1e-6",
        None,
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(SEED);
            rng.set_stream(4);
            let mut builder = FockBuilder::default();
            let mut worst = 0.0f64;
            let mut errors = Vec::new();
            for _ in 0..200 {
                let a = Regime::FOCK.sample_params(&mut rng, 0.0);
                // Half the pairs are close neighbours, where F is near 1.
                let b = if rng.gen_bool(0.5) {
                    Regime::FOCK.sample_params(&mut rng, 0.0)
                } else {
                    let mut b = a;
                    b.alpha += rng.gen_range(0.0..0.2);
                    b.psi += rng.gen_range(-0.2..0.2);
                    b.r = (b.r + rng.gen_range(-0.1..0.1)).clamp(-1.0, 1.0);
                    b.n_th = (b.n_th + rng.gen_range(0.0..0.2)).min(3.0);
                    b.alpha = b.alpha.min(2.0);
                    b
                };
                let run = |builder: &mut FockBuilder| -> Result<f64, String> {
                    let (pa, pb) = (FamilyPoint::State(a), FamilyPoint::State(b));
                    let n = builder
                        .adaptive_cutoff(&pa)
                        .map_err(|e| e.to_string())?
                        .max(builder.adaptive_cutoff(&pb).map_err(|e| e.to_string())?);
                    let ra = builder.build_point(&pa, n).map_err(|e| e.to_string())?;
                    let rb = builder.build_point(&pb, n).map_err(|e| e.to_string())?;
                    let numeric = uhlmann_fidelity(&ra, &rb).map_err(|e| e.to_string())?;
                    let closed = fidelity(&from_params(&a).unwrap(), &from_params(&b).unwrap())
                        .map_err(|e| e.to_string())?;
                    Ok((numeric - closed).abs())
                };
                match run(&mut builder) {
                    Ok(d) => worst = worst.max(d),
                    Err(e) => errors.push(e),
                }
            }
            (
                worst <= 1e-6 && errors.is_empty(),
                format!("max |dF| {worst:.2e}, {} errors {:?}", errors.len(), errors.first()),
            )
        },
    )
}

fn criterion_5() -> Outcome {
    timed(
        "5",
        "point values: I_alpha = 4P0, I_nth(1) = 1/2, I_chi(r=0) = 0, I_chipsi = I_chi, I_alphapsi(chi=0) = 0",
        None,
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(SEED);
            rng.set_stream(5);
            let mut worst = 0.0f64;
            let mut worst_off = 0.0f64;
            let mut note = |label: &str, got: f64, want: f64, failures: &mut Vec<String>| {
                let err = relative_error(got, want);
                worst = worst.max(err);
                if err > 1e-12 {
                    failures.push(format!("{label}: {got} vs {want}"));
                }
            };
            let mut failures = Vec::new();
            for _ in 0..50 {
                let mut p = Regime::GENERAL.sample_params(&mut rng, 0.05);
                // sigma = 1
                p.r = 0.0;
                let p0 = p.purity0();
                let alpha = ParamFamily::at_base(Family::Alpha, p).unwrap();
                let (s, d) = alpha.analytic_derivative().unwrap();
                note("I_alpha", alpha.closed_form_qfi().unwrap(), 4.0 * p0, &mut failures);
                note("I_alpha generic", qfi_single(&s, &d).unwrap(), 4.0 * p0, &mut failures);
                let chi = ParamFamily::at_base(Family::Chi, p).unwrap();
                let (s, d) = chi.analytic_derivative().unwrap();
                note("I_chi", chi.closed_form_qfi().unwrap(), 0.0, &mut failures);
                note("I_chi generic", qfi_single(&s, &d).unwrap(), 0.0, &mut failures);

                let mut q = Regime::GENERAL.sample_params(&mut rng, 0.05);
                let (state, ds) = derivatives_wrt(&q, &Family::FIVE).unwrap();
                let m = qfi_matrix(&state, &ds).unwrap();
                let i_chi = ParamFamily::at_base(Family::Chi, q).unwrap().closed_form_qfi().unwrap();
                note("I_chipsi", m.entry("chi", "psi").unwrap(), i_chi, &mut failures);
                let closed = closed_form_matrix(&q, &Family::FIVE).unwrap();
                for i in 0..5 {
                    for j in 0..5 {
                        let pair = (Family::FIVE[i], Family::FIVE[j]);
                        let nonzero = matches!(
                            pair,
                            (Family::Chi, Family::Psi)
                                | (Family::Psi, Family::Chi)
                                | (Family::Alpha, Family::Psi)
                                | (Family::Psi, Family::Alpha)
                        );
                        if i != j && !nonzero {
                            worst_off = worst_off.max(m.get(i, j).abs()).max(closed[i][j].abs());
                        }
                    }
                }
                q.chi = 0.0;
                let (state, ds) = derivatives_wrt(&q, &[Family::Alpha, Family::Psi]).unwrap();
                let m = qfi_matrix(&state, &ds).unwrap();
                worst_off = worst_off.max(m.get(0, 1).abs());
                worst_off = worst_off
                    .max(off_diagonal_closed_form(Family::Alpha, Family::Psi, &q).unwrap().abs());
            }
            let nth = ParamFamily::at_base(Family::NTh, StateParams::new(0.7, 0.2, 0.4, 0.1, 1.0))
                .unwrap();
            let (s, d) = nth.analytic_derivative().unwrap();
            note("I_nth(1)", nth.closed_form_qfi().unwrap(), 0.5, &mut failures);
            note("I_nth(1) generic", qfi_single(&s, &d).unwrap(), 0.5, &mut failures);
            (
                failures.is_empty() && worst_off <= 1e-10,
                format!(
                    "max point error {worst:.2e}, max vanishing off-diagonal {worst_off:.2e}{}",
                    failures.first().map(|f| format!("; {f}")).unwrap_or_default()
                ),
            )
        },
    )
}

fn criterion_6() -> (Outcome, Outcome) {
    let grid = log_grid(1e2, 1e6, 9).unwrap();
    let optimal = timed(
        "6a",
        "optimal phase scaling, slope of delta_psi vs N = -0.75 +- 0.02",
        Some(Duration::from_secs(10)),
        || {
            let rows = phase_scaling(&grid, SqueezeMode::Optimal).unwrap();
            let fit = fit_rows(&rows).unwrap();
            (
                (fit.slope + 0.75).abs() <= 0.02,
                format!("slope {:.6}, R^2 {:.9}", fit.slope, fit.r_squared),
            )
        },
    );
    let coherent = timed(
        "6b",
        "coherent-only phase scaling, slope = -0.50 +- 0.01",
        Some(Duration::from_secs(10)),
        || {
            let rows = phase_scaling(&grid, SqueezeMode::CoherentOnly).unwrap();
            let fit = fit_rows(&rows).unwrap();
            (
                (fit.slope + 0.5).abs() <= 0.01,
                format!("slope {:.6}, R^2 {:.9}", fit.slope, fit.r_squared),
            )
        },
    );
    (optimal, coherent)
}

/// The loss information written out term by term, independent of the library.
fn loss_formula(alpha0: f64, sigma: f64, eta: f64) -> f64 {
    let s2 = sigma * sigma;
    1.0 / (1.0 - eta)
        * (alpha0.powi(2) / (s2 + eta * (1.0 - s2))
            + (1.0 - 2.0 * eta * (1.0 - eta)) * (1.0 - s2).powi(2)
                / (2.0 * eta * (2.0 * s2 + eta * (1.0 - eta) * (1.0 - s2).powi(2))))
}

fn scaled(d: &StateDerivative, k: f64) -> StateDerivative {
    StateDerivative::new(d.d_mean.scale(k), d.d_cov.scale(k), d.d_nth * k)
}

fn criterion_7() -> Outcome {
    timed(
        "7",
        "loss information vs reference formula and 1 - eta = cos^2 phi chain rule, rel <= 1e-10",
        None,
        || {
            let mut worst_formula = 0.0f64;
            let mut worst_chain = 0.0f64;
            let mut count = 0;
            for i in 0..=18 {
                let eta = 0.05 + 0.05 * i as f64;
                for j in 0..=9 {
                    let sigma = 0.3 + 0.3 * j as f64;
                    for k in 0..=6 {
                        let alpha0 = 0.5 * k as f64;
                        let f = ParamFamily::loss(alpha0, sigma, eta).unwrap();
                        let (state, d) = f.analytic_derivative().unwrap();
                        let i_eta = qfi_single(&state, &d).unwrap();
                        let reference = loss_formula(alpha0, sigma, eta);
                        worst_formula = worst_formula.max(relative_error(i_eta, reference));
                        worst_formula =
                            worst_formula.max(relative_error(f.closed_form_qfi().unwrap(), reference));

                        // eta = sin^2 phi, so d eta / d phi = sin 2 phi.
                        let phi = eta.sqrt().asin();
                        let i_phi = qfi_single(&state, &scaled(&d, (2.0 * phi).sin())).unwrap();
                        worst_chain =
                            worst_chain.max(relative_error(i_phi, loss_angle_qfi(alpha0, sigma, phi).unwrap()));
                        worst_chain =
                            worst_chain.max(relative_error(i_phi, i_eta * (2.0 * phi).sin().powi(2)));
                        count += 1;
                    }
                }
            }
            (
                worst_formula <= 1e-10 && worst_chain <= 1e-10,
                format!(
                    "{count} grid points, max rel err formula {worst_formula:.2e}, chain rule {worst_chain:.2e}"
                ),
            )
        },
    )
}

fn random_state<R: Rng>(rng: &mut R) -> GaussianState {
    from_params(&Regime::GENERAL.sample_params(rng, 0.0)).unwrap()
}

fn criterion_8() -> Outcome {
    timed(
        "8",
        "property suites on 10^4 seeded samples",
        None,
        || {
            let mut samples = 0usize;
            let mut failures: Vec<String> = Vec::new();
            let mut fail = |name: &str, msg: String| {
                if failures.len() < 5 {
                    failures.push(format!("{name}: {msg}"));
                }
            };

            // Fidelity symmetry and bounds.
            let mut rng = ChaCha8Rng::seed_from_u64(SEED);
            rng.set_stream(80);
            for _ in 0..2000 {
                let (a, b) = (random_state(&mut rng), random_state(&mut rng));
                let (fab, fba) = (fidelity(&a, &b).unwrap(), fidelity(&b, &a).unwrap());
                let faa = fidelity(&a, &a).unwrap();
                if (fab - fba).abs() > 1e-12 || !(0.0..=1.0).contains(&fab) || (faa - 1.0).abs() > 1e-12 {
                    fail("fidelity", format!("{fab} {fba} {faa}"));
                }
                samples += 1;
            }

            // Nonnegative information on every family.
            for family in Family::ALL {
                let mut rng = family_rng(SEED ^ 81, family);
                for _ in 0..250 {
                    let f = Regime::GENERAL.sample_family(family, &mut rng).unwrap();
                    let (s, d) = f.analytic_derivative().unwrap();
                    let i = qfi_single(&s, &d).unwrap();
                    if !(i >= 0.0) {
                        fail("nonnegativity", format!("{family} {i}"));
                    }
                    samples += 1;
                }
            }

            // I_r = I_{sigma^2} (d sigma^2 / dr)^2 = 4 sigma^4 I_{sigma^2}.
            let mut rng = ChaCha8Rng::seed_from_u64(SEED);
            rng.set_stream(82);
            for _ in 0..2000 {
                let p = Regime::GENERAL.sample_params(&mut rng, 0.0);
                let (s, d) = ParamFamily::at_base(Family::R, p).unwrap().analytic_derivative().unwrap();
                let i_r = qfi_single(&s, &d).unwrap();
                let (s, d) =
                    ParamFamily::at_base(Family::Sigma2, p).unwrap().analytic_derivative().unwrap();
                let i_s2 = qfi_single(&s, &d).unwrap();
                let s4 = p.sigma2().powi(2);
                if relative_error(4.0 * s4 * i_s2, i_r) > 1e-10 {
                    fail("reparametrization", format!("{p:?}: {i_r} vs {}", 4.0 * s4 * i_s2));
                }
                samples += 1;
            }

            // Fisher matrices are positive semidefinite.
            let mut rng = ChaCha8Rng::seed_from_u64(SEED);
            rng.set_stream(83);
            for _ in 0..2000 {
                let p = Regime::GENERAL.sample_params(&mut rng, 0.05);
                let (state, ds) = derivatives_wrt(&p, &Family::FIVE).unwrap();
                let m = qfi_matrix(&state, &ds).unwrap();
                let scale = (0..5).map(|i| m.get(i, i)).fold(1.0, f64::max);
                if m.min_eigenvalue() < -1e-10 * scale {
                    fail("psd", format!("{p:?}: {}", m.min_eigenvalue()));
                }
                samples += 1;
            }

            // P' from the covariance agrees with -2 n_th' / (2 n_th + 1)^2 and
            // with a central difference of the purity.
            let mut rng = ChaCha8Rng::seed_from_u64(SEED);
            rng.set_stream(84);
            for k in 0..1000 {
                let family = Family::ALL[k % Family::ALL.len()];
                let f = Regime::GENERAL.sample_family(family, &mut rng).unwrap();
                let (s, d) = f.analytic_derivative().unwrap();
                let dp = purity_derivative(&s, &d).unwrap();
                let h = 1e-5 * f.point().abs().max(1.0);
                let h = h.min(0.25 * f.max_step());
                let t = f.point();
                let numeric = (f.state_at(t + h).unwrap().purity()
                    - f.state_at(t - h).unwrap().purity())
                    / (2.0 * h);
                let mut ok = (dp - numeric).abs() <= 1e-6 * dp.abs().max(1.0);
                if let FamilyPoint::State(p) = f.params().unwrap() {
                    if family == Family::NTh {
                        let expected = -2.0 / (2.0 * p.n_th + 1.0).powi(2);
                        ok &= relative_error(dp, expected) <= 1e-12;
                    }
                }
                if !ok {
                    fail("purity derivative", format!("{family} {dp} vs {numeric}"));
                }
                samples += 1;
            }

            // Fidelity is stationary at the true parameter.
            let mut rng = ChaCha8Rng::seed_from_u64(SEED);
            rng.set_stream(85);
            for k in 0..1000 {
                let family = Family::ALL[k % Family::ALL.len()];
                let f = Regime::GENERAL.sample_family(family, &mut rng).unwrap();
                match family_qfi_fd(&f) {
                    Ok(e) if e.slope.abs() <= 10.0 * e.h * e.coarse.abs().max(1.0) => {}
                    Ok(e) => fail("smoothness", format!("{family} slope {} at h {}", e.slope, e.h)),
                    Err(err) => fail("smoothness", format!("{family}: {err}")),
                }
                samples += 1;
            }

            (
                failures.is_empty() && samples >= 10_000,
                format!("{samples} samples, {} failures {:?}", failures.len(), failures.first()),
            )
        },
    )
}

fn main() {
    let mut outcomes = vec![criterion_1(), criterion_2(), criterion_3(), criterion_4(), criterion_5()];
    let (a, b) = criterion_6();
    outcomes.extend([a, b, criterion_7(), criterion_8()]);

    let mut unexpected = Vec::new();
    for o in &outcomes {
        let known = KNOWN_FAILURES.iter().find(|(id, _)| *id == o.id);
        let verdict = if o.passed { "PASS" } else { "FAIL" };
        let note = match known {
            Some((_, why)) if !o.passed => format!(" [known: {why}]"),
            _ => String::new(),
        };
        println!("{verdict} {:>3}  {} -- {}{note} ({:.2?})", o.id, o.title, o.detail, o.elapsed);
        match (known, o.passed) {
            (None, false) => unexpected.push(format!("{} failed", o.id)),
            (Some(_), true) => unexpected.push(format!("{} passes; drop it from KNOWN_FAILURES", o.id)),
            _ => {}
        }
    }
    if !unexpected.is_empty() {
        eprintln!("acceptance: {}", unexpected.join("; "));
        std::process::exit(1);
    }
}
