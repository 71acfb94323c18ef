//! Dense real matrix exponential by scaling and squaring with a degree-13
//! Padé approximant.

use faer::linalg::solvers::Solve;
use faer::Mat;

/// Padé-13 numerator coefficients `b₀ … b₁₃`.
const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

/// Largest 1-norm for which the unscaled Padé-13 approximant is accurate to
/// double precision.
const THETA13: f64 = 5.371_920_351_148_152;

fn norm1(a: &Mat<f64>) -> f64 {
    (0..a.ncols())
        .map(|j| (0..a.nrows()).map(|i| a[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `c₀ I + Σ cₖ Mₖ`.
fn combine(identity: f64, terms: &[(f64, &Mat<f64>)]) -> Mat<f64> {
    let n = terms[0].1.nrows();
    Mat::from_fn(n, n, |i, j| {
        let diag = if i == j { identity } else { 0.0 };
        terms.iter().fold(diag, |acc, (c, m)| acc + c * m[(i, j)])
    })
}

/// `exp(a)` for a square real matrix.
pub fn expm(a: &Mat<f64>) -> Mat<f64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm needs a square matrix");
    let norm = norm1(a);
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let scale = 2f64.powi(-squarings);
    let a = Mat::from_fn(n, n, |i, j| a[(i, j)] * scale);

    let b = &PADE13;
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let u_inner = combine(0.0, &[(b[13], &a6), (b[11], &a4), (b[9], &a2)]);
    let u_sum = &a6 * &u_inner + combine(b[1], &[(b[7], &a6), (b[5], &a4), (b[3], &a2)]);
    let u = &a * &u_sum;
    let v_inner = combine(0.0, &[(b[12], &a6), (b[10], &a4), (b[8], &a2)]);
    let v = &a6 * &v_inner + combine(b[0], &[(b[6], &a6), (b[4], &a4), (b[2], &a2)]);

    let mut result = (&v - &u).partial_piv_lu().solve(&v + &u);
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_diff(a: &Mat<f64>, b: &Mat<f64>) -> f64 {
        (a - b).norm_max()
    }

    fn from_rows(rows: &[&[f64]]) -> Mat<f64> {
        Mat::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j])
    }

    #[test]
    fn zero_and_diagonal() {
        let e = expm(&Mat::zeros(3, 3));
        assert!(max_diff(&e, &Mat::identity(3, 3)) < 1e-15);
        let e = expm(&from_rows(&[&[1.0, 0.0], &[0.0, -2.0]]));
        assert!((e[(0, 0)] - 1f64.exp()).abs() < 1e-14);
        assert!((e[(1, 1)] - (-2f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn rotation_generator() {
        // exp([[0, −t], [t, 0]]) is a rotation by t; t = 40 forces squarings.
        for t in [0.3, 40.0] {
            let e = expm(&from_rows(&[&[0.0, -t], &[t, 0.0]]));
            let (s, c) = f64::sin_cos(t);
            let expected = from_rows(&[&[c, -s], &[s, c]]);
            let err = max_diff(&e, &expected);
            assert!(err < 1e-12 * t.max(1.0), "t = {t}: {err}");
        }
    }

    #[test]
    fn nilpotent() {
        // exp of a strictly upper triangular 3×3 matrix truncates after the square.
        let n = from_rows(&[&[0.0, 2.0, 3.0], &[0.0, 0.0, 5.0], &[0.0, 0.0, 0.0]]);
        let expected = Mat::<f64>::identity(3, 3) + &n + combine(0.0, &[(0.5, &(&n * &n))]);
        assert!(max_diff(&expm(&n), &expected) < 1e-13);
    }

    #[test]
    fn large_antisymmetric_is_orthogonal() {
        // Truncated displacement generator a† − a in 120 levels.
        let dim = 120;
        let g = Mat::from_fn(dim, dim, |i, j| {
            if i == j + 1 {
                (i as f64).sqrt()
            } else if j == i + 1 {
                -(j as f64).sqrt()
            } else {
                0.0
            }
        });
        let d = expm(&g);
        assert!(max_diff(&(&d * d.transpose()), &Mat::identity(dim, dim)) < 1e-12);
        // Coherent amplitudes e^{−1/2}/√n! in the first column.
        let mut fact = 1.0;
        for n in 0..10 {
            if n > 0 {
                fact *= n as f64;
            }
            let expected = (-0.5f64).exp() / fact.sqrt();
            assert!((d[(n, 0)] - expected).abs() < 1e-13, "n = {n}");
        }
    }
}
