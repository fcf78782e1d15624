//! Test-only oracles, written independently of the library's numerical paths.
#![allow(dead_code, clippy::needless_range_loop)]

use ma_array_opt::eigen::CMatrix;
use ma_array_opt::model::{AntennaPositions, ScenarioConfig};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// All eigenvalues of a real symmetric matrix by cyclic Jacobi rotations,
/// sorted descending.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-26 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    ev
}

/// Largest eigenvalue of a Hermitian matrix through its real 2N x 2N
/// embedding `[[Re, -Im], [Im, Re]]`, whose spectrum is the Hermitian one
/// with every eigenvalue doubled up.
pub fn hermitian_lambda_max(b: &CMatrix) -> f64 {
    let n = b.dim();
    let mut r = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            let z = b[(i, j)];
            r[i][j] = z.re;
            r[i + n][j + n] = z.re;
            r[i][j + n] = -z.im;
            r[i + n][j] = z.im;
        }
    }
    jacobi_eigenvalues(r)[0]
}

/// Gram matrix straight from the definition, `sum_m exp(j k (x_i - x_j) cos theta_m)`.
pub fn naive_gram(x: &[f64], angles: &[f64], wavelength: f64) -> CMatrix {
    let k = 2.0 * std::f64::consts::PI / wavelength;
    CMatrix::from_fn(x.len(), |i, j| {
        angles
            .iter()
            .map(|t| Complex64::from_polar(1.0, k * (x[i] - x[j]) * t.cos()))
            .sum()
    })
}

fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in (col + 1)..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = ((i + 1)..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

/// Projection onto `{x : x_n - x_{n-1} >= d, 0 <= x_n <= L}` by enumerating
/// every active set, solving the equality-constrained least squares on each,
/// and keeping the nearest feasible candidate. Exponential; small N only.
pub fn active_set_projection(t: &[f64], d: f64, l: f64) -> Vec<f64> {
    let n = t.len();
    // Rows (a, b) meaning a . x >= b.
    let mut cons: Vec<(Vec<f64>, f64)> = Vec::new();
    for i in 1..n {
        let mut a = vec![0.0; n];
        a[i] = 1.0;
        a[i - 1] = -1.0;
        cons.push((a, d));
    }
    for i in 0..n {
        let mut a = vec![0.0; n];
        a[i] = 1.0;
        cons.push((a.clone(), 0.0));
        a[i] = -1.0;
        cons.push((a, -l));
    }
    let feasible = |x: &[f64]| {
        cons.iter()
            .all(|(a, b)| a.iter().zip(x).map(|(ai, xi)| ai * xi).sum::<f64>() >= b - 1e-9)
    };
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 0u32..(1 << cons.len()) {
        let active: Vec<&(Vec<f64>, f64)> = (0..cons.len())
            .filter(|k| mask & (1 << k) != 0)
            .map(|k| &cons[k])
            .collect();
        if active.len() > n {
            continue;
        }
        let x = if active.is_empty() {
            t.to_vec()
        } else {
            // x = t - A^T mu with (A A^T) mu = A t - b.
            let gram: Vec<Vec<f64>> = active
                .iter()
                .map(|(ai, _)| {
                    active
                        .iter()
                        .map(|(aj, _)| ai.iter().zip(aj).map(|(p, q)| p * q).sum())
                        .collect()
                })
                .collect();
            let rhs: Vec<f64> = active
                .iter()
                .map(|(a, b)| a.iter().zip(t).map(|(ai, ti)| ai * ti).sum::<f64>() - b)
                .collect();
            let Some(mu) = solve_linear(gram, rhs) else { continue };
            let mut x = t.to_vec();
            for ((a, _), m) in active.iter().zip(&mu) {
                for (xi, ai) in x.iter_mut().zip(a) {
                    *xi -= ai * m;
                }
            }
            x
        };
        if !feasible(&x) {
            continue;
        }
        let dist: f64 = x.iter().zip(t).map(|(a, b)| (a - b).powi(2)).sum();
        if best.as_ref().is_none_or(|(bd, _)| dist < *bd) {
            best = Some((dist, x));
        }
    }
    best.expect("feasible set is non-empty").1
}

/// Central-difference gradient.
pub fn fd_gradient(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    (0..x.len())
        .map(|i| {
            let mut p = x.to_vec();
            let mut m = x.to_vec();
            p[i] += h;
            m[i] -= h;
            (f(&p) - f(&m)) / (2.0 * h)
        })
        .collect()
}

/// Central-difference Hessian from function values only.
pub fn fd_hessian(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<Vec<f64>> {
    let n = x.len();
    let eval = |di: f64, i: usize, dj: f64, j: usize| {
        let mut y = x.to_vec();
        y[i] += di;
        y[j] += dj;
        f(&y)
    };
    let mut hess = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let v = (eval(h, i, h, j) - eval(h, i, -h, j) - eval(-h, i, h, j) + eval(-h, i, -h, j))
                / (4.0 * h * h);
            hess[i][j] = v;
            hess[j][i] = v;
        }
    }
    hess
}

pub fn random_angles(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    (0..m).map(|_| rng.gen_range(0.0..std::f64::consts::PI)).collect()
}

pub fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// Random normalized scenario with `n` antennas, `m` receivers and a segment
/// length drawn from `[max(l_lo, (n-1)/2), l_hi]`.
pub fn random_scenario(rng: &mut ChaCha8Rng, n: usize, m: usize, l_lo: f64, l_hi: f64) -> ScenarioConfig {
    let lo = l_lo.max((n - 1) as f64 * 0.5);
    let l = rng.gen_range(lo..=l_hi.max(lo));
    ScenarioConfig::normalized(n, random_angles(rng, m), l).unwrap()
}

/// Independent sampler: sorted uniform draws on the slack, shifted by the gaps.
pub fn random_positions(rng: &mut ChaCha8Rng, cfg: &ScenarioConfig) -> AntennaPositions {
    let n = cfg.n_antennas();
    let slack = cfg.segment_length() - (n - 1) as f64 * cfg.min_spacing();
    let mut y: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..=slack.max(0.0))).collect();
    y.sort_by(f64::total_cmp);
    let x = y
        .iter()
        .enumerate()
        .map(|(i, v)| v + i as f64 * cfg.min_spacing())
        .collect();
    AntennaPositions::new(x, cfg).unwrap()
}

pub fn spectral_radius_sym(h: &[Vec<f64>]) -> f64 {
    jacobi_eigenvalues(h.to_vec())
        .into_iter()
        .map(f64::abs)
        .fold(0.0, f64::max)
}
