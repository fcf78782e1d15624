//! Principal eigenpair of small dense Hermitian matrices.
//!
//! Power iteration from a deterministic start. The matrices handled here are
//! channel Gram matrices `A A^H`, which are positive semidefinite, so the
//! eigenvalue of largest magnitude is also the largest one.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const VALUE_TOL: f64 = 1e-12;
pub const MAX_ITERATIONS: usize = 10_000;
/// Residual bound guaranteed on every returned pair.
pub const RESIDUAL_TOL: f64 = 1e-8;
/// Moduli at or below this are treated as zero by the phase gauge.
pub const GAUGE_EPS: f64 = 1e-12;

// Residual the iteration aims for before it stops on value change alone.
const TARGET_RESIDUAL: f64 = 1e-10;
const START_PERTURBATION: f64 = 1e-3;

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        CMatrix {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        CMatrix { n, data }
    }

    /// Builds from row slices; every row must have `rows.len()` entries.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().position(|r| r.len() != n) {
            return Err(Error::Config(format!(
                "matrix row {bad} has {} entries, expected {n}",
                rows[bad].len()
            )));
        }
        Ok(CMatrix {
            n,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    /// `v v^H`.
    pub fn outer(v: &[Complex64]) -> Self {
        CMatrix::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn scaled(&self, c: f64) -> Self {
        CMatrix {
            n: self.n,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(v.len(), self.n);
        self.data
            .chunks_exact(self.n.max(1))
            .take(self.n)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `u^H M u`, real part only.
    pub fn quadratic_form(&self, u: &[Complex64]) -> f64 {
        inner(u, &self.mul_vec(u)).re
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    /// Largest `|M_ij - conj(M_ji)|`.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.n {
            for j in i..self.n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// `(M + M^H) / 2`.
    pub fn hermitian_part(&self) -> Self {
        CMatrix::from_fn(self.n, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

/// `u^H v`.
pub fn inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Rotates `v` so its first component with modulus above [`GAUGE_EPS`] is
/// real and nonnegative.
pub fn apply_phase_gauge(v: &mut [Complex64]) {
    if let Some(lead) = v.iter().find(|z| z.norm() > GAUGE_EPS).copied() {
        let rot = lead.conj() / lead.norm();
        for z in v.iter_mut() {
            *z *= rot;
        }
        // Exact zero imaginary part on the pivot.
        if let Some(p) = v.iter_mut().find(|z| z.norm() > GAUGE_EPS) {
            *p = Complex64::new(p.norm(), 0.0);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    pub value: f64,
    pub vector: Vec<Complex64>,
    pub residual: f64,
    pub iterations: usize,
}

pub fn principal_eigenpair(b: &CMatrix) -> Result<EigenResult> {
    principal_eigenpair_from(b, None)
}

/// Like [`principal_eigenpair`] but starting from `start` when given. Used to
/// warm-start across optimizer iterations; the result is still gauge-fixed.
pub fn principal_eigenpair_from(b: &CMatrix, start: Option<&[Complex64]>) -> Result<EigenResult> {
    let n = b.dim();
    if n == 0 {
        return Err(Error::Config("eigenproblem of an empty matrix".into()));
    }
    let asymmetry = b.max_asymmetry();
    if !asymmetry.is_finite() || asymmetry > HERMITIAN_TOL {
        return Err(Error::NotHermitian { asymmetry });
    }
    let b = b.hermitian_part();

    let initial = match start {
        Some(s) if s.len() == n && norm(s) > GAUGE_EPS => s.to_vec(),
        _ => vec![Complex64::new(1.0, 0.0); n],
    };

    let mut result = iterate(&b, initial.clone())?;
    // A start orthogonal to the dominant eigenvector converges to a smaller
    // eigenvalue; the largest eigenvalue can never sit below the mean one.
    let mean = b.trace().re / n as f64;
    if result.value < mean - RESIDUAL_TOL {
        let mut perturbed = initial;
        perturbed[0] += START_PERTURBATION;
        let retry = iterate(&b, perturbed)?;
        result = EigenResult {
            iterations: result.iterations + retry.iterations,
            ..retry
        };
    }
    apply_phase_gauge(&mut result.vector);
    Ok(result)
}

fn normalize(v: &mut [Complex64]) -> f64 {
    let nv = norm(v);
    if nv > 0.0 {
        for z in v.iter_mut() {
            *z /= nv;
        }
    }
    nv
}

fn iterate(b: &CMatrix, mut v: Vec<Complex64>) -> Result<EigenResult> {
    normalize(&mut v);
    let mut perturbed = false;
    let mut prev = f64::NAN;
    let mut residual = f64::INFINITY;
    let mut value = 0.0;

    for it in 1..=MAX_ITERATIONS {
        let mut y = b.mul_vec(&v);
        value = inner(&v, &y).re;
        residual = y
            .iter()
            .zip(&v)
            .map(|(yi, vi)| (yi - vi * value).norm_sqr())
            .sum::<f64>()
            .sqrt();

        let scale = value.abs().max(1.0);
        let settled = (value - prev).abs() <= VALUE_TOL * scale;
        if residual <= TARGET_RESIDUAL * scale || (settled && residual <= RESIDUAL_TOL * 0.1) {
            return Ok(EigenResult {
                value,
                vector: v,
                residual,
                iterations: it,
            });
        }
        prev = value;

        if normalize(&mut y) == 0.0 {
            // v lies in the null space.
            if perturbed {
                return Ok(EigenResult {
                    value: 0.0,
                    vector: v,
                    residual: 0.0,
                    iterations: it,
                });
            }
            perturbed = true;
            v[0] += START_PERTURBATION;
            normalize(&mut v);
            prev = f64::NAN;
            continue;
        }
        v = y;
    }

    if residual <= RESIDUAL_TOL {
        Ok(EigenResult {
            value,
            vector: v,
            residual,
            iterations: MAX_ITERATIONS,
        })
    } else {
        Err(Error::NoConvergence {
            iterations: MAX_ITERATIONS,
            residual,
        })
    }
}
