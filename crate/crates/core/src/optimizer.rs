//! Minorization-maximization over antenna positions.
//!
//! Each outer iteration lower-bounds `lambda_max(B(x))` by the Rayleigh
//! quotient `f1(x) = v^H B(x) v` at the current principal eigenvector `v`,
//! splits `f1 = M ||v||^2 + 2 f2(x)`, and replaces the trigonometric `f2` by
//! the concave quadratic
//!
//! ```text
//! f3(x) = f2(x_k) + grad f2(x_k)^T (x - x_k) - delta/2 ||x - x_k||^2
//! ```
//!
//! whose constrained maximizer is the projection of `x_k + grad/delta` onto the
//! feasible set. Every step therefore satisfies
//! `lambda_max(x_{k+1}) >= f1(x_{k+1}) >= M + 2 f3(x_{k+1}) >= lambda_max(x_k)`.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{
    self, achievable_rate, build_gram, build_gram_from, AntennaPositions, Beamformer, ChannelGram,
    ScenarioConfig,
};
use crate::projection::project_feasible;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MMOptions {
    /// Relative change of `lambda_max` below which iteration stops.
    pub tol: f64,
    pub max_iters: usize,
    /// Number of starting points; start 0 is always the uniform layout.
    pub multi_start: usize,
    pub rng_seed: u64,
}

impl Default for MMOptions {
    fn default() -> Self {
        MMOptions {
            tol: 1e-6,
            max_iters: 500,
            multi_start: 1,
            rng_seed: 0,
        }
    }
}

impl MMOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::Config(format!("tol must be > 0, got {}", self.tol)));
        }
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be at least 1".into()));
        }
        if self.multi_start == 0 {
            return Err(Error::Config("multi_start must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Converged,
    MaxIterations,
    /// `lambda_max` reached `M N`, which no layout can exceed.
    BoundAttained,
    /// Every angle is broadside, so `B` does not depend on the positions.
    FlatObjective,
}

/// State at iterate `k`: gradient and curvature bound are evaluated there,
/// `step_norm` is the distance travelled from iterate `k - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub k: usize,
    pub lambda_max: f64,
    pub x: Vec<f64>,
    pub grad_norm: f64,
    pub delta: f64,
    pub step_norm: f64,
    pub wall_time: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MMTrace {
    pub records: Vec<IterationRecord>,
    pub stop: StopReason,
    /// Which start produced this trace.
    pub start: usize,
}

impl MMTrace {
    /// Number of surrogate steps taken.
    pub fn iterations(&self) -> usize {
        self.records.len().saturating_sub(1)
    }

    pub fn lambdas(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(|r| r.lambda_max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub x_opt: AntennaPositions,
    pub w_opt: Beamformer,
    pub snr: f64,
    pub rate: f64,
    pub lambda_max: f64,
    pub trace: MMTrace,
    pub bound: f64,
}

fn pair_phase(v: &[Complex64], i: usize, j: usize) -> (f64, f64) {
    // |o_i||o_j| and phi_i - phi_j, i.e. the polar form of o_i conj(o_j).
    let p = v[i] * v[j].conj();
    (p.norm(), p.arg())
}

fn cosines(cfg: &ScenarioConfig) -> Vec<f64> {
    cfg.angles().iter().map(|t| t.cos()).collect()
}

/// Pair part of the Rayleigh quotient:
/// `sum_{i<j} sum_m |o_i||o_j| cos(phi_i - phi_j + 2pi/lambda (x_j - x_i) cos theta_m)`.
pub fn f2_value(x: &[f64], v: &[Complex64], cfg: &ScenarioConfig) -> f64 {
    let k = cfg.wavenumber();
    let cs = cosines(cfg);
    let n = x.len();
    let mut total = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let (mag, phase) = pair_phase(v, i, j);
            if mag == 0.0 {
                continue;
            }
            let d = k * (x[j] - x[i]);
            total += mag * cs.iter().map(|c| (phase + d * c).cos()).sum::<f64>();
        }
    }
    total
}

/// `v^H B(x) v` through its real expansion `M ||v||^2 + 2 f2(x)`.
pub fn f1_value(x: &[f64], v: &[Complex64], cfg: &ScenarioConfig) -> f64 {
    let energy: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    cfg.n_receivers() as f64 * energy + 2.0 * f2_value(x, v, cfg)
}

/// Analytic gradient of [`f2_value`] with respect to the positions.
pub fn grad_f2(x: &[f64], v: &[Complex64], cfg: &ScenarioConfig) -> Vec<f64> {
    let k = cfg.wavenumber();
    let cs = cosines(cfg);
    let n = x.len();
    let mut g = vec![0.0; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let (mag, phase) = pair_phase(v, i, j);
            if mag == 0.0 {
                continue;
            }
            let d = k * (x[j] - x[i]);
            let s: f64 = cs.iter().map(|c| (phase + d * c).sin() * k * c).sum::<f64>() * mag;
            g[i] += s;
            g[j] -= s;
        }
    }
    g
}

/// Curvature constant dominating the Hessian of `f2`:
/// `sqrt(Q^2 sum|o|^2 ((sum|o|)^2 + sum|o|^2))` with
/// `Q = sum_m (2pi/lambda)^2 cos^2 theta_m`. Independent of the positions.
pub fn delta_bound(v: &[Complex64], cfg: &ScenarioConfig) -> f64 {
    let k = cfg.wavenumber();
    let q: f64 = cfg.angles().iter().map(|t| (k * t.cos()).powi(2)).sum();
    let sum_sq: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    let sum_abs: f64 = v.iter().map(|z| z.norm()).sum();
    q * (sum_sq * (sum_abs * sum_abs + sum_sq)).sqrt()
}

/// Quadratic minorizer of `f2` around `x_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Surrogate {
    pub x_k: Vec<f64>,
    pub f2_k: f64,
    pub grad: Vec<f64>,
    pub delta: f64,
}

impl Surrogate {
    pub fn at(x_k: &[f64], v: &[Complex64], cfg: &ScenarioConfig) -> Self {
        Surrogate {
            x_k: x_k.to_vec(),
            f2_k: f2_value(x_k, v, cfg),
            grad: grad_f2(x_k, v, cfg),
            delta: delta_bound(v, cfg),
        }
    }

    /// `f3(x)`.
    pub fn value(&self, x: &[f64]) -> f64 {
        let mut lin = 0.0;
        let mut sq = 0.0;
        for ((xi, xk), g) in x.iter().zip(&self.x_k).zip(&self.grad) {
            let d = xi - xk;
            lin += g * d;
            sq += d * d;
        }
        self.f2_k + lin - 0.5 * self.delta * sq
    }
}

/// Exact maximizer of the quadratic surrogate over the feasible set, i.e. the
/// projection of `x_k + grad / delta`. With `delta == 0` the surrogate is flat
/// and `x_k` is returned.
pub fn solve_surrogate(
    x_k: &AntennaPositions,
    grad: &[f64],
    delta: f64,
    cfg: &ScenarioConfig,
) -> AntennaPositions {
    if delta <= 0.0 {
        return x_k.clone();
    }
    let target: Vec<f64> = x_k
        .as_slice()
        .iter()
        .zip(grad)
        .map(|(x, g)| x + g / delta)
        .collect();
    project_feasible(&target, cfg)
}

/// Uniformly random feasible layout: sorted uniform gaps on the slack.
pub fn random_feasible<R: Rng>(cfg: &ScenarioConfig, rng: &mut R) -> AntennaPositions {
    let slack = cfg.slack();
    let mut y: Vec<f64> = (0..cfg.n_antennas())
        .map(|_| rng.gen::<f64>() * slack)
        .collect();
    y.sort_by(f64::total_cmp);
    let mut x: Vec<f64> = y
        .into_iter()
        .enumerate()
        .map(|(n, v)| v + n as f64 * cfg.min_spacing())
        .collect();
    crate::projection::snap_feasible(&mut x, cfg);
    AntennaPositions::from_projection(x, cfg)
}

/// Seed for start `start` of a multi-start run.
pub(crate) fn start_seed(rng_seed: u64, start: usize) -> u64 {
    rng_seed.wrapping_add((start as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn record(
    k: usize,
    x: &AntennaPositions,
    gram: &ChannelGram,
    cfg: &ScenarioConfig,
    step_norm: f64,
    started: Instant,
) -> (IterationRecord, Vec<f64>, f64) {
    let grad = grad_f2(x.as_slice(), gram.v_max(), cfg);
    let delta = delta_bound(gram.v_max(), cfg);
    let rec = IterationRecord {
        k,
        lambda_max: gram.lambda_max(),
        x: x.as_slice().to_vec(),
        grad_norm: norm2(&grad),
        delta,
        step_norm,
        wall_time: started.elapsed(),
    };
    (rec, grad, delta)
}

/// Runs the MM iteration from one starting layout.
pub fn mm_optimize_from(
    cfg: &ScenarioConfig,
    x0: AntennaPositions,
    opts: &MMOptions,
) -> Result<SolveResult> {
    opts.validate()?;
    let started = Instant::now();
    let bound = model::upper_bound(cfg);

    let mut x = x0;
    let mut gram = build_gram(&x, cfg)?;
    let (rec, mut grad, mut delta) = record(0, &x, &gram, cfg, 0.0, started);
    let mut records = vec![rec];

    let stop = loop {
        let k = records.len() - 1;
        let lambda = gram.lambda_max();
        if lambda >= bound - 1e-9 {
            break StopReason::BoundAttained;
        }
        if delta == 0.0 {
            break StopReason::FlatObjective;
        }
        if k >= opts.max_iters {
            break StopReason::MaxIterations;
        }

        let x_next = solve_surrogate(&x, &grad, delta, cfg);
        let step: Vec<f64> = x_next
            .as_slice()
            .iter()
            .zip(x.as_slice())
            .map(|(a, b)| a - b)
            .collect();
        let next = build_gram_from(&x_next, cfg, Some(gram.v_max()))?;
        x = x_next;
        gram = next;
        let (rec, g, d) = record(k + 1, &x, &gram, cfg, norm2(&step), started);
        records.push(rec);
        grad = g;
        delta = d;

        let change = (gram.lambda_max() - lambda).abs() / lambda.abs().max(f64::MIN_POSITIVE);
        if change < opts.tol {
            break StopReason::Converged;
        }
    };

    let lambda_max = gram.lambda_max();
    let snr = cfg.snr_from_lambda(lambda_max);
    Ok(SolveResult {
        w_opt: Beamformer::from_gram(&gram, cfg),
        x_opt: x,
        snr,
        rate: achievable_rate(snr),
        lambda_max,
        trace: MMTrace {
            records,
            stop,
            start: 0,
        },
        bound,
    })
}

/// Full solver: MM from the uniform layout and, with `multi_start > 1`, from
/// additional seeded random layouts. Returns the run with the largest
/// `lambda_max`, ties going to the lower start index.
pub fn mm_optimize(cfg: &ScenarioConfig, opts: &MMOptions) -> Result<SolveResult> {
    opts.validate()?;
    let runs: Vec<Result<SolveResult>> = (0..opts.multi_start)
        .into_par_iter()
        .map(|start| {
            let x0 = if start == 0 {
                AntennaPositions::uniform(cfg)
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(start_seed(opts.rng_seed, start));
                random_feasible(cfg, &mut rng)
            };
            let mut run = mm_optimize_from(cfg, x0, opts)?;
            run.trace.start = start;
            Ok(run)
        })
        .collect();

    let mut best: Option<SolveResult> = None;
    for run in runs {
        let run = run?;
        if best.as_ref().is_none_or(|b| run.lambda_max > b.lambda_max) {
            best = Some(run);
        }
    }
    Ok(best.expect("multi_start >= 1"))
}
