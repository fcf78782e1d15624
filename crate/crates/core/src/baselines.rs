//! Reference schemes: fixed half-wavelength array (FPA), selection from a
//! discrete position grid (APS), alternating beamformer/position updates (AO),
//! and an exhaustive grid search used as a test oracle.

use std::fmt;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigen::principal_eigenpair;
use crate::error::{Error, Result};
use crate::model::{
    achievable_rate, build_gram, gram_matrix, upper_bound, AntennaPositions, Beamformer,
    ScenarioConfig, FEASIBILITY_TOL,
};
use crate::optimizer::{random_feasible, start_seed, MMOptions};
use crate::projection::project_feasible;

/// Above this many subsets APS switches from enumeration to local search.
pub const APS_EXHAUSTIVE_LIMIT: u128 = 200_000;
pub const AO_MAX_INNER: usize = 200;
pub const ARMIJO_C: f64 = 1e-4;
const ARMIJO_MAX_HALVINGS: usize = 60;
pub const ORACLE_MAX_ANTENNAS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Scheme {
    Fpa,
    Aps,
    Ao,
    Oracle,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Fpa => "FPA",
            Scheme::Aps => "APS",
            Scheme::Ao => "AO",
            Scheme::Oracle => "ORACLE",
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BaselineMeta {
    /// Outer iterations (AO) or local-search sweeps (APS).
    pub iterations: usize,
    /// Total inner projected-gradient steps (AO only).
    pub inner_iterations: usize,
    /// Discrete positions available (APS, oracle).
    pub grid_points: usize,
    /// Layouts whose eigenvalue was evaluated.
    pub candidates: usize,
    /// APS ran full enumeration rather than local search.
    pub exhaustive: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineResult {
    pub scheme: Scheme,
    pub x: AntennaPositions,
    pub w: Beamformer,
    pub lambda_max: f64,
    pub snr: f64,
    pub rate: f64,
    pub meta: BaselineMeta,
    /// `lambda_max` after each AO outer iteration, starting with the initial layout.
    pub trace: Vec<f64>,
}

fn finish(
    scheme: Scheme,
    x: AntennaPositions,
    cfg: &ScenarioConfig,
    meta: BaselineMeta,
    trace: Vec<f64>,
) -> Result<BaselineResult> {
    let gram = build_gram(&x, cfg)?;
    let lambda_max = gram.lambda_max();
    let snr = cfg.snr_from_lambda(lambda_max);
    Ok(BaselineResult {
        scheme,
        w: Beamformer::from_gram(&gram, cfg),
        x,
        lambda_max,
        snr,
        rate: achievable_rate(snr),
        meta,
        trace,
    })
}

fn lambda_of(x: &[f64], cfg: &ScenarioConfig) -> Result<f64> {
    Ok(principal_eigenpair(&gram_matrix(x, cfg))?.value)
}

pub fn fpa_baseline(cfg: &ScenarioConfig) -> Result<BaselineResult> {
    finish(
        Scheme::Fpa,
        AntennaPositions::packed(cfg),
        cfg,
        BaselineMeta {
            candidates: 1,
            ..Default::default()
        },
        Vec::new(),
    )
}

/// `{0, d_min, 2 d_min, ...}` up to the segment end.
pub fn aps_grid(cfg: &ScenarioConfig) -> Vec<f64> {
    let d = cfg.min_spacing();
    let count = ((cfg.segment_length() + FEASIBILITY_TOL) / d).floor() as usize + 1;
    (0..count).map(|i| i as f64 * d).collect()
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// All `k`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(p) = (0..k).rev().find(|&p| idx[p] != p + n - k) else {
            return out;
        };
        idx[p] += 1;
        for q in (p + 1)..k {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

fn pick(grid: &[f64], idx: &[usize]) -> Vec<f64> {
    idx.iter().map(|&i| grid[i]).collect()
}

/// Best `N` points of the half-wavelength grid: exhaustive when the number of
/// subsets is at most [`APS_EXHAUSTIVE_LIMIT`], otherwise greedy seeding
/// followed by single-swap local search.
pub fn aps_baseline(cfg: &ScenarioConfig) -> Result<BaselineResult> {
    let grid = aps_grid(cfg);
    let n = cfg.n_antennas();
    if grid.len() < n {
        return Err(Error::Infeasible {
            index: grid.len(),
            detail: format!("grid has {} points, fewer than {n} antennas", grid.len()),
        });
    }
    let total = binomial(grid.len(), n);
    let mut meta = BaselineMeta {
        grid_points: grid.len(),
        ..Default::default()
    };

    let best = if total <= APS_EXHAUSTIVE_LIMIT {
        let subsets = combinations(grid.len(), n);
        let values: Vec<f64> = subsets
            .par_iter()
            .map(|s| lambda_of(&pick(&grid, s), cfg))
            .collect::<Result<_>>()?;
        let mut arg = 0;
        for (i, v) in values.iter().enumerate() {
            if *v > values[arg] {
                arg = i;
            }
        }
        meta.exhaustive = true;
        meta.candidates = subsets.len();
        subsets[arg].clone()
    } else {
        let (subset, evals, sweeps) = aps_local_search(&grid, n, cfg)?;
        meta.candidates = evals;
        meta.iterations = sweeps;
        subset
    };

    let x = AntennaPositions::new(pick(&grid, &best), cfg)?;
    finish(Scheme::Aps, x, cfg, meta, Vec::new())
}

fn aps_local_search(grid: &[f64], n: usize, cfg: &ScenarioConfig) -> Result<(Vec<usize>, usize, usize)> {
    let mut evals = 0;
    let mut eval = |set: &[usize]| -> Result<f64> {
        evals += 1;
        let mut s = set.to_vec();
        s.sort_unstable();
        lambda_of(&pick(grid, &s), cfg)
    };

    let mut chosen: Vec<usize> = Vec::with_capacity(n);
    while chosen.len() < n {
        let mut best: Option<(usize, f64)> = None;
        for c in (0..grid.len()).filter(|c| !chosen.contains(c)) {
            let mut trial = chosen.clone();
            trial.push(c);
            let v = eval(&trial)?;
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((c, v));
            }
        }
        chosen.push(best.expect("grid larger than n").0);
    }
    chosen.sort_unstable();

    let mut current = eval(&chosen)?;
    let mut sweeps = 0;
    'search: loop {
        sweeps += 1;
        for slot in 0..n {
            for c in 0..grid.len() {
                if chosen.contains(&c) {
                    continue;
                }
                let mut trial = chosen.clone();
                trial[slot] = c;
                let v = eval(&trial)?;
                if v > current + 1e-12 {
                    trial.sort_unstable();
                    chosen = trial;
                    current = v;
                    continue 'search;
                }
            }
        }
        break;
    }
    Ok((chosen, evals, sweeps))
}

/// `g(x) = sum_m |a^H(x, theta_m) w|^2 / sigma^2` and its gradient in `x`.
pub fn ao_objective(x: &[f64], w: &[Complex64], cfg: &ScenarioConfig) -> (f64, Vec<f64>) {
    let k = cfg.wavenumber();
    let mut value = 0.0;
    let mut grad = vec![0.0; x.len()];
    for theta in cfg.angles() {
        let kc = k * theta.cos();
        let terms: Vec<Complex64> = x
            .iter()
            .zip(w)
            .map(|(&xn, &wn)| Complex64::from_polar(1.0, -kc * xn) * wn)
            .collect();
        let s: Complex64 = terms.iter().sum();
        value += s.norm_sqr();
        for (g, t) in grad.iter_mut().zip(&terms) {
            // d/dx_n |s|^2 = 2 Re(conj(s) * (-j kc) * t_n)
            *g += 2.0 * (s.conj() * Complex64::new(0.0, -kc) * t).re;
        }
    }
    let inv = 1.0 / cfg.noise_power();
    (value * inv, grad.into_iter().map(|g| g * inv).collect())
}

/// Projected gradient ascent on [`ao_objective`] with Armijo backtracking from
/// a unit step. Returns the new layout and the number of accepted steps.
fn ao_position_step(
    x: &AntennaPositions,
    w: &Beamformer,
    cfg: &ScenarioConfig,
    tol: f64,
) -> (AntennaPositions, usize) {
    let mut x = x.clone();
    let mut steps = 0;
    for _ in 0..AO_MAX_INNER {
        let (value, grad) = ao_objective(x.as_slice(), w.as_slice(), cfg);
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..ARMIJO_MAX_HALVINGS {
            let target: Vec<f64> = x
                .as_slice()
                .iter()
                .zip(&grad)
                .map(|(xi, g)| xi + alpha * g)
                .collect();
            let cand = project_feasible(&target, cfg);
            let ascent: f64 = cand
                .as_slice()
                .iter()
                .zip(x.as_slice())
                .zip(&grad)
                .map(|((c, xi), g)| g * (c - xi))
                .sum();
            let (cand_value, _) = ao_objective(cand.as_slice(), w.as_slice(), cfg);
            if cand_value >= value + ARMIJO_C * ascent {
                accepted = Some((cand, cand_value, ascent));
                break;
            }
            alpha *= 0.5;
        }
        let Some((cand, cand_value, ascent)) = accepted else {
            break;
        };
        if ascent <= 0.0 {
            // Projected gradient vanishes: stationary on the feasible set.
            break;
        }
        x = cand;
        steps += 1;
        if (cand_value - value).abs() < tol * value.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    (x, steps)
}

fn ao_from(cfg: &ScenarioConfig, x0: AntennaPositions, opts: &MMOptions) -> Result<BaselineResult> {
    let bound = upper_bound(cfg);
    let mut x = x0;
    let mut gram = build_gram(&x, cfg)?;
    let mut trace = vec![gram.lambda_max()];
    let mut meta = BaselineMeta::default();

    while meta.iterations < opts.max_iters && gram.lambda_max() < bound - 1e-9 {
        let w = Beamformer::from_gram(&gram, cfg);
        let snr = cfg.snr_from_lambda(gram.lambda_max());
        let (x_next, steps) = ao_position_step(&x, &w, cfg, opts.tol);
        meta.inner_iterations += steps;
        meta.iterations += 1;
        x = x_next;
        gram = build_gram(&x, cfg)?;
        trace.push(gram.lambda_max());
        let snr_next = cfg.snr_from_lambda(gram.lambda_max());
        if (snr_next - snr).abs() < opts.tol * snr.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    finish(Scheme::Ao, x, cfg, meta, trace)
}

/// Alternating optimization: closed-form beamformer for the current layout,
/// then projected gradient ascent on the positions for that beamformer,
/// repeated until the SNR settles. Uses the same starting layouts as the MM
/// solver.
pub fn ao_optimize(cfg: &ScenarioConfig, opts: &MMOptions) -> Result<BaselineResult> {
    opts.validate()?;
    let runs: Vec<Result<BaselineResult>> = (0..opts.multi_start)
        .into_par_iter()
        .map(|start| {
            let x0 = if start == 0 {
                AntennaPositions::uniform(cfg)
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(start_seed(opts.rng_seed, start));
                random_feasible(cfg, &mut rng)
            };
            ao_from(cfg, x0, opts)
        })
        .collect();
    let mut best: Option<BaselineResult> = None;
    for run in runs {
        let run = run?;
        if best.as_ref().is_none_or(|b| run.lambda_max > b.lambda_max) {
            best = Some(run);
        }
    }
    Ok(best.expect("multi_start >= 1"))
}

/// Exhaustive search over layouts on a lattice of spacing `step`, with the
/// first antenna pinned at 0 (the Gram matrix depends only on differences).
/// Limited to [`ORACLE_MAX_ANTENNAS`] antennas.
pub fn grid_oracle(cfg: &ScenarioConfig, step: f64) -> Result<BaselineResult> {
    let n = cfg.n_antennas();
    if n > ORACLE_MAX_ANTENNAS {
        return Err(Error::Unsupported(format!(
            "grid oracle supports at most {ORACLE_MAX_ANTENNAS} antennas (got {n}); use the MM solver"
        )));
    }
    if !(step.is_finite() && step > 0.0 && step <= cfg.min_spacing() / 4.0 + 1e-15) {
        return Err(Error::Config(format!(
            "oracle step must be in (0, d_min/4 = {}], got {step}",
            cfg.min_spacing() / 4.0
        )));
    }
    let l = cfg.segment_length() + FEASIBILITY_TOL;
    let d = cfg.min_spacing() - FEASIBILITY_TOL;
    let max_idx = (l / step).floor() as usize;
    let min_gap = (d / step).ceil() as usize;
    let at = |i: usize| i as f64 * step;

    let mut meta = BaselineMeta {
        grid_points: max_idx + 1,
        ..Default::default()
    };

    // Per second-antenna index: best (lambda, layout) over the remaining ones.
    let best = match n {
        1 => {
            meta.candidates = 1;
            vec![0.0]
        }
        _ => {
            let seconds: Vec<usize> = (min_gap..=max_idx).collect();
            let per_second: Vec<(f64, Vec<f64>, usize)> = seconds
                .par_iter()
                .map(|&i2| -> Result<(f64, Vec<f64>, usize)> {
                    let layouts: Vec<Vec<f64>> = if n == 2 {
                        vec![vec![0.0, at(i2)]]
                    } else {
                        (i2 + min_gap..=max_idx).map(|i3| vec![0.0, at(i2), at(i3)]).collect()
                    };
                    let mut best = (f64::NEG_INFINITY, Vec::new());
                    for x in &layouts {
                        let v = lambda_of(x, cfg)?;
                        if v > best.0 {
                            best = (v, x.clone());
                        }
                    }
                    Ok((best.0, best.1, layouts.len()))
                })
                .collect::<Result<_>>()?;
            let mut best: (f64, Vec<f64>) = (f64::NEG_INFINITY, Vec::new());
            for (v, x, count) in per_second {
                meta.candidates += count;
                if v > best.0 {
                    best = (v, x);
                }
            }
            if best.1.is_empty() {
                return Err(Error::Infeasible {
                    index: 1,
                    detail: "no lattice layout fits in the segment".into(),
                });
            }
            best.1
        }
    };
    let x = AntennaPositions::new(best, cfg)?;
    finish(Scheme::Oracle, x, cfg, meta, Vec::new())
}

/// `u^H B u` for the beamformer direction, used to cross-check AO steps.
pub fn rayleigh_at(x: &[f64], w: &Beamformer, cfg: &ScenarioConfig) -> f64 {
    let p = w.power();
    if p == 0.0 {
        return 0.0;
    }
    gram_matrix(x, cfg).quadratic_form(w.as_slice()) / p
}
