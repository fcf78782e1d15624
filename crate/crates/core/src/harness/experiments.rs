//! Experiment drivers. Each returns rows in a fixed order (sweep order, then
//! the configured algorithm order) so output files are reproducible byte for
//! byte; sweep points run in parallel.

use rayon::prelude::*;

use crate::baselines::{ao_optimize, aps_baseline, fpa_baseline, grid_oracle, BaselineResult};
use crate::error::Result;
use crate::model::{
    achievable_rate, beam_gain, linear_to_db, snr_upper_bound, upper_bound, AntennaPositions,
    Beamformer, ScenarioConfig,
};
use crate::optimizer::{mm_optimize, SolveResult};

use super::config::{Algorithm, ExperimentKind, ExperimentSpec};
use super::output::ResultRow;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub rows: Vec<ResultRow>,
    /// Human-readable lines for standard output.
    pub summary: Vec<String>,
}

impl Report {
    fn extend(&mut self, other: Report) {
        self.rows.extend(other.rows);
        self.summary.extend(other.summary);
    }
}

/// A solved scheme, or the analytic bound.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub algo: Algorithm,
    pub solution: Option<(AntennaPositions, Beamformer)>,
    pub lambda_max: f64,
    pub snr: f64,
    pub rate: f64,
    pub iterations: usize,
    /// `lambda_max` per iteration for iterative schemes.
    pub trace: Vec<f64>,
}

impl From<SolveResult> for Outcome {
    fn from(r: SolveResult) -> Self {
        Outcome {
            algo: Algorithm::Mm,
            iterations: r.trace.iterations(),
            trace: r.trace.lambdas().collect(),
            solution: Some((r.x_opt, r.w_opt)),
            lambda_max: r.lambda_max,
            snr: r.snr,
            rate: r.rate,
        }
    }
}

fn from_baseline(algo: Algorithm, r: BaselineResult) -> Outcome {
    Outcome {
        algo,
        iterations: r.meta.iterations,
        trace: r.trace,
        solution: Some((r.x, r.w)),
        lambda_max: r.lambda_max,
        snr: r.snr,
        rate: r.rate,
    }
}

pub fn solve_with(algo: Algorithm, cfg: &ScenarioConfig, spec: &ExperimentSpec) -> Result<Outcome> {
    Ok(match algo {
        Algorithm::Mm => mm_optimize(cfg, &spec.opts)?.into(),
        Algorithm::Ao => from_baseline(algo, ao_optimize(cfg, &spec.opts)?),
        Algorithm::Fpa => from_baseline(algo, fpa_baseline(cfg)?),
        Algorithm::Aps => from_baseline(algo, aps_baseline(cfg)?),
        Algorithm::Oracle => from_baseline(algo, grid_oracle(cfg, spec.oracle_step)?),
        Algorithm::Bound => {
            let snr = snr_upper_bound(cfg);
            Outcome {
                algo,
                solution: None,
                lambda_max: upper_bound(cfg),
                snr,
                rate: achievable_rate(snr),
                iterations: 0,
                trace: Vec::new(),
            }
        }
    })
}

fn row(
    experiment: &str,
    algo: Algorithm,
    cfg: &ScenarioConfig,
    spec: &ExperimentSpec,
    point: f64,
    value: f64,
) -> ResultRow {
    ResultRow {
        experiment: experiment.to_string(),
        scheme: algo.name().to_string(),
        n: cfg.n_antennas(),
        m: cfg.n_receivers(),
        l: cfg.segment_length(),
        seed: spec.opts.rng_seed,
        point,
        value,
        x: None,
        w: None,
    }
}

fn with_solution(mut r: ResultRow, o: &Outcome) -> ResultRow {
    if let Some((x, w)) = &o.solution {
        r.x = Some(x.as_slice().to_vec());
        r.w = Some(w.as_slice().iter().map(|z| [z.re, z.im]).collect());
    }
    r
}

fn summary_line(cfg: &ScenarioConfig, o: &Outcome) -> String {
    format!(
        "N={} M={} L={} {}: lambda_max={:.6} snr_db={:.4} rate={:.6} bound={} iterations={}",
        cfg.n_antennas(),
        cfg.n_receivers(),
        cfg.segment_length(),
        o.algo,
        o.lambda_max,
        linear_to_db(o.snr),
        o.rate,
        upper_bound(cfg),
        o.iterations
    )
}

pub fn run(spec: &ExperimentSpec) -> Result<Report> {
    match spec.kind {
        ExperimentKind::Solve | ExperimentKind::Baselines => run_schemes(spec),
        ExperimentKind::Convergence => run_convergence(spec),
        ExperimentKind::Beampattern => run_beampattern(spec),
        ExperimentKind::SweepN => run_rate_sweep(spec),
    }
}

/// One row per algorithm on the base scenario: `point` = N, `value` = lambda_max.
pub fn run_schemes(spec: &ExperimentSpec) -> Result<Report> {
    let experiment = spec.kind.to_string();
    let cfg = &spec.base;
    let mut report = Report::default();
    for &algo in &spec.algorithms {
        let o = solve_with(algo, cfg, spec)?;
        report.summary.push(summary_line(cfg, &o));
        let r = row(&experiment, algo, cfg, spec, cfg.n_antennas() as f64, o.lambda_max);
        report.rows.push(with_solution(r, &o));
    }
    Ok(report)
}

/// Per segment length: full `lambda_max` traces for MM and AO, and single
/// reference rows (at iteration 0) for the non-iterative schemes.
pub fn run_convergence(spec: &ExperimentSpec) -> Result<Report> {
    let parts: Vec<Result<Report>> = spec
        .segment_lengths
        .par_iter()
        .map(|&l| {
            let cfg = spec.base.with_segment_length(l)?;
            let mut report = Report::default();
            for &algo in &spec.algorithms {
                let o = solve_with(algo, &cfg, spec)?;
                report.summary.push(summary_line(&cfg, &o));
                match algo {
                    Algorithm::Mm | Algorithm::Ao => {
                        for (k, v) in o.trace.iter().enumerate() {
                            report.rows.push(row("convergence", algo, &cfg, spec, k as f64, *v));
                        }
                    }
                    _ => report
                        .rows
                        .push(row("convergence", algo, &cfg, spec, 0.0, o.lambda_max)),
                }
            }
            Ok(report)
        })
        .collect();
    let mut report = Report::default();
    for p in parts {
        report.extend(p?);
    }
    Ok(report)
}

/// Beam gain of each scheme's solution over the angle grid, plus marker rows
/// (experiment `beampattern_marker`) at each receiver angle.
pub fn run_beampattern(spec: &ExperimentSpec) -> Result<Report> {
    let parts: Vec<Result<Report>> = spec
        .segment_lengths
        .par_iter()
        .map(|&l| {
            let cfg = spec.base.with_segment_length(l)?;
            let mut report = Report::default();
            for &algo in spec.algorithms.iter().filter(|a| **a != Algorithm::Bound) {
                let o = solve_with(algo, &cfg, spec)?;
                let (x, w) = o.solution.as_ref().expect("non-bound schemes carry a solution");
                for &t in &spec.thetas {
                    let g = beam_gain(x.as_slice(), w, t, cfg.wavelength());
                    report.rows.push(row("beampattern", algo, &cfg, spec, t, g));
                }
                let mut marks = Vec::new();
                for &t in cfg.angles() {
                    let g = beam_gain(x.as_slice(), w, t, cfg.wavelength());
                    marks.push(format!("G({t:.4})={g:.6}"));
                    report
                        .rows
                        .push(row("beampattern_marker", algo, &cfg, spec, t, g));
                }
                report
                    .summary
                    .push(format!("{} {}", summary_line(&cfg, &o), marks.join(" ")));
            }
            Ok(report)
        })
        .collect();
    let mut report = Report::default();
    for p in parts {
        report.extend(p?);
    }
    Ok(report)
}

/// Achievable rate per antenna count: `point` = N, `value` = rate.
pub fn run_rate_sweep(spec: &ExperimentSpec) -> Result<Report> {
    let parts: Vec<Result<Report>> = spec
        .n_values
        .par_iter()
        .map(|&n| {
            let cfg = spec.base.with_n_antennas(n)?;
            let mut report = Report::default();
            for &algo in &spec.algorithms {
                let o = solve_with(algo, &cfg, spec)?;
                report.summary.push(summary_line(&cfg, &o));
                report.rows.push(row("sweep-n", algo, &cfg, spec, n as f64, o.rate));
            }
            Ok(report)
        })
        .collect();
    let mut report = Report::default();
    for p in parts {
        report.extend(p?);
    }
    Ok(report)
}
