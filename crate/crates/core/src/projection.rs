//! Euclidean projection onto the feasible position set
//! `{x : x_n - x_{n-1} >= d_min, 0 <= x_n <= L}`.
//!
//! Substituting `y_n = x_n - n d_min` (0-based `n`) turns the spacing
//! constraints into `y_0 <= y_1 <= ... <= y_{N-1}` with every `y_n` in
//! `[0, L - (N-1) d_min]`. The substitution is a translation, so distances are
//! preserved and the projection becomes bounded isotonic regression: pool
//! adjacent violators, then clamp into the box.

use crate::model::{AntennaPositions, ScenarioConfig};

/// Unweighted isotonic (non-decreasing) least-squares fit of `values`.
pub fn isotonic_nondecreasing(values: &[f64]) -> Vec<f64> {
    // (sum, count) per pooled block, left to right.
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(values.len());
    for &v in values {
        blocks.push((v, 1));
        while blocks.len() > 1 {
            let (s1, c1) = blocks[blocks.len() - 1];
            let (s0, c0) = blocks[blocks.len() - 2];
            if s0 / c0 as f64 <= s1 / c1 as f64 {
                break;
            }
            blocks.pop();
            *blocks.last_mut().unwrap() = (s0 + s1, c0 + c1);
        }
    }
    blocks
        .into_iter()
        .flat_map(|(s, c)| std::iter::repeat_n(s / c as f64, c))
        .collect()
}

/// Projects an arbitrary point `t` onto the feasible set of `cfg`.
pub fn project_feasible(t: &[f64], cfg: &ScenarioConfig) -> AntennaPositions {
    assert_eq!(t.len(), cfg.n_antennas(), "projection input has the wrong length");
    let d = cfg.min_spacing();
    let upper = cfg.slack();
    let shifted: Vec<f64> = t.iter().enumerate().map(|(n, v)| v - n as f64 * d).collect();
    let mut x: Vec<f64> = isotonic_nondecreasing(&shifted)
        .into_iter()
        .enumerate()
        .map(|(n, y)| y.clamp(0.0, upper) + n as f64 * d)
        .collect();
    snap_feasible(&mut x, cfg);
    AntennaPositions::from_projection(x, cfg)
}

/// Removes the last-ulp violations left by shifting back from `y` to `x`, so
/// that the constraints hold as evaluated in floating point (`x_n - x_{n-1}`
/// computed, not exact). Moves each entry by at most a few ulps.
pub(crate) fn snap_feasible(x: &mut [f64], cfg: &ScenarioConfig) {
    let d = cfg.min_spacing();
    let l = cfg.segment_length();
    for i in 1..x.len() {
        while x[i] - x[i - 1] < d {
            x[i] = x[i].next_up();
        }
    }
    if let Some(last) = x.last_mut() {
        *last = last.min(l);
    }
    for i in (0..x.len().saturating_sub(1)).rev() {
        while x[i + 1] - x[i] < d {
            x[i] = x[i].next_down();
        }
    }
    if let Some(first) = x.first_mut() {
        *first = first.max(0.0);
    }
}
