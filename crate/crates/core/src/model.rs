//! System model: scenario, antenna positions, steering vectors, the channel
//! Gram matrix and the SNR quantities built on top of it.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::eigen::{self, CMatrix, EigenResult};
use crate::error::{Error, Result};

/// Slack allowed on the spacing and segment constraints.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// A full problem instance. Validated on construction and immutable after.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    n_antennas: usize,
    angles: Vec<f64>,
    segment_length: f64,
    min_spacing: f64,
    wavelength: f64,
    tx_power: f64,
    noise_power: f64,
}

impl ScenarioConfig {
    pub fn new(
        n_antennas: usize,
        angles: Vec<f64>,
        segment_length: f64,
        min_spacing: f64,
        wavelength: f64,
        tx_power: f64,
        noise_power: f64,
    ) -> Result<Self> {
        if n_antennas == 0 {
            return Err(Error::Config("n_antennas must be at least 1".into()));
        }
        if angles.is_empty() {
            return Err(Error::Config("angles must contain at least one angle".into()));
        }
        if let Some((m, a)) = angles
            .iter()
            .enumerate()
            .find(|(_, a)| !(a.is_finite() && (0.0..PI).contains(*a)))
        {
            return Err(Error::Config(format!("angles[{m}] = {a} is outside [0, pi)")));
        }
        let positive = [
            ("min_spacing", min_spacing),
            ("wavelength", wavelength),
            ("tx_power", tx_power),
            ("noise_power", noise_power),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        if !(segment_length.is_finite() && segment_length >= 0.0) {
            return Err(Error::Config(format!(
                "segment_length must be finite and >= 0, got {segment_length}"
            )));
        }
        let needed = (n_antennas - 1) as f64 * min_spacing;
        if segment_length < needed - FEASIBILITY_TOL {
            return Err(Error::Config(format!(
                "segment_length {segment_length} cannot hold {n_antennas} antennas \
                 with min_spacing {min_spacing} (needs {needed})"
            )));
        }
        Ok(ScenarioConfig {
            n_antennas,
            angles,
            segment_length,
            min_spacing,
            wavelength,
            tx_power,
            noise_power,
        })
    }

    /// Normalized defaults: wavelength 1, half-wavelength spacing, unit power
    /// and unit noise.
    pub fn normalized(n_antennas: usize, angles: Vec<f64>, segment_length: f64) -> Result<Self> {
        ScenarioConfig::new(n_antennas, angles, segment_length, 0.5, 1.0, 1.0, 1.0)
    }

    pub fn with_n_antennas(&self, n_antennas: usize) -> Result<Self> {
        ScenarioConfig::new(
            n_antennas,
            self.angles.clone(),
            self.segment_length,
            self.min_spacing,
            self.wavelength,
            self.tx_power,
            self.noise_power,
        )
    }

    pub fn with_segment_length(&self, segment_length: f64) -> Result<Self> {
        ScenarioConfig::new(
            self.n_antennas,
            self.angles.clone(),
            segment_length,
            self.min_spacing,
            self.wavelength,
            self.tx_power,
            self.noise_power,
        )
    }

    pub fn with_tx_power(&self, tx_power: f64) -> Result<Self> {
        ScenarioConfig::new(
            self.n_antennas,
            self.angles.clone(),
            self.segment_length,
            self.min_spacing,
            self.wavelength,
            tx_power,
            self.noise_power,
        )
    }

    pub fn n_antennas(&self) -> usize {
        self.n_antennas
    }

    pub fn n_receivers(&self) -> usize {
        self.angles.len()
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn segment_length(&self) -> f64 {
        self.segment_length
    }

    pub fn min_spacing(&self) -> f64 {
        self.min_spacing
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn tx_power(&self) -> f64 {
        self.tx_power
    }

    pub fn noise_power(&self) -> f64 {
        self.noise_power
    }

    /// `2 pi / lambda`.
    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.wavelength
    }

    /// Length left for the antennas to move once the minimum gaps are taken
    /// out: `L - (N - 1) d_min`, clamped at zero.
    pub fn slack(&self) -> f64 {
        (self.segment_length - (self.n_antennas - 1) as f64 * self.min_spacing).max(0.0)
    }

    /// SNR obtained from a principal eigenvalue with the optimal beamformer.
    pub fn snr_from_lambda(&self, lambda_max: f64) -> f64 {
        self.tx_power * lambda_max / self.noise_power
    }
}

/// Ordered antenna positions satisfying the spacing and segment constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct AntennaPositions(Vec<f64>);

impl AntennaPositions {
    pub fn new(x: Vec<f64>, cfg: &ScenarioConfig) -> Result<Self> {
        check_feasible(&x, cfg)?;
        Ok(AntennaPositions(x))
    }

    /// Evenly spread over the whole segment; a single antenna sits mid-segment.
    pub fn uniform(cfg: &ScenarioConfig) -> Self {
        let n = cfg.n_antennas();
        let l = cfg.segment_length();
        if n == 1 {
            return AntennaPositions(vec![l / 2.0]);
        }
        let mut x: Vec<f64> = (0..n).map(|i| l * i as f64 / (n - 1) as f64).collect();
        crate::projection::snap_feasible(&mut x, cfg);
        AntennaPositions(x)
    }

    /// Packed at minimum spacing from the origin.
    pub fn packed(cfg: &ScenarioConfig) -> Self {
        AntennaPositions(
            (0..cfg.n_antennas())
                .map(|i| i as f64 * cfg.min_spacing())
                .collect(),
        )
    }

    /// Wraps positions produced by an exact projection; checked in debug builds.
    pub(crate) fn from_projection(x: Vec<f64>, cfg: &ScenarioConfig) -> Self {
        debug_assert!(check_feasible(&x, cfg).is_ok(), "{x:?}");
        AntennaPositions(x)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

pub fn check_feasible(x: &[f64], cfg: &ScenarioConfig) -> Result<()> {
    if x.len() != cfg.n_antennas() {
        return Err(Error::Infeasible {
            index: x.len().min(cfg.n_antennas()),
            detail: format!("expected {} positions, got {}", cfg.n_antennas(), x.len()),
        });
    }
    for (i, &xi) in x.iter().enumerate() {
        if !xi.is_finite() {
            return Err(Error::Infeasible {
                index: i,
                detail: format!("position {xi} is not finite"),
            });
        }
        if xi < -FEASIBILITY_TOL || xi > cfg.segment_length() + FEASIBILITY_TOL {
            return Err(Error::Infeasible {
                index: i,
                detail: format!("position {xi} outside [0, {}]", cfg.segment_length()),
            });
        }
        if i > 0 && xi - x[i - 1] < cfg.min_spacing() - FEASIBILITY_TOL {
            return Err(Error::Infeasible {
                index: i,
                detail: format!(
                    "gap {} to previous antenna is below min_spacing {}",
                    xi - x[i - 1],
                    cfg.min_spacing()
                ),
            });
        }
    }
    Ok(())
}

/// `a(x, theta)`: entry n is `exp(j 2pi/lambda x_n cos theta)`.
pub fn steering_vector(x: &[f64], theta: f64, wavelength: f64) -> Vec<Complex64> {
    let k = 2.0 * PI / wavelength * theta.cos();
    x.iter().map(|&xn| Complex64::from_polar(1.0, k * xn)).collect()
}

/// N x M steering matrix, one column per receiver angle.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringMatrix {
    columns: Vec<Vec<Complex64>>,
}

impl SteeringMatrix {
    pub fn new(x: &[f64], cfg: &ScenarioConfig) -> Self {
        SteeringMatrix {
            columns: cfg
                .angles()
                .iter()
                .map(|&t| steering_vector(x, t, cfg.wavelength()))
                .collect(),
        }
    }

    pub fn column(&self, m: usize) -> &[Complex64] {
        &self.columns[m]
    }

    pub fn columns(&self) -> &[Vec<Complex64>] {
        &self.columns
    }

    /// `A A^H`.
    pub fn gram(&self) -> CMatrix {
        let n = self.columns.first().map_or(0, Vec::len);
        CMatrix::from_fn(n, |i, j| self.columns.iter().map(|a| a[i] * a[j].conj()).sum())
    }
}

/// `B(x)` entrywise: `B_ij = sum_m exp(j 2pi/lambda (x_i - x_j) cos theta_m)`.
pub fn gram_matrix(x: &[f64], cfg: &ScenarioConfig) -> CMatrix {
    let k = cfg.wavenumber();
    let cosines: Vec<f64> = cfg.angles().iter().map(|t| t.cos()).collect();
    let n = x.len();
    let mut b = CMatrix::zeros(n);
    for i in 0..n {
        b[(i, i)] = Complex64::new(cosines.len() as f64, 0.0);
        for j in (i + 1)..n {
            let d = k * (x[i] - x[j]);
            let z: Complex64 = cosines.iter().map(|c| Complex64::from_polar(1.0, d * c)).sum();
            b[(i, j)] = z;
            b[(j, i)] = z.conj();
        }
    }
    b
}

/// Gram matrix together with its principal eigenpair.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelGram {
    b: CMatrix,
    eigen: EigenResult,
}

impl ChannelGram {
    pub fn matrix(&self) -> &CMatrix {
        &self.b
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigen.value
    }

    pub fn v_max(&self) -> &[Complex64] {
        &self.eigen.vector
    }

    pub fn eigen(&self) -> &EigenResult {
        &self.eigen
    }
}

pub fn build_gram(x: &AntennaPositions, cfg: &ScenarioConfig) -> Result<ChannelGram> {
    build_gram_from(x, cfg, None)
}

/// [`build_gram`] with a warm-start vector for the power iteration.
pub fn build_gram_from(
    x: &AntennaPositions,
    cfg: &ScenarioConfig,
    start: Option<&[Complex64]>,
) -> Result<ChannelGram> {
    check_feasible(x.as_slice(), cfg)?;
    let b = gram_matrix(x.as_slice(), cfg);
    let eigen = eigen::principal_eigenpair_from(&b, start)?;
    Ok(ChannelGram { b, eigen })
}

/// Transmit weights with `||w||^2 <= P_S`.
#[derive(Debug, Clone, PartialEq)]
pub struct Beamformer(Vec<Complex64>);

impl Beamformer {
    /// Validates the power budget and fixes the phase gauge.
    pub fn new(mut w: Vec<Complex64>, tx_power: f64) -> Result<Self> {
        let power: f64 = w.iter().map(|z| z.norm_sqr()).sum();
        if !power.is_finite() || power > tx_power + 1e-9 {
            return Err(Error::Config(format!(
                "beamformer power {power} exceeds budget {tx_power}"
            )));
        }
        eigen::apply_phase_gauge(&mut w);
        Ok(Beamformer(w))
    }

    pub fn zero(n: usize) -> Self {
        Beamformer(vec![Complex64::new(0.0, 0.0); n])
    }

    /// `sqrt(P_S) v_max`.
    pub fn from_gram(gram: &ChannelGram, cfg: &ScenarioConfig) -> Self {
        let s = cfg.tx_power().sqrt();
        let mut w: Vec<Complex64> = gram.v_max().iter().map(|z| z * s).collect();
        eigen::apply_phase_gauge(&mut w);
        Beamformer(w)
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn power(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `W = w w^H / sigma^2`.
    pub fn covariance(&self, noise_power: f64) -> CMatrix {
        CMatrix::outer(&self.0).scaled(1.0 / noise_power)
    }
}

/// `|a^H(x, theta) w|^2`.
pub fn beam_gain(x: &[f64], w: &Beamformer, theta: f64, wavelength: f64) -> f64 {
    eigen::inner(&steering_vector(x, theta, wavelength), w.as_slice()).norm_sqr()
}

/// Sum of beam gains over the receiver angles, divided by the noise power.
pub fn effective_snr(x: &AntennaPositions, w: &Beamformer, cfg: &ScenarioConfig) -> f64 {
    cfg.angles()
        .iter()
        .map(|&t| beam_gain(x.as_slice(), w, t, cfg.wavelength()))
        .sum::<f64>()
        / cfg.noise_power()
}

/// `Tr(A A^H W)` with `W = w w^H / sigma^2`; same value as [`effective_snr`].
pub fn effective_snr_trace(x: &AntennaPositions, w: &Beamformer, cfg: &ScenarioConfig) -> f64 {
    let b = SteeringMatrix::new(x.as_slice(), cfg).gram();
    let cov = w.covariance(cfg.noise_power());
    let n = b.dim();
    let mut tr = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            tr += b[(i, j)] * cov[(j, i)];
        }
    }
    tr.re
}

pub fn achievable_rate(snr: f64) -> f64 {
    (1.0 + snr).log2()
}

pub fn optimal_beamformer(x: &AntennaPositions, cfg: &ScenarioConfig) -> Result<Beamformer> {
    Ok(Beamformer::from_gram(&build_gram(x, cfg)?, cfg))
}

/// Ceiling `M N` on the principal eigenvalue over all positions.
pub fn upper_bound(cfg: &ScenarioConfig) -> f64 {
    (cfg.n_receivers() * cfg.n_antennas()) as f64
}

/// `P_S M N / sigma^2`.
pub fn snr_upper_bound(cfg: &ScenarioConfig) -> f64 {
    cfg.snr_from_lambda(upper_bound(cfg))
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}
