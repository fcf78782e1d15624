//! JSON experiment configuration.
//!
//! A config file is a flat JSON object; every field is optional and falls
//! back to the preset of the experiment kind being run. Angles are in
//! radians. Transmit power is given either linearly (`tx_power`) or in dB
//! (`tx_power_db`), never both.

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{db_to_linear, ScenarioConfig};
use crate::optimizer::MMOptions;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Solve,
    Convergence,
    Beampattern,
    SweepN,
    Baselines,
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExperimentKind::Solve => "solve",
            ExperimentKind::Convergence => "convergence",
            ExperimentKind::Beampattern => "beampattern",
            ExperimentKind::SweepN => "sweep-n",
            ExperimentKind::Baselines => "baselines",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "MM")]
    Mm,
    #[serde(rename = "AO")]
    Ao,
    #[serde(rename = "FPA")]
    Fpa,
    #[serde(rename = "APS")]
    Aps,
    #[serde(rename = "ORACLE")]
    Oracle,
    #[serde(rename = "BOUND")]
    Bound,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Mm => "MM",
            Algorithm::Ao => "AO",
            Algorithm::Fpa => "FPA",
            Algorithm::Aps => "APS",
            Algorithm::Oracle => "ORACLE",
            Algorithm::Bound => "BOUND",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_uppercase().as_str() {
            "MM" => Algorithm::Mm,
            "AO" => Algorithm::Ao,
            "FPA" => Algorithm::Fpa,
            "APS" => Algorithm::Aps,
            "ORACLE" => Algorithm::Oracle,
            "BOUND" => Algorithm::Bound,
            other => {
                return Err(Error::Config(format!(
                    "algo: unknown algorithm `{other}` (expected MM, AO, FPA, APS, ORACLE or BOUND)"
                )))
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThetaGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl ThetaGrid {
    pub fn points(&self) -> Result<Vec<f64>> {
        if !(self.start.is_finite() && self.stop.is_finite() && self.stop >= self.start) {
            return Err(Error::Config("theta_grid: need finite start <= stop".into()));
        }
        if self.stop == self.start {
            return Ok(vec![self.start]);
        }
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(Error::Config("theta_grid.step must be > 0".into()));
        }
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        Ok((0..=count).map(|i| self.start + i as f64 * self.step).collect())
    }
}

/// On-disk form; every field optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub kind: Option<ExperimentKind>,
    pub n_antennas: Option<usize>,
    pub angles: Option<Vec<f64>>,
    pub segment_length: Option<f64>,
    pub min_spacing: Option<f64>,
    pub wavelength: Option<f64>,
    pub tx_power: Option<f64>,
    pub tx_power_db: Option<f64>,
    pub noise_power: Option<f64>,
    pub segment_lengths: Option<Vec<f64>>,
    pub n_values: Option<Vec<usize>>,
    pub theta_grid: Option<ThetaGrid>,
    pub algorithms: Option<Vec<Algorithm>>,
    pub tol: Option<f64>,
    pub max_iters: Option<usize>,
    pub multi_start: Option<usize>,
    pub seed: Option<u64>,
    pub oracle_step: Option<f64>,
    pub output: Option<PathBuf>,
}

impl ConfigFile {
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let field = e.path().to_string();
            let message = if field == "." {
                e.inner().to_string()
            } else {
                format!("field `{field}`: {}", e.inner())
            };
            Error::Parse {
                path: path.to_path_buf(),
                message,
            }
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        ConfigFile::parse(&text, path)
    }

    /// Defaults for each experiment kind, following the published scenarios.
    pub fn preset(kind: ExperimentKind) -> Self {
        let common = ConfigFile {
            kind: Some(kind),
            n_antennas: Some(3),
            angles: Some(vec![FRAC_PI_8, FRAC_PI_4]),
            segment_length: Some(20.0),
            min_spacing: Some(0.5),
            wavelength: Some(1.0),
            tx_power_db: Some(0.0),
            noise_power: Some(1.0),
            theta_grid: Some(ThetaGrid {
                start: 0.0,
                stop: 1.0,
                step: 0.002,
            }),
            n_values: Some((3..=8).collect()),
            tol: Some(1e-6),
            max_iters: Some(500),
            multi_start: Some(1),
            seed: Some(0),
            oracle_step: Some(0.005),
            ..Default::default()
        };
        use Algorithm::*;
        match kind {
            ExperimentKind::Solve => ConfigFile {
                algorithms: Some(vec![Mm]),
                ..common
            },
            ExperimentKind::Convergence => ConfigFile {
                segment_lengths: Some(vec![1.0, 3.0, 20.0]),
                algorithms: Some(vec![Mm, Ao, Fpa, Bound]),
                ..common
            },
            ExperimentKind::Beampattern => ConfigFile {
                segment_length: Some(10.0),
                algorithms: Some(vec![Mm, Fpa]),
                ..common
            },
            ExperimentKind::SweepN => ConfigFile {
                angles: Some(vec![FRAC_PI_8, FRAC_PI_4, 3.0 * FRAC_PI_4]),
                segment_length: Some(8.0),
                tx_power_db: Some(20.0),
                algorithms: Some(vec![Mm, Ao, Aps, Fpa, Bound]),
                multi_start: Some(8),
                ..common
            },
            ExperimentKind::Baselines => ConfigFile {
                segment_length: Some(10.0),
                algorithms: Some(vec![Mm, Ao, Fpa, Aps, Bound]),
                ..common
            },
        }
    }
}

/// Fully resolved experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub base: ScenarioConfig,
    pub segment_lengths: Vec<f64>,
    pub n_values: Vec<usize>,
    pub thetas: Vec<f64>,
    pub algorithms: Vec<Algorithm>,
    pub opts: MMOptions,
    pub oracle_step: f64,
    pub output: Option<PathBuf>,
}

macro_rules! pick {
    ($file:ident, $preset:ident, $field:ident) => {
        $file
            .$field
            .clone()
            .or_else(|| $preset.$field.clone())
            .ok_or_else(|| Error::Config(concat!("missing field `", stringify!($field), "`").into()))?
    };
}

impl ExperimentSpec {
    pub fn preset(kind: ExperimentKind) -> Result<Self> {
        ExperimentSpec::resolve(kind, ConfigFile::default())
    }

    /// Fills the gaps in `file` from the preset of `kind` and validates.
    pub fn resolve(kind: ExperimentKind, file: ConfigFile) -> Result<Self> {
        if let Some(k) = file.kind {
            if k != kind {
                return Err(Error::Config(format!(
                    "field `kind`: config is for `{k}` but `{kind}` was requested"
                )));
            }
        }
        let preset = ConfigFile::preset(kind);

        let tx_power = match (file.tx_power, file.tx_power_db) {
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "fields `tx_power` and `tx_power_db` are mutually exclusive".into(),
                ))
            }
            (Some(p), None) => p,
            (None, Some(db)) => db_to_linear(db),
            (None, None) => db_to_linear(preset.tx_power_db.unwrap_or(0.0)),
        };

        let n_antennas: usize = pick!(file, preset, n_antennas);
        let angles: Vec<f64> = pick!(file, preset, angles);
        let segment_length: f64 = pick!(file, preset, segment_length);
        let min_spacing: f64 = pick!(file, preset, min_spacing);
        let wavelength: f64 = pick!(file, preset, wavelength);
        let noise_power: f64 = pick!(file, preset, noise_power);
        for (name, v) in [
            ("segment_length", segment_length),
            ("min_spacing", min_spacing),
            ("wavelength", wavelength),
            ("noise_power", noise_power),
            ("tx_power", tx_power),
        ] {
            if !v.is_finite() {
                return Err(Error::Config(format!("field `{name}` must be finite")));
            }
        }

        let segment_lengths = match (&file.segment_lengths, file.segment_length) {
            (Some(list), _) => list.clone(),
            (None, Some(l)) => vec![l],
            (None, None) => preset
                .segment_lengths
                .clone()
                .unwrap_or_else(|| vec![segment_length]),
        };
        let base_length = if file.segment_length.is_none() && file.segment_lengths.is_some() {
            segment_lengths.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        } else {
            segment_length
        };
        let base = ScenarioConfig::new(
            n_antennas,
            angles,
            base_length,
            min_spacing,
            wavelength,
            tx_power,
            noise_power,
        )?;

        let n_values: Vec<usize> = pick!(file, preset, n_values);
        let theta_grid: ThetaGrid = pick!(file, preset, theta_grid);
        let thetas = theta_grid.points()?;
        let algorithms: Vec<Algorithm> = pick!(file, preset, algorithms);
        if segment_lengths.is_empty() {
            return Err(Error::Config("field `segment_lengths` must not be empty".into()));
        }
        if n_values.is_empty() {
            return Err(Error::Config("field `n_values` must not be empty".into()));
        }
        if algorithms.is_empty() {
            return Err(Error::Config("field `algorithms` must not be empty".into()));
        }
        // Fail fast on sweep points the base scenario cannot hold.
        match kind {
            ExperimentKind::SweepN => {
                for &n in &n_values {
                    base.with_n_antennas(n)?;
                }
            }
            ExperimentKind::Convergence | ExperimentKind::Beampattern => {
                for &l in &segment_lengths {
                    base.with_segment_length(l)?;
                }
            }
            _ => {}
        }

        let opts = MMOptions {
            tol: pick!(file, preset, tol),
            max_iters: pick!(file, preset, max_iters),
            multi_start: pick!(file, preset, multi_start),
            rng_seed: pick!(file, preset, seed),
        };
        opts.validate()?;

        Ok(ExperimentSpec {
            kind,
            base,
            segment_lengths,
            n_values,
            thetas,
            algorithms,
            opts,
            oracle_step: pick!(file, preset, oracle_step),
            output: file.output,
        })
    }

    pub fn wants(&self, algo: Algorithm) -> bool {
        self.algorithms.contains(&algo)
    }
}
