//! Long-format result rows and their CSV / JSON encodings.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

pub const CSV_VERSION_LINE: &str = "# ma-array-opt v1";
pub const CSV_HEADER: &str = "experiment,scheme,N,M,L,seed,point,value";

/// One output record. `point` is an iteration index, an angle or an antenna
/// count depending on the experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub experiment: String,
    pub scheme: String,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "L")]
    pub l: f64,
    pub seed: u64,
    pub point: f64,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<f64>>,
    /// Beamformer as `[re, im]` pairs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<Vec<[f64; 2]>>,
}

pub fn write_csv<W: Write>(mut out: W, rows: &[ResultRow]) -> std::io::Result<()> {
    writeln!(out, "{CSV_VERSION_LINE}")?;
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.experiment, r.scheme, r.n, r.m, r.l, r.seed, r.point, r.value
        )?;
    }
    Ok(())
}

pub fn write_json<W: Write>(mut out: W, rows: &[ResultRow]) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut out, rows)?;
    writeln!(out)
}

/// Writes CSV, or JSON when the path ends in `.json`.
pub fn write_rows(path: &Path, rows: &[ResultRow]) -> Result<()> {
    if let Some(bad) = rows.iter().find(|r| !(r.value.is_finite() && r.point.is_finite())) {
        return Err(Error::Config(format!(
            "refusing to write non-finite value for {} {} at {}",
            bad.experiment, bad.scheme, bad.point
        )));
    }
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = std::fs::File::create(path).map_err(io)?;
    let mut buf = std::io::BufWriter::new(file);
    let is_json = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"));
    if is_json {
        write_json(&mut buf, rows).map_err(io)?;
    } else {
        write_csv(&mut buf, rows).map_err(io)?;
    }
    buf.flush().map_err(io)
}
