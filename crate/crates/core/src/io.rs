//! File formats for pipeline artifacts.
//!
//! Datasets are CSV (one sample per line) with a JSON sidecar at the same
//! path with a `.json` extension. P estimates are CSV with a JSON metadata
//! sidecar in the same way. Everything else is plain JSON.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::homodyne::{DatasetMeta, QuadratureDataset};
use crate::numerics::Grid1D;
use crate::reconstruction::PEstimate;
use crate::states::StateModel;

/// Sidecar path for a CSV artifact.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_dataset(csv: &Path, data: &QuadratureDataset) -> Result<()> {
    let mut text = String::with_capacity(data.n() * 20);
    for x in data.samples() {
        // `Display` for f64 prints the shortest string that round-trips.
        writeln!(text, "{x}").expect("writing to a String");
    }
    fs::write(csv, text)?;
    write_json(&sidecar_path(csv), &data.meta())
}

/// Reads a dataset CSV. The sidecar is optional so measured data can be
/// dropped in as a bare column of numbers; blank lines and lines starting
/// with `#` are skipped.
pub fn read_dataset(csv: &Path) -> Result<QuadratureDataset> {
    let text = fs::read_to_string(csv)?;
    let mut samples = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let x: f64 = line.parse().map_err(|_| {
            Error::Parse(format!("{}:{}: not a number: {line:?}", csv.display(), line_no + 1))
        })?;
        samples.push(x);
    }
    let sidecar = sidecar_path(csv);
    let (model, seed) = if sidecar.exists() {
        let meta: DatasetMeta = read_json(&sidecar)?;
        if meta.n != samples.len() {
            return Err(Error::Parse(format!(
                "sidecar says n = {} but {} holds {} samples",
                meta.n,
                csv.display(),
                samples.len()
            )));
        }
        (meta.model()?, meta.seed)
    } else {
        (None, None)
    };
    QuadratureDataset::from_samples(samples, model, seed)
}

/// JSON metadata stored next to a P-estimate CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PEstimateMeta {
    pub alpha_grid: Grid1D,
    pub cutoff: f64,
    pub n: usize,
    pub source: String,
    pub fitted: Option<StateModel>,
}

const P_HEADER: &str = "alpha,p,sigma_p,delta_p";

pub fn write_p_estimate(csv: &Path, est: &PEstimate, fitted: Option<&StateModel>) -> Result<()> {
    let mut text = String::new();
    writeln!(text, "{P_HEADER}").expect("writing to a String");
    for (k, alpha) in est.alpha_grid.points().enumerate() {
        let sigma = est.sigma_p.get(k).map(|v| v.to_string()).unwrap_or_default();
        let delta = est
            .delta_p
            .as_ref()
            .map(|d| d[k].to_string())
            .unwrap_or_default();
        writeln!(text, "{alpha},{},{sigma},{delta}", est.p[k]).expect("writing to a String");
    }
    fs::write(csv, text)?;
    let meta = PEstimateMeta {
        alpha_grid: est.alpha_grid,
        cutoff: est.cutoff,
        n: est.n,
        source: est.source.clone(),
        fitted: fitted.copied(),
    };
    write_json(&sidecar_path(csv), &meta)
}

pub fn read_p_estimate(csv: &Path) -> Result<(PEstimate, Option<StateModel>)> {
    let meta: PEstimateMeta = read_json(&sidecar_path(csv))?;
    let text = fs::read_to_string(csv)?;
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(P_HEADER) {
        return Err(Error::Parse(format!("{}: expected header {P_HEADER:?}", csv.display())));
    }
    let parse = |s: &str, line_no: usize| -> Result<Option<f64>> {
        if s.is_empty() {
            return Ok(None);
        }
        s.parse()
            .map(Some)
            .map_err(|_| Error::Parse(format!("{}:{line_no}: not a number: {s:?}", csv.display())))
    };
    let (mut p, mut sigma_p, mut delta_p) = (Vec::new(), Vec::new(), Vec::new());
    for (k, line) in lines.enumerate() {
        let line_no = k + 2;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::Parse(format!("{}:{line_no}: expected 4 columns", csv.display())));
        }
        let alpha = parse(fields[0], line_no)?;
        if alpha != Some(meta.alpha_grid.point(k)) {
            return Err(Error::Parse(format!(
                "{}:{line_no}: alpha does not match the grid in the metadata",
                csv.display()
            )));
        }
        p.push(parse(fields[1], line_no)?.ok_or(Error::Parse(format!(
            "{}:{line_no}: missing p",
            csv.display()
        )))?);
        sigma_p.extend(parse(fields[2], line_no)?);
        delta_p.extend(parse(fields[3], line_no)?);
    }
    let rows = p.len();
    if rows != meta.alpha_grid.count()
        || !(sigma_p.is_empty() || sigma_p.len() == rows)
        || !(delta_p.is_empty() || delta_p.len() == rows)
    {
        return Err(Error::Parse(format!(
            "{}: row or column count disagrees with the metadata",
            csv.display()
        )));
    }
    let est = PEstimate {
        alpha_grid: meta.alpha_grid,
        p,
        sigma_p,
        delta_p: (!delta_p.is_empty()).then_some(delta_p),
        cutoff: meta.cutoff,
        n: meta.n,
        source: meta.source,
    };
    Ok((est, meta.fitted))
}

/// Plot-ready cross section: `p` with its statistical and systematic bands.
pub fn write_cross_section(csv: &Path, est: &PEstimate) -> Result<()> {
    if est.sigma_p.len() != est.p.len() {
        return Err(Error::MissingSigma);
    }
    let zeros = vec![0.0; est.p.len()];
    let delta = est.delta_p.as_deref().unwrap_or(&zeros);
    let mut text = String::from("alpha,p,p_minus_sigma,p_plus_sigma,p_minus_delta,p_plus_delta\n");
    for (k, alpha) in est.alpha_grid.points().enumerate() {
        let (p, s, d) = (est.p[k], est.sigma_p[k], delta[k].abs());
        writeln!(text, "{alpha},{p},{},{},{},{}", p - s, p + s, p - d, p + d)
            .expect("writing to a String");
    }
    fs::write(csv, text)?;
    Ok(())
}

pub fn sha256_file(path: &Path) -> Result<String> {
    Ok(hex::encode(Sha256::digest(fs::read(path)?)))
}

/// Everything needed to reproduce a run: its configuration, seeds and the
/// SHA-256 of each artifact it wrote.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub config: serde_json::Value,
    pub seeds: Vec<u64>,
    pub artifacts: BTreeMap<String, String>,
}

impl Manifest {
    pub fn new<C: Serialize>(command: &str, config: &C, seeds: Vec<u64>) -> Result<Self> {
        Ok(Self {
            command: command.to_owned(),
            config: serde_json::to_value(config)?,
            seeds,
            artifacts: BTreeMap::new(),
        })
    }

    /// Records the hash of an artifact under its file name.
    pub fn record(&mut self, path: &Path) -> Result<()> {
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        self.artifacts.insert(name, sha256_file(path)?);
        Ok(())
    }
}
