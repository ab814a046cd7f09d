//! Synthetic phase-randomised balanced homodyne data.
//!
//! Two independent samplers produce the same law:
//!
//! * [`sample_quadratures`] draws directly from the measured density
//!   `g(x) [(1 - q) + q x^2 / s^2]`, which is a mixture of a centred Gaussian
//!   of variance `s^2` (weight `1 - q`) and a signed chi variate with three
//!   degrees of freedom scaled by `s` (weight `q = c / s^2`).
//! * [`sample_via_loss_channel`] draws an ideal quadrature (a Fock-state
//!   quadrature for the photon-added part, the thermal Gaussian otherwise) and
//!   mixes it with vacuum noise on a beam splitter of transmissivity `eta`.
//!
//! [`sample_by_rejection`] is a third route against a Gaussian envelope, kept
//! as a cross-check of the direct sampler.
//!
//! Work is split into chunks of [`CHUNK`] samples; chunk `i` uses ChaCha
//! stream `i` (offset per sampler), so output does not depend on scheduling.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::numerics::{RngSeed, RngStream};
use crate::states::{quadrature_shape, spats_photon_dist, StateModel};

pub const CHUNK: usize = 1 << 16;

const LOSS_CHANNEL_STREAMS: u64 = 1 << 40;
const REJECTION_STREAMS: u64 = 2 << 40;

/// Mass of the photon-number distribution discarded by truncation.
const PHOTON_TAIL: f64 = 1e-12;

/// Quadrature samples plus where they came from.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureDataset {
    samples: Vec<f64>,
    model: Option<StateModel>,
    seed: Option<RngSeed>,
}

/// Sidecar metadata written next to a dataset CSV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub nbar: Option<f64>,
    pub eta: Option<f64>,
    pub w: Option<f64>,
    pub seed: Option<RngSeed>,
    pub n: usize,
}

impl QuadratureDataset {
    /// Wraps measured (or externally generated) samples.
    pub fn from_samples(
        samples: Vec<f64>,
        model: Option<StateModel>,
        seed: Option<RngSeed>,
    ) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if let Some(k) = samples.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(format!("sample {k} is {}", samples[k])));
        }
        Ok(Self {
            samples,
            model,
            seed,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn n(&self) -> usize {
        self.samples.len()
    }

    pub fn model(&self) -> Option<&StateModel> {
        self.model.as_ref()
    }

    pub fn seed(&self) -> Option<RngSeed> {
        self.seed
    }

    pub fn meta(&self) -> DatasetMeta {
        DatasetMeta {
            nbar: self.model.map(|m| m.nbar()),
            eta: self.model.map(|m| m.eta()),
            w: self.model.map(|m| m.w()),
            seed: self.seed,
            n: self.n(),
        }
    }

    /// SHA-256 over the little-endian bytes of every sample.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        for x in &self.samples {
            h.update(x.to_le_bytes());
        }
        hex::encode(h.finalize())
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.n() as f64
    }

    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / self.n() as f64
    }
}

impl DatasetMeta {
    pub fn model(&self) -> Result<Option<StateModel>> {
        match (self.nbar, self.eta, self.w) {
            (Some(nbar), Some(eta), Some(w)) => StateModel::new(nbar, eta, w).map(Some),
            (None, None, None) => Ok(None),
            _ => Err(Error::Parse(
                "sidecar must give all of nbar, eta, w or none of them".into(),
            )),
        }
    }
}

fn chunked<F>(n: usize, stream_offset: u64, seed: RngSeed, draw: F) -> Vec<f64>
where
    F: Fn(&mut RngStream) -> f64 + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    let parts: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let len = CHUNK.min(n - c * CHUNK);
            let mut rng = RngStream::substream(seed, stream_offset + c as u64);
            (0..len).map(|_| draw(&mut rng)).collect()
        })
        .collect();
    parts.concat()
}

fn require_count(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("sample count must be at least 1".into()));
    }
    Ok(())
}

/// Exact sampler for [`crate::states::measured_quadrature_pdf`].
pub fn sample_quadratures(model: &StateModel, n: usize, seed: RngSeed) -> Result<QuadratureDataset> {
    require_count(n)?;
    let (s2, c) = quadrature_shape(model);
    let s = s2.sqrt();
    let q = c / s2;
    let samples = chunked(n, 0, seed, |rng| {
        if rng.uniform() < q {
            let chi2 = (0..3).map(|_| rng.normal().powi(2)).sum::<f64>();
            rng.sign() * s * chi2.sqrt()
        } else {
            s * rng.normal()
        }
    });
    QuadratureDataset::from_samples(samples, Some(*model), Some(seed))
}

/// Rejection sampler for [`crate::states::measured_quadrature_pdf`] with a centred Gaussian
/// envelope of variance `2 s^2`.
pub fn sample_by_rejection(model: &StateModel, n: usize, seed: RngSeed) -> Result<QuadratureDataset> {
    require_count(n)?;
    let (s2, c) = quadrature_shape(model);
    let q = c / s2;
    let tau2 = 2.0 * s2;
    let tau = tau2.sqrt();
    // pdf / envelope = sqrt(tau2/s2) exp(-a y) [(1 - q) + q y / s2] with y = x^2,
    // maximised at y* = 1/a - (1 - q) s2 / q when that is positive.
    let a = 0.5 * (1.0 / s2 - 1.0 / tau2);
    let ratio = |y: f64| (tau2 / s2).sqrt() * (-a * y).exp() * ((1.0 - q) + q * y / s2);
    let y_star = if q > 0.0 { 1.0 / a - (1.0 - q) * s2 / q } else { 0.0 };
    let bound = ratio(y_star.max(0.0)) * (1.0 + 1e-12);
    let samples = chunked(n, REJECTION_STREAMS, seed, |rng| loop {
        let x = tau * rng.normal();
        if rng.uniform() * bound <= ratio(x * x) {
            break x;
        }
    });
    QuadratureDataset::from_samples(samples, Some(*model), Some(seed))
}

/// Sampler built from the physical picture: photon number of the lossless
/// photon-added state, Fock-state quadrature, then beam-splitter loss
/// `sqrt(eta) x_ideal + sqrt(1 - eta) x_vac`.
pub fn sample_via_loss_channel(
    model: &StateModel,
    n: usize,
    seed: RngSeed,
) -> Result<QuadratureDataset> {
    require_count(n)?;
    let photons = PhotonNumberTable::spats(model.nbar())?;
    let thermal_sd = (2.0 * model.nbar() + 1.0).sqrt();
    let (t, r) = (model.eta().sqrt(), (1.0 - model.eta()).sqrt());
    let w = model.w();
    let samples = chunked(n, LOSS_CHANNEL_STREAMS, seed, |rng| {
        let ideal = if rng.uniform() < w {
            let k = photons.draw(rng);
            fock_quadrature(k, rng)
        } else {
            thermal_sd * rng.normal()
        };
        t * ideal + r * rng.normal()
    });
    QuadratureDataset::from_samples(samples, Some(*model), Some(seed))
}

/// Cumulative photon-number table, truncated once the remaining mass drops
/// below [`PHOTON_TAIL`].
struct PhotonNumberTable {
    cumulative: Vec<f64>,
}

impl PhotonNumberTable {
    fn spats(nbar: f64) -> Result<Self> {
        if nbar == 0.0 {
            // Photon addition to vacuum gives |1>.
            return Ok(Self {
                cumulative: vec![0.0, 1.0],
            });
        }
        let mut cumulative = Vec::new();
        let mut total = 0.0;
        let mut k = 0u32;
        while total < 1.0 - PHOTON_TAIL {
            total += spats_photon_dist(k, nbar)?;
            cumulative.push(total);
            k += 1;
            if k > 1_000_000 {
                return Err(Error::Domain(format!(
                    "photon-number distribution for nbar = {nbar} too wide to tabulate"
                )));
            }
        }
        Ok(Self { cumulative })
    }

    fn draw(&self, rng: &mut RngStream) -> usize {
        let total = *self.cumulative.last().unwrap();
        let u = rng.uniform() * total;
        self.cumulative.partition_point(|&c| c < u)
    }
}

/// Quadrature density of the Fock state `|k>` in vacuum-variance-one units,
/// `psi_k(x / sqrt 2)^2 / sqrt 2` with normalised Hermite functions `psi_k`.
pub fn fock_quadrature_pdf(k: usize, x: f64) -> f64 {
    let psi = hermite_function(k, x / std::f64::consts::SQRT_2);
    psi * psi / std::f64::consts::SQRT_2
}

/// Normalised Hermite function via the stable three-term recurrence.
fn hermite_function(k: usize, q: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25) * (-0.5 * q * q).exp();
    for j in 0..k {
        let jf = j as f64;
        let next = (2.0 / (jf + 1.0)).sqrt() * q * cur - (jf / (jf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Uniform-envelope rejection sampling of the Fock quadrature density.
/// Hermite functions obey `|psi_k| <= pi^(-1/4)`, so the density never
/// exceeds `1 / sqrt(2 pi)`; beyond the classical turning point plus eight
/// units the remaining mass is negligible.
fn fock_quadrature(k: usize, rng: &mut RngStream) -> f64 {
    let half_width = (2.0 * (2.0 * k as f64 + 1.0)).sqrt() + 8.0;
    let bound = 1.0 / (2.0 * PI).sqrt();
    loop {
        let x = half_width * (2.0 * rng.uniform() - 1.0);
        if rng.uniform() * bound <= fock_quadrature_pdf(k, x) {
            return x;
        }
    }
}
