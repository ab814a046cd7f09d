//! Estimation of the P-function characteristic function from quadrature
//! samples.
//!
//! For a phase-randomised state the characteristic function of the P
//! function is the quadrature characteristic function amplified by
//! `exp(b^2 / 2)`:
//!
//! ```text
//! phi(b) = exp(b^2 / 2) * (1/N) * sum_j exp(i b x_j)
//! sigma(b)^2 = (exp(b^2) - |phi(b)|^2) / N
//! ```
//!
//! Only the real part feeds the reconstruction; the imaginary part is kept as
//! a symmetry diagnostic.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::homodyne::QuadratureDataset;
use crate::numerics::Grid1D;

/// Largest `|beta|` accepted on an estimation grid; `exp(b^2)` is still far
/// from overflow there.
pub const MAX_B: f64 = 6.0;

/// Default trailing window for the threshold cutoff policy.
pub const DEFAULT_WINDOW: f64 = 0.25;

const BLOCK: usize = 1024;
const RESYNC: usize = 64;

/// Characteristic function estimate on a radial grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCf")]
pub struct CfEstimate {
    pub grid: Grid1D,
    pub phi_re: Vec<f64>,
    pub phi_im: Vec<f64>,
    /// Empty until [`cf_variance`] has run.
    pub sigma: Vec<f64>,
    pub cutoff: Option<f64>,
    pub n: usize,
}

#[derive(Deserialize)]
struct RawCf {
    grid: Grid1D,
    phi_re: Vec<f64>,
    phi_im: Vec<f64>,
    #[serde(default)]
    sigma: Vec<f64>,
    cutoff: Option<f64>,
    n: usize,
}

impl TryFrom<RawCf> for CfEstimate {
    type Error = Error;

    fn try_from(raw: RawCf) -> Result<Self> {
        let est = CfEstimate {
            grid: raw.grid,
            phi_re: raw.phi_re,
            phi_im: raw.phi_im,
            sigma: raw.sigma,
            cutoff: raw.cutoff,
            n: raw.n,
        };
        est.validate()?;
        Ok(est)
    }
}

impl CfEstimate {
    fn validate(&self) -> Result<()> {
        let count = self.grid.count();
        if self.grid.start() != 0.0 {
            return Err(Error::InvalidGrid("characteristic-function grid must start at 0".into()));
        }
        if self.phi_re.len() != count || self.phi_im.len() != count {
            return Err(Error::Parse(format!(
                "phi arrays must have {count} entries, got {} and {}",
                self.phi_re.len(),
                self.phi_im.len()
            )));
        }
        if !self.sigma.is_empty() && self.sigma.len() != count {
            return Err(Error::Parse(format!("sigma must have {count} entries")));
        }
        if self.sigma.iter().any(|s| !(*s >= 0.0)) {
            return Err(Error::Parse("sigma must be non-negative".into()));
        }
        if let Some(c) = self.cutoff {
            if self.grid.nearest_index(c).is_none() || !(c > 0.0) {
                return Err(Error::CutoffOutsideGrid {
                    cutoff: c,
                    start: self.grid.start(),
                    end: self.grid.end(),
                });
            }
        }
        Ok(())
    }

    pub fn has_sigma(&self) -> bool {
        !self.sigma.is_empty()
    }

    /// Grid index of the cutoff.
    pub fn cutoff_index(&self) -> Result<usize> {
        let c = self.cutoff.ok_or(Error::MissingCutoff)?;
        self.grid.nearest_index(c).ok_or(Error::CutoffOutsideGrid {
            cutoff: c,
            start: self.grid.start(),
            end: self.grid.end(),
        })
    }

    /// Real part at any `b`, using evenness for negative arguments and linear
    /// interpolation between grid points.
    pub fn phi_re_at(&self, b: f64) -> f64 {
        self.grid.interpolate(&self.phi_re, b.abs())
    }

    /// SHA-256 over the sample count, grid, estimates and cutoff.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.n as u64).to_le_bytes());
        h.update(self.grid.start().to_le_bytes());
        h.update(self.grid.step().to_le_bytes());
        h.update((self.grid.count() as u64).to_le_bytes());
        for v in self.phi_re.iter().chain(&self.phi_im) {
            h.update(v.to_le_bytes());
        }
        h.update(self.cutoff.unwrap_or(f64::NAN).to_le_bytes());
        hex::encode(h.finalize())
    }
}

/// `[0, 4]` with step `0.01`.
pub fn default_cf_grid() -> Grid1D {
    Grid1D::new(0.0, 0.01, 401).expect("static grid")
}

/// Empirical characteristic function on `grid` (which must start at 0 and
/// end at or below [`MAX_B`]). `sigma` is left empty.
pub fn empirical_cf(data: &QuadratureDataset, grid: &Grid1D) -> Result<CfEstimate> {
    let n = data.n();
    if n < 2 {
        return Err(Error::Domain(format!("need at least 2 samples, got {n}")));
    }
    if grid.start() != 0.0 {
        return Err(Error::InvalidGrid("characteristic-function grid must start at 0".into()));
    }
    if grid.end() > MAX_B + 1e-9 {
        return Err(Error::InvalidGrid(format!(
            "grid end {} exceeds the cap b = {MAX_B}",
            grid.end()
        )));
    }
    let count = grid.count();
    let step = grid.step();

    // Block sums in parallel, combined in block order. Within a block each
    // sample's phase factor is advanced by rotation and re-seeded from sin_cos
    // every RESYNC points.
    let blocks: Vec<(Vec<f64>, Vec<f64>)> = data
        .samples()
        .par_chunks(BLOCK)
        .map(|chunk| {
            let mut acc_re = vec![0.0; count];
            let mut acc_im = vec![0.0; count];
            for &x in chunk {
                let (s1, c1) = (step * x).sin_cos();
                for (start, (re_slots, im_slots)) in acc_re
                    .chunks_mut(RESYNC)
                    .zip(acc_im.chunks_mut(RESYNC))
                    .enumerate()
                {
                    let (mut im, mut re) = ((start * RESYNC) as f64 * step * x).sin_cos();
                    for (r, i) in re_slots.iter_mut().zip(im_slots.iter_mut()) {
                        *r += re;
                        *i += im;
                        let next_re = re * c1 - im * s1;
                        im = re * s1 + im * c1;
                        re = next_re;
                    }
                }
            }
            (acc_re, acc_im)
        })
        .collect();

    let mut total_re = vec![0.0; count];
    let mut total_im = vec![0.0; count];
    for (re, im) in &blocks {
        for k in 0..count {
            total_re[k] += re[k];
            total_im[k] += im[k];
        }
    }

    let inv_n = 1.0 / n as f64;
    let mut phi_re = Vec::with_capacity(count);
    let mut phi_im = Vec::with_capacity(count);
    for (k, (re, im)) in total_re.into_iter().zip(total_im).enumerate() {
        let b = grid.point(k);
        let gain = (0.5 * b * b).exp();
        phi_re.push(gain * re * inv_n);
        phi_im.push(gain * im * inv_n);
    }
    Ok(CfEstimate {
        grid: *grid,
        phi_re,
        phi_im,
        sigma: Vec::new(),
        cutoff: None,
        n,
    })
}

/// Fills `sigma(b) = sqrt((exp(b^2) - |phi(b)|^2) / N)`, clamping a
/// numerically negative bracket to zero.
pub fn cf_variance(data: &QuadratureDataset, mut estimate: CfEstimate) -> Result<CfEstimate> {
    if estimate.n != data.n() {
        return Err(Error::ProvenanceMismatch(format!(
            "estimate built from {} samples, dataset has {}",
            estimate.n,
            data.n()
        )));
    }
    let n = estimate.n as f64;
    estimate.sigma = estimate
        .grid
        .points()
        .zip(estimate.phi_re.iter().zip(&estimate.phi_im))
        .map(|(b, (re, im))| {
            let bracket = (b * b).exp() - (re * re + im * im);
            (bracket.max(0.0) / n).sqrt()
        })
        .collect();
    // phi(0) = 1 exactly, so the bracket vanishes there.
    estimate.sigma[0] = 0.0;
    Ok(estimate)
}

/// [`empirical_cf`] followed by [`cf_variance`].
pub fn estimate_cf(data: &QuadratureDataset, grid: &Grid1D) -> Result<CfEstimate> {
    cf_variance(data, empirical_cf(data, grid)?)
}

/// How the integration cutoff `|beta|_c` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutoffPolicy {
    /// Snap the given value to the grid.
    Fixed(f64),
    /// Smallest `b*` with `|phi_re(b)| < k sigma(b)` for every grid point of
    /// the window `[b*, b* + window]`.
    Threshold { k: f64, window: f64 },
}

impl CutoffPolicy {
    pub fn threshold(k: f64) -> Self {
        Self::Threshold {
            k,
            window: DEFAULT_WINDOW,
        }
    }
}

/// Chooses the cutoff and stores it in `estimate.cutoff`.
pub fn choose_cutoff(estimate: &mut CfEstimate, policy: CutoffPolicy) -> Result<f64> {
    let grid = estimate.grid;
    let outside = |c: f64| Error::CutoffOutsideGrid {
        cutoff: c,
        start: grid.start(),
        end: grid.end(),
    };
    let cutoff = match policy {
        CutoffPolicy::Fixed(c) => {
            let k = grid.nearest_index(c).ok_or_else(|| outside(c))?;
            if k == 0 {
                return Err(outside(c));
            }
            grid.point(k)
        }
        CutoffPolicy::Threshold { k, window } => {
            if !estimate.has_sigma() {
                return Err(Error::MissingSigma);
            }
            if !(k >= 0.0 && window >= 0.0) {
                return Err(Error::Domain(format!(
                    "threshold k = {k} and window = {window} must be non-negative"
                )));
            }
            let span = (window / grid.step()).round() as usize;
            let last = grid.count() - 1;
            let below =
                |j: usize| estimate.phi_re[j].abs() < k * estimate.sigma[j];
            let start = (1..=last.saturating_sub(span))
                .find(|&i| (i..=i + span).all(below))
                .ok_or(Error::CutoffNotFound { k, window })?;
            grid.point(start)
        }
    };
    estimate.cutoff = Some(cutoff);
    Ok(cutoff)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homodyne::sample_quadratures;
    use crate::numerics::RngSeed;
    use crate::states::StateModel;
    use proptest::prelude::*;

    fn dataset(samples: Vec<f64>) -> QuadratureDataset {
        QuadratureDataset::from_samples(samples, None, None).unwrap()
    }

    #[test]
    fn samples_at_origin() {
        let data = dataset(vec![0.0; 50]);
        let est = estimate_cf(&data, &default_cf_grid()).unwrap();
        for (k, b) in est.grid.points().enumerate() {
            let expected = (0.5 * b * b).exp();
            assert!((est.phi_re[k] - expected).abs() <= 1e-12 * expected);
            assert_eq!(est.phi_im[k], 0.0);
        }
        assert_eq!(est.sigma[0], 0.0);
    }

    #[test]
    fn symmetric_pair() {
        let c = 1.37;
        let data = dataset(vec![c, -c]);
        let est = empirical_cf(&data, &default_cf_grid()).unwrap();
        for (k, b) in est.grid.points().enumerate() {
            let expected = (b * c).cos() * (0.5 * b * b).exp();
            assert!((est.phi_re[k] - expected).abs() < 1e-11 * (0.5 * b * b).exp());
            assert_eq!(est.phi_im[k], 0.0);
        }
    }

    #[test]
    fn origin_is_exact() {
        let m = StateModel::new(1.11, 0.6, 1.0).unwrap();
        let data = sample_quadratures(&m, 10_000, RngSeed(9)).unwrap();
        let est = estimate_cf(&data, &default_cf_grid()).unwrap();
        assert_eq!(est.phi_re[0], 1.0);
        assert_eq!(est.phi_im[0], 0.0);
        assert_eq!(est.sigma[0], 0.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        let g = default_cf_grid();
        assert!(empirical_cf(&dataset(vec![1.0]), &g).is_err());
        let shifted = Grid1D::new(0.1, 0.01, 10).unwrap();
        assert!(empirical_cf(&dataset(vec![1.0, 2.0]), &shifted).is_err());
        let wide = Grid1D::new(0.0, 0.1, 71).unwrap();
        assert!(empirical_cf(&dataset(vec![1.0, 2.0]), &wide).is_err());
        let est = empirical_cf(&dataset(vec![1.0, 2.0]), &g).unwrap();
        assert!(matches!(
            cf_variance(&dataset(vec![1.0, 2.0, 3.0]), est),
            Err(Error::ProvenanceMismatch(_))
        ));
    }

    #[test]
    fn vanishing_phi_gives_flat_sigma() {
        // Hand-built estimate with phi = 0 away from the origin.
        let grid = Grid1D::new(0.0, 0.5, 5).unwrap();
        let mut est = CfEstimate {
            grid,
            phi_re: vec![1.0, 0.0, 0.0, 0.0, 0.0],
            phi_im: vec![0.0; 5],
            sigma: vec![],
            cutoff: None,
            n: 400,
        };
        let data = dataset(vec![0.0; 400]);
        est = cf_variance(&data, est).unwrap();
        for (k, b) in grid.points().enumerate().skip(1) {
            let expected = (0.5 * b * b).exp() / 20.0;
            assert!((est.sigma[k] - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn fixed_cutoffs_snap() {
        let data = dataset(vec![0.3, -0.3, 1.0]);
        let mut est = estimate_cf(&data, &default_cf_grid()).unwrap();
        assert!((choose_cutoff(&mut est, CutoffPolicy::Fixed(2.8)).unwrap() - 2.8).abs() < 1e-12);
        assert!((choose_cutoff(&mut est, CutoffPolicy::Fixed(1.9)).unwrap() - 1.9).abs() < 1e-12);
        assert!((choose_cutoff(&mut est, CutoffPolicy::Fixed(1.9031)).unwrap() - 1.9).abs() < 1e-12);
        assert!(est.cutoff_index().unwrap() == 190);
        assert!(choose_cutoff(&mut est, CutoffPolicy::Fixed(4.5)).is_err());
        assert!(choose_cutoff(&mut est, CutoffPolicy::Fixed(0.0)).is_err());
    }

    #[test]
    fn threshold_needs_sigma_and_reachable_level() {
        let data = dataset(vec![0.0; 10]);
        let mut est = empirical_cf(&data, &default_cf_grid()).unwrap();
        assert!(matches!(
            choose_cutoff(&mut est, CutoffPolicy::threshold(1.0)),
            Err(Error::MissingSigma)
        ));
        // All samples at zero: |phi| = exp(b^2/2) always dominates sigma = 0.
        let mut est = cf_variance(&data, est).unwrap();
        assert!(matches!(
            choose_cutoff(&mut est, CutoffPolicy::threshold(1.0)),
            Err(Error::CutoffNotFound { .. })
        ));
    }

    #[test]
    fn json_round_trip() {
        let m = StateModel::new(1.11, 0.6, 1.0).unwrap();
        let data = sample_quadratures(&m, 2000, RngSeed(1)).unwrap();
        let mut est = estimate_cf(&data, &default_cf_grid()).unwrap();
        choose_cutoff(&mut est, CutoffPolicy::Fixed(2.8)).unwrap();
        let json = serde_json::to_string(&est).unwrap();
        let back: CfEstimate = serde_json::from_str(&json).unwrap();
        assert_eq!(back, est);
        assert_eq!(back.fingerprint(), est.fingerprint());
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        for key in ["grid", "phi_re", "phi_im", "sigma", "cutoff", "n"] {
            assert!(value.get(key).is_some(), "missing {key}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn bounded_by_gain_and_shift_invariant(
            xs in prop::collection::vec(-8.0f64..8.0, 2..200),
            shift in -3.0f64..3.0,
        ) {
            let grid = default_cf_grid();
            let a = empirical_cf(&dataset(xs.clone()), &grid).unwrap();
            let b = empirical_cf(&dataset(xs.iter().map(|x| x + shift).collect()), &grid).unwrap();
            for (k, bb) in grid.points().enumerate() {
                let gain = (0.5 * bb * bb).exp();
                let ma = a.phi_re[k].hypot(a.phi_im[k]);
                let mb = b.phi_re[k].hypot(b.phi_im[k]);
                prop_assert!(ma / gain <= 1.0 + 1e-12);
                prop_assert!((ma - mb).abs() <= 1e-11 * gain);
            }
        }
    }
}
