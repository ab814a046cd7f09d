//! Cutoff Hankel inversion of the estimated characteristic function.
//!
//! ```text
//! P(a)        = (2/pi) int_0^bc  b J0(2 b a) phi(b) db
//! var P(a)    = (1/N) [ (4/pi^2) iint_0^bc b b' J0(2 b a) J0(2 b' a) phi(b - b') exp(b b') db db' - P(a)^2 ]
//! Delta_P(a)  = (2/pi) int_bc^inf b J0(2 b a) Phi_model(b) db
//! ```
//!
//! `phi(b - b')` uses the real part of the estimate, extended evenly to
//! negative arguments and linearly interpolated between grid points.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::CfEstimate;
use crate::numerics::bessel::j0;
use crate::numerics::{integrate_samples, quadrature_weights, Grid1D};
use crate::states::{model_cf, StateModel};

/// b-step of the double integral in the variance.
pub const VARIANCE_STEP: f64 = 0.02;

/// b-step of analytic Hankel integrals (closure tests, systematic error).
pub const HANKEL_STEP: f64 = 0.01;

/// Tail integrals stop once `|Phi(b)| b` drops below this.
pub const TAIL_TOLERANCE: f64 = 1e-14;

/// `[0, 3]` with step `0.02`.
pub fn default_alpha_grid() -> Grid1D {
    Grid1D::new(0.0, 0.02, 151).expect("static grid")
}

/// Reconstructed P function with its error budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PEstimate {
    pub alpha_grid: Grid1D,
    pub p: Vec<f64>,
    /// Statistical standard deviation; empty until [`PEstimate::with_variance`].
    pub sigma_p: Vec<f64>,
    /// Signed systematic error from the truncated tail; `None` until a fitted
    /// model has been supplied.
    pub delta_p: Option<Vec<f64>>,
    pub cutoff: f64,
    pub n: usize,
    /// Fingerprint of the [`CfEstimate`] this was computed from.
    pub source: String,
}

impl PEstimate {
    pub fn with_variance(mut self, cf: &CfEstimate) -> Result<Self> {
        self.check_source(cf)?;
        self.sigma_p = p_variance_for(cf, &self.alpha_grid, &self.p, VARIANCE_STEP)?;
        Ok(self)
    }

    pub fn with_systematic(mut self, fitted: &StateModel) -> Result<Self> {
        self.delta_p = Some(systematic_error(fitted, &self.alpha_grid, self.cutoff)?);
        Ok(self)
    }

    pub fn check_source(&self, cf: &CfEstimate) -> Result<()> {
        if self.source != cf.fingerprint() {
            return Err(Error::ProvenanceMismatch(
                "P estimate was not reconstructed from this characteristic function".into(),
            ));
        }
        Ok(())
    }
}

fn check_alpha_grid(alpha_grid: &Grid1D) -> Result<()> {
    if alpha_grid.start() != 0.0 {
        return Err(Error::InvalidGrid("alpha grid must start at 0".into()));
    }
    Ok(())
}

/// `(2/pi) int_0^cutoff b J0(2 b alpha) phi_re(b) db` on every alpha grid
/// point, integrating over the estimate's own b grid.
pub fn hankel_reconstruct(cf: &CfEstimate, alpha_grid: &Grid1D) -> Result<PEstimate> {
    check_alpha_grid(alpha_grid)?;
    let cutoff_index = cf.cutoff_index()?;
    if cutoff_index == 0 {
        return Err(Error::Domain("cutoff must be positive".into()));
    }
    let b_grid = cf.grid.truncated(cutoff_index + 1)?;
    let weighted: Vec<f64> = b_grid
        .points()
        .zip(&cf.phi_re)
        .map(|(b, phi)| b * phi)
        .collect();
    let p = alpha_grid
        .points()
        .map(|alpha| {
            let integrand: Vec<f64> = b_grid
                .points()
                .zip(&weighted)
                .map(|(b, bw)| bw * j0(2.0 * b * alpha))
                .collect();
            integrate_samples(&integrand, b_grid.step()).map(|v| 2.0 / PI * v)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(PEstimate {
        alpha_grid: *alpha_grid,
        p,
        sigma_p: Vec::new(),
        delta_p: None,
        cutoff: b_grid.end(),
        n: cf.n,
        source: cf.fingerprint(),
    })
}

/// Hankel transform of an analytic radial characteristic function truncated
/// at `cutoff`, evaluated at one `alpha`.
pub fn hankel_transform<F>(cf: F, cutoff: f64, step: f64, alpha: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let grid = Grid1D::spanning_even(0.0, cutoff, step)?;
    let values: Vec<f64> = grid.points().map(|b| b * j0(2.0 * b * alpha) * cf(b)).collect();
    Ok(2.0 / PI * integrate_samples(&values, grid.step())?)
}

/// [`hankel_transform`] over a whole alpha grid.
pub fn hankel_transform_grid<F>(cf: F, cutoff: f64, step: f64, alpha_grid: &Grid1D) -> Result<Vec<f64>>
where
    F: Fn(f64) -> f64,
{
    let grid = Grid1D::spanning_even(0.0, cutoff, step)?;
    let cf_values: Vec<f64> = grid.points().map(|b| b * cf(b)).collect();
    alpha_grid
        .points()
        .map(|alpha| {
            let values: Vec<f64> = grid
                .points()
                .zip(&cf_values)
                .map(|(b, v)| v * j0(2.0 * b * alpha))
                .collect();
            Ok(2.0 / PI * integrate_samples(&values, grid.step())?)
        })
        .collect()
}

/// Statistical standard deviation of the reconstruction at every alpha
/// grid point, with the default double-integral step.
pub fn p_variance(cf: &CfEstimate, alpha_grid: &Grid1D) -> Result<Vec<f64>> {
    let p = hankel_reconstruct(cf, alpha_grid)?.p;
    p_variance_for(cf, alpha_grid, &p, VARIANCE_STEP)
}

/// Standard deviation given the reconstructed values `p` (same grid).
///
/// The double integral uses the tensor-product rule of
/// [`crate::numerics::integrate_2d`] on `[0, cutoff]^2`; the matrix
/// `w_i w_j b_i b_j phi(b_i - b_j) exp(b_i b_j)` is shared by all alpha.
pub fn p_variance_for(cf: &CfEstimate, alpha_grid: &Grid1D, p: &[f64], step: f64) -> Result<Vec<f64>> {
    check_alpha_grid(alpha_grid)?;
    if p.len() != alpha_grid.count() {
        return Err(Error::Domain("p must have one value per alpha grid point".into()));
    }
    let cutoff = cf.grid.point(cf.cutoff_index()?);
    let grid = Grid1D::spanning_even(0.0, cutoff, step)?;
    let m = grid.count();
    let w = quadrature_weights(m, grid.step());
    let b: Vec<f64> = grid.points().collect();

    let mut kernel = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..=i {
            let v = w[i] * w[j] * b[i] * b[j] * cf.phi_re_at(b[i] - b[j]) * (b[i] * b[j]).exp();
            if !v.is_finite() {
                return Err(Error::NonFinite(format!(
                    "variance integrand overflows at b = {}, b' = {}; use a smaller cutoff",
                    b[i], b[j]
                )));
            }
            kernel[i * m + j] = v;
            kernel[j * m + i] = v;
        }
    }

    let n = cf.n as f64;
    let mut bessel = vec![0.0; m];
    let sigma = alpha_grid
        .points()
        .zip(p)
        .map(|(alpha, &p_alpha)| {
            for (slot, bi) in bessel.iter_mut().zip(&b) {
                *slot = j0(2.0 * bi * alpha);
            }
            let mut quad = 0.0;
            for i in 0..m {
                let row = &kernel[i * m..(i + 1) * m];
                let inner: f64 = row.iter().zip(&bessel).map(|(k, v)| k * v).sum();
                quad += bessel[i] * inner;
            }
            let var = (4.0 / (PI * PI) * quad - p_alpha * p_alpha) / n;
            var.max(0.0).sqrt()
        })
        .collect();
    Ok(sigma)
}

/// Upper integration limit where `|Phi(b)| b` has dropped below
/// [`TAIL_TOLERANCE`] for good.
fn tail_limit(model: &StateModel, cutoff: f64) -> Result<f64> {
    let decay = model.nbar() * model.eta();
    if !(decay > 0.0) {
        return Err(Error::Domain(
            "characteristic function does not decay for eta * nbar = 0; tail is not integrable"
                .into(),
        ));
    }
    // b^3 exp(-decay b^2) peaks at sqrt(1.5 / decay); the envelope falls
    // monotonically beyond that.
    let mut b = cutoff.max((1.5 / decay).sqrt());
    while (model_cf(b, model) * b).abs() >= TAIL_TOLERANCE {
        b += HANKEL_STEP;
    }
    Ok(b)
}

/// Signed systematic error `(2/pi) int_cutoff^b_max b J0(2 b alpha) Phi(b) db`
/// from the truncated tail of the fitted model.
pub fn systematic_error(fitted: &StateModel, alpha_grid: &Grid1D, cutoff: f64) -> Result<Vec<f64>> {
    check_alpha_grid(alpha_grid)?;
    if !(cutoff >= 0.0 && cutoff.is_finite()) {
        return Err(Error::Domain(format!("cutoff {cutoff} must be finite and >= 0")));
    }
    let b_max = tail_limit(fitted, cutoff)?;
    if b_max - cutoff < HANKEL_STEP {
        return Ok(vec![0.0; alpha_grid.count()]);
    }
    let grid = Grid1D::spanning_even(cutoff, b_max, HANKEL_STEP)?;
    let cf_values: Vec<f64> = grid.points().map(|b| b * model_cf(b, fitted)).collect();
    alpha_grid
        .points()
        .map(|alpha| {
            let values: Vec<f64> = grid
                .points()
                .zip(&cf_values)
                .map(|(b, v)| v * j0(2.0 * b * alpha))
                .collect();
            Ok(2.0 / PI * integrate_samples(&values, grid.step())?)
        })
        .collect()
}

/// `2 pi int_0^a_max p(a) a da` over the reconstructed grid.
pub fn normalization_check(est: &PEstimate, a_max: f64) -> Result<f64> {
    let grid = est.alpha_grid;
    let k = grid.nearest_index(a_max).ok_or(Error::Domain(format!(
        "a_max = {a_max} lies outside the alpha grid [{}, {}]",
        grid.start(),
        grid.end()
    )))?;
    if k == 0 {
        return Ok(0.0);
    }
    let values: Vec<f64> = grid
        .points()
        .take(k + 1)
        .zip(&est.p)
        .map(|(a, p)| 2.0 * PI * p * a)
        .collect();
    integrate_samples(&values, grid.step())
}
