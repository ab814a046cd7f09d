//! Closed-form models of the prepared states.
//!
//! All quantities are radial: the states are phase-randomised, so only
//! `|alpha|` and `|beta|` appear. Quadratures are normalised so that the
//! vacuum has unit variance, which is the convention fixed by the
//! `exp(|beta|^2 / 2)` factor linking the quadrature characteristic function
//! to the P-function characteristic function.
//!
//! Detection losses act on characteristic functions as the argument scaling
//! `b -> sqrt(eta) * b`, and on P functions through
//! [`rescale_p_for_loss`].

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::numerics::{integrate_1d, Grid1D};

/// Mean thermal photon number, overall efficiency, and the weight of the
/// photon-added component in a mixture with its thermal background.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModel")]
pub struct StateModel {
    nbar: f64,
    eta: f64,
    w: f64,
}

#[derive(Deserialize)]
struct RawModel {
    nbar: f64,
    eta: f64,
    w: f64,
}

impl TryFrom<RawModel> for StateModel {
    type Error = Error;

    fn try_from(raw: RawModel) -> Result<Self> {
        StateModel::new(raw.nbar, raw.eta, raw.w)
    }
}

impl StateModel {
    pub fn new(nbar: f64, eta: f64, w: f64) -> Result<Self> {
        if !(nbar.is_finite() && nbar >= 0.0) {
            return Err(domain(format!("nbar = {nbar} must be a finite value >= 0")));
        }
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(domain(format!("eta = {eta} must lie in (0, 1]")));
        }
        if !(0.0..=1.0).contains(&w) {
            return Err(domain(format!("w = {w} must lie in [0, 1]")));
        }
        Ok(Self { nbar, eta, w })
    }

    /// Lossless single-photon-added thermal state.
    pub fn spats(nbar: f64) -> Result<Self> {
        Self::new(nbar, 1.0, 1.0)
    }

    pub fn thermal(nbar: f64, eta: f64) -> Result<Self> {
        Self::new(nbar, eta, 0.0)
    }

    pub fn nbar(&self) -> f64 {
        self.nbar
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn with_eta(self, eta: f64) -> Result<Self> {
        Self::new(self.nbar, eta, self.w)
    }

    /// Characteristic function of the P function seen through the detector.
    pub fn cf(&self, b: f64) -> f64 {
        model_cf(b, self)
    }

    /// P function reconstructed from data taken at efficiency `eta`,
    /// i.e. `(1/eta) * P(alpha / sqrt(eta))` of the lossless mixture.
    pub fn measured_p(&self, alpha: f64) -> Result<f64> {
        let scaled = PhaseSpacePoint::new(alpha / self.eta.sqrt())?;
        Ok(self.lossless_p(scaled)? / self.eta)
    }

    /// P function of the lossless mixture `w * SPATS + (1 - w) * thermal`.
    pub fn lossless_p(&self, point: PhaseSpacePoint) -> Result<f64> {
        let mut p = 0.0;
        if self.w > 0.0 {
            p += self.w * spats_p(point, self.nbar)?;
        }
        if self.w < 1.0 {
            p += (1.0 - self.w) * thermal_p(point, self.nbar)?;
        }
        Ok(p)
    }
}

/// Radial coherent amplitude `|alpha|`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PhaseSpacePoint(f64);

impl PhaseSpacePoint {
    pub fn new(alpha_mag: f64) -> Result<Self> {
        if !(alpha_mag.is_finite() && alpha_mag >= 0.0) {
            return Err(domain(format!("|alpha| = {alpha_mag} must be finite and >= 0")));
        }
        Ok(Self(alpha_mag))
    }

    pub fn alpha_mag(&self) -> f64 {
        self.0
    }
}

fn require_positive_nbar(nbar: f64) -> Result<()> {
    if !(nbar > 0.0 && nbar.is_finite()) {
        return Err(domain(format!("nbar = {nbar} must be positive")));
    }
    Ok(())
}

/// Gaussian P function of a thermal state.
pub fn thermal_p(point: PhaseSpacePoint, nbar: f64) -> Result<f64> {
    require_positive_nbar(nbar)?;
    let a2 = point.0 * point.0;
    Ok((-a2 / nbar).exp() / (PI * nbar))
}

/// P function of the single-photon-added thermal state. Negative for
/// `|alpha|^2 < nbar / (1 + nbar)`.
pub fn spats_p(point: PhaseSpacePoint, nbar: f64) -> Result<f64> {
    require_positive_nbar(nbar)?;
    let a2 = point.0 * point.0;
    Ok(((1.0 + nbar) * a2 - nbar) * (-a2 / nbar).exp() / (PI * nbar.powi(3)))
}

/// Characteristic function of the lossless SPATS P function.
pub fn spats_cf(b: f64, nbar: f64) -> f64 {
    debug_assert!(b >= 0.0 && nbar >= 0.0);
    let b2 = b * b;
    (1.0 - (1.0 + nbar) * b2) * (-nbar * b2).exp()
}

/// Characteristic function of the detected mixture.
pub fn model_cf(b: f64, model: &StateModel) -> f64 {
    let b2 = model.eta * b * b;
    let gauss = (-model.nbar * b2).exp();
    model.w * (1.0 - (1.0 + model.nbar) * b2) * gauss + (1.0 - model.w) * gauss
}

/// Maps a P function obtained at efficiency `eta` to the one of perfect
/// detection: `alpha -> eta * p_eta(sqrt(eta) * alpha)`.
pub fn rescale_p_for_loss<F>(p_eta: F, eta: f64) -> Result<impl Fn(f64) -> f64>
where
    F: Fn(f64) -> f64,
{
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(domain(format!("eta = {eta} must lie in (0, 1]")));
    }
    let root = eta.sqrt();
    Ok(move |alpha: f64| eta * p_eta(root * alpha))
}

/// Photon-number distribution of the lossless SPATS,
/// `p_n = n * nbar^(n-1) / (1 + nbar)^(n+1)`.
pub fn spats_photon_dist(n: u32, nbar: f64) -> Result<f64> {
    require_positive_nbar(nbar)?;
    if n == 0 {
        return Ok(0.0);
    }
    let ratio = nbar / (1.0 + nbar);
    Ok(n as f64 * ratio.powi(n as i32 - 1) / (1.0 + nbar).powi(2))
}

/// Density of a single homodyne quadrature sample for `model`.
///
/// The quadrature characteristic function is
/// `[1 - c b^2] exp(-s^2 b^2 / 2)` with `s^2 = 2 eta nbar + 1` and
/// `c = w eta (1 + nbar)`, whose inverse Fourier transform is
/// `g(x) [(1 - c/s^2) + c x^2 / s^4]` for the centred Gaussian `g` of
/// variance `s^2`. Both brackets terms are non-negative since
/// `c <= s^2` always holds.
pub fn measured_quadrature_pdf(x: f64, model: &StateModel) -> f64 {
    let (s2, c) = quadrature_shape(model);
    let gauss = (-0.5 * x * x / s2).exp() / (2.0 * PI * s2).sqrt();
    gauss * ((1.0 - c / s2) + c * x * x / (s2 * s2))
}

/// `(s^2, c)` of [`measured_quadrature_pdf`].
pub(crate) fn quadrature_shape(model: &StateModel) -> (f64, f64) {
    let s2 = 2.0 * model.eta * model.nbar + 1.0;
    let c = model.w * model.eta * (1.0 + model.nbar);
    (s2, c)
}

/// Result of a truncated radial moment integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moment {
    pub value: f64,
    /// Set when `|p(a_max)| * a_max^(2k+1)` exceeds the tail tolerance, i.e.
    /// the truncation radius is too small for the result to be trusted.
    pub tail_warning: bool,
}

const MOMENT_TAIL_TOLERANCE: f64 = 1e-10;
const MOMENT_PANELS: usize = 4000;

/// Default truncation radius for moment integrals, `5 sqrt(nbar + 1)`.
pub fn default_moment_radius(nbar: f64) -> f64 {
    5.0 * (nbar + 1.0).sqrt()
}

/// Normally ordered moment `<a^dag^k a^k> = 2 pi int_0^a_max p(a) a^(2k+1) da`.
pub fn normally_ordered_moment<F>(p: F, k: u32, a_max: f64) -> Result<Moment>
where
    F: Fn(f64) -> f64,
{
    if !(a_max > 0.0 && a_max.is_finite()) {
        return Err(domain(format!("truncation radius {a_max} must be positive")));
    }
    let grid = Grid1D::new(0.0, a_max / MOMENT_PANELS as f64, MOMENT_PANELS + 1)?;
    let power = 2 * k as i32 + 1;
    let value = 2.0 * PI * integrate_1d(|a| p(a) * a.powi(power), &grid)?;
    let tail = (p(a_max) * a_max.powi(power)).abs();
    Ok(Moment {
        value,
        tail_warning: !(tail <= MOMENT_TAIL_TOLERANCE),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pt(a: f64) -> PhaseSpacePoint {
        PhaseSpacePoint::new(a).unwrap()
    }

    #[test]
    fn model_invariants() {
        assert!(StateModel::new(-0.1, 0.5, 1.0).is_err());
        assert!(StateModel::new(1.0, 0.0, 1.0).is_err());
        assert!(StateModel::new(1.0, 1.1, 1.0).is_err());
        assert!(StateModel::new(1.0, 0.5, 1.5).is_err());
        assert!(StateModel::new(f64::NAN, 0.5, 1.0).is_err());
        assert!(StateModel::new(0.0, 1.0, 1.0).is_ok());
        assert!(PhaseSpacePoint::new(-1.0).is_err());
        assert!(serde_json::from_str::<StateModel>(r#"{"nbar":1,"eta":2,"w":1}"#).is_err());
    }

    #[test]
    fn thermal_values() {
        assert!((thermal_p(pt(0.0), 1.0).unwrap() - 1.0 / PI).abs() < 1e-15);
        assert!((thermal_p(pt(1.0), 1.0).unwrap() - (-1.0f64).exp() / PI).abs() < 1e-15);
        assert!(thermal_p(pt(1.0), 0.0).is_err());
        let norm = normally_ordered_moment(|a| thermal_p(pt(a), 1.0).unwrap(), 0, 5.0).unwrap();
        assert!((norm.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn spats_values() {
        assert!((spats_p(pt(0.0), 1.0).unwrap() + 1.0 / PI).abs() < 1e-15);
        let expected = -1.0 / (PI * 1.11 * 1.11);
        assert!((spats_p(pt(0.0), 1.11).unwrap() - expected).abs() < 1e-15);
        assert!((expected + 0.25836).abs() < 5e-5);
        let root = (1.11f64 / 2.11).sqrt();
        assert!(spats_p(pt(root), 1.11).unwrap().abs() < 1e-15);
        assert!(spats_p(pt(0.3), -1.0).is_err());
    }

    #[test]
    fn spats_cf_values() {
        assert_eq!(spats_cf(0.0, 1.3), 1.0);
        assert!(spats_cf(1.0 / 2.11f64.sqrt(), 1.11).abs() < 1e-15);
        assert!((spats_cf(1.0, 1.0) + (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn model_cf_cases() {
        let m = StateModel::new(3.71, 0.62, 0.81).unwrap();
        assert_eq!(model_cf(0.0, &m), 1.0);
        // term by term
        let spats_part = (1.0 - 4.71 * 0.62) * (-3.71f64 * 0.62).exp();
        let thermal_part = (-3.71f64 * 0.62).exp();
        let expected = 0.81 * spats_part + 0.19 * thermal_part;
        assert!((model_cf(1.0, &m) - expected).abs() < 1e-15);

        let lossless = StateModel::spats(1.11).unwrap();
        for k in 0..100 {
            let b = k as f64 * 0.04;
            assert_eq!(model_cf(b, &lossless), spats_cf(b, 1.11));
        }
    }

    #[test]
    fn loss_rescaling() {
        let same = rescale_p_for_loss(|a| thermal_p(pt(a), 1.3).unwrap(), 1.0).unwrap();
        for &a in &[0.0, 0.4, 1.7] {
            assert_eq!(same(a), thermal_p(pt(a), 1.3).unwrap());
        }

        // Thermal state measured at eta = 0.5 has mean 0.5 * nbar.
        let nbar = 1.0;
        let measured = StateModel::thermal(nbar, 0.5).unwrap();
        let rescaled = rescale_p_for_loss(|a| measured.measured_p(a).unwrap(), 0.5).unwrap();
        let norm = normally_ordered_moment(&rescaled, 0, 8.0).unwrap();
        assert!((norm.value - 1.0).abs() < 1e-9);
        for &a in &[0.0, 0.5, 1.5] {
            assert!((rescaled(a) - thermal_p(pt(a), nbar).unwrap()).abs() < 1e-15);
        }

        // Zero crossing of the SPATS P moves outward by 1/sqrt(eta).
        let eta = 0.6;
        let zero = (1.11f64 / 2.11).sqrt();
        let stretched = rescale_p_for_loss(|a| spats_p(pt(a), 1.11).unwrap(), eta).unwrap();
        assert!(stretched(zero / eta.sqrt()).abs() < 1e-15);

        assert!(rescale_p_for_loss(|a| a, 0.0).is_err());
        assert!(rescale_p_for_loss(|a| a, 1.2).is_err());
    }

    #[test]
    fn photon_distribution() {
        assert_eq!(spats_photon_dist(0, 1.11).unwrap(), 0.0);
        assert!(spats_photon_dist(3, 0.0).is_err());
        let probs: Vec<f64> = (0..=200).map(|n| spats_photon_dist(n, 1.11).unwrap()).collect();
        assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let mean: f64 = probs.iter().enumerate().map(|(n, p)| n as f64 * p).sum();
        assert!((mean - 3.22).abs() < 1e-9);

        // Oracle: <a^dag a> from the P function.
        let moment = normally_ordered_moment(
            |a| spats_p(pt(a), 1.11).unwrap(),
            1,
            default_moment_radius(1.11),
        )
        .unwrap();
        assert!((mean - moment.value).abs() < 1e-9);
    }

    #[test]
    fn moments_of_analytic_p_functions() {
        let m = normally_ordered_moment(|a| spats_p(pt(a), 1.0).unwrap(), 1, 10.0).unwrap();
        assert!((m.value - 3.0).abs() < 1e-8);
        assert!(!m.tail_warning);
        let m = normally_ordered_moment(|a| thermal_p(pt(a), 2.0).unwrap(), 1, 12.0).unwrap();
        assert!((m.value - 2.0).abs() < 1e-8);
        for &nbar in &[0.5, 1.11, 3.71] {
            let m = normally_ordered_moment(
                |a| spats_p(pt(a), nbar).unwrap(),
                0,
                default_moment_radius(nbar),
            )
            .unwrap();
            assert!((m.value - 1.0).abs() < 1e-9, "normalisation for nbar={nbar}");
        }
    }

    #[test]
    fn moment_flags_short_truncation() {
        let m = normally_ordered_moment(|a| thermal_p(pt(a), 2.0).unwrap(), 1, 2.0).unwrap();
        assert!(m.tail_warning);
    }

    /// Inverse Fourier transform of the quadrature characteristic function by
    /// the trapezoid rule on `[0, 40]`; spectrally accurate for this smooth,
    /// even, Gaussian-decaying integrand.
    fn numerical_pdf(x: f64, model: &StateModel) -> f64 {
        let h = 0.005;
        let m = (40.0 / h) as usize;
        let f = |b: f64| model_cf(b, model) * (-0.5 * b * b).exp() * (b * x).cos();
        let mut s = 0.5 * (f(0.0) + f(m as f64 * h));
        for k in 1..m {
            s += f(k as f64 * h);
        }
        s * h / PI
    }

    #[test]
    fn quadrature_pdf_matches_inverse_fourier() {
        for model in [
            StateModel::new(1.11, 0.60, 1.0).unwrap(),
            StateModel::new(3.71, 0.62, 0.81).unwrap(),
            StateModel::new(0.0, 1.0, 1.0).unwrap(),
        ] {
            let mut worst: f64 = 0.0;
            let mut x = -6.0;
            while x <= 6.0 {
                worst = worst.max((measured_quadrature_pdf(x, &model) - numerical_pdf(x, &model)).abs());
                x += 0.01;
            }
            assert!(worst < 1e-8, "{model:?}: {worst}");
        }
    }

    #[test]
    fn thermal_quadrature_is_gaussian() {
        let model = StateModel::thermal(1.3, 0.7).unwrap();
        let var: f64 = 2.0 * 0.7 * 1.3 + 1.0;
        for &x in &[0.0f64, 0.8, -2.5] {
            let g = (-0.5 * x * x / var).exp() / (2.0 * PI * var).sqrt();
            assert!((measured_quadrature_pdf(x, &model) - g).abs() < 1e-15);
        }
        let vacuum = StateModel::thermal(0.0, 1.0).unwrap();
        let g = 1.0 / (2.0 * PI).sqrt();
        assert!((measured_quadrature_pdf(0.0, &vacuum) - g).abs() < 1e-15);
    }

    #[test]
    fn quadrature_pdf_normalised() {
        let model = StateModel::new(1.11, 0.6, 1.0).unwrap();
        let g = Grid1D::spanning(-15.0, 15.0, 0.01).unwrap();
        let total = integrate_1d(|x| measured_quadrature_pdf(x, &model), &g).unwrap();
        assert!((total - 1.0).abs() < 1e-10);
    }

    proptest! {
        #[test]
        fn cfs_are_normalised(nbar in 0.0f64..6.0, eta in 0.01f64..=1.0, w in 0.0f64..=1.0) {
            let m = StateModel::new(nbar, eta, w).unwrap();
            prop_assert_eq!(model_cf(0.0, &m), 1.0);
            prop_assert_eq!(spats_cf(0.0, nbar), 1.0);
        }

        #[test]
        fn lossy_pure_cf_is_scaled_spats(nbar in 0.0f64..6.0, eta in 0.01f64..=1.0, b in 0.0f64..6.0) {
            let m = StateModel::new(nbar, eta, 1.0).unwrap();
            let lhs = model_cf(b, &m);
            let rhs = spats_cf(eta.sqrt() * b, nbar);
            prop_assert!((lhs - rhs).abs() <= 1e-14 * (1.0 + rhs.abs()));
        }

        #[test]
        fn spats_sign_structure(nbar in 0.05f64..6.0, a in 0.0f64..6.0) {
            let p = spats_p(pt(a), nbar).unwrap();
            let boundary = nbar / (1.0 + nbar);
            if a * a < boundary * (1.0 - 1e-9) {
                prop_assert!(p < 0.0);
            } else if a * a > boundary * (1.0 + 1e-9) {
                prop_assert!(p >= 0.0);
            }
        }

        #[test]
        fn quadrature_pdf_even_and_nonnegative(
            nbar in 0.0f64..6.0, eta in 0.01f64..=1.0, w in 0.0f64..=1.0, x in -10.0f64..10.0
        ) {
            let m = StateModel::new(nbar, eta, w).unwrap();
            let p = measured_quadrature_pdf(x, &m);
            prop_assert!(p >= 0.0);
            prop_assert_eq!(p, measured_quadrature_pdf(-x, &m));
        }
    }
}
