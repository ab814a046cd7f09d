//! Model fitting and nonclassicality criteria on reconstructed estimates.

mod fit;
mod simplex;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use fit::{fit_cf, FitResult};
pub use simplex::{minimize, Minimum, SimplexOptions};

use crate::error::{Error, Result};
use crate::estimation::CfEstimate;
use crate::reconstruction::{normalization_check, systematic_error, PEstimate};

/// Multiple of sigma used by the characteristic-function bound in reports.
pub const CF_BOUND_K_SIGMA: f64 = 3.0;

/// Significance at or above which a report flags the state as nonclassical.
pub const SIGNIFICANCE_THRESHOLD: f64 = 3.0;

/// Most negative reconstructed value and its significance `-p / sigma_p`
/// (zero when the minimum is not negative).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Negativity {
    pub min_p: f64,
    pub argmin_alpha: f64,
    pub index: usize,
    pub significance: f64,
}

pub fn negativity_significance(est: &PEstimate) -> Result<Negativity> {
    if est.sigma_p.len() != est.p.len() {
        return Err(Error::MissingSigma);
    }
    let (index, &min_p) = est
        .p
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .ok_or(Error::EmptyDataset)?;
    let sigma = est.sigma_p[index];
    if !(sigma > 0.0) {
        return Err(Error::DegenerateSigma(format!(
            "sigma_p = {sigma} at the minimum alpha = {}",
            est.alpha_grid.point(index)
        )));
    }
    Ok(Negativity {
        min_p,
        argmin_alpha: est.alpha_grid.point(index),
        index,
        significance: if min_p < 0.0 { -min_p / sigma } else { 0.0 },
    })
}

/// True iff some point inside the cutoff has `|phi_re| - k sigma > 1`.
pub fn cf_bound_criterion(cf: &CfEstimate, k_sigma: f64) -> Result<bool> {
    if !cf.has_sigma() {
        return Err(Error::MissingSigma);
    }
    let last = match cf.cutoff {
        Some(_) => cf.cutoff_index()?,
        None => cf.grid.count() - 1,
    };
    Ok(cf.phi_re[..=last]
        .iter()
        .zip(&cf.sigma)
        .any(|(phi, s)| phi.abs() - k_sigma * s > 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonclassicalityReport {
    pub min_p: f64,
    pub argmin_alpha: f64,
    pub significance: f64,
    /// Systematic error at the minimum.
    pub delta_at_min: f64,
    /// Largest `|delta_p|` over the alpha grid.
    pub max_abs_delta: f64,
    pub cf_bound_violated: bool,
    pub normalization: f64,
    pub nonclassical: bool,
    pub cutoff: f64,
    pub n: usize,
    pub fit: FitResult,
}

/// Summarises a reconstruction. Fills in the systematic error from the fit
/// when the estimate does not carry one yet.
pub fn build_report(cf: &CfEstimate, est: &PEstimate, fit: &FitResult) -> Result<NonclassicalityReport> {
    est.check_source(cf)?;
    let neg = negativity_significance(est)?;
    let delta = match &est.delta_p {
        Some(d) => d.clone(),
        None => systematic_error(&fit.model, &est.alpha_grid, est.cutoff)?,
    };
    let max_abs_delta = delta.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    Ok(NonclassicalityReport {
        min_p: neg.min_p,
        argmin_alpha: neg.argmin_alpha,
        significance: neg.significance,
        delta_at_min: delta[neg.index],
        max_abs_delta,
        cf_bound_violated: cf_bound_criterion(cf, CF_BOUND_K_SIGMA)?,
        normalization: normalization_check(est, est.alpha_grid.end())?,
        nonclassical: neg.significance >= SIGNIFICANCE_THRESHOLD,
        cutoff: est.cutoff,
        n: est.n,
        fit: *fit,
    })
}

impl fmt::Display for NonclassicalityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.fit.model;
        writeln!(f, "samples            {}", self.n)?;
        writeln!(f, "cutoff             {:.4}", self.cutoff)?;
        writeln!(
            f,
            "fit                nbar = {:.4}, eta = {:.4}, w = {:.4} (chi2 = {:.2}, dof = {}{})",
            m.nbar(),
            m.eta(),
            m.w(),
            self.fit.residual,
            self.fit.dof,
            if self.fit.converged { "" } else { ", not converged" }
        )?;
        writeln!(f, "min P              {:.5} at |alpha| = {:.2}", self.min_p, self.argmin_alpha)?;
        writeln!(f, "significance       {:.2} sigma", self.significance)?;
        writeln!(f, "systematic at min  {:.3e} (max |delta| {:.3e})", self.delta_at_min, self.max_abs_delta)?;
        writeln!(f, "normalization      {:.4}", self.normalization)?;
        writeln!(f, "cf bound violated  {}", self.cf_bound_violated)?;
        write!(f, "nonclassical       {}", self.nonclassical)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::{choose_cutoff, default_cf_grid, CutoffPolicy};
    use crate::numerics::Grid1D;
    use crate::reconstruction::hankel_reconstruct;
    use crate::states::{model_cf, StateModel};

    fn noiseless(model: &StateModel, cutoff: f64, sigma: f64) -> CfEstimate {
        let grid = default_cf_grid();
        let mut est = CfEstimate {
            grid,
            phi_re: grid.points().map(|b| model_cf(b, model)).collect(),
            phi_im: vec![0.0; grid.count()],
            sigma: grid
                .points()
                .map(|b| if b == 0.0 { 0.0 } else { sigma * (b * b).exp().sqrt() })
                .collect(),
            cutoff: None,
            n: 100_000,
        };
        choose_cutoff(&mut est, CutoffPolicy::Fixed(cutoff)).unwrap();
        est
    }

    fn spats() -> StateModel {
        StateModel::new(1.11, 0.6, 1.0).unwrap()
    }

    #[test]
    fn significance_of_synthetic_estimate() {
        let est = PEstimate {
            alpha_grid: Grid1D::new(0.0, 0.5, 3).unwrap(),
            p: vec![-0.2, 0.1, 0.0],
            sigma_p: vec![0.05, 0.05, 0.05],
            delta_p: None,
            cutoff: 2.0,
            n: 10,
            source: String::new(),
        };
        let neg = negativity_significance(&est).unwrap();
        assert_eq!(neg.min_p, -0.2);
        assert_eq!(neg.argmin_alpha, 0.0);
        assert!((neg.significance - 4.0).abs() < 1e-12);
        let mut scaled = est.clone();
        scaled.p.iter_mut().chain(scaled.sigma_p.iter_mut()).for_each(|v| *v *= 7.0);
        assert_eq!(negativity_significance(&scaled).unwrap().significance, neg.significance);
        let mut positive = est.clone();
        positive.p = vec![0.3, 0.1, 0.2];
        assert_eq!(negativity_significance(&positive).unwrap().significance, 0.0);
        let mut bad = est.clone();
        bad.sigma_p[0] = 0.0;
        assert!(matches!(negativity_significance(&bad), Err(Error::DegenerateSigma(_))));
        bad.sigma_p.clear();
        assert!(matches!(negativity_significance(&bad), Err(Error::MissingSigma)));
    }

    #[test]
    fn cf_bound_on_noiseless_spats() {
        let cf = noiseless(&spats(), 2.8, 0.01);
        let gain_max = cf
            .grid
            .points()
            .zip(&cf.phi_re)
            .take(cf.cutoff_index().unwrap() + 1)
            .map(|(b, phi)| phi.abs() * (b * b / 2.0).exp())
            .fold(0.0f64, f64::max);
        assert!(gain_max > 1.0, "P-function CF itself exceeds one");
        assert!(!cf_bound_criterion(&cf, 0.0).unwrap());
        let mut bumped = cf.clone();
        bumped.phi_re[50] = 1.2;
        assert!(cf_bound_criterion(&bumped, 3.0).unwrap());
        assert!(!cf_bound_criterion(&bumped, 1e6).unwrap());
    }

    #[test]
    fn cf_bound_is_monotone_in_k() {
        let mut cf = noiseless(&spats(), 2.8, 0.01);
        cf.phi_re[100] = 1.05;
        let flags: Vec<bool> = [0.0, 1.0, 2.0, 3.0, 10.0]
            .iter()
            .map(|&k| cf_bound_criterion(&cf, k).unwrap())
            .collect();
        assert!(flags.windows(2).all(|w| w[0] >= w[1]), "{flags:?}");
    }

    #[test]
    fn report_roundtrip_and_provenance() {
        let model = spats();
        let cf = noiseless(&model, 2.8, 3.16e-3);
        let est = hankel_reconstruct(&cf, &crate::reconstruction::default_alpha_grid())
            .unwrap()
            .with_variance(&cf)
            .unwrap();
        let fit = fit_cf(&cf, StateModel::new(1.0, 0.5, 1.0).unwrap(), false).unwrap();
        let report = build_report(&cf, &est, &fit).unwrap();
        assert_eq!(report.argmin_alpha, 0.0);
        assert!(report.nonclassical);
        assert!(!report.cf_bound_violated);
        assert!((report.normalization - 1.0).abs() < 0.05, "{}", report.normalization);
        let json = serde_json::to_string(&report).unwrap();
        let back: NonclassicalityReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
        assert!(report.to_string().contains("significance"));

        let other = noiseless(&model, 2.5, 3.16e-3);
        assert!(matches!(
            build_report(&other, &est, &fit),
            Err(Error::ProvenanceMismatch(_))
        ));
    }
}
