#![allow(dead_code)]

use glauber_p::analysis::{fit_cf, FitResult};
use glauber_p::estimation::{choose_cutoff, estimate_cf, CfEstimate, CutoffPolicy};
use glauber_p::homodyne::sample_quadratures;
use glauber_p::numerics::{Grid1D, RngSeed};
use glauber_p::reconstruction::{hankel_reconstruct, PEstimate};
use glauber_p::states::StateModel;

pub fn a1_model() -> StateModel {
    StateModel::new(1.11, 0.60, 1.0).unwrap()
}

pub fn a3_model() -> StateModel {
    StateModel::new(3.71, 0.62, 0.81).unwrap()
}

pub fn cf_grid(end: f64) -> Grid1D {
    Grid1D::spanning(0.0, end, 0.01).unwrap()
}

pub struct Run {
    pub cf: CfEstimate,
    pub est: PEstimate,
    pub fit: FitResult,
}

/// Estimate, cut, fit and invert one simulated dataset.
pub fn pipeline(
    model: &StateModel,
    n: usize,
    seed: u64,
    cutoff: f64,
    initial: StateModel,
    fit_w: bool,
    alpha_grid: &Grid1D,
) -> Run {
    let data = sample_quadratures(model, n, RngSeed(seed)).unwrap();
    let mut cf = estimate_cf(&data, &cf_grid(4.0)).unwrap();
    choose_cutoff(&mut cf, CutoffPolicy::Fixed(cutoff)).unwrap();
    let fit = fit_cf(&cf, initial, fit_w).unwrap();
    let est = hankel_reconstruct(&cf, alpha_grid)
        .unwrap()
        .with_variance(&cf)
        .unwrap()
        .with_systematic(&fit.model)
        .unwrap();
    Run { cf, est, fit }
}

/// Reconstruction from the imaginary part, the other half of the complex
/// estimator whose variance the error formulas describe.
pub fn imaginary_reconstruction(cf: &CfEstimate, alpha_grid: &Grid1D) -> Vec<f64> {
    let mut im = cf.clone();
    im.phi_re = cf.phi_im.clone();
    hankel_reconstruct(&im, alpha_grid).unwrap().p
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation.
pub fn std_dev(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len() / 2;
    if v.len().is_multiple_of(2) {
        0.5 * (v[k - 1] + v[k])
    } else {
        v[k]
    }
}
