//! Weighted least-squares fit of the state model to an estimated
//! characteristic function.
//!
//! The model characteristic function is `[1 - w v b^2] exp(-u b^2)` with
//! `u = eta nbar` and `v = eta (1 + nbar)`. Only `u` and the product `w v`
//! are identifiable from it, so a fit either frees `(u, v)` at fixed `w`, or
//! frees `(u, w)` at fixed `eta` (the efficiency is calibrated separately).

use serde::{Deserialize, Serialize};

use super::simplex::{minimize, Minimum, SimplexOptions};
use crate::error::{Error, Result};
use crate::estimation::CfEstimate;
use crate::states::{model_cf, StateModel};

const MIN_POINTS: usize = 10;
const MIN_ETA: f64 = 1e-6;
const PERTURBATIONS: [[f64; 2]; 3] = [[1.1, 0.9], [0.9, 1.1], [1.2, 1.2]];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: StateModel,
    /// Weighted sum of squared residuals.
    pub residual: f64,
    pub dof: i64,
    pub converged: bool,
}

struct Residuals<'a> {
    b: Vec<f64>,
    phi: Vec<f64>,
    inv_sigma: Vec<f64>,
    _cf: &'a CfEstimate,
}

impl<'a> Residuals<'a> {
    fn new(cf: &'a CfEstimate) -> Result<Self> {
        if !cf.has_sigma() {
            return Err(Error::MissingSigma);
        }
        let last = match cf.cutoff {
            Some(_) => cf.cutoff_index()?,
            None => cf.grid.count() - 1,
        };
        let (mut b, mut phi, mut inv_sigma) = (Vec::new(), Vec::new(), Vec::new());
        for k in 1..=last {
            let s = cf.sigma[k];
            if s > 0.0 {
                b.push(cf.grid.point(k));
                phi.push(cf.phi_re[k]);
                inv_sigma.push(1.0 / s);
            }
        }
        if b.len() < MIN_POINTS {
            return Err(Error::DegenerateSigma(format!(
                "{} grid points inside the cutoff have sigma > 0, need at least {MIN_POINTS}",
                b.len()
            )));
        }
        Ok(Self {
            b,
            phi,
            inv_sigma,
            _cf: cf,
        })
    }

    fn chi2(&self, model: &StateModel) -> f64 {
        self.b
            .iter()
            .zip(&self.phi)
            .zip(&self.inv_sigma)
            .map(|((&b, &phi), &w)| ((phi - model_cf(b, model)) * w).powi(2))
            .sum()
    }
}

/// Maps unconstrained simplex coordinates to a valid model by clamping.
#[derive(Clone, Copy)]
enum Parameterization {
    /// `(u, v)` free, `w` fixed.
    ShapeAtFixedWeight { w: f64 },
    /// `(u, w)` free, `eta` fixed.
    WeightAtFixedEfficiency { eta: f64 },
}

impl Parameterization {
    fn start(&self, initial: &StateModel) -> [f64; 2] {
        let u = initial.eta() * initial.nbar();
        match self {
            Self::ShapeAtFixedWeight { .. } => [u, initial.eta() * (1.0 + initial.nbar())],
            Self::WeightAtFixedEfficiency { .. } => [u, initial.w()],
        }
    }

    fn model(&self, x: &[f64]) -> StateModel {
        let u = x[0].max(0.0);
        match *self {
            Self::ShapeAtFixedWeight { w } => {
                let eta = (x[1] - u).clamp(MIN_ETA, 1.0);
                StateModel::new(u / eta, eta, w).expect("clamped into the model domain")
            }
            Self::WeightAtFixedEfficiency { eta } => {
                let w = x[1].clamp(0.0, 1.0);
                StateModel::new(u / eta, eta, w).expect("clamped into the model domain")
            }
        }
    }
}

/// Fits `(nbar, eta)` at the initial `w`, or `(nbar, w)` at the initial
/// `eta` when `fit_w` is set. Grid points with `0 < b <= cutoff` and
/// positive sigma enter with weight `1 / sigma^2`.
pub fn fit_cf(cf: &CfEstimate, initial: StateModel, fit_w: bool) -> Result<FitResult> {
    let residuals = Residuals::new(cf)?;
    let param = if fit_w {
        Parameterization::WeightAtFixedEfficiency { eta: initial.eta() }
    } else {
        Parameterization::ShapeAtFixedWeight { w: initial.w() }
    };
    let objective = |x: &[f64]| residuals.chi2(&param.model(x));
    let opts = SimplexOptions::default();

    let start = param.start(&initial);
    let mut best: Minimum = minimize(objective, &start, &opts);
    for factors in PERTURBATIONS {
        let perturbed: Vec<f64> = start.iter().zip(factors).map(|(s, f)| s * f).collect();
        let run = minimize(objective, &perturbed, &opts);
        if run.value < best.value {
            best = run;
        }
    }
    // Polish from the best point with a fresh simplex.
    let polish = minimize(objective, &best.x, &opts);
    let converged = polish.converged;
    if polish.value <= best.value {
        best = polish;
    }

    Ok(FitResult {
        model: param.model(&best.x),
        residual: best.value,
        dof: residuals.b.len() as i64 - 2,
        converged,
    })
}
