//! Composite Newton-Cotes quadrature on uniform closed grids.
//!
//! Grids with an even number of panels use composite Simpson throughout.
//! With an odd panel count the leading even block uses Simpson and the last
//! panel falls back to the trapezoid rule.

use super::Grid1D;
use crate::error::{Error, Result};

/// Quadrature weights for `count` equally spaced points with spacing `step`.
pub fn quadrature_weights(count: usize, step: f64) -> Vec<f64> {
    assert!(count >= 2, "need at least two points");
    let panels = count - 1;
    let simpson_panels = panels - panels % 2;
    let mut w = vec![0.0; count];
    let third = step / 3.0;
    for k in (0..simpson_panels).step_by(2) {
        w[k] += third;
        w[k + 1] += 4.0 * third;
        w[k + 2] += third;
    }
    if simpson_panels < panels {
        w[panels - 1] += 0.5 * step;
        w[panels] += 0.5 * step;
    }
    w
}

/// Integrates tabulated values sampled on a uniform grid with spacing `step`.
pub fn integrate_samples(values: &[f64], step: f64) -> Result<f64> {
    if values.len() < 2 {
        return Err(Error::InvalidGrid(format!(
            "{} samples, need at least 2",
            values.len()
        )));
    }
    let w = quadrature_weights(values.len(), step);
    let mut acc = 0.0;
    for (k, (&v, &wk)) in values.iter().zip(&w).enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFinite(format!("integrand at sample {k} is {v}")));
        }
        acc += v * wk;
    }
    Ok(acc)
}

/// Integral of `f` over the span of `grid`.
pub fn integrate_1d<F>(f: F, grid: &Grid1D) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let values: Vec<f64> = grid.points().map(f).collect();
    integrate_samples(&values, grid.step())
}

/// Tensor-product rule over the rectangle `gx` x `gy`.
pub fn integrate_2d<F>(f: F, gx: &Grid1D, gy: &Grid1D) -> Result<f64>
where
    F: Fn(f64, f64) -> f64,
{
    let wx = quadrature_weights(gx.count(), gx.step());
    let wy = quadrature_weights(gy.count(), gy.step());
    let mut total = 0.0;
    for (i, x) in gx.points().enumerate() {
        let mut row = 0.0;
        for (j, y) in gy.points().enumerate() {
            let v = f(x, y);
            if !v.is_finite() {
                return Err(Error::NonFinite(format!("integrand at ({x}, {y}) is {v}")));
            }
            row += wy[j] * v;
        }
        total += wx[i] * row;
    }
    Ok(total)
}
