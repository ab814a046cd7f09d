//! Zeroth-order Bessel function of the first kind.
//!
//! Three regimes, each accurate to well below 1e-12 absolute:
//! power series for |x| < 8, Miller backward recurrence normalised by
//! `1 = J0 + 2 * sum J_2k` up to |x| = 60, and the Hankel asymptotic
//! expansion beyond that.

use std::f64::consts::{FRAC_PI_4, PI};

use crate::error::{Error, Result};

const SERIES_LIMIT: f64 = 8.0;
const RECURRENCE_LIMIT: f64 = 60.0;

/// `J0(x)`. Errors only on non-finite input.
pub fn bessel_j0(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("bessel_j0 argument {x} is not finite")));
    }
    Ok(j0(x.abs()))
}

#[inline]
pub(crate) fn j0(x: f64) -> f64 {
    if x < SERIES_LIMIT {
        series(x)
    } else if x <= RECURRENCE_LIMIT {
        backward_recurrence(x)
    } else {
        asymptotic(x)
    }
}

fn series(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..60 {
        let kf = k as f64;
        term *= q / (kf * kf);
        sum += term;
        if term.abs() < 1e-18 {
            break;
        }
    }
    sum
}

fn backward_recurrence(x: f64) -> f64 {
    let start = {
        let n = (x + 40.0 + 2.0 * x.sqrt()) as usize;
        n + n % 2
    };
    let two_over_x = 2.0 / x;
    let mut above = 0.0; // J_{k+1}
    let mut current = 1e-30; // J_k, unnormalised
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        let below = k as f64 * two_over_x * current - above;
        above = current;
        current = below;
        // `current` now holds J_{k-1}
        if (k - 1) % 2 == 0 && k - 1 > 0 {
            norm += 2.0 * current;
        }
        if current.abs() > 1e250 {
            above *= 1e-250;
            current *= 1e-250;
            norm *= 1e-250;
        }
    }
    current / (norm + current)
}

fn asymptotic(x: f64) -> f64 {
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term: f64 = 1.0;
    for k in 1..40 {
        let odd = (2 * k - 1) as f64;
        let next = term * -(odd * odd) / (8.0 * k as f64 * x);
        if next.abs() > term.abs() {
            break;
        }
        term = next;
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * term;
        } else {
            q += sign * term;
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    let phase = x - FRAC_PI_4;
    (2.0 / (PI * x)).sqrt() * (p * phase.cos() - q * phase.sin())
}
