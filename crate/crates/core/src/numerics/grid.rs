use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform closed grid `start + k * step` for `k in 0..count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid")]
pub struct Grid1D {
    start: f64,
    step: f64,
    count: usize,
}

#[derive(Deserialize)]
struct RawGrid {
    start: f64,
    step: f64,
    count: usize,
}

impl TryFrom<RawGrid> for Grid1D {
    type Error = Error;

    fn try_from(raw: RawGrid) -> Result<Self> {
        Grid1D::new(raw.start, raw.step, raw.count)
    }
}

impl Grid1D {
    pub fn new(start: f64, step: f64, count: usize) -> Result<Self> {
        if !start.is_finite() {
            return Err(Error::InvalidGrid(format!("start {start} is not finite")));
        }
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::InvalidGrid(format!("step {step} must be positive")));
        }
        if count < 2 {
            return Err(Error::InvalidGrid(format!("count {count} must be at least 2")));
        }
        Ok(Self { start, step, count })
    }

    /// Grid covering `[start, end]` with spacing as close to `step` as
    /// possible while landing exactly on both endpoints.
    pub fn spanning(start: f64, end: f64, step: f64) -> Result<Self> {
        if !(end > start) {
            return Err(Error::InvalidGrid(format!("empty interval [{start}, {end}]")));
        }
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::InvalidGrid(format!("step {step} must be positive")));
        }
        let panels = ((end - start) / step).round().max(1.0) as usize;
        Self::new(start, (end - start) / panels as f64, panels + 1)
    }

    /// Like [`Grid1D::spanning`] but with an even number of panels, so the
    /// whole interval is integrated with Simpson's rule.
    pub fn spanning_even(start: f64, end: f64, step: f64) -> Result<Self> {
        if !(end > start) {
            return Err(Error::InvalidGrid(format!("empty interval [{start}, {end}]")));
        }
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::InvalidGrid(format!("step {step} must be positive")));
        }
        let half = ((end - start) / (2.0 * step)).ceil().max(1.0) as usize;
        let panels = 2 * half;
        Self::new(start, (end - start) / panels as f64, panels + 1)
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn end(&self) -> f64 {
        self.point(self.count - 1)
    }

    #[inline]
    pub fn point(&self, k: usize) -> f64 {
        self.start + k as f64 * self.step
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.count).map(move |k| self.point(k))
    }

    /// Index of the grid point nearest to `x`, if `x` lies within half a step
    /// of the grid span.
    pub fn nearest_index(&self, x: f64) -> Option<usize> {
        let k = ((x - self.start) / self.step).round();
        if k < 0.0 || k > (self.count - 1) as f64 || !k.is_finite() {
            return None;
        }
        Some(k as usize)
    }

    /// Sub-grid made of the first `count` points.
    pub fn truncated(&self, count: usize) -> Result<Self> {
        if count > self.count {
            return Err(Error::InvalidGrid(format!(
                "cannot truncate {}-point grid to {count} points",
                self.count
            )));
        }
        Self::new(self.start, self.step, count)
    }

    /// Linear interpolation of tabulated `values` (one per grid point).
    /// Arguments outside the span are clamped to the end values.
    pub fn interpolate(&self, values: &[f64], x: f64) -> f64 {
        debug_assert_eq!(values.len(), self.count);
        let t = (x - self.start) / self.step;
        if t <= 0.0 {
            return values[0];
        }
        let last = self.count - 1;
        if t >= last as f64 {
            return values[last];
        }
        let k = t.floor() as usize;
        let frac = t - k as f64;
        values[k] + frac * (values[k + 1] - values[k])
    }
}
