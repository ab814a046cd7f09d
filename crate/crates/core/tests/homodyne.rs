mod common;

use glauber_p::homodyne::{sample_by_rejection, sample_quadratures, sample_via_loss_channel};
use glauber_p::numerics::{integrate_samples, Grid1D, RngSeed};
use glauber_p::states::{measured_quadrature_pdf, StateModel};

/// CDF of the measured quadrature pdf from cumulative Simpson panels.
struct NumericCdf {
    grid: Grid1D,
    values: Vec<f64>,
}

impl NumericCdf {
    fn new(model: &StateModel) -> Self {
        let half = 15.0 * (1.0 + 2.0 * model.eta() * (2.0 * model.nbar() + 1.0)).sqrt();
        let grid = Grid1D::spanning_even(-half, half, 1e-3).unwrap();
        let pdf: Vec<f64> = grid.points().map(|x| measured_quadrature_pdf(x, model)).collect();
        let mut values = vec![0.0; grid.count()];
        for k in (2..grid.count()).step_by(2) {
            let panel = integrate_samples(&pdf[k - 2..=k], grid.step()).unwrap();
            values[k] = values[k - 2] + panel;
            // Midpoint by the trapezoid rule on the half panel; its error is
            // far below the KS resolution.
            values[k - 1] = values[k - 2] + 0.5 * grid.step() * (pdf[k - 2] + pdf[k - 1]);
        }
        Self { grid, values }
    }

    fn at(&self, x: f64) -> f64 {
        if x <= self.grid.start() {
            return 0.0;
        }
        if x >= self.grid.end() {
            return 1.0;
        }
        self.grid.interpolate(&self.values, x)
    }
}

fn ks_one_sample(samples: &[f64], cdf: &NumericCdf) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf.at(x);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// 1% critical value of the two-sample statistic.
fn two_sample_critical(na: usize, nb: usize) -> f64 {
    1.628 * ((na + nb) as f64 / (na * nb) as f64).sqrt()
}

const N: usize = 100_000;

#[test]
fn cdf_oracle_is_normalized() {
    for model in [common::a1_model(), common::a3_model(), StateModel::thermal(1.0, 1.0).unwrap()] {
        let cdf = NumericCdf::new(&model);
        assert!((cdf.values.last().unwrap() - 1.0).abs() < 1e-10);
        assert!((cdf.at(0.0) - 0.5).abs() < 1e-6);
    }
}

#[test]
fn direct_sampler_matches_pdf() {
    for (model, seed) in [(common::a1_model(), 42), (common::a3_model(), 7)] {
        let data = sample_quadratures(&model, N, RngSeed(seed)).unwrap();
        let d = ks_one_sample(data.samples(), &NumericCdf::new(&model));
        assert!(d < 1.63 / (N as f64).sqrt(), "D = {d}");
    }
}

#[test]
fn rejection_sampler_matches_pdf() {
    let model = common::a1_model();
    let data = sample_by_rejection(&model, N, RngSeed(11)).unwrap();
    let d = ks_one_sample(data.samples(), &NumericCdf::new(&model));
    assert!(d < 1.63 / (N as f64).sqrt(), "D = {d}");
}

#[test]
fn loss_channel_matches_pdf() {
    let model = common::a3_model();
    let data = sample_via_loss_channel(&model, N, RngSeed(12)).unwrap();
    let d = ks_one_sample(data.samples(), &NumericCdf::new(&model));
    assert!(d < 1.63 / (N as f64).sqrt(), "D = {d}");
}

#[test]
fn loss_channel_against_direct_sampler() {
    let model = common::a1_model();
    let a = sample_via_loss_channel(&model, N, RngSeed(1)).unwrap();
    let b = sample_quadratures(&model, N, RngSeed(2)).unwrap();
    let d = ks_two_sample(a.samples(), b.samples());
    assert!(d < two_sample_critical(N, N), "D = {d}");
}

#[test]
fn lossless_channel_equals_ideal_sampler() {
    let model = StateModel::new(1.11, 1.0, 1.0).unwrap();
    let a = sample_via_loss_channel(&model, N, RngSeed(3)).unwrap();
    let b = sample_quadratures(&model, N, RngSeed(4)).unwrap();
    let d = ks_two_sample(a.samples(), b.samples());
    assert!(d < two_sample_critical(N, N), "D = {d}");
}

#[test]
fn ks_detects_wrong_model() {
    let data = sample_quadratures(&common::a1_model(), N, RngSeed(5)).unwrap();
    let wrong = StateModel::new(1.3, 0.60, 1.0).unwrap();
    let d = ks_one_sample(data.samples(), &NumericCdf::new(&wrong));
    assert!(d > 1.63 / (N as f64).sqrt(), "D = {d}");
}

#[test]
fn sample_means_vanish() {
    for (k, model) in [common::a1_model(), common::a3_model()].iter().enumerate() {
        let data = sample_quadratures(model, N, RngSeed(100 + k as u64)).unwrap();
        assert!(data.mean().abs() < 4.0 * (data.variance() / N as f64).sqrt());
    }
}
