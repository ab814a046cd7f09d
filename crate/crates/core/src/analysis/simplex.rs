//! Derivative-free Nelder-Mead minimisation.

/// Outcome of one simplex run.
#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    /// Initial edge length relative to each coordinate of the start point.
    pub relative_scale: f64,
    /// Edge length used for coordinates that start at zero.
    pub zero_scale: f64,
    /// Stop once `f_max - f_min <= rel_tol * |f_min| + abs_tol` at the end
    /// of a full cycle of `dim + 1` iterations.
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Also stop when the best value changed by less than `rel_tol` over
    /// this many consecutive cycles and the simplex has collapsed to
    /// `x_tol` relative to its best vertex (round-off floor).
    pub stall_cycles: usize,
    pub x_tol: f64,
    pub max_iterations: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            relative_scale: 0.1,
            zero_scale: 0.01,
            rel_tol: 1e-10,
            abs_tol: 1e-30,
            stall_cycles: 10,
            x_tol: 1e-10,
            max_iterations: 20_000,
        }
    }
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

pub fn minimize<F>(f: F, start: &[f64], opts: &SimplexOptions) -> Minimum
where
    F: Fn(&[f64]) -> f64,
{
    let dim = start.len();
    assert!(dim >= 1, "need at least one parameter");

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    simplex.push((start.to_vec(), f(start)));
    for i in 0..dim {
        let mut x = start.to_vec();
        let h = if x[i] != 0.0 {
            opts.relative_scale * x[i]
        } else {
            opts.zero_scale
        };
        x[i] += h;
        let v = f(&x);
        simplex.push((x, v));
    }

    let mut iterations = 0;
    let mut converged = false;
    let mut last_best = f64::INFINITY;
    let mut stalled = 0;
    while iterations < opts.max_iterations {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if iterations % (dim + 1) == 0 {
            let best = simplex[0].1;
            let worst = simplex[dim].1;
            if worst - best <= opts.rel_tol * best.abs() + opts.abs_tol {
                converged = true;
                break;
            }
            if last_best - best <= opts.rel_tol * best.abs() {
                stalled += 1;
            } else {
                stalled = 0;
            }
            last_best = best;
            if stalled >= opts.stall_cycles && diameter(&simplex) <= opts.x_tol * (1.0 + norm(&simplex[0].0)) {
                converged = true;
                break;
            }
        }
        iterations += 1;

        let mut centroid = vec![0.0; dim];
        for (x, _) in &simplex[..dim] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / dim as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[dim].0)
                .map(|(c, w)| c + t * (w - c))
                .collect()
        };

        let reflected = along(-REFLECT);
        let fr = f(&reflected);
        if fr < simplex[0].1 {
            let expanded = along(-EXPAND);
            let fe = f(&expanded);
            simplex[dim] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
            continue;
        }
        if fr < simplex[dim - 1].1 {
            simplex[dim] = (reflected, fr);
            continue;
        }
        let (contracted, fc) = if fr < simplex[dim].1 {
            let x = along(-CONTRACT);
            let v = f(&x);
            (x, v)
        } else {
            let x = along(CONTRACT);
            let v = f(&x);
            (x, v)
        };
        if fc < simplex[dim].1.min(fr) {
            simplex[dim] = (contracted, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for (x, v) in simplex.iter_mut().skip(1) {
            for (xi, bi) in x.iter_mut().zip(&best) {
                *xi = bi + SHRINK * (*xi - bi);
            }
            *v = f(x);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    Minimum {
        x,
        value,
        iterations,
        converged,
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn diameter(simplex: &[(Vec<f64>, f64)]) -> f64 {
    let best = &simplex[0].0;
    simplex[1..]
        .iter()
        .map(|(x, _)| norm(&x.iter().zip(best).map(|(a, b)| a - b).collect::<Vec<_>>()))
        .fold(0.0, f64::max)
}
