//! Full pipeline on 10^5 simulated samples of a photon-added thermal state:
//! characteristic function, cutoff, fit, Hankel inversion, error budget and
//! the nonclassicality verdict.
//!
//! ```bash
//! cargo run --release --example reconstruct_spats
//! ```

use glauber_p::analysis::{build_report, fit_cf};
use glauber_p::estimation::{choose_cutoff, default_cf_grid, estimate_cf, CutoffPolicy};
use glauber_p::homodyne::sample_quadratures;
use glauber_p::numerics::RngSeed;
use glauber_p::reconstruction::{default_alpha_grid, hankel_reconstruct};
use glauber_p::states::StateModel;

fn main() -> glauber_p::Result<()> {
    let truth = StateModel::new(1.11, 0.60, 1.0)?;
    let data = sample_quadratures(&truth, 100_000, RngSeed(42))?;

    let mut cf = estimate_cf(&data, &default_cf_grid())?;
    choose_cutoff(&mut cf, CutoffPolicy::Fixed(2.8))?;
    let fit = fit_cf(&cf, StateModel::new(1.0, 0.5, 1.0)?, false)?;
    let est = hankel_reconstruct(&cf, &default_alpha_grid())?
        .with_variance(&cf)?
        .with_systematic(&fit.model)?;
    let report = build_report(&cf, &est, &fit)?;

    println!("{report}\n");
    println!("|alpha|      P     sigma    delta    exact");
    let delta = est.delta_p.as_deref().unwrap_or_default();
    for k in (0..est.p.len()).step_by(10) {
        let a = est.alpha_grid.point(k);
        println!(
            "{a:5.2}  {:+.4}  {:.4}  {:+.4}  {:+.4}",
            est.p[k],
            est.sigma_p[k],
            delta[k],
            truth.measured_p(a)?
        );
    }
    Ok(())
}
