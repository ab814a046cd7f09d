//! Edge case: 19% thermal admixture at higher mean photon number. The
//! negativity survives only at low cutoff and about one standard deviation.
//!
//! ```bash
//! cargo run --release --example thermal_mixture_edge
//! ```

use glauber_p::analysis::{fit_cf, negativity_significance};
use glauber_p::estimation::{choose_cutoff, default_cf_grid, estimate_cf, CutoffPolicy};
use glauber_p::homodyne::sample_quadratures;
use glauber_p::numerics::RngSeed;
use glauber_p::reconstruction::{default_alpha_grid, hankel_reconstruct};
use glauber_p::states::StateModel;

fn main() -> glauber_p::Result<()> {
    let truth = StateModel::new(3.71, 0.62, 0.81)?;
    let data = sample_quadratures(&truth, 500_000, RngSeed(7))?;
    let mut cf = estimate_cf(&data, &default_cf_grid())?;

    for cutoff in [1.6, 1.9, 2.2] {
        choose_cutoff(&mut cf, CutoffPolicy::Fixed(cutoff))?;
        let est = hankel_reconstruct(&cf, &default_alpha_grid())?.with_variance(&cf)?;
        let neg = negativity_significance(&est)?;
        println!(
            "cutoff {cutoff:.1}: min P {:+.4} at {:.2}, sigma {:.4}, significance {:.2}",
            neg.min_p,
            neg.argmin_alpha,
            est.sigma_p[neg.index],
            neg.significance
        );
    }

    // eta is calibrated separately; the fit recovers the admixture weight.
    choose_cutoff(&mut cf, CutoffPolicy::Fixed(1.9))?;
    let fit = fit_cf(&cf, StateModel::new(3.0, 0.62, 1.0)?, true)?;
    println!(
        "fitted nbar {:.3}, w {:.3} (true 3.71, 0.81)",
        fit.model.nbar(),
        fit.model.w()
    );
    Ok(())
}
