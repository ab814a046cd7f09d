//! Fit the state model to estimated characteristic functions from several
//! seeds and look at the spread of the fitted parameters.
//!
//! ```bash
//! cargo run --release --example fit_model
//! ```

use glauber_p::analysis::fit_cf;
use glauber_p::estimation::{choose_cutoff, default_cf_grid, estimate_cf, CutoffPolicy};
use glauber_p::homodyne::sample_quadratures;
use glauber_p::numerics::RngSeed;
use glauber_p::states::StateModel;

fn main() -> glauber_p::Result<()> {
    let truth = StateModel::new(1.11, 0.60, 1.0)?;
    let initial = StateModel::new(1.0, 0.5, 1.0)?;
    println!("seed   nbar     eta     chi2/dof");
    for seed in 0..8 {
        let data = sample_quadratures(&truth, 100_000, RngSeed(seed))?;
        let mut cf = estimate_cf(&data, &default_cf_grid())?;
        choose_cutoff(&mut cf, CutoffPolicy::Fixed(2.8))?;
        let fit = fit_cf(&cf, initial, false)?;
        println!(
            "{seed:4}  {:.4}  {:.4}  {:.3}{}",
            fit.model.nbar(),
            fit.model.eta(),
            fit.residual / fit.dof as f64,
            if fit.converged { "" } else { "  (not converged)" }
        );
    }
    Ok(())
}
