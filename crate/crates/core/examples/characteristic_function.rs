//! Estimate the characteristic function of the P function from thermal
//! quadratures and compare it with the exact Gaussian, then pick a cutoff
//! with the threshold scan.
//!
//! ```bash
//! cargo run --release --example characteristic_function
//! ```

use glauber_p::estimation::{choose_cutoff, default_cf_grid, estimate_cf, CutoffPolicy};
use glauber_p::homodyne::sample_quadratures;
use glauber_p::numerics::RngSeed;
use glauber_p::states::{model_cf, StateModel};

fn main() -> glauber_p::Result<()> {
    let model = StateModel::thermal(1.0, 1.0)?;
    let data = sample_quadratures(&model, 200_000, RngSeed(1))?;
    let mut cf = estimate_cf(&data, &default_cf_grid())?;

    println!("   b   estimate    exact      sigma    pull");
    for b in [0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0, 2.5] {
        let k = cf.grid.nearest_index(b).expect("on grid");
        let exact = model_cf(b, &model);
        let pull = (cf.phi_re[k] - exact) / cf.sigma[k];
        println!("{b:5.2}  {:+.5}  {exact:+.5}  {:.5}  {pull:+.2}", cf.phi_re[k], cf.sigma[k]);
    }

    let cutoff = choose_cutoff(&mut cf, CutoffPolicy::threshold(1.0))?;
    println!("threshold cutoff at 1 sigma: {cutoff:.2}");
    Ok(())
}
