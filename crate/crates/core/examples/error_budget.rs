//! Statistical against systematic error as the cutoff moves: a larger
//! cutoff shrinks the truncation bias but inflates the noise.
//!
//! ```bash
//! cargo run --release --example error_budget
//! ```

use glauber_p::estimation::{choose_cutoff, default_cf_grid, estimate_cf, CutoffPolicy};
use glauber_p::homodyne::sample_quadratures;
use glauber_p::numerics::RngSeed;
use glauber_p::reconstruction::{hankel_reconstruct, systematic_error};
use glauber_p::numerics::Grid1D;
use glauber_p::states::StateModel;

fn main() -> glauber_p::Result<()> {
    let truth = StateModel::new(1.11, 0.60, 1.0)?;
    let data = sample_quadratures(&truth, 100_000, RngSeed(42))?;
    let mut cf = estimate_cf(&data, &default_cf_grid())?;
    let origin = Grid1D::new(0.0, 0.02, 2)?;

    println!("cutoff    P(0)     sigma    delta    exact {:+.4}", truth.measured_p(0.0)?);
    for cutoff in [1.5, 2.0, 2.4, 2.8, 3.2, 3.6] {
        choose_cutoff(&mut cf, CutoffPolicy::Fixed(cutoff))?;
        let est = hankel_reconstruct(&cf, &origin)?.with_variance(&cf)?;
        let delta = systematic_error(&truth, &origin, cutoff)?;
        println!(
            "{cutoff:5.1}  {:+.4}  {:.4}  {:+.4}",
            est.p[0], est.sigma_p[0], delta[0]
        );
    }
    Ok(())
}
