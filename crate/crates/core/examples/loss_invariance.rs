//! Reconstructions at low efficiency map onto the lossless one by the
//! scaling `P(alpha) = eta P_eta(sqrt(eta) alpha)`.
//!
//! ```bash
//! cargo run --release --example loss_invariance
//! ```

use glauber_p::numerics::Grid1D;
use glauber_p::reconstruction::{hankel_transform, hankel_transform_grid, HANKEL_STEP};
use glauber_p::states::{model_cf, rescale_p_for_loss, StateModel};

fn main() -> glauber_p::Result<()> {
    let cutoff = 6.0;
    let alpha = Grid1D::spanning(0.0, 3.0, 0.02)?;
    let ideal = StateModel::new(1.11, 1.0, 1.0)?;
    let reference = hankel_transform_grid(|b| model_cf(b, &ideal), cutoff, HANKEL_STEP, &alpha)?;

    for eta in [0.9, 0.6, 0.3, 0.1] {
        let lossy = ideal.with_eta(eta)?;
        let p_eta = |a: f64| {
            hankel_transform(|b| model_cf(b, &lossy), cutoff, HANKEL_STEP, a).unwrap_or(f64::NAN)
        };
        let rescaled = rescale_p_for_loss(p_eta, eta)?;
        let worst = alpha
            .points()
            .zip(&reference)
            .map(|(a, p)| (rescaled(a) - p).abs())
            .fold(0.0f64, f64::max);
        println!("eta {eta:.1}: P_eta(0) = {:+.4}, max deviation after rescaling {worst:.2e}", p_eta(0.0));
    }
    Ok(())
}
