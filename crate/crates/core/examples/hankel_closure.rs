//! Noiseless closure: the Hankel transform of each analytic characteristic
//! function reproduces the analytic P function.
//!
//! ```bash
//! cargo run --release --example hankel_closure
//! ```

use glauber_p::numerics::Grid1D;
use glauber_p::reconstruction::{hankel_transform_grid, HANKEL_STEP};
use glauber_p::states::{model_cf, StateModel};

fn main() -> glauber_p::Result<()> {
    let alpha = Grid1D::spanning(0.0, 3.0, 0.02)?;
    let cases = [
        ("spats", StateModel::new(1.11, 0.60, 1.0)?),
        ("thermal", StateModel::thermal(1.11, 0.60)?),
        ("mixture", StateModel::new(3.71, 0.62, 0.81)?),
        ("lossless spats", StateModel::spats(0.5)?),
    ];
    for (name, model) in cases {
        print!("{name:>15}:");
        for cutoff in [4.0, 6.0, 8.0] {
            let p = hankel_transform_grid(|b| model_cf(b, &model), cutoff, HANKEL_STEP, &alpha)?;
            let mut worst = 0.0f64;
            for (a, p) in alpha.points().zip(&p) {
                worst = worst.max((p - model.measured_p(a)?).abs());
            }
            print!("  cutoff {cutoff}: {worst:.2e}");
        }
        println!();
    }
    Ok(())
}
