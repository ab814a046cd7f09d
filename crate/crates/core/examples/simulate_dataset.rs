//! Draw homodyne quadratures for a photon-added thermal state with three
//! independent samplers, write one of them to disk and read it back.
//!
//! ```bash
//! cargo run --release --example simulate_dataset
//! ```

use glauber_p::homodyne::{sample_by_rejection, sample_quadratures, sample_via_loss_channel};
use glauber_p::io::{read_dataset, write_dataset};
use glauber_p::numerics::RngSeed;
use glauber_p::states::StateModel;

fn main() -> glauber_p::Result<()> {
    let model = StateModel::new(1.11, 0.60, 1.0)?;
    let seed = RngSeed(42);
    let n = 100_000;

    let expected = 1.0 + model.eta() * (4.0 * model.nbar() + 2.0);
    println!("model variance {expected:.4}");
    for (name, data) in [
        ("direct", sample_quadratures(&model, n, seed)?),
        ("rejection", sample_by_rejection(&model, n, seed)?),
        ("loss channel", sample_via_loss_channel(&model, n, seed)?),
    ] {
        println!("{name:>12}: mean {:+.4}  variance {:.4}", data.mean(), data.variance());
    }

    let dir = std::env::temp_dir().join("glauber-p-examples");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("spats.csv");
    let data = sample_quadratures(&model, n, seed)?;
    write_dataset(&path, &data)?;
    let back = read_dataset(&path)?;
    assert_eq!(back, data);
    println!("wrote {} (sidecar {})", path.display(), path.with_extension("json").display());
    println!("fingerprint {}", data.fingerprint());
    Ok(())
}
