//! Normally ordered moments from the analytic P functions.
//!
//! ```bash
//! cargo run --release --example moments
//! ```

use glauber_p::states::{
    default_moment_radius, normally_ordered_moment, spats_p, thermal_p, PhaseSpacePoint,
};

fn main() -> glauber_p::Result<()> {
    println!(" nbar    <n> spats  (2n+1)   <n> thermal   <a+2 a2> spats");
    for nbar in [0.5, 1.11, 3.71] {
        let radius = default_moment_radius(nbar);
        let spats = |a: f64| PhaseSpacePoint::new(a).and_then(|p| spats_p(p, nbar)).unwrap_or(f64::NAN);
        let thermal = |a: f64| PhaseSpacePoint::new(a).and_then(|p| thermal_p(p, nbar)).unwrap_or(f64::NAN);
        let n1 = normally_ordered_moment(spats, 1, radius)?;
        let n2 = normally_ordered_moment(spats, 2, radius)?;
        let t1 = normally_ordered_moment(thermal, 1, radius)?;
        println!(
            "{nbar:5.2}   {:.8}  {:.2}    {:.8}    {:.6}{}",
            n1.value,
            2.0 * nbar + 1.0,
            t1.value,
            n2.value,
            if n1.tail_warning || n2.tail_warning { "  (tail)" } else { "" }
        );
    }
    Ok(())
}
