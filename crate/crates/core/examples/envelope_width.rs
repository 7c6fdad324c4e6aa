//! Convex envelopes of the boundary data and the width field.

use halfpipe::circle::BoundaryField;
use halfpipe::envelope::{width, ConvexEnvelope};
use halfpipe::geometry::KleinPoint;
use halfpipe::grid::PolarGrid;

fn main() -> halfpipe::Result<()> {
    let x = BoundaryField::cos_mode(2, 512)?;
    let env = ConvexEnvelope::new(&x)?;
    let (lo, hi) = env.facet_counts();
    println!("lower facets {lo}, upper facets {hi}");
    for r in [0.0, 0.5, 0.9, 0.99] {
        let eta = KleinPoint::from_polar(r, 0.4);
        println!(
            "r = {r:<4}  phi- = {:+.6}  phi+ = {:+.6}  w = {:.6}",
            env.phi_minus(eta),
            env.phi_plus(eta),
            env.width_at(eta)
        );
    }
    for n in [64, 128, 256] {
        let w = width(&x, &PolarGrid::new(n, 2 * n)?)?;
        println!("grid {n}x{}: sup width {:.6} at {:?}", 2 * n, w.width, w.arg_sup);
    }
    Ok(())
}
