//! Infinitesimal earthquake read off the lower envelope.

use halfpipe::circle::BoundaryField;
use halfpipe::envelope::{earthquake_eval, recentered_field, ConvexEnvelope};
use halfpipe::geometry::KleinPoint;

fn main() -> halfpipe::Result<()> {
    let x = BoundaryField::from_fn(256, halfpipe::circle::Interp::PiecewiseLinear, |t| t.cos().abs())?;
    let env = ConvexEnvelope::new(&x)?;
    for k in 0..8 {
        let eta = KleinPoint::from_polar(0.6, k as f64 * std::f64::consts::FRAC_PI_4);
        let e = earthquake_eval(&env, eta)?;
        println!("eta = ({:+.3}, {:+.3})  E = {:+.6}", eta.eta1, eta.eta2, e);
    }
    let eta = KleinPoint::new(0.2, 0.1);
    let y = recentered_field(&x, &env, eta)?;
    println!("recentred at {eta:?}: sup|phi| {:.4} -> {:.4}", x.sup_norm(), y.sup_norm());
    Ok(())
}
