//! The harmonic Lagrangian extension against the Douady-Earle extension.

use halfpipe::circle::BoundaryField;
use halfpipe::douady_earle::{l0_adaptive, DouadyEarle, QuadratureSpec};
use halfpipe::hl::hl_field_poincare;
use halfpipe::mean_surface::solve_mean_surface;
use halfpipe::samples::random_disk_points;

fn main() -> halfpipe::Result<()> {
    let x = BoundaryField::from_fourier(&[0.0, 0.3, 1.0, 0.0, 0.2], &[0.0, 0.4, 0.0, 0.1], 512)?;
    let pts = random_disk_points(200, 0.8, 42);
    let de = DouadyEarle::new(&x, QuadratureSpec::new(2048)?);
    let l0 = de.batch(&pts)?;
    for n in [64, 128, 256] {
        let (u, _) = solve_mean_surface(&x, n, 2 * n)?;
        let hl = hl_field_poincare(&u, &pts)?;
        let sup = hl.values.iter().zip(&l0).map(|(a, (b, _))| (a - b).norm()).fold(0.0, f64::max);
        println!("grid {n}x{}: sup |HL - L0| = {sup:.3e}", 2 * n);
    }
    let c = l0_adaptive(&x, pts[0])?;
    println!("adaptive L0 at {:.4}: {:.10} with m = {}", pts[0], c.value, c.m);
    Ok(())
}
