//! The dbar norm of the extension equals the principal curvature of the mean surface.

use halfpipe::circle::BoundaryField;
use halfpipe::geometry::{poincare_to_klein, PoincarePoint};
use halfpipe::hl::{dbar_norm_fd, divergence_check, shape_operator, HlPoincare, FD_STEP};
use halfpipe::mean_surface::solve_mean_surface;
use halfpipe::samples::random_disk_points;

fn main() -> halfpipe::Result<()> {
    let x = BoundaryField::from_fourier(&[0.0, 0.0, 1.0, 0.5], &[0.0, 0.2, 0.0, 0.3], 256)?;
    let (u, _) = solve_mean_surface(&x, 256, 256)?;
    let field = HlPoincare(&u);
    let mut worst: f64 = 0.0;
    for z in random_disk_points(8, 0.6, 3) {
        let s = shape_operator(&u, poincare_to_klein(PoincarePoint::new(z))?)?;
        let fd = dbar_norm_fd(&field, z, FD_STEP)?;
        println!("z = {z:.4}  |dbar V| = {fd:.8}  lambda = {:.8}  trace = {:+.1e}", s.lambda, s.trace);
        worst = worst.max((fd - s.lambda).abs());
    }
    println!("worst disagreement {worst:.2e}");
    println!("divergence residual on r <= 0.9: {:.2e}", divergence_check(&u, 0.9));
    Ok(())
}
