//! Mean-surface solve and its second-order radial convergence.

use halfpipe::circle::BoundaryField;
use halfpipe::geometry::KleinPoint;
use halfpipe::mean_surface::{radial_mode_oracle, solve_mean_surface};

fn main() -> halfpipe::Result<()> {
    let k = 3;
    let x = BoundaryField::cos_mode(k, 64)?;
    let probe = [0.25, 0.5, 0.75, 0.9];
    let exact = radial_mode_oracle(k, &probe)?;
    let mut prev = f64::NAN;
    for n_r in [32, 64, 128, 256] {
        let (u, report) = solve_mean_surface(&x, n_r, 64)?;
        let err = probe
            .iter()
            .zip(&exact)
            .map(|(&r, f)| (u.eval(KleinPoint::new(r, 0.0)).unwrap() - f).abs())
            .fold(0.0, f64::max);
        println!(
            "n_r = {n_r:<4} error {err:.3e}  ratio {:.2}  residual {:.2e}",
            prev / err,
            report.residual_sup
        );
        prev = err;
    }
    Ok(())
}
