//! Minkowski products, the three disk models and Killing fields.

use halfpipe::geometry::{
    det3, killing_klein, killing_poincare, klein_to_poincare, klein_to_poincare_tangent, mink_cross, mink_inner,
    radial_unproj, HPIsometry, KleinPoint, MinkVec,
};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> halfpipe::Result<()> {
    let (x, y) = (MinkVec::new(1.0, 0.5, 2.0), MinkVec::new(-0.3, 1.0, 1.5));
    let c = mink_cross(x, y);
    println!("x ⊠ y = {c:?}");
    println!("<x ⊠ y, x> = {:.2e}", mink_inner(c, x));
    println!("det(x, y, x ⊠ y) = {:.6}", det3(x, y, c));

    let eta = KleinPoint::new(0.3, -0.4);
    let p = radial_unproj(eta)?;
    let z = klein_to_poincare(eta)?.z;
    println!("klein {eta:?} -> hyperboloid {:?} -> poincare {z}", p.vec());

    let sigma = MinkVec::new(0.2, -0.1, 1.0);
    let pushed = klein_to_poincare_tangent(eta, killing_klein(sigma, eta));
    println!("Killing field agreement across charts: {:.2e}", (pushed - killing_poincare(sigma, z)).norm());

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let iso = HPIsometry::random(&mut rng, 1.0, 0.5);
    let w = iso.act_poincare(Complex64::new(0.1, 0.2))?;
    println!("isometry moves 0.1+0.2i to {w:.6}, Lorentz defect {:.2e}", iso.a.lorentz_defect());
    Ok(())
}
