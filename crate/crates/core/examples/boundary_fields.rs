//! Boundary vector fields, their JSON form and the cross-ratio distortion.

use halfpipe::circle::{boundary_action, cross_ratio_norm_estimate, killing_boundary, BoundaryField};
use halfpipe::geometry::{HPIsometry, MinkVec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> halfpipe::Result<()> {
    let x = BoundaryField::from_json(r#"{"fourier":{"a":[0,0,1,0,0.25],"b":[0,0,0.5]}}"#)?;
    println!("n = {}, sup|phi| = {:.4}", x.n(), x.sup_norm());
    println!("X(e^i0.3) = {:.6}", x.field_eval(0.3));

    let back = BoundaryField::from_json(&x.to_json())?;
    println!("JSON round trip exact: {}", back.phi() == x.phi());

    let k = killing_boundary(MinkVec::new(0.3, -0.2, 1.0), 256)?;
    println!("cross-ratio norm of a Killing field: {:.2e}", cross_ratio_norm_estimate(&k, 1024, 42)?);
    for m in [256, 1024, 4096] {
        println!("cross-ratio norm of X, {m} quadruples: {:.6}", cross_ratio_norm_estimate(&x, m, 42)?);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let y = boundary_action(&x, &HPIsometry::random(&mut rng, 0.5, 0.0))?;
    println!("after an isometry: {:.6}", cross_ratio_norm_estimate(&y, 4096, 42)?);
    Ok(())
}
