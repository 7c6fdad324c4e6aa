//! Width against the sup of the dbar norm on a seeded random suite.

use halfpipe::circle::BoundaryField;
use halfpipe::estimates::{little_zygmund_decay, random_suite, run_suite, EstimateConfig, DECAY_RADII};

fn main() -> halfpipe::Result<()> {
    let cfg = EstimateConfig { n_r: 128, n_theta: 256 };
    let report = run_suite(&random_suite(6, 42)?, cfg)?;
    println!("{:<14} {:>10} {:>10} {:>8}", "member", "dbar_sup", "width", "ratio");
    for m in &report.members {
        println!("{:<14} {:>10.5} {:>10.5} {:>8.4}", m.id, m.dbar_sup, m.width, m.dbar_sup / m.width);
    }
    println!("violations: {}", report.total_violations);

    for row in little_zygmund_decay(&BoundaryField::cos_mode(2, 512)?, &DECAY_RADII, cfg)? {
        println!("cos 2t, r = {:.2}: width {:.5}, lambda {:.5}", row.radius, row.width_max, row.lambda_max);
    }
    Ok(())
}
