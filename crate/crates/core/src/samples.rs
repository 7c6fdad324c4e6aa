//! Sample-point sets for field evaluation.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A recipe for sample points in a disk chart.
#[derive(Clone, Debug, PartialEq)]
pub enum SampleSpec {
    /// `rings` concentric rings up to `r_max` (the centre included), `per_ring` points each.
    Polar { rings: usize, per_ring: usize, r_max: f64 },
    /// `count` points uniform in area in the disk of radius `r_max`.
    Random { count: usize, r_max: f64, seed: u64 },
    Explicit(Vec<Complex64>),
}

impl SampleSpec {
    pub fn points(&self) -> Vec<Complex64> {
        match self {
            SampleSpec::Polar {
                rings,
                per_ring,
                r_max,
            } => {
                let mut pts = vec![Complex64::new(0.0, 0.0)];
                for i in 1..=*rings {
                    let r = r_max * i as f64 / *rings as f64;
                    for j in 0..*per_ring {
                        pts.push(Complex64::from_polar(r, TAU * j as f64 / *per_ring as f64));
                    }
                }
                pts
            }
            SampleSpec::Random { count, r_max, seed } => random_disk_points(*count, *r_max, *seed),
            SampleSpec::Explicit(p) => p.clone(),
        }
    }
}

/// `count` seeded points uniform in area in `|z| ≤ r_max`.
pub fn random_disk_points(count: usize, r_max: f64, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let r = r_max * rng.gen::<f64>().sqrt();
            Complex64::from_polar(r, rng.gen_range(0.0..TAU))
        })
        .collect()
}

fn field<T: FromStr>(parts: &[&str], i: usize, what: &str) -> Result<T> {
    parts
        .get(i)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::schema("samples", format!("expected {what} in position {}", i + 1)))
}

impl FromStr for SampleSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SampleSpec::parse(s, 42)
    }
}

impl SampleSpec {
    /// `polar:RINGS:PER_RING:RMAX`, `random:COUNT:RMAX[:SEED]`, or
    /// `points:x1,y1;x2,y2;...`; `seed` is used when a random spec has none.
    pub fn parse(s: &str, seed: u64) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let spec = match parts[0] {
            "polar" | "grid" => SampleSpec::Polar {
                rings: field(&parts, 1, "a ring count")?,
                per_ring: field(&parts, 2, "a per-ring count")?,
                r_max: field(&parts, 3, "a radius")?,
            },
            "random" => SampleSpec::Random {
                count: field(&parts, 1, "a count")?,
                r_max: field(&parts, 2, "a radius")?,
                seed: if parts.len() > 3 { field(&parts, 3, "a seed")? } else { seed },
            },
            "points" => {
                let body = parts.get(1).copied().unwrap_or("");
                let pts = body
                    .split(';')
                    .filter(|p| !p.trim().is_empty())
                    .map(|p| {
                        let xy: Vec<&str> = p.split(',').collect();
                        match (xy.first().map(|v| v.trim().parse()), xy.get(1).map(|v| v.trim().parse())) {
                            (Some(Ok(x)), Some(Ok(y))) if xy.len() == 2 => Ok(Complex64::new(x, y)),
                            _ => Err(Error::schema("samples", format!("bad point `{p}`"))),
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                SampleSpec::Explicit(pts)
            }
            other => return Err(Error::schema("samples", format!("unknown sample kind `{other}`"))),
        };
        let r_max = match &spec {
            SampleSpec::Polar { r_max, .. } | SampleSpec::Random { r_max, .. } => *r_max,
            SampleSpec::Explicit(p) => p.iter().map(|z| z.norm()).fold(0.0, f64::max),
        };
        if !(r_max < 1.0) {
            return Err(Error::Precondition(format!("sample radius {r_max} is not < 1")));
        }
        Ok(spec)
    }
}
