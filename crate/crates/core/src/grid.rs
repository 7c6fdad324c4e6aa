//! Polar grids on the closed unit disk and finite-difference weights on
//! non-uniform nodes.

use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{Error, Result};

/// `n_r + 1` rings (ring 0 is the pole, ring `n_r` the boundary) times `n_θ`
/// equally spaced angles.
///
/// Radii are clustered quadratically towards the boundary,
/// `r_i = 1 − (1 − i/n_r)²`, to resolve the `(1 − r)^{3/2}` boundary layer of
/// the mean-surface equation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarGrid {
    pub n_r: usize,
    pub n_theta: usize,
    #[serde(skip)]
    radii: Vec<f64>,
}

impl PolarGrid {
    pub fn new(n_r: usize, n_theta: usize) -> Result<Self> {
        if n_r < 4 {
            return Err(Error::Precondition(format!("n_r = {n_r} is below 4")));
        }
        if n_theta < 4 {
            return Err(Error::Precondition(format!(
                "n_theta = {n_theta} is below 4"
            )));
        }
        let radii = (0..=n_r)
            .map(|i| {
                let s = 1.0 - i as f64 / n_r as f64;
                1.0 - s * s
            })
            .collect();
        Ok(PolarGrid {
            n_r,
            n_theta,
            radii,
        })
    }

    pub fn r(&self, i: usize) -> f64 {
        self.radii[i]
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn theta(&self, j: usize) -> f64 {
        TAU * j as f64 / self.n_theta as f64
    }

    pub fn len(&self) -> usize {
        (self.n_r + 1) * self.n_theta
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n_theta + j
    }

    /// Cartesian position of node `(i, j)`.
    pub fn point(&self, i: usize, j: usize) -> (f64, f64) {
        let (s, c) = self.theta(j).sin_cos();
        (self.r(i) * c, self.r(i) * s)
    }

    /// Index of the ring interval containing `r`: the largest `i < n_r` with `r_i ≤ r`.
    pub fn ring_interval(&self, r: f64) -> usize {
        let n = self.n_r;
        if r <= 0.0 {
            return 0;
        }
        if r >= self.radii[n - 1] {
            return n - 1;
        }
        // Invert the radial map and correct for rounding.
        let mut i = ((1.0 - (1.0 - r).sqrt()) * n as f64).floor() as usize;
        i = i.min(n - 1);
        while i > 0 && self.radii[i] > r {
            i -= 1;
        }
        while i + 1 < n && self.radii[i + 1] <= r {
            i += 1;
        }
        i
    }

    /// Largest ring index whose radius is at most `r`.
    pub fn last_ring_within(&self, r: f64) -> usize {
        (0..=self.n_r).rev().find(|&i| self.radii[i] <= r).unwrap_or(0)
    }

    /// Grid resolution used for slack terms: the larger of the radial and
    /// angular spacings on the uniform parameter scale.
    pub fn resolution(&self) -> f64 {
        (2.0 / self.n_r as f64).max(TAU / self.n_theta as f64)
    }
}

/// Finite-difference weights (Fornberg's recursion) for derivatives `0..=m`
/// at `x0` from values at `nodes`. Returns `w[d][j]`.
pub fn fd_weights(x0: f64, nodes: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; n]; m + 1];
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn radii_are_monotone_and_closed() {
        let g = PolarGrid::new(64, 32).unwrap();
        assert_eq!(g.r(0), 0.0);
        assert_eq!(g.r(64), 1.0);
        assert!(g.radii().windows(2).all(|w| w[0] < w[1]));
        assert_abs_diff_eq!(g.r(63), 1.0 - 1.0 / 4096.0, epsilon = 1e-15);
    }

    #[test]
    fn ring_interval_brackets() {
        let g = PolarGrid::new(50, 32).unwrap();
        for &r in &[0.0, 1e-9, 0.013, 0.5, 0.9, 0.99999, 1.0] {
            let i = g.ring_interval(r);
            assert!(g.r(i) <= r + 1e-15);
            assert!(i == g.n_r - 1 || r < g.r(i + 1));
        }
        assert_eq!(g.ring_interval(g.r(17)), 17);
    }

    #[test]
    fn weights_differentiate_polynomials() {
        let nodes = [-0.3, -0.1, 0.0, 0.25, 0.7];
        let w = fd_weights(0.1, &nodes, 2);
        let p = |x: f64| 1.0 + 2.0 * x - x * x + 0.5 * x.powi(4);
        let dp = |x: f64| 2.0 - 2.0 * x + 2.0 * x.powi(3);
        let d2p = |x: f64| -2.0 + 6.0 * x * x;
        let apply = |d: usize| -> f64 { nodes.iter().zip(&w[d]).map(|(x, c)| c * p(*x)).sum() };
        assert_abs_diff_eq!(apply(0), p(0.1), epsilon = 1e-13);
        assert_abs_diff_eq!(apply(1), dp(0.1), epsilon = 1e-12);
        assert_abs_diff_eq!(apply(2), d2p(0.1), epsilon = 1e-11);
    }

    #[test]
    fn rejects_tiny_grids() {
        assert!(PolarGrid::new(2, 64).is_err());
        assert!(PolarGrid::new(16, 2).is_err());
    }
}
