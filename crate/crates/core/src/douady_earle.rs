//! The infinitesimal Douady–Earle extension `L₀(X)` and its `z̄`-derivative,
//! by periodic trapezoid quadrature of the defining contour integrals:
//!
//! `L₀(X)(z) = (1−|z|²)³/(2πi) ∮ X(x) / ((1−z̄x)³ (x−z)) dx`,
//! `∂L₀(X)/∂z̄ (z) = 3(1−|z|²)²/(2πi) ∮ X(x) / (1−z̄x)⁴ dx`.
//!
//! Nothing here depends on the mean-surface solver.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::TAU;

use crate::circle::{boundary_action, BoundaryField};
use crate::error::{Error, Result};
use crate::geometry::{killing_poincare, HPIsometry};
use crate::hl::VectorField;

/// Smallest node count.
pub const MIN_NODES: usize = 64;
/// Largest node count reached by [`l0_adaptive`].
pub const MAX_NODES: usize = 1 << 16;
/// Nodes required per unit of `1/(1−|z|)`: the kernel peaks on an arc of
/// length about `1−|z|`.
pub const NODES_PER_PEAK: f64 = 32.0;
/// Stopping tolerance of [`l0_adaptive`].
pub const ADAPTIVE_TOL: f64 = 1e-10;

/// Periodic trapezoid rule on `m` equispaced nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct QuadratureSpec {
    pub m: usize,
}

impl QuadratureSpec {
    pub fn new(m: usize) -> Result<Self> {
        if m < MIN_NODES || !m.is_power_of_two() {
            return Err(Error::Precondition(format!(
                "quadrature node count {m} must be a power of two >= {MIN_NODES}"
            )));
        }
        Ok(QuadratureSpec { m })
    }

    /// Whether `m` nodes resolve the kernel at `z`.
    pub fn resolves(&self, z: Complex64) -> bool {
        let r = z.norm();
        r < 1.0 && self.m as f64 * (1.0 - r) >= NODES_PER_PEAK
    }
}

/// A boundary field sampled once at the quadrature nodes.
#[derive(Clone, Debug)]
pub struct DouadyEarle {
    spec: QuadratureSpec,
    nodes: Vec<Complex64>,
    /// `X(x_j)·x_j`, so that `dx = i x dθ` contributes `i·(2π/m)`.
    weights: Vec<Complex64>,
}

impl DouadyEarle {
    pub fn new(x: &BoundaryField, spec: QuadratureSpec) -> Self {
        let phi = x.sample_uniform(spec.m);
        let nodes: Vec<Complex64> = (0..spec.m)
            .map(|j| Complex64::from_polar(1.0, TAU * j as f64 / spec.m as f64))
            .collect();
        let weights = nodes
            .iter()
            .zip(&phi)
            .map(|(&x, &p)| Complex64::i() * x * p * x)
            .collect();
        DouadyEarle { spec, nodes, weights }
    }

    pub fn spec(&self) -> QuadratureSpec {
        self.spec
    }

    fn check(&self, z: Complex64) -> Result<()> {
        if self.spec.resolves(z) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "|z| = {} is too close to the circle for m = {}; raise m",
                z.norm(),
                self.spec.m
            )))
        }
    }

    /// `L₀(X)(z)`.
    pub fn l0(&self, z: Complex64) -> Result<Complex64> {
        self.check(z)?;
        let zb = z.conj();
        let s: Complex64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| {
                let q = Complex64::new(1.0, 0.0) - zb * x;
                w / (q * q * q * (x - z))
            })
            .sum();
        let d = 1.0 - z.norm_sqr();
        Ok(s * (d * d * d / self.spec.m as f64))
    }

    /// `∂L₀(X)/∂z̄ (z)`.
    pub fn dbar(&self, z: Complex64) -> Result<Complex64> {
        self.check(z)?;
        let zb = z.conj();
        let s: Complex64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| {
                let q = Complex64::new(1.0, 0.0) - zb * x;
                let q2 = q * q;
                w / (q2 * q2)
            })
            .sum();
        let d = 1.0 - z.norm_sqr();
        Ok(s * (3.0 * d * d / self.spec.m as f64))
    }

    /// `(L₀, ∂̄L₀)` at every point, in parallel.
    pub fn batch(&self, points: &[Complex64]) -> Result<Vec<(Complex64, Complex64)>> {
        points
            .par_iter()
            .map(|&z| Ok((self.l0(z)?, self.dbar(z)?)))
            .collect()
    }
}

impl VectorField for DouadyEarle {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        self.l0(z)
    }
    fn radius(&self) -> f64 {
        1.0 - NODES_PER_PEAK / self.spec.m as f64
    }
}

/// `L₀(X)(z)` with `q.m` nodes.
pub fn l0_eval(x: &BoundaryField, z: Complex64, q: QuadratureSpec) -> Result<Complex64> {
    DouadyEarle::new(x, q).l0(z)
}

/// `∂L₀(X)/∂z̄ (z)` with `q.m` nodes.
pub fn l0_dbar(x: &BoundaryField, z: Complex64, q: QuadratureSpec) -> Result<Complex64> {
    DouadyEarle::new(x, q).dbar(z)
}

/// Result of [`l0_adaptive`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Converged {
    pub value: Complex64,
    pub m: usize,
    /// Change produced by the last doubling.
    pub change: f64,
}

/// `L₀(X)(z)`, doubling the node count from the smallest one resolving `z`
/// until two successive values differ by less than [`ADAPTIVE_TOL`] or
/// [`MAX_NODES`] is reached.
pub fn l0_adaptive(x: &BoundaryField, z: Complex64) -> Result<Converged> {
    let mut m = MIN_NODES;
    while !(QuadratureSpec { m }).resolves(z) {
        m *= 2;
        if m > MAX_NODES {
            return Err(Error::Domain(format!("|z| = {} needs more than {MAX_NODES} nodes", z.norm())));
        }
    }
    let mut prev = l0_eval(x, z, QuadratureSpec { m })?;
    loop {
        let next = l0_eval(x, z, QuadratureSpec { m: 2 * m })?;
        let change = (next - prev).norm();
        m *= 2;
        if change < ADAPTIVE_TOL || m >= MAX_NODES {
            return Ok(Converged {
                value: next,
                m,
                change,
            });
        }
        prev = next;
    }
}

/// Sup over `samples` of `|L₀(A_*X + Λ(v))(Az) − (A_*L₀(X))(Az) − Λ(v)(Az)|`
/// for `iso = (A, v)`.
pub fn naturality_check(
    x: &BoundaryField,
    iso: &HPIsometry,
    samples: &[Complex64],
    q: QuadratureSpec,
) -> Result<f64> {
    let y = boundary_action(x, iso)?;
    let dx = DouadyEarle::new(x, q);
    let dy = DouadyEarle::new(&y, q);
    let errs = samples
        .par_iter()
        .map(|&z| {
            let w = iso.act_poincare(z)?;
            let lhs = dy.l0(w)?;
            let rhs = iso.act_poincare_derivative(z)? * dx.l0(z)? + killing_poincare(iso.v, w);
            Ok((lhs - rhs).norm())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(errs.into_iter().fold(0.0, f64::max))
}
