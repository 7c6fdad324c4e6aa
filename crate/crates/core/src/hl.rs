//! The harmonic Lagrangian extension field of a boundary field, built from the
//! mean-surface solution `ū` in the Klein chart.
//!
//! At `η` the tangent plane of the graph of `ū` is dual to
//! `σ = (−(ū − ∇ū·η), ∂₁ū, ∂₂ū)`, and the field is the Killing field `Λ(σ)`
//! evaluated at `η`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::circle::{half_spectrum, synthesize};
use crate::error::{Error, Result};
use crate::geometry::{
    klein_to_poincare_tangent, killing_klein, poincare_to_klein, pushforward_field, KleinPoint, MinkVec, Model,
    ModelMap, PlaneField, PoincarePoint,
};
use crate::grid::fd_weights;
use crate::mean_surface::{DiskField, Jet};

/// Largest Klein radius at which field values are evaluated.
pub const VALUE_RADIUS: f64 = 0.995;
/// Largest Klein radius at which second derivatives are trusted.
pub const CURVATURE_RADIUS: f64 = 0.95;
/// Default step for [`dbar_norm_fd`] and [`divergence_at`].
pub const FD_STEP: f64 = 1e-3;

fn check_radius(eta: KleinPoint, limit: f64) -> Result<()> {
    let r = eta.norm();
    if r.is_finite() && r <= limit + 1e-12 {
        Ok(())
    } else {
        Err(Error::Domain(format!("|eta| = {r} exceeds {limit}")))
    }
}

/// The plane label `σ` of the tangent plane of the graph at `η`.
pub fn tangent_label(jet: &Jet, eta: KleinPoint) -> MinkVec {
    MinkVec::new(
        -(jet.u - jet.ux * eta.eta1 - jet.uy * eta.eta2),
        jet.ux,
        jet.uy,
    )
}

/// The field at `η`, in Klein chart coordinates.
pub fn hl_eval(u_bar: &DiskField, eta: KleinPoint) -> Result<Complex64> {
    check_radius(eta, VALUE_RADIUS)?;
    let jet = u_bar.jet(eta)?;
    Ok(killing_klein(tangent_label(&jet, eta), eta))
}

/// The field sampled at Klein points.
pub fn hl_field_klein(u_bar: &DiskField, points: &[Complex64]) -> Result<PlaneField> {
    let values = points
        .par_iter()
        .map(|&p| hl_eval(u_bar, KleinPoint::from_complex(p)))
        .collect::<Result<Vec<_>>>()?;
    PlaneField::new(Model::Klein, points.to_vec(), values)
}

/// The field sampled at Poincaré points and expressed in the Poincaré chart.
pub fn hl_field_poincare(u_bar: &DiskField, points: &[Complex64]) -> Result<PlaneField> {
    let klein = points
        .iter()
        .map(|&z| poincare_to_klein(PoincarePoint::new(z)).map(|k| k.as_complex()))
        .collect::<Result<Vec<_>>>()?;
    let mut field = pushforward_field(&hl_field_klein(u_bar, &klein)?, ModelMap::KleinToPoincare)?;
    field.points = points.to_vec();
    Ok(field)
}

/// A planar vector field that can be evaluated anywhere in `|z| < radius()`.
pub trait VectorField: Sync {
    fn eval(&self, z: Complex64) -> Result<Complex64>;
    fn radius(&self) -> f64 {
        1.0
    }
}

/// A closure as a [`VectorField`] on the disk of the given radius.
pub struct FnField<F> {
    pub f: F,
    pub radius: f64,
}

impl<F: Fn(Complex64) -> Complex64 + Sync> VectorField for FnField<F> {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        Ok((self.f)(z))
    }
    fn radius(&self) -> f64 {
        self.radius
    }
}

/// The field of a solved `ū` in the Poincaré chart.
pub struct HlPoincare<'a>(pub &'a DiskField);

impl VectorField for HlPoincare<'_> {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        let eta = poincare_to_klein(PoincarePoint::new(z))?;
        Ok(klein_to_poincare_tangent(eta, hl_eval(self.0, eta)?))
    }
    fn radius(&self) -> f64 {
        // Poincaré image of the Klein value radius.
        VALUE_RADIUS / (1.0 + (1.0 - VALUE_RADIUS * VALUE_RADIUS).sqrt())
    }
}

fn dbar_central<V: VectorField + ?Sized>(v: &V, z: Complex64, h: f64) -> Result<Complex64> {
    let dx = (v.eval(z + h)? - v.eval(z - h)?) / (2.0 * h);
    let ih = Complex64::new(0.0, h);
    let dy = (v.eval(z + ih)? - v.eval(z - ih)?) / (2.0 * h);
    Ok(0.5 * (dx + Complex64::i() * dy))
}

/// `∂V/∂z̄` at `z` by central differences, Richardson-extrapolated over `h`
/// and `h/2`.
pub fn dbar_fd<V: VectorField + ?Sized>(v: &V, z: Complex64, h: f64) -> Result<Complex64> {
    if !(h > 0.0) || z.norm() + h >= v.radius() {
        return Err(Error::Domain(format!(
            "stencil of radius {h} at |z| = {} leaves the disk of radius {}",
            z.norm(),
            v.radius()
        )));
    }
    let coarse = dbar_central(v, z, h)?;
    let fine = dbar_central(v, z, h / 2.0)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// `|∂V/∂z̄|` at `z`; see [`dbar_fd`].
pub fn dbar_norm_fd<V: VectorField + ?Sized>(v: &V, z: Complex64, h: f64) -> Result<f64> {
    Ok(dbar_fd(v, z, h)?.norm())
}

/// Shape data at one Klein point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ShapeSample {
    /// Principal curvature, half the gap between the eigenvalues of `g⁻¹II`.
    pub lambda: f64,
    /// Equal to `lambda` for a mean surface.
    pub dbar_norm: f64,
    /// Sum of the two eigenvalues; vanishes for a mean surface.
    pub trace: f64,
}

/// Shape operator of the graph of `ū` at `η`: `II = L⁻¹ Hess ū`, measured
/// against the Klein metric `g`, with `g⁻¹ = L²(I − ηηᵀ)`.
pub fn shape_operator(u_bar: &DiskField, eta: KleinPoint) -> Result<ShapeSample> {
    check_radius(eta, CURVATURE_RADIUS)?;
    Ok(shape_from_jet(&u_bar.jet(eta)?, eta))
}

pub(crate) fn shape_from_jet(j: &Jet, eta: KleinPoint) -> ShapeSample {
    let (e1, e2) = (eta.eta1, eta.eta2);
    let l = (1.0 - e1 * e1 - e2 * e2).sqrt();
    let ginv = [[1.0 - e1 * e1, -e1 * e2], [-e1 * e2, 1.0 - e2 * e2]];
    let h = [[j.uxx, j.uxy], [j.uxy, j.uyy]];
    let mut m = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            m[a][b] = l * (ginv[a][0] * h[0][b] + ginv[a][1] * h[1][b]);
        }
    }
    let trace = m[0][0] + m[1][1];
    let half_gap = (0.25 * (m[0][0] - m[1][1]).powi(2) + m[0][1] * m[1][0]).max(0.0).sqrt();
    ShapeSample {
        lambda: half_gap,
        dbar_norm: half_gap,
        trace,
    }
}

/// Shape data over a set of Klein points.
#[derive(Clone, Debug, Serialize)]
pub struct ShapeField {
    pub points: Vec<KleinPoint>,
    pub lambda: Vec<f64>,
    pub dbar_norm: Vec<f64>,
    pub trace: Vec<f64>,
}

pub fn shape_field(u_bar: &DiskField, points: &[KleinPoint]) -> Result<ShapeField> {
    let s = points
        .par_iter()
        .map(|&p| shape_operator(u_bar, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(ShapeField {
        points: points.to_vec(),
        lambda: s.iter().map(|x| x.lambda).collect(),
        dbar_norm: s.iter().map(|x| x.dbar_norm).collect(),
        trace: s.iter().map(|x| x.trace).collect(),
    })
}

/// Hyperbolic divergence of the field at `η`, from Richardson-extrapolated
/// central differences of `L⁻³V` (the Klein area density is `L⁻³`).
pub fn divergence_at(u_bar: &DiskField, eta: KleinPoint, h: f64) -> Result<f64> {
    check_radius(eta, VALUE_RADIUS - 2.0 * h)?;
    let flux = |e1: f64, e2: f64| -> Result<Complex64> {
        let p = KleinPoint::new(e1, e2);
        let l2 = 1.0 - p.norm_sqr();
        Ok(hl_eval(u_bar, p)? / (l2 * l2.sqrt()))
    };
    let central = |h: f64| -> Result<f64> {
        let dx = (flux(eta.eta1 + h, eta.eta2)?.re - flux(eta.eta1 - h, eta.eta2)?.re) / (2.0 * h);
        let dy = (flux(eta.eta1, eta.eta2 + h)?.im - flux(eta.eta1, eta.eta2 - h)?.im) / (2.0 * h);
        Ok(dx + dy)
    };
    let l2 = 1.0 - eta.norm_sqr();
    Ok((4.0 * central(h / 2.0)? - central(h)?) / 3.0 * l2 * l2.sqrt())
}

/// Sup of the hyperbolic divergence of the field over the grid rings with
/// `0 < r ≤ r_max`, computed on the solver grid.
///
/// With `T = V^r/L²` and `S = (V·e_θ)/L³` the divergence is
/// `L²(∂_r T + T/r) + rT + L³ ∂_θ S / r`; `∂_r` uses three-point differences
/// along each ray (one-sided on the first ring, whose neighbour is the pole)
/// and `∂_θ` is spectral.
pub fn divergence_check(u_bar: &DiskField, r_max: f64) -> f64 {
    let g = u_bar.grid();
    let nt = g.n_theta;
    let last = g.last_ring_within(r_max.min(VALUE_RADIUS)).min(g.n_r - 1);
    if last == 0 {
        return 0.0;
    }
    let jets = u_bar.nodal_jets();
    let mut w = vec![vec![0.0; nt]; last + 3];
    let mut s = vec![vec![0.0; nt]; last + 3];
    for i in 0..=last + 2 {
        let r = g.r(i);
        let l2 = 1.0 - r * r;
        let l3 = l2 * l2.sqrt();
        for j in 0..nt {
            let th = g.theta(j);
            let (c, sn) = (th.cos(), th.sin());
            let eta = KleinPoint::new(r * c, r * sn);
            let v = killing_klein(tangent_label(&jets[g.index(i, j)], eta), eta);
            w[i][j] = (v.re * c + v.im * sn) / l2;
            s[i][j] = (-v.re * sn + v.im * c) / l3;
        }
    }
    let mut sup: f64 = 0.0;
    for i in 1..=last {
        let r = g.r(i);
        let l2 = 1.0 - r * r;
        let l3 = l2 * l2.sqrt();
        let lo = if i == 1 { 1 } else { i - 1 };
        let wt = &fd_weights(r, &[g.r(lo), g.r(lo + 1), g.r(lo + 2)], 1)[1];
        let coeffs = half_spectrum(&s[i]);
        let dcoeffs: Vec<Complex64> = coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| if 2 * k == nt { Complex64::new(0.0, 0.0) } else { c * Complex64::new(0.0, k as f64) })
            .collect();
        let ds = synthesize(&dcoeffs, nt);
        for j in 0..nt {
            let dw = wt[0] * w[lo][j] + wt[1] * w[lo + 1][j] + wt[2] * w[lo + 2][j];
            let div = l2 * (dw + w[i][j] / r) + r * w[i][j] + l3 * ds[j] / r;
            sup = sup.max(div.abs());
        }
    }
    sup
}
