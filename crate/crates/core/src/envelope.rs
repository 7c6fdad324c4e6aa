//! Lower and upper convex envelopes `φ∓` of boundary data, the width, the
//! supporting planes of the convex core and the left infinitesimal earthquake.
//!
//! The boundary samples `(cos θ_j, sin θ_j, φ_j)` are in convex position over
//! the circle, so each hull is a triangulation of the inscribed polygon. It is
//! built by wrapping chords: starting from the polygon edge `(0, n−1)`, each
//! chord `(a, b)` is closed by the apex `c ∈ (a, b)` of least slope above the
//! chord, and the two new chords `(a, c)`, `(c, b)` are processed in turn.
//! The resulting binary tree doubles as the point-location structure.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::circle::{boundary_action, BoundaryField};
use crate::error::{Error, Result};
use crate::geometry::{dual_plane_eval, killing_klein, HPIsometry, KleinPoint, Mat3, MinkVec};
use crate::grid::PolarGrid;

/// Tolerance for hull geometry and envelope comparisons.
pub const HULL_TOL: f64 = 1e-9;
/// Residual below which data is treated as exactly affine.
pub const AFFINE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug)]
struct Facet {
    /// Label of the facet plane: height `−σ0 + σ1 x + σ2 y`.
    sigma: MinkVec,
}

#[derive(Clone, Copy, Debug)]
struct Node {
    facet: usize,
    a: usize,
    c: usize,
    b: usize,
    left: Option<usize>,
    right: Option<usize>,
}

/// One triangulated hull surface (lower, or upper stored as the lower hull of `−φ`).
#[derive(Clone, Debug)]
struct HullSurface {
    facets: Vec<Facet>,
    nodes: Vec<Node>,
    sign: f64,
}

/// Both convex envelopes of a boundary field.
#[derive(Clone, Debug)]
pub struct ConvexEnvelope {
    pts: Vec<(f64, f64)>,
    kind: EnvelopeKind,
}

#[derive(Clone, Debug)]
enum EnvelopeKind {
    Affine(MinkVec),
    Hulls { lower: HullSurface, upper: HullSurface },
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Plane through three lifted points, as a dual-plane label.
fn plane_through(p: [(f64, f64); 3], h: [f64; 3]) -> Result<MinkVec> {
    let m = [
        [1.0, p[0].0, p[0].1],
        [1.0, p[1].0, p[1].1],
        [1.0, p[2].0, p[2].1],
    ];
    let det = |m: &[[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(&m);
    if d.abs() < 1e-300 {
        return Err(Error::Numerical("degenerate hull triangle".into()));
    }
    let mut coef = [0.0; 3];
    for (col, c) in coef.iter_mut().enumerate() {
        let mut mc = m;
        for row in 0..3 {
            mc[row][col] = h[row];
        }
        *c = det(&mc) / d;
    }
    Ok(MinkVec::new(-coef[0], coef[1], coef[2]))
}

impl HullSurface {
    /// Lower hull of the lifted points with heights `sign · h`.
    fn build(pts: &[(f64, f64)], h: &[f64], sign: f64) -> Result<Self> {
        let n = pts.len();
        let hs: Vec<f64> = h.iter().map(|x| sign * x).collect();
        let mut facets = Vec::with_capacity(n - 2);
        let mut nodes: Vec<Node> = Vec::with_capacity(n - 2);
        // (a, b, parent node, is_left)
        let mut stack: Vec<(usize, usize, Option<(usize, bool)>)> = vec![(0, n - 1, None)];
        while let Some((a, b, parent)) = stack.pop() {
            if b - a < 2 {
                continue;
            }
            let (pa, pb) = (pts[a], pts[b]);
            let len = ((pb.0 - pa.0).powi(2) + (pb.1 - pa.1).powi(2)).sqrt();
            let mut best = None;
            let mut best_ratio = f64::INFINITY;
            for p in a + 1..b {
                let pp = pts[p];
                let t = ((pp.0 - pa.0) * (pb.0 - pa.0) + (pp.1 - pa.1) * (pb.1 - pa.1)) / (len * len);
                let e = hs[p] - (hs[a] + (hs[b] - hs[a]) * t);
                let d = cross(pa, pb, pp).abs() / len;
                let ratio = e / d;
                if ratio < best_ratio {
                    best_ratio = ratio;
                    best = Some(p);
                }
            }
            let c = best.ok_or_else(|| Error::Numerical("hull apex search failed".into()))?;
            let sigma = plane_through([pts[a], pts[c], pts[b]], [hs[a], hs[c], hs[b]])?;
            facets.push(Facet { sigma: sigma * sign });
            let id = nodes.len();
            nodes.push(Node {
                facet: facets.len() - 1,
                a,
                c,
                b,
                left: None,
                right: None,
            });
            if let Some((par, is_left)) = parent {
                if is_left {
                    nodes[par].left = Some(id);
                } else {
                    nodes[par].right = Some(id);
                }
            }
            // Pushed right first so that the left chord is processed first.
            stack.push((c, b, Some((id, false))));
            stack.push((a, c, Some((id, true))));
        }
        Ok(HullSurface {
            facets,
            nodes,
            sign,
        })
    }

    /// Facet whose triangle contains `η`; points outside the inscribed
    /// polygon get the facet adjacent to the nearest boundary edge.
    fn locate(&self, pts: &[(f64, f64)], eta: (f64, f64)) -> usize {
        let mut node = 0;
        loop {
            let nd = self.nodes[node];
            let (pa, pc, pb) = (pts[nd.a], pts[nd.c], pts[nd.b]);
            let scale = 1e-14;
            let beyond_ac = cross(pa, pc, eta) * cross(pa, pc, pb) < 0.0 && cross(pa, pc, eta).abs() > scale;
            let beyond_cb = cross(pc, pb, eta) * cross(pc, pb, pa) < 0.0 && cross(pc, pb, eta).abs() > scale;
            let next = if beyond_ac {
                nd.left
            } else if beyond_cb {
                nd.right
            } else {
                None
            };
            match next {
                Some(child) => node = child,
                None => return nd.facet,
            }
        }
    }
}

impl ConvexEnvelope {
    pub fn new(x: &BoundaryField) -> Result<Self> {
        let n = x.n();
        let pts: Vec<(f64, f64)> = (0..n)
            .map(|j| {
                let (s, c) = x.theta(j).sin_cos();
                (c, s)
            })
            .collect();
        let phi = x.phi();
        let c = x.coefficients();
        let fit = MinkVec::new(-c[0].re, 2.0 * c[1].re, -2.0 * c[1].im);
        let resid = pts
            .iter()
            .zip(phi)
            .map(|(p, v)| (dual_plane_eval(fit, KleinPoint::new(p.0, p.1)) - v).abs())
            .fold(0.0, f64::max);
        if resid < AFFINE_TOL * x.sup_norm().max(1.0) {
            return Ok(ConvexEnvelope {
                pts,
                kind: EnvelopeKind::Affine(fit),
            });
        }
        let lower = HullSurface::build(&pts, phi, 1.0)?;
        let upper = HullSurface::build(&pts, phi, -1.0)?;
        Ok(ConvexEnvelope {
            pts,
            kind: EnvelopeKind::Hulls { lower, upper },
        })
    }

    pub fn is_affine(&self) -> bool {
        matches!(self.kind, EnvelopeKind::Affine(_))
    }

    /// Number of facets in the lower and upper hulls.
    pub fn facet_counts(&self) -> (usize, usize) {
        match &self.kind {
            EnvelopeKind::Affine(_) => (1, 1),
            EnvelopeKind::Hulls { lower, upper } => (lower.facets.len(), upper.facets.len()),
        }
    }

    /// Supporting plane of `gr(φ⁻)` above `η`.
    pub fn lower_sigma(&self, eta: KleinPoint) -> MinkVec {
        match &self.kind {
            EnvelopeKind::Affine(s) => *s,
            EnvelopeKind::Hulls { lower, .. } => {
                lower.facets[lower.locate(&self.pts, (eta.eta1, eta.eta2))].sigma
            }
        }
    }

    /// Supporting plane of `gr(φ⁺)` above `η`.
    pub fn upper_sigma(&self, eta: KleinPoint) -> MinkVec {
        match &self.kind {
            EnvelopeKind::Affine(s) => *s,
            EnvelopeKind::Hulls { upper, .. } => {
                let f = upper.facets[upper.locate(&self.pts, (eta.eta1, eta.eta2))];
                debug_assert!(upper.sign < 0.0);
                f.sigma
            }
        }
    }

    pub fn phi_minus(&self, eta: KleinPoint) -> f64 {
        dual_plane_eval(self.lower_sigma(eta), eta)
    }

    pub fn phi_plus(&self, eta: KleinPoint) -> f64 {
        dual_plane_eval(self.upper_sigma(eta), eta)
    }

    /// `(φ⁺ − φ⁻)/√(1 − |η|²)`.
    pub fn width_at(&self, eta: KleinPoint) -> f64 {
        let l = (1.0 - eta.norm_sqr()).max(0.0).sqrt();
        if l == 0.0 {
            return 0.0;
        }
        ((self.phi_plus(eta) - self.phi_minus(eta)) / l).max(0.0)
    }

    /// Samples both envelopes, the width field and the lower support planes on a grid.
    pub fn sample(&self, grid: &PolarGrid) -> EnvelopeData {
        let pts: Vec<(usize, usize)> = (0..=grid.n_r)
            .flat_map(|i| (0..grid.n_theta).map(move |j| (i, j)))
            .collect();
        let rows: Vec<(f64, f64, f64, MinkVec)> = pts
            .par_iter()
            .map(|&(i, j)| {
                let (x, y) = grid.point(i, j);
                let eta = KleinPoint::new(x, y);
                let s = self.lower_sigma(eta);
                let lo = dual_plane_eval(s, eta);
                let hi = self.phi_plus(eta);
                let w = if i == grid.n_r {
                    0.0
                } else {
                    ((hi - lo) / (1.0 - grid.r(i) * grid.r(i)).sqrt()).max(0.0)
                };
                (lo, hi, w, s)
            })
            .collect();
        let mut data = EnvelopeData {
            grid: grid.clone(),
            phi_minus: Vec::with_capacity(rows.len()),
            phi_plus: Vec::with_capacity(rows.len()),
            width_field: Vec::with_capacity(rows.len()),
            support_sigma: Vec::with_capacity(rows.len()),
        };
        for (lo, hi, w, s) in rows {
            data.phi_minus.push(lo);
            data.phi_plus.push(hi);
            data.width_field.push(w);
            data.support_sigma.push(s);
        }
        data
    }
}

/// Envelope data sampled on a polar grid (values at every node; the width
/// field is zero on the boundary ring).
#[derive(Clone, Debug)]
pub struct EnvelopeData {
    pub grid: PolarGrid,
    pub phi_minus: Vec<f64>,
    pub phi_plus: Vec<f64>,
    pub width_field: Vec<f64>,
    pub support_sigma: Vec<MinkVec>,
}

/// The width and where it is attained.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct WidthReport {
    pub width: f64,
    pub arg_sup: KleinPoint,
}

impl EnvelopeData {
    /// Sup of the width field over rings with `r ≤ 1 − 1/n_r`.
    pub fn width(&self) -> WidthReport {
        let g = &self.grid;
        let cut = 1.0 - 1.0 / g.n_r as f64;
        let mut best = WidthReport {
            width: 0.0,
            arg_sup: KleinPoint::default(),
        };
        for i in 0..g.n_r {
            if g.r(i) > cut {
                break;
            }
            for j in 0..g.n_theta {
                let w = self.width_field[g.index(i, j)];
                if w > best.width {
                    let (x, y) = g.point(i, j);
                    best = WidthReport {
                        width: w,
                        arg_sup: KleinPoint::new(x, y),
                    };
                }
            }
        }
        best
    }
}

/// `φ∓`, width field and lower support planes of `X` on `grid`.
pub fn envelopes(x: &BoundaryField, grid: &PolarGrid) -> Result<EnvelopeData> {
    Ok(ConvexEnvelope::new(x)?.sample(grid))
}

/// The width of `X` on `grid` and its arg-sup.
pub fn width(x: &BoundaryField, grid: &PolarGrid) -> Result<WidthReport> {
    Ok(envelopes(x, grid)?.width())
}

/// Left infinitesimal earthquake at `η`: `dΠ((1,η) ⊠ σ)` with `σ` the lower
/// support plane above `η`.
pub fn earthquake_eval(env: &ConvexEnvelope, eta: KleinPoint) -> Result<Complex64> {
    if !(eta.norm_sqr() < 1.0) {
        return Err(Error::Domain(format!("|eta| = {} is not < 1", eta.norm())));
    }
    Ok(killing_klein(env.lower_sigma(eta), eta))
}

/// An isometry sending `η` to the origin and the lower support plane at `η`
/// to the horizontal plane through the origin.
pub fn recenter_isometry(env: &ConvexEnvelope, eta: KleinPoint) -> Result<HPIsometry> {
    let a: Mat3 = Mat3::boost_from_origin(eta)?.lorentz_inverse();
    let sigma = env.lower_sigma(eta);
    HPIsometry::new(a, -(a.mul_vec(sigma)))
}

/// Applies [`recenter_isometry`] to the boundary data.
pub fn recentered_field(x: &BoundaryField, env: &ConvexEnvelope, eta: KleinPoint) -> Result<BoundaryField> {
    boundary_action(x, &recenter_isometry(env, eta)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::{killing_boundary, Interp};

    fn brute(x: &BoundaryField, eta: (f64, f64)) -> (f64, f64) {
        let n = x.n();
        let pts: Vec<(f64, f64)> = (0..n).map(|j| (x.theta(j).cos(), x.theta(j).sin())).collect();
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let (a, b, c) = (pts[i], pts[j], pts[k]);
                    let d = cross(a, b, c);
                    let l1 = cross(eta, b, c) / d;
                    let l2 = cross(a, eta, c) / d;
                    let l3 = 1.0 - l1 - l2;
                    if l1 >= -1e-12 && l2 >= -1e-12 && l3 >= -1e-12 {
                        let v = l1 * x.phi()[i] + l2 * x.phi()[j] + l3 * x.phi()[k];
                        lo = lo.min(v);
                        hi = hi.max(v);
                    }
                }
            }
        }
        (lo, hi)
    }

    #[test]
    fn matches_brute_force() {
        let x = BoundaryField::from_fourier(&[0.1, 0.3, 1.0, -0.4], &[0.2, -0.5, 0.7], 32).unwrap();
        let env = ConvexEnvelope::new(&x).unwrap();
        assert_eq!(env.facet_counts(), (30, 30));
        for &(r, t) in &[(0.0, 0.0), (0.3, 1.0), (0.7, -2.0), (0.9, 2.5), (0.55, 0.1)] {
            let eta = KleinPoint::from_polar(r, t);
            let (lo, hi) = brute(&x, (eta.eta1, eta.eta2));
            assert!((env.phi_minus(eta) - lo).abs() < 1e-12, "{r} {t}");
            assert!((env.phi_plus(eta) - hi).abs() < 1e-12, "{r} {t}");
        }
    }

    #[test]
    fn affine_data_is_flat() {
        let g = PolarGrid::new(16, 32).unwrap();
        let one = killing_boundary(MinkVec::new(-1.0, 0.0, 0.0), 64).unwrap();
        let e = envelopes(&one, &g).unwrap();
        assert!(e.phi_minus.iter().chain(&e.phi_plus).all(|&v| (v - 1.0).abs() < 1e-14));
        assert!(e.width_field.iter().all(|&w| w == 0.0));
        let c = killing_boundary(MinkVec::new(0.0, 1.0, 0.0), 64).unwrap();
        let e = envelopes(&c, &g).unwrap();
        for i in 0..=16 {
            for j in 0..32 {
                let (x, _) = g.point(i, j);
                let q = g.index(i, j);
                assert!((e.phi_minus[q] - x).abs() < 1e-14 && (e.phi_plus[q] - x).abs() < 1e-14);
            }
        }
        assert_eq!(e.width().width, 0.0);
    }

    #[test]
    fn sandwich_and_convexity() {
        let x = BoundaryField::cos_mode(2, 512).unwrap();
        let g = PolarGrid::new(32, 64).unwrap();
        let e = envelopes(&x, &g).unwrap();
        for q in 0..g.len() {
            assert!(e.phi_minus[q] <= e.phi_plus[q] + HULL_TOL);
        }
        let env = ConvexEnvelope::new(&x).unwrap();
        for k in 0..50 {
            let a = KleinPoint::from_polar(0.9 * ((k * 7) % 10) as f64 / 10.0, k as f64);
            let b = KleinPoint::from_polar(0.9 * ((k * 3) % 10) as f64 / 10.0, 2.0 * k as f64);
            let m = KleinPoint::new((a.eta1 + b.eta1) / 2.0, (a.eta2 + b.eta2) / 2.0);
            assert!(env.phi_minus(m) <= (env.phi_minus(a) + env.phi_minus(b)) / 2.0 + HULL_TOL);
            assert!(env.phi_plus(m) >= (env.phi_plus(a) + env.phi_plus(b)) / 2.0 - HULL_TOL);
        }
    }

    #[test]
    fn cos2_envelopes_closed_form() {
        // φ⁻ = 2x² − 1 and φ⁺ = 1 − 2y² in the limit of dense sampling.
        let x = BoundaryField::cos_mode(2, 4096).unwrap();
        let env = ConvexEnvelope::new(&x).unwrap();
        for &(r, t) in &[(0.0, 0.0), (0.5, 0.3), (0.8, 2.0), (0.95, -1.0)] {
            let eta = KleinPoint::from_polar(r, t);
            let (a, b) = (eta.eta1, eta.eta2);
            assert!((env.phi_minus(eta) - (2.0 * a * a - 1.0)).abs() < 1e-5);
            assert!((env.phi_plus(eta) - (1.0 - 2.0 * b * b)).abs() < 1e-5);
        }
        let g = PolarGrid::new(64, 128).unwrap();
        let w = env.sample(&g).width();
        assert!((w.width - 2.0).abs() < 1e-4, "{}", w.width);
    }

    #[test]
    fn earthquake_examples() {
        let sigma = MinkVec::new(0.4, -0.3, 1.1);
        let k = killing_boundary(sigma, 64).unwrap();
        let env = ConvexEnvelope::new(&k).unwrap();
        let eta = KleinPoint::new(0.3, -0.5);
        assert!((earthquake_eval(&env, eta).unwrap() - killing_klein(sigma, eta)).norm() < 1e-13);
        let zero = BoundaryField::new(vec![0.0; 64], Interp::Trigonometric).unwrap();
        let env = ConvexEnvelope::new(&zero).unwrap();
        assert_eq!(earthquake_eval(&env, eta).unwrap().norm(), 0.0);
        assert!(earthquake_eval(&env, KleinPoint::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn earthquake_tends_to_the_field() {
        let x = BoundaryField::cos_mode(2, 2048).unwrap();
        let env = ConvexEnvelope::new(&x).unwrap();
        let t: f64 = 0.7;
        let target = x.field_eval(t);
        let err = |r: f64| (earthquake_eval(&env, KleinPoint::from_polar(r, t)).unwrap() - target).norm();
        assert!(err(0.999) < err(0.99) && err(0.99) < err(0.9));
        assert!(err(0.9999) < 0.05);
    }

    #[test]
    fn recentering() {
        let zero = BoundaryField::new(vec![0.0; 64], Interp::Trigonometric).unwrap();
        let env = ConvexEnvelope::new(&zero).unwrap();
        let iso = recenter_isometry(&env, KleinPoint::default()).unwrap();
        assert_eq!(iso, HPIsometry::IDENTITY);
        let k = killing_boundary(MinkVec::new(0.2, 0.9, -0.4), 64).unwrap();
        let env = ConvexEnvelope::new(&k).unwrap();
        let y = recentered_field(&k, &env, KleinPoint::new(0.4, 0.3)).unwrap();
        assert!(y.sup_norm() < 1e-12);
        let x = BoundaryField::cos_mode(2, 1024).unwrap();
        let env = ConvexEnvelope::new(&x).unwrap();
        let eta = KleinPoint::new(0.5, 0.0);
        let y = recentered_field(&x, &env, eta).unwrap();
        let envy = ConvexEnvelope::new(&y).unwrap();
        let o = KleinPoint::default();
        // Resampling the transformed data moves the discrete hull by O(n⁻²).
        let slack = 1e-4;
        assert!(envy.phi_minus(o).abs() < slack);
        let w0 = envy.phi_plus(o) - envy.phi_minus(o);
        assert!((w0 - env.width_at(eta)).abs() < slack);
        assert!(y.phi().iter().all(|&v| v >= -slack && v <= 2.0 * w0 + slack));
    }
}
