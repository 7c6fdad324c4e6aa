//! Minkowski space `R^{1,2}`, the hyperboloid, Klein and Poincaré disks, and the
//! affine action of `Isom_0(R^{1,2})` on Half-Pipe space.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Guard band used by chart changes near the ideal boundary.
pub const EPSILON_CHART: f64 = 1e-9;

/// Tolerance used by every matrix invariant check.
pub const MATRIX_TOL: f64 = 1e-10;

/// A vector of `R^{1,2}` with coordinates `(x0, x1, x2)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MinkVec {
    pub x0: f64,
    pub x1: f64,
    pub x2: f64,
}

impl MinkVec {
    pub const ZERO: MinkVec = MinkVec {
        x0: 0.0,
        x1: 0.0,
        x2: 0.0,
    };

    pub const fn new(x0: f64, x1: f64, x2: f64) -> Self {
        MinkVec { x0, x1, x2 }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x0, self.x1, self.x2]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        MinkVec::new(a[0], a[1], a[2])
    }

    pub fn inner(self, other: MinkVec) -> f64 {
        mink_inner(self, other)
    }

    pub fn cross(self, other: MinkVec) -> MinkVec {
        mink_cross(self, other)
    }

    /// Largest absolute coordinate.
    pub fn max_abs(self) -> f64 {
        self.x0.abs().max(self.x1.abs()).max(self.x2.abs())
    }

    pub fn is_finite(self) -> bool {
        self.x0.is_finite() && self.x1.is_finite() && self.x2.is_finite()
    }

    /// A vector with coordinates drawn uniformly from `[-scale, scale]`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> Self {
        MinkVec::new(
            rng.gen_range(-scale..=scale),
            rng.gen_range(-scale..=scale),
            rng.gen_range(-scale..=scale),
        )
    }
}

impl Add for MinkVec {
    type Output = MinkVec;
    fn add(self, o: MinkVec) -> MinkVec {
        MinkVec::new(self.x0 + o.x0, self.x1 + o.x1, self.x2 + o.x2)
    }
}

impl Sub for MinkVec {
    type Output = MinkVec;
    fn sub(self, o: MinkVec) -> MinkVec {
        MinkVec::new(self.x0 - o.x0, self.x1 - o.x1, self.x2 - o.x2)
    }
}

impl Neg for MinkVec {
    type Output = MinkVec;
    fn neg(self) -> MinkVec {
        MinkVec::new(-self.x0, -self.x1, -self.x2)
    }
}

impl Mul<f64> for MinkVec {
    type Output = MinkVec;
    fn mul(self, s: f64) -> MinkVec {
        MinkVec::new(self.x0 * s, self.x1 * s, self.x2 * s)
    }
}

impl Mul<MinkVec> for f64 {
    type Output = MinkVec;
    fn mul(self, v: MinkVec) -> MinkVec {
        v * self
    }
}

/// `-x0 y0 + x1 y1 + x2 y2`.
pub fn mink_inner(x: MinkVec, y: MinkVec) -> f64 {
    -x.x0 * y.x0 + x.x1 * y.x1 + x.x2 * y.x2
}

/// The Minkowski cross product: `<x ⊠ y, v> = det(x, y, v)` for every `v`.
pub fn mink_cross(x: MinkVec, y: MinkVec) -> MinkVec {
    let c0 = x.x1 * y.x2 - x.x2 * y.x1;
    let c1 = x.x2 * y.x0 - x.x0 * y.x2;
    let c2 = x.x0 * y.x1 - x.x1 * y.x0;
    MinkVec::new(-c0, c1, c2)
}

/// `det(x, y, v)` with the vectors as columns.
pub fn det3(x: MinkVec, y: MinkVec, v: MinkVec) -> f64 {
    x.x0 * (y.x1 * v.x2 - y.x2 * v.x1) - y.x0 * (x.x1 * v.x2 - x.x2 * v.x1)
        + v.x0 * (x.x1 * y.x2 - x.x2 * y.x1)
}

/// A point of the upper sheet of the hyperboloid `<p,p> = -1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypPoint(MinkVec);

impl HypPoint {
    /// The tolerance on `<p,p> + 1` is relative to `x0²` so that far-out points,
    /// whose coordinates carry rounding of order `x0² · ε`, are accepted.
    pub fn new(p: MinkVec) -> Result<Self> {
        if !p.is_finite() || p.x0 <= 0.0 {
            return Err(Error::Domain(format!("{p:?} is not on the upper sheet")));
        }
        let defect = (mink_inner(p, p) + 1.0).abs();
        if defect > 1e-12 * p.x0.max(1.0).powi(2) {
            return Err(Error::Domain(format!(
                "{p:?} is off the hyperboloid by {defect:e}"
            )));
        }
        Ok(HypPoint(p))
    }

    pub const ORIGIN: HypPoint = HypPoint(MinkVec::new(1.0, 0.0, 0.0));

    pub fn vec(self) -> MinkVec {
        self.0
    }

    /// Hyperbolic distance to another point.
    pub fn distance(self, other: HypPoint) -> f64 {
        (-mink_inner(self.0, other.0)).max(1.0).acosh()
    }
}

/// A point `η` of the Klein disk.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct KleinPoint {
    pub eta1: f64,
    pub eta2: f64,
}

impl KleinPoint {
    pub const fn new(eta1: f64, eta2: f64) -> Self {
        KleinPoint { eta1, eta2 }
    }

    pub fn from_polar(r: f64, theta: f64) -> Self {
        KleinPoint::new(r * theta.cos(), r * theta.sin())
    }

    pub fn norm_sqr(self) -> f64 {
        self.eta1 * self.eta1 + self.eta2 * self.eta2
    }

    pub fn norm(self) -> f64 {
        self.eta1.hypot(self.eta2)
    }

    pub fn as_complex(self) -> Complex64 {
        Complex64::new(self.eta1, self.eta2)
    }

    pub fn from_complex(z: Complex64) -> Self {
        KleinPoint::new(z.re, z.im)
    }

    /// `(1, η)` as a Minkowski vector.
    pub fn lift(self) -> MinkVec {
        MinkVec::new(1.0, self.eta1, self.eta2)
    }
}

/// A point of the Poincaré disk.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PoincarePoint {
    pub z: Complex64,
}

impl PoincarePoint {
    pub fn new(z: Complex64) -> Self {
        PoincarePoint { z }
    }
}

/// `Λ(σ)(p) = p ⊠ σ`.
pub fn killing_eval(sigma: MinkVec, p: HypPoint) -> MinkVec {
    mink_cross(p.vec(), sigma)
}

/// `Π(x) = (x1/x0, x2/x0)`.
pub fn radial_proj(p: HypPoint) -> KleinPoint {
    let v = p.vec();
    KleinPoint::new(v.x1 / v.x0, v.x2 / v.x0)
}

/// `Π⁻¹(η) = (1, η)/√(1 − |η|²)`.
pub fn radial_unproj(eta: KleinPoint) -> Result<HypPoint> {
    let n2 = eta.norm_sqr();
    if !(n2 < 1.0) {
        return Err(Error::Domain(format!("|eta| = {} is not < 1", n2.sqrt())));
    }
    let l = (1.0 - n2).sqrt();
    Ok(HypPoint(MinkVec::new(1.0 / l, eta.eta1 / l, eta.eta2 / l)))
}

/// `G(x) = (x1 + i x2)/(1 + x0)`.
pub fn hyp_to_poincare(p: HypPoint) -> PoincarePoint {
    let v = p.vec();
    PoincarePoint::new(Complex64::new(v.x1, v.x2) / (1.0 + v.x0))
}

/// `G⁻¹(z) = (1 + |z|², 2x, 2y)/(1 − |z|²)`.
pub fn poincare_to_hyp(z: PoincarePoint) -> Result<HypPoint> {
    let n2 = z.z.norm_sqr();
    if !(n2 < 1.0) {
        return Err(Error::Domain(format!("|z| = {} is not < 1", n2.sqrt())));
    }
    let d = 1.0 - n2;
    Ok(HypPoint(MinkVec::new(
        (1.0 + n2) / d,
        2.0 * z.z.re / d,
        2.0 * z.z.im / d,
    )))
}

/// `η ↦ η/(1 + √(1 − |η|²))`, the composite `G ∘ Π⁻¹`.
pub fn klein_to_poincare(eta: KleinPoint) -> Result<PoincarePoint> {
    let n2 = eta.norm_sqr();
    if !(n2 < 1.0) {
        return Err(Error::Domain(format!("|eta| = {} is not < 1", n2.sqrt())));
    }
    let l = (1.0 - n2).sqrt();
    Ok(PoincarePoint::new(eta.as_complex() / (1.0 + l)))
}

/// `z ↦ 2z/(1 + |z|²)`, the composite `Π ∘ G⁻¹`.
pub fn poincare_to_klein(z: PoincarePoint) -> Result<KleinPoint> {
    let n2 = z.z.norm_sqr();
    if !(n2 < 1.0) {
        return Err(Error::Domain(format!("|z| = {} is not < 1", n2.sqrt())));
    }
    Ok(KleinPoint::from_complex(z.z * (2.0 / (1.0 + n2))))
}

/// Differential of `klein_to_poincare` at `η` applied to `v`.
pub fn klein_to_poincare_tangent(eta: KleinPoint, v: Complex64) -> Complex64 {
    let n2 = eta.norm_sqr();
    let l = (1.0 - n2).sqrt();
    let e = eta.as_complex();
    let dot = eta.eta1 * v.re + eta.eta2 * v.im;
    v / (1.0 + l) + e * (dot / (l * (1.0 + l) * (1.0 + l)))
}

/// Differential of `poincare_to_klein` at `z` applied to `w`.
pub fn poincare_to_klein_tangent(z: Complex64, w: Complex64) -> Complex64 {
    let q = 1.0 + z.norm_sqr();
    let dot = z.re * w.re + z.im * w.im;
    w * (2.0 / q) - z * (4.0 * dot / (q * q))
}

/// `dΠ` at `p` applied to a tangent vector `v` of the hyperboloid.
pub fn radial_proj_tangent(p: MinkVec, v: MinkVec) -> Complex64 {
    let e1 = p.x1 / p.x0;
    let e2 = p.x2 / p.x0;
    Complex64::new(v.x1 - e1 * v.x0, v.x2 - e2 * v.x0) / p.x0
}

/// `dG` at `p` applied to a tangent vector `v` of the hyperboloid.
pub fn hyp_to_poincare_tangent(p: MinkVec, v: MinkVec) -> Complex64 {
    let d = 1.0 + p.x0;
    Complex64::new(v.x1, v.x2) / d - Complex64::new(p.x1, p.x2) * (v.x0 / (d * d))
}

/// The Killing field `Λ(σ)` expressed in the Klein chart at `η`.
pub fn killing_klein(sigma: MinkVec, eta: KleinPoint) -> Complex64 {
    // dΠ at (1, η) of (1, η) ⊠ σ; the scale of the lift cancels.
    let w = mink_cross(eta.lift(), sigma);
    Complex64::new(w.x1 - eta.eta1 * w.x0, w.x2 - eta.eta2 * w.x0)
}

/// The Killing field `Λ(σ)` expressed in the Poincaré chart:
/// `-iσ0 z + (iσ1/2)(1 + z²) + (σ2/2)(z² − 1)`.
pub fn killing_poincare(sigma: MinkVec, z: Complex64) -> Complex64 {
    let i = Complex64::i();
    let z2 = z * z;
    -i * sigma.x0 * z + i * (sigma.x1 / 2.0) * (1.0 + z2) + (sigma.x2 / 2.0) * (z2 - 1.0)
}

/// `(1, η) · v`: the height over `η` of the spacelike plane dual to `v`.
pub fn dual_plane_eval(v: MinkVec, eta: KleinPoint) -> f64 {
    mink_inner(eta.lift(), v)
}

/// Chart tag for [`PlaneField`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Klein,
    Poincare,
}

/// Direction of a chart change.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelMap {
    KleinToPoincare,
    PoincareToKlein,
}

/// A planar vector field sampled at finitely many points of a disk chart.
#[derive(Clone, Debug, PartialEq)]
pub struct PlaneField {
    pub model: Model,
    pub points: Vec<Complex64>,
    pub values: Vec<Complex64>,
}

impl PlaneField {
    pub fn new(model: Model, points: Vec<Complex64>, values: Vec<Complex64>) -> Result<Self> {
        if points.len() != values.len() {
            return Err(Error::Precondition(format!(
                "{} points but {} values",
                points.len(),
                values.len()
            )));
        }
        Ok(PlaneField {
            model,
            points,
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Pushes a sampled field through a chart change using the closed-form Jacobians.
pub fn pushforward_field(field: &PlaneField, map: ModelMap) -> Result<PlaneField> {
    let expected = match map {
        ModelMap::KleinToPoincare => Model::Klein,
        ModelMap::PoincareToKlein => Model::Poincare,
    };
    if field.model != expected {
        return Err(Error::Precondition(format!(
            "{map:?} applied to a {:?} field",
            field.model
        )));
    }
    let mut points = Vec::with_capacity(field.len());
    let mut values = Vec::with_capacity(field.len());
    for (&p, &v) in field.points.iter().zip(&field.values) {
        if p.norm() > 1.0 - EPSILON_CHART {
            return Err(Error::Domain(format!(
                "sample {p} is within the chart guard band"
            )));
        }
        match map {
            ModelMap::KleinToPoincare => {
                let eta = KleinPoint::from_complex(p);
                points.push(klein_to_poincare(eta)?.z);
                values.push(klein_to_poincare_tangent(eta, v));
            }
            ModelMap::PoincareToKlein => {
                points.push(poincare_to_klein(PoincarePoint::new(p))?.as_complex());
                values.push(poincare_to_klein_tangent(p, v));
            }
        }
    }
    PlaneField::new(
        match map {
            ModelMap::KleinToPoincare => Model::Poincare,
            ModelMap::PoincareToKlein => Model::Klein,
        },
        points,
        values,
    )
}

/// A real 3×3 matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat3(pub [[f64; 3]; 3]);

impl Mat3 {
    pub const IDENTITY: Mat3 = Mat3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
    pub const J: Mat3 = Mat3([[-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    pub fn mul_vec(&self, v: MinkVec) -> MinkVec {
        let m = &self.0;
        let a = v.to_array();
        let row = |i: usize| m[i][0] * a[0] + m[i][1] * a[1] + m[i][2] * a[2];
        MinkVec::new(row(0), row(1), row(2))
    }

    pub fn mul(&self, o: &Mat3) -> Mat3 {
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = (0..3).map(|k| self.0[i][k] * o.0[k][j]).sum();
            }
        }
        Mat3(out)
    }

    pub fn transpose(&self) -> Mat3 {
        let m = &self.0;
        Mat3([
            [m[0][0], m[1][0], m[2][0]],
            [m[0][1], m[1][1], m[2][1]],
            [m[0][2], m[1][2], m[2][2]],
        ])
    }

    pub fn scale(&self, s: f64) -> Mat3 {
        let mut out = self.0;
        out.iter_mut().flatten().for_each(|x| *x *= s);
        Mat3(out)
    }

    pub fn add(&self, o: &Mat3) -> Mat3 {
        let mut out = self.0;
        for (i, row) in out.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x += o.0[i][j];
            }
        }
        Mat3(out)
    }

    /// Max-abs entry norm.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0, |m: f64, x| m.max(x.abs()))
    }

    /// Inverse of a Lorentz matrix, `J Aᵀ J`.
    pub fn lorentz_inverse(&self) -> Mat3 {
        Mat3::J.mul(&self.transpose()).mul(&Mat3::J)
    }

    /// `max |AᵀJA − J|`.
    pub fn lorentz_defect(&self) -> f64 {
        self.transpose()
            .mul(&Mat3::J)
            .mul(self)
            .add(&Mat3::J.scale(-1.0))
            .max_abs()
    }

    /// The matrix of `y ↦ y ⊠ σ`, i.e. `Λ(σ)` acting linearly on `R^{1,2}`.
    pub fn killing(sigma: MinkVec) -> Mat3 {
        let (s0, s1, s2) = (sigma.x0, sigma.x1, sigma.x2);
        Mat3([[0.0, -s2, s1], [-s2, 0.0, s0], [s1, -s0, 0.0]])
    }

    /// Matrix exponential by scaling and squaring with a Taylor core.
    pub fn exp(&self) -> Mat3 {
        let norm = self.max_abs() * 3.0;
        let squarings = if norm > 0.5 {
            (norm / 0.5).log2().ceil() as i32
        } else {
            0
        };
        let a = self.scale(0.5f64.powi(squarings));
        let mut term = Mat3::IDENTITY;
        let mut sum = Mat3::IDENTITY;
        for k in 1..=18 {
            term = term.mul(&a).scale(1.0 / k as f64);
            sum = sum.add(&term);
        }
        for _ in 0..squarings {
            sum = sum.mul(&sum);
        }
        sum
    }

    /// Rotation by `alpha` about the time axis.
    pub fn rotation(alpha: f64) -> Mat3 {
        let (s, c) = alpha.sin_cos();
        Mat3([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])
    }

    /// The pure boost sending `(1,0,0)` to `Π⁻¹(η)`.
    pub fn boost_from_origin(eta: KleinPoint) -> Result<Mat3> {
        let n2 = eta.norm_sqr();
        if !(n2 < 1.0) {
            return Err(Error::Domain(format!("|eta| = {} is not < 1", n2.sqrt())));
        }
        let g = 1.0 / (1.0 - n2).sqrt();
        let e = [eta.eta1, eta.eta2];
        // (γ − 1)/|η|² written without cancellation.
        let k = g * g / (1.0 + g);
        let mut m = [[0.0; 3]; 3];
        m[0][0] = g;
        for i in 0..2 {
            m[0][i + 1] = g * e[i];
            m[i + 1][0] = g * e[i];
            for j in 0..2 {
                m[i + 1][j + 1] = if i == j { 1.0 } else { 0.0 } + k * e[i] * e[j];
            }
        }
        Ok(Mat3(m))
    }
}

/// An isometry of Half-Pipe space: the pair `(A, v)` acting as `Is(A, v)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HPIsometry {
    pub a: Mat3,
    pub v: MinkVec,
}

impl HPIsometry {
    pub const IDENTITY: HPIsometry = HPIsometry {
        a: Mat3::IDENTITY,
        v: MinkVec::ZERO,
    };

    pub fn new(a: Mat3, v: MinkVec) -> Result<Self> {
        let defect = a.lorentz_defect();
        if !(defect <= MATRIX_TOL) {
            return Err(Error::Precondition(format!(
                "matrix is not in O(1,2): defect {defect:e}"
            )));
        }
        if !(a.0[0][0] > 0.0) {
            return Err(Error::Precondition(
                "matrix reverses time orientation".into(),
            ));
        }
        if !v.is_finite() {
            return Err(Error::Precondition("translation part is not finite".into()));
        }
        Ok(HPIsometry { a, v })
    }

    /// Pure translation part: adds the Killing field `Λ(v)`.
    pub fn translation(v: MinkVec) -> Self {
        HPIsometry {
            a: Mat3::IDENTITY,
            v,
        }
    }

    pub fn linear(a: Mat3) -> Result<Self> {
        HPIsometry::new(a, MinkVec::ZERO)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &HPIsometry) -> HPIsometry {
        HPIsometry {
            a: self.a.mul(&other.a),
            v: self.v + self.a.mul_vec(other.v),
        }
    }

    pub fn inverse(&self) -> HPIsometry {
        let ai = self.a.lorentz_inverse();
        HPIsometry {
            a: ai,
            v: -(ai.mul_vec(self.v)),
        }
    }

    /// `A · η` in the Klein chart.
    pub fn act_klein(&self, eta: KleinPoint) -> KleinPoint {
        let w = self.a.mul_vec(eta.lift());
        KleinPoint::new(w.x1 / w.x0, w.x2 / w.x0)
    }

    /// The induced Möbius map of the Poincaré disk.
    pub fn act_poincare(&self, z: Complex64) -> Result<Complex64> {
        let p = poincare_to_hyp(PoincarePoint::new(z))?;
        Ok(hyp_to_poincare(HypPoint(self.a.mul_vec(p.vec()))).z)
    }

    /// Complex derivative of [`Self::act_poincare`] at `z`.
    pub fn act_poincare_derivative(&self, z: Complex64) -> Result<Complex64> {
        // The map is conformal: push the unit vector 1 through dG ∘ A ∘ dG⁻¹.
        let p = poincare_to_hyp(PoincarePoint::new(z))?.vec();
        let n2 = z.norm_sqr();
        let d = 1.0 - n2;
        // ∂/∂x of G⁻¹ at z.
        let dx = MinkVec::new(
            4.0 * z.re / (d * d),
            2.0 / d + 4.0 * z.re * z.re / (d * d),
            4.0 * z.re * z.im / (d * d),
        );
        let q = self.a.mul_vec(p);
        Ok(hyp_to_poincare_tangent(q, self.a.mul_vec(dx)))
    }

    /// Random isometry `Is(R_α B, v)`: a boost of hyperbolic length uniform in
    /// `[0, max_translation]` in a uniform direction, a uniform rotation, and
    /// a translation part with coordinates in `[-v_scale, v_scale]`.
    ///
    /// Both factors are produced as exponentials of Killing matrices so the
    /// result lies in the identity component.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, max_translation: f64, v_scale: f64) -> Self {
        let d = rng.gen_range(0.0..=max_translation);
        let beta = rng.gen_range(0.0..std::f64::consts::TAU);
        let alpha = rng.gen_range(0.0..std::f64::consts::TAU);
        let boost = Mat3::killing(MinkVec::new(0.0, d * beta.cos(), d * beta.sin())).exp();
        let rot = Mat3::killing(MinkVec::new(-alpha, 0.0, 0.0)).exp();
        let v = if v_scale > 0.0 {
            MinkVec::random(rng, v_scale)
        } else {
            MinkVec::ZERO
        };
        HPIsometry { a: rot.mul(&boost), v }
    }

    /// A random linear part from the exponential of a general Killing generator.
    pub fn random_linear<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> Mat3 {
        Mat3::killing(MinkVec::random(rng, scale)).exp()
    }
}

/// `Is(A, v)` acting on `(η, t)`.
pub fn hp_isometry_act(iso: &HPIsometry, eta: KleinPoint, t: f64) -> (KleinPoint, f64) {
    let w = iso.a.mul_vec(eta.lift());
    let eta2 = KleinPoint::new(w.x1 / w.x0, w.x2 / w.x0);
    (eta2, t / w.x0 + dual_plane_eval(iso.v, eta2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn close(a: MinkVec, b: MinkVec, tol: f64) -> bool {
        (a - b).max_abs() <= tol
    }

    #[test]
    fn inner_products() {
        let e0 = MinkVec::new(1.0, 0.0, 0.0);
        let e1 = MinkVec::new(0.0, 1.0, 0.0);
        let l = MinkVec::new(1.0, 1.0, 0.0);
        assert_eq!(mink_inner(e0, e0), -1.0);
        assert_eq!(mink_inner(e1, e1), 1.0);
        assert_eq!(mink_inner(l, l), 0.0);
    }

    #[test]
    fn cross_products() {
        let e0 = MinkVec::new(1.0, 0.0, 0.0);
        let e1 = MinkVec::new(0.0, 1.0, 0.0);
        let e2 = MinkVec::new(0.0, 0.0, 1.0);
        assert_eq!(mink_cross(e1, e2), MinkVec::new(-1.0, 0.0, 0.0));
        assert_eq!(mink_cross(e0, e1), MinkVec::new(0.0, 0.0, 1.0));
        let x = MinkVec::new(0.3, -1.2, 2.5);
        assert_eq!(mink_cross(x, x), MinkVec::ZERO);
    }

    #[test]
    fn killing_examples() {
        let rot = MinkVec::new(-1.0, 0.0, 0.0);
        assert_eq!(killing_eval(rot, HypPoint::ORIGIN), MinkVec::ZERO);
        let p = HypPoint::new(MinkVec::new(2f64.sqrt(), 1.0, 0.0)).unwrap();
        assert!(close(killing_eval(rot, p), MinkVec::new(0.0, 0.0, 1.0), 1e-15));
        assert_eq!(killing_eval(MinkVec::ZERO, p), MinkVec::ZERO);
    }

    #[test]
    fn klein_chart() {
        assert_eq!(radial_proj(HypPoint::ORIGIN), KleinPoint::new(0.0, 0.0));
        let p = HypPoint::new(MinkVec::new(2f64.sqrt(), 1.0, 0.0)).unwrap();
        let eta = radial_proj(p);
        assert_abs_diff_eq!(eta.eta1, 1.0 / 2f64.sqrt(), epsilon = 1e-15);
        assert_eq!(eta.eta2, 0.0);
        let q = radial_unproj(KleinPoint::new(0.5, 0.0)).unwrap().vec();
        assert!(close(
            q,
            MinkVec::new(2.0 / 3f64.sqrt(), 1.0 / 3f64.sqrt(), 0.0),
            1e-15
        ));
        assert!(radial_unproj(KleinPoint::new(1.0, 0.0)).is_err());
        assert!(radial_unproj(KleinPoint::new(0.8, 0.7)).is_err());
    }

    #[test]
    fn poincare_chart() {
        assert_eq!(hyp_to_poincare(HypPoint::ORIGIN).z, Complex64::new(0.0, 0.0));
        let p = poincare_to_hyp(PoincarePoint::new(Complex64::new(0.5, 0.0)))
            .unwrap()
            .vec();
        assert!(close(p, MinkVec::new(5.0 / 3.0, 4.0 / 3.0, 0.0), 1e-15));
        let z = klein_to_poincare(KleinPoint::new(1.0 / 2f64.sqrt(), 0.0)).unwrap();
        assert_abs_diff_eq!(z.z.re, 2f64.sqrt() - 1.0, epsilon = 1e-15);
        assert_eq!(z.z.im, 0.0);
        assert!(poincare_to_hyp(PoincarePoint::new(Complex64::new(0.0, 1.0))).is_err());
        assert!(klein_to_poincare(KleinPoint::new(0.0, -1.0)).is_err());
    }

    #[test]
    fn chart_composites_agree() {
        let eta = KleinPoint::new(0.31, -0.52);
        let via_hyp = hyp_to_poincare(radial_unproj(eta).unwrap()).z;
        let direct = klein_to_poincare(eta).unwrap().z;
        assert!((via_hyp - direct).norm() < 1e-15);
        let back = poincare_to_klein(PoincarePoint::new(direct)).unwrap();
        assert!((back.as_complex() - eta.as_complex()).norm() < 1e-15);
    }

    #[test]
    fn pushforward_rotation_field() {
        let pts: Vec<Complex64> = (0..20)
            .map(|k| Complex64::from_polar(0.04 * k as f64, 0.7 * k as f64))
            .collect();
        let vals: Vec<Complex64> = pts.iter().map(|p| Complex64::new(-p.im, p.re)).collect();
        let f = PlaneField::new(Model::Klein, pts, vals).unwrap();
        let g = pushforward_field(&f, ModelMap::KleinToPoincare).unwrap();
        for (z, v) in g.points.iter().zip(&g.values) {
            assert!((v - Complex64::i() * z).norm() < 1e-14);
        }
    }

    #[test]
    fn pushforward_zero_and_guard_band() {
        let f = PlaneField::new(
            Model::Klein,
            vec![Complex64::new(0.2, 0.1)],
            vec![Complex64::new(0.0, 0.0)],
        )
        .unwrap();
        let g = pushforward_field(&f, ModelMap::KleinToPoincare).unwrap();
        assert_eq!(g.values[0], Complex64::new(0.0, 0.0));
        let near = PlaneField::new(
            Model::Klein,
            vec![Complex64::new(1.0 - 1e-10, 0.0)],
            vec![Complex64::new(1.0, 0.0)],
        )
        .unwrap();
        assert!(matches!(
            pushforward_field(&near, ModelMap::KleinToPoincare),
            Err(Error::Domain(_))
        ));
        assert!(pushforward_field(&f, ModelMap::PoincareToKlein).is_err());
    }

    #[test]
    fn pushforward_killing_two_ways() {
        let sigma = MinkVec::new(0.0, 1.0, 0.0);
        let eta = KleinPoint::new(0.0, 0.0);
        let f = PlaneField::new(
            Model::Klein,
            vec![eta.as_complex()],
            vec![killing_klein(sigma, eta)],
        )
        .unwrap();
        let g = pushforward_field(&f, ModelMap::KleinToPoincare).unwrap();
        let p = radial_unproj(eta).unwrap();
        let direct = hyp_to_poincare_tangent(p.vec(), killing_eval(sigma, p));
        assert!((g.values[0] - direct).norm() < 1e-10);
        assert!((g.values[0] - killing_poincare(sigma, Complex64::new(0.0, 0.0))).norm() < 1e-15);
    }

    #[test]
    fn killing_charts_are_consistent() {
        let sigma = MinkVec::new(0.4, -1.1, 0.7);
        for &(x, y) in &[(0.1, 0.2), (-0.5, 0.3), (0.0, -0.8)] {
            let eta = KleinPoint::new(x, y);
            let p = radial_unproj(eta).unwrap();
            let k = killing_eval(sigma, p);
            let klein = radial_proj_tangent(p.vec(), k);
            assert!((klein - killing_klein(sigma, eta)).norm() < 1e-12);
            let z = klein_to_poincare(eta).unwrap().z;
            let pc = hyp_to_poincare_tangent(p.vec(), k);
            assert!((pc - killing_poincare(sigma, z)).norm() < 1e-12);
            assert!((klein_to_poincare_tangent(eta, klein) - pc).norm() < 1e-12);
        }
    }

    #[test]
    fn isometry_examples() {
        let eta = KleinPoint::new(0.2, -0.3);
        assert_eq!(hp_isometry_act(&HPIsometry::IDENTITY, eta, 0.7), (eta, 0.7));
        let tr = HPIsometry::translation(MinkVec::new(-1.0, 0.0, 0.0));
        let (e, t) = hp_isometry_act(&tr, KleinPoint::new(0.0, 0.0), 0.0);
        assert_eq!(e, KleinPoint::new(0.0, 0.0));
        assert_eq!(t, 1.0);
        let rot = HPIsometry::linear(Mat3::rotation(std::f64::consts::FRAC_PI_2)).unwrap();
        let (e, t) = hp_isometry_act(&rot, KleinPoint::new(0.4, 0.0), 2.5);
        assert_abs_diff_eq!(e.eta1, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e.eta2, 0.4, epsilon = 1e-15);
        assert_abs_diff_eq!(t, 2.5, epsilon = 1e-15);
    }

    #[test]
    fn dual_plane_examples() {
        assert_eq!(dual_plane_eval(MinkVec::new(-1.0, 0.0, 0.0), KleinPoint::new(0.0, 0.0)), 1.0);
        assert_eq!(dual_plane_eval(MinkVec::new(0.0, 1.0, 0.0), KleinPoint::new(0.3, 0.4)), 0.3);
        for &(x, y) in &[(0.1, 0.9), (-0.5, 0.0)] {
            assert_eq!(dual_plane_eval(MinkVec::new(-2.5, 0.0, 0.0), KleinPoint::new(x, y)), 2.5);
        }
    }

    #[test]
    fn exp_of_rotation_generator() {
        let a = Mat3::killing(MinkVec::new(-0.9, 0.0, 0.0)).exp();
        assert!(a.add(&Mat3::rotation(0.9).scale(-1.0)).max_abs() < 1e-14);
    }

    #[test]
    fn boost_moves_origin() {
        let eta = KleinPoint::new(0.6, -0.2);
        let b = Mat3::boost_from_origin(eta).unwrap();
        assert!(b.lorentz_defect() < 1e-13);
        let iso = HPIsometry::linear(b).unwrap();
        let e = iso.act_klein(KleinPoint::default());
        assert!((e.as_complex() - eta.as_complex()).norm() < 1e-15);
        let spacelike = MinkVec::new(0.0, 0.8, 0.0);
        let d = Mat3::killing(spacelike).exp().mul_vec(HypPoint::ORIGIN.vec());
        assert_abs_diff_eq!(d.x0.acosh(), 0.8, epsilon = 1e-13);
    }

    #[test]
    fn rejects_non_lorentz() {
        assert!(HPIsometry::linear(Mat3::IDENTITY.scale(2.0)).is_err());
        let flip = Mat3([[-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, -1.0]]);
        assert!(HPIsometry::linear(flip).is_err());
    }

    #[test]
    fn poincare_derivative_matches_difference() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let iso = HPIsometry::random(&mut rng, 1.0, 0.0);
        let z = Complex64::new(0.2, 0.35);
        let h = 1e-6;
        let fd = (iso.act_poincare(z + h).unwrap() - iso.act_poincare(z - h).unwrap()) / (2.0 * h);
        let fd_i = (iso.act_poincare(z + Complex64::new(0.0, h)).unwrap()
            - iso.act_poincare(z - Complex64::new(0.0, h)).unwrap())
            / Complex64::new(0.0, 2.0 * h);
        let d = iso.act_poincare_derivative(z).unwrap();
        assert!((fd - d).norm() < 1e-8);
        assert!((fd_i - d).norm() < 1e-8);
    }
}
