//! Vector fields on the circle, stored through their support functions
//! `X(z) = i z φ(z)`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::f64::consts::TAU;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{mink_inner, HPIsometry, MinkVec};
use crate::io::write_atomic;

/// How samples are interpolated between the nodes `θ_j = 2πj/n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Interp {
    #[serde(rename = "trig")]
    Trigonometric,
    #[serde(rename = "pl")]
    PiecewiseLinear,
}

/// A continuous vector field on `S¹` sampled through its support function.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryField {
    phi: Vec<f64>,
    interp: Interp,
    /// `ĉ_k = (1/n) Σ φ_j e^{-ikθ_j}` for `k = 0..=n/2`.
    coeffs: Vec<Complex64>,
}

pub(crate) fn is_valid_sample_count(n: usize) -> bool {
    n >= 32 && n.is_power_of_two()
}

/// Forward DFT normalised by `1/n`, returning modes `0..=n/2`.
pub(crate) fn half_spectrum(values: &[f64]) -> Vec<Complex64> {
    let n = values.len();
    let mut buf: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    buf.truncate(n / 2 + 1);
    let s = 1.0 / n as f64;
    buf.iter_mut().for_each(|c| *c *= s);
    buf
}

/// Inverse of [`half_spectrum`] on `n` points: `c_0 + Σ 2Re(c_k e^{ikθ}) + c_{n/2}(-1)^j`.
pub(crate) fn synthesize(coeffs: &[Complex64], n: usize) -> Vec<f64> {
    let half = n / 2;
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for (k, &c) in coeffs.iter().enumerate().take(half + 1) {
        if k == 0 || k == half {
            buf[k] += Complex64::new(c.re, 0.0);
        } else {
            buf[k] += c;
            buf[n - k] += c.conj();
        }
    }
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    buf.iter().map(|c| c.re).collect()
}

impl BoundaryField {
    pub fn new(phi: Vec<f64>, interp: Interp) -> Result<Self> {
        let n = phi.len();
        if !is_valid_sample_count(n) {
            return Err(Error::Precondition(format!(
                "sample count {n} is not a power of two >= 32"
            )));
        }
        if let Some(j) = phi.iter().position(|x| !x.is_finite()) {
            return Err(Error::Precondition(format!("phi[{j}] is not finite")));
        }
        let coeffs = half_spectrum(&phi);
        Ok(BoundaryField {
            phi,
            interp,
            coeffs,
        })
    }

    /// Samples `f(θ_j)` on `n` nodes.
    pub fn from_fn(n: usize, interp: Interp, f: impl Fn(f64) -> f64) -> Result<Self> {
        let phi = (0..n).map(|j| f(TAU * j as f64 / n as f64)).collect();
        BoundaryField::new(phi, interp)
    }

    /// `φ(θ) = a0 + Σ_k a_k cos kθ + b_k sin kθ`, with `b[k-1]` the coefficient of `sin kθ`.
    pub fn from_fourier(a: &[f64], b: &[f64], n: usize) -> Result<Self> {
        BoundaryField::from_fn(n, Interp::Trigonometric, |t| {
            let mut s = 0.0;
            for (k, &ak) in a.iter().enumerate() {
                s += ak * (k as f64 * t).cos();
            }
            for (k, &bk) in b.iter().enumerate() {
                s += bk * ((k + 1) as f64 * t).sin();
            }
            s
        })
    }

    /// The single mode `cos kθ`.
    pub fn cos_mode(k: usize, n: usize) -> Result<Self> {
        BoundaryField::from_fn(n, Interp::Trigonometric, |t| (k as f64 * t).cos())
    }

    /// Random band-limited field: modes `0..=max_mode`, coefficients uniform in `[-1, 1]`.
    pub fn random_band_limited<R: Rng + ?Sized>(rng: &mut R, max_mode: usize, n: usize) -> Result<Self> {
        let a: Vec<f64> = (0..=max_mode).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let b: Vec<f64> = (1..=max_mode).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        BoundaryField::from_fourier(&a, &b, n)
    }

    pub fn n(&self) -> usize {
        self.phi.len()
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn interp(&self) -> Interp {
        self.interp
    }

    pub fn theta(&self, j: usize) -> f64 {
        TAU * j as f64 / self.n() as f64
    }

    /// Normalised DFT coefficients for modes `0..=n/2`.
    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn sup_norm(&self) -> f64 {
        self.phi.iter().fold(0.0, |m: f64, x| m.max(x.abs()))
    }

    /// The interpolated support function.
    pub fn eval_phi(&self, theta: f64) -> f64 {
        let n = self.n();
        match self.interp {
            Interp::PiecewiseLinear => {
                let s = theta.rem_euclid(TAU) / TAU * n as f64;
                let j = (s.floor() as usize).min(n - 1);
                let f = s - j as f64;
                self.phi[j] * (1.0 - f) + self.phi[(j + 1) % n] * f
            }
            Interp::Trigonometric => {
                let s = (theta.rem_euclid(TAU) / TAU) * n as f64;
                let j = s.round();
                if (s - j).abs() < 1e-13 {
                    return self.phi[(j as usize) % n];
                }
                let half = n / 2;
                let step = Complex64::from_polar(1.0, theta);
                let mut w = step;
                let mut acc = self.coeffs[0].re;
                for k in 1..half {
                    acc += 2.0 * (self.coeffs[k] * w).re;
                    w *= step;
                }
                acc + self.coeffs[half].re * (half as f64 * theta).cos()
            }
        }
    }

    /// Derivative of the interpolated support function.
    pub fn eval_phi_prime(&self, theta: f64) -> f64 {
        let n = self.n();
        match self.interp {
            Interp::PiecewiseLinear => {
                let s = theta.rem_euclid(TAU) / TAU * n as f64;
                let j = (s.floor() as usize).min(n - 1);
                (self.phi[(j + 1) % n] - self.phi[j]) * n as f64 / TAU
            }
            Interp::Trigonometric => {
                let half = n / 2;
                let step = Complex64::from_polar(1.0, theta);
                let mut w = step;
                let mut acc = 0.0;
                for k in 1..half {
                    acc += 2.0 * (self.coeffs[k] * Complex64::new(0.0, k as f64) * w).re;
                    w *= step;
                }
                acc - self.coeffs[half].re * half as f64 * (half as f64 * theta).sin()
            }
        }
    }

    /// `X(e^{iθ}) = i e^{iθ} φ(θ)`.
    pub fn field_eval(&self, theta: f64) -> Complex64 {
        Complex64::i() * Complex64::from_polar(1.0, theta) * self.eval_phi(theta)
    }

    /// `X` at a unit complex number.
    pub fn field_at(&self, z: Complex64) -> Complex64 {
        let theta = z.im.atan2(z.re);
        Complex64::i() * z * self.eval_phi(theta)
    }

    /// Support function values at the `m` nodes `2πj/m`.
    pub fn sample_uniform(&self, m: usize) -> Vec<f64> {
        let n = self.n();
        if m == n {
            return self.phi.clone();
        }
        if m < n && n % m == 0 {
            return (0..m).map(|j| self.phi[j * (n / m)]).collect();
        }
        if self.interp == Interp::Trigonometric && m > n && m % n == 0 {
            let mut c = self.coeffs.clone();
            // The Nyquist coefficient is counted once on n points but twice on m.
            c[n / 2] = Complex64::new(c[n / 2].re / 2.0, 0.0);
            let mut vals = synthesize(&c, m);
            for j in 0..n {
                vals[j * (m / n)] = self.phi[j];
            }
            return vals;
        }
        (0..m)
            .map(|j| self.eval_phi(TAU * j as f64 / m as f64))
            .collect()
    }

    /// Same field on `m` samples, keeping the interpolation tag.
    pub fn resample(&self, m: usize) -> Result<Self> {
        BoundaryField::new(self.sample_uniform(m), self.interp)
    }

    /// `α·self + β·other` on matching grids.
    pub fn linear_combination(&self, alpha: f64, other: &BoundaryField, beta: f64) -> Result<Self> {
        if self.n() != other.n() {
            return Err(Error::Precondition(format!(
                "sample counts differ: {} vs {}",
                self.n(),
                other.n()
            )));
        }
        let interp = if self.interp == other.interp {
            self.interp
        } else {
            Interp::PiecewiseLinear
        };
        let phi = self
            .phi
            .iter()
            .zip(&other.phi)
            .map(|(a, b)| alpha * a + beta * b)
            .collect();
        BoundaryField::new(phi, interp)
    }

    /// Samples rotated by `alpha`: `φ'(θ) = φ(θ − α)`.
    pub fn rotated(&self, alpha: f64) -> Result<Self> {
        let n = self.n();
        let phi = (0..n).map(|j| self.eval_phi(self.theta(j) - alpha)).collect();
        BoundaryField::new(phi, self.interp)
    }

    /// Parses either JSON form. Keys are named in the error on schema violations.
    pub fn from_json(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text)
            .map_err(|e| Error::schema("<root>", format!("invalid JSON: {e}")))?;
        let obj = v
            .as_object()
            .ok_or_else(|| Error::schema("<root>", "expected an object"))?;
        if let Some(f) = obj.get("fourier") {
            let f = f
                .as_object()
                .ok_or_else(|| Error::schema("fourier", "expected an object"))?;
            let a = real_array(f.get("a"), "fourier.a")?;
            let b = match f.get("b") {
                None => Vec::new(),
                some => real_array(some, "fourier.b")?,
            };
            if a.is_empty() {
                return Err(Error::schema("fourier.a", "must contain a0"));
            }
            let k = a.len().max(b.len() + 1);
            let n = match obj.get("n") {
                None => default_fourier_samples(k),
                Some(n) => sample_count(n)?,
            };
            return BoundaryField::from_fourier(&a, &b, n);
        }
        let n = sample_count(obj.get("n").ok_or_else(|| Error::schema("n", "missing"))?)?;
        let interp = match obj.get("interp") {
            Some(Value::String(s)) if s == "trig" => Interp::Trigonometric,
            Some(Value::String(s)) if s == "pl" => Interp::PiecewiseLinear,
            Some(_) => return Err(Error::schema("interp", "expected \"trig\" or \"pl\"")),
            None => return Err(Error::schema("interp", "missing")),
        };
        let phi = real_array(obj.get("phi"), "phi")?;
        if phi.len() != n {
            return Err(Error::schema(
                "phi",
                format!("has {} entries but n = {n}", phi.len()),
            ));
        }
        BoundaryField::new(phi, interp)
    }

    pub fn load(path: &Path) -> Result<Self> {
        BoundaryField::from_json(&std::fs::read_to_string(path)?)
    }

    /// The samples form, which reloads bit-for-bit.
    pub fn to_json(&self) -> String {
        let doc = serde_json::json!({
            "n": self.n(),
            "interp": match self.interp { Interp::Trigonometric => "trig", Interp::PiecewiseLinear => "pl" },
            "phi": self.phi,
        });
        serde_json::to_string_pretty(&doc).expect("finite samples serialise")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_json().as_bytes())
    }
}

/// Samples used for the Fourier file form when `n` is omitted.
fn default_fourier_samples(modes: usize) -> usize {
    (8 * modes).next_power_of_two().max(512)
}

fn sample_count(v: &Value) -> Result<usize> {
    let n = v
        .as_u64()
        .ok_or_else(|| Error::schema("n", "expected a non-negative integer"))? as usize;
    if !is_valid_sample_count(n) {
        return Err(Error::Precondition(format!(
            "n = {n} is not a power of two >= 32"
        )));
    }
    Ok(n)
}

fn real_array(v: Option<&Value>, key: &str) -> Result<Vec<f64>> {
    let arr = v
        .ok_or_else(|| Error::schema(key, "missing"))?
        .as_array()
        .ok_or_else(|| Error::schema(key, "expected an array of numbers"))?;
    arr.iter()
        .enumerate()
        .map(|(i, x)| {
            x.as_f64()
                .ok_or_else(|| Error::schema(format!("{key}[{i}]"), "expected a number"))
        })
        .collect()
}

/// `φ_j = −σ0 + σ1 cos θ_j + σ2 sin θ_j`, the support function of `Λ(σ)`.
pub fn killing_boundary(sigma: MinkVec, n: usize) -> Result<BoundaryField> {
    BoundaryField::from_fn(n, Interp::Trigonometric, |t| {
        mink_inner(MinkVec::new(1.0, t.cos(), t.sin()), sigma)
    })
}

/// The support function of `A_*X + Λ(v)` resampled on the same nodes.
pub fn boundary_action(x: &BoundaryField, iso: &HPIsometry) -> Result<BoundaryField> {
    let ainv = iso.a.lorentz_inverse();
    let n = x.n();
    let phi = (0..n)
        .map(|j| {
            let t = x.theta(j);
            let dir = MinkVec::new(1.0, t.cos(), t.sin());
            let w = ainv.mul_vec(dir);
            let src = w.x2.atan2(w.x1);
            x.eval_phi(src) * w.x0 + mink_inner(dir, iso.v)
        })
        .collect();
    BoundaryField::new(phi, x.interp)
}

/// Four distinct points of the unit circle in counter-clockwise order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadruple {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

/// Minimum separation accepted between quadruple points.
pub const QUADRUPLE_MIN_SEPARATION: f64 = 1e-12;

impl Quadruple {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let pts = [a, b, c, d];
        for i in 0..4 {
            for j in i + 1..4 {
                if (pts[i] - pts[j]).norm() < QUADRUPLE_MIN_SEPARATION {
                    return Err(Error::Precondition(format!(
                        "quadruple points {i} and {j} are closer than {QUADRUPLE_MIN_SEPARATION:e}"
                    )));
                }
            }
        }
        let ang = |z: Complex64| (z / a).arg().rem_euclid(TAU);
        let (tb, tc, td) = (ang(b), ang(c), ang(d));
        if !(tb < tc && tc < td) {
            return Err(Error::Precondition(
                "quadruple is not in counter-clockwise order".into(),
            ));
        }
        Ok(Quadruple { a, b, c, d })
    }

    /// `(1, i, −1, −i)`.
    pub fn symmetric() -> Self {
        Quadruple {
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(0.0, 1.0),
            c: Complex64::new(-1.0, 0.0),
            d: Complex64::new(0.0, -1.0),
        }
    }

    pub fn cross_ratio(&self) -> Complex64 {
        ((self.b - self.a) * (self.d - self.c)) / ((self.c - self.b) * (self.d - self.a))
    }

    /// Image of the symmetric quadruple under `z ↦ e^{iα}(z − w)/(1 − w̄z)`.
    pub fn mobius_image(w: Complex64, alpha: f64) -> Self {
        let rot = Complex64::from_polar(1.0, alpha);
        let m = |z: Complex64| {
            let v = rot * (z - w) / (1.0 - w.conj() * z);
            v / v.norm()
        };
        let s = Quadruple::symmetric();
        Quadruple {
            a: m(s.a),
            b: m(s.b),
            c: m(s.c),
            d: m(s.d),
        }
    }
}

/// `X[Q]`, the alternating sum of the four difference quotients.
pub fn cross_ratio_distortion(x: &BoundaryField, q: &Quadruple) -> Result<Complex64> {
    let pts = [q.a, q.b, q.c, q.d];
    for i in 0..4 {
        for j in i + 1..4 {
            if (pts[i] - pts[j]).norm() < QUADRUPLE_MIN_SEPARATION {
                return Err(Error::Precondition("degenerate quadruple".into()));
            }
        }
    }
    let [xa, xb, xc, xd] = pts.map(|z| x.field_at(z));
    Ok((xb - xa) / (q.b - q.a) - (xc - xb) / (q.c - q.b) + (xd - xc) / (q.d - q.c)
        - (xa - xd) / (q.a - q.d))
}

/// Largest Poincaré radius `|w|` of the random Möbius centres.
pub const QUADRUPLE_MAX_RADIUS: f64 = 0.999;

/// Draws the `i`-th quadruple of the seeded stream. The hyperbolic distance of
/// the centre is uniform in `[0, 2 artanh(0.999)]`, both angles uniform.
pub fn quadruple_stream(seed: u64, m: usize) -> impl Iterator<Item = Quadruple> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dmax = 2.0 * QUADRUPLE_MAX_RADIUS.atanh();
    (0..m).map(move |_| {
        let d = rng.gen_range(0.0..=dmax);
        let beta = rng.gen_range(0.0..TAU);
        let alpha = rng.gen_range(0.0..TAU);
        Quadruple::mobius_image(Complex64::from_polar((d / 2.0).tanh(), beta), alpha)
    })
}

/// Monte-Carlo lower estimate of `sup_{cr(Q)=1} |X[Q]|` over `m` seeded quadruples.
/// The stream for `m` is a prefix of the stream for any larger `m`.
pub fn cross_ratio_norm_estimate(x: &BoundaryField, m: usize, seed: u64) -> Result<f64> {
    if m == 0 {
        return Err(Error::Precondition("m must be >= 1".into()));
    }
    let mut best: f64 = 0.0;
    for q in quadruple_stream(seed, m) {
        best = best.max(cross_ratio_distortion(x, &q)?.norm());
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Mat3;
    use approx::assert_abs_diff_eq;

    #[test]
    fn field_eval_examples() {
        let one = killing_boundary(MinkVec::new(-1.0, 0.0, 0.0), 64).unwrap();
        assert!((one.field_eval(0.0) - Complex64::i()).norm() < 1e-15);
        let zero = BoundaryField::new(vec![0.0; 64], Interp::PiecewiseLinear).unwrap();
        assert_eq!(zero.field_eval(1.234).norm(), 0.0);
        let c = killing_boundary(MinkVec::new(0.0, 1.0, 0.0), 64).unwrap();
        assert!(c.field_eval(std::f64::consts::FRAC_PI_2).norm() < 1e-14);
    }

    #[test]
    fn killing_boundary_examples() {
        let one = killing_boundary(MinkVec::new(-1.0, 0.0, 0.0), 32).unwrap();
        assert!(one.phi().iter().all(|&x| x == 1.0));
        let zero = killing_boundary(MinkVec::ZERO, 32).unwrap();
        assert!(zero.phi().iter().all(|&x| x == 0.0));
        let c = killing_boundary(MinkVec::new(0.0, 1.0, 0.0), 32).unwrap();
        for j in 0..32 {
            assert_eq!(c.phi()[j], c.theta(j).cos());
        }
    }

    #[test]
    fn sample_nodes_are_reproduced() {
        let x = BoundaryField::from_fourier(&[0.1, 0.4, -0.3], &[0.2, 0.7], 64).unwrap();
        for j in 0..64 {
            let t = x.theta(j);
            let expect = Complex64::i() * Complex64::from_polar(1.0, t) * x.phi()[j];
            assert_eq!(x.field_eval(t), expect);
        }
    }

    #[test]
    fn trig_interpolation_is_exact_for_band_limited() {
        let x = BoundaryField::from_fourier(&[0.1, 0.4, -0.3], &[0.2, 0.7], 64).unwrap();
        for &t in &[0.1f64, 1.7, 4.4] {
            let exact = 0.1 + 0.4 * t.cos() - 0.3 * (2.0 * t).cos() + 0.2 * t.sin() + 0.7 * (2.0 * t).sin();
            assert_abs_diff_eq!(x.eval_phi(t), exact, epsilon = 1e-13);
            let dexact = -0.4 * t.sin() + 0.6 * (2.0 * t).sin() + 0.2 * t.cos() + 1.4 * (2.0 * t).cos();
            assert_abs_diff_eq!(x.eval_phi_prime(t), dexact, epsilon = 1e-12);
        }
    }

    #[test]
    fn resampling_round_trips() {
        let x = BoundaryField::from_fourier(&[0.0, 0.0, 0.0, 1.0], &[0.0, 0.5], 64).unwrap();
        let up = x.resample(256).unwrap();
        for j in 0..256 {
            assert_abs_diff_eq!(up.phi()[j], x.eval_phi(up.theta(j)), epsilon = 1e-13);
        }
        assert_eq!(up.resample(64).unwrap().phi(), x.phi());
    }

    #[test]
    fn boundary_action_examples() {
        let x = BoundaryField::from_fourier(&[0.0, 0.0, 1.0], &[], 64).unwrap();
        let same = boundary_action(&x, &HPIsometry::IDENTITY).unwrap();
        for (a, b) in same.phi().iter().zip(x.phi()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-14);
        }
        let sigma = MinkVec::new(0.3, -0.2, 0.9);
        let zero = BoundaryField::new(vec![0.0; 64], Interp::Trigonometric).unwrap();
        let k = boundary_action(&zero, &HPIsometry::translation(sigma)).unwrap();
        let expect = killing_boundary(sigma, 64).unwrap();
        for (a, b) in k.phi().iter().zip(expect.phi()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-15);
        }
        let a = Mat3::killing(MinkVec::new(0.2, 0.5, -0.4)).exp();
        let moved = boundary_action(
            &killing_boundary(sigma, 64).unwrap(),
            &HPIsometry::linear(a).unwrap(),
        )
        .unwrap();
        let expect = killing_boundary(a.mul_vec(sigma), 64).unwrap();
        for (x, y) in moved.phi().iter().zip(expect.phi()) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-12);
        }
    }

    #[test]
    fn rotation_acts_by_shifting() {
        let x = BoundaryField::from_fourier(&[0.0, 0.3, 1.0], &[0.4], 64).unwrap();
        let r = HPIsometry::linear(Mat3::rotation(0.4)).unwrap();
        let y = boundary_action(&x, &r).unwrap();
        for j in 0..64 {
            assert_abs_diff_eq!(y.phi()[j], x.eval_phi(x.theta(j) - 0.4), epsilon = 1e-13);
        }
    }

    #[test]
    fn cross_ratio_examples() {
        let q = Quadruple::symmetric();
        assert_abs_diff_eq!((q.cross_ratio() - 1.0).norm(), 0.0, epsilon = 1e-15);
        let k = killing_boundary(MinkVec::new(0.5, -1.0, 2.0), 64).unwrap();
        let zero = BoundaryField::new(vec![0.0; 64], Interp::Trigonometric).unwrap();
        for qq in quadruple_stream(9, 50) {
            assert!(cross_ratio_distortion(&k, &qq).unwrap().norm() < 1e-9);
            assert_eq!(cross_ratio_distortion(&zero, &qq).unwrap().norm(), 0.0);
        }
    }

    #[test]
    fn cross_ratio_cos2_symmetric_by_hand() {
        let x = BoundaryField::cos_mode(2, 64).unwrap();
        // X(z) = i z cos 2θ: X(1) = i, X(i) = 1, X(−1) = −i, X(−i) = −1.
        let i = Complex64::i();
        let xs = [i, Complex64::new(1.0, 0.0), -i, Complex64::new(-1.0, 0.0)];
        let z = [Complex64::new(1.0, 0.0), i, Complex64::new(-1.0, 0.0), -i];
        let expect = (xs[1] - xs[0]) / (z[1] - z[0]) - (xs[2] - xs[1]) / (z[2] - z[1])
            + (xs[3] - xs[2]) / (z[3] - z[2])
            - (xs[0] - xs[3]) / (z[0] - z[3]);
        let got = cross_ratio_distortion(&x, &Quadruple::symmetric()).unwrap();
        assert!((got - expect).norm() < 1e-13);
        assert!((got + Complex64::new(4.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn quadruple_validation() {
        let i = Complex64::i();
        let one = Complex64::new(1.0, 0.0);
        assert!(Quadruple::new(one, -i, -one, i).is_err());
        assert!(Quadruple::new(one, one, -one, -i).is_err());
        assert!(Quadruple::new(one, i, -one, -i).is_ok());
        let q = Quadruple {
            a: one,
            b: one + 1e-14,
            c: -one,
            d: -i,
        };
        let x = BoundaryField::cos_mode(2, 64).unwrap();
        assert!(cross_ratio_distortion(&x, &q).is_err());
    }

    #[test]
    fn norm_estimate_basic() {
        let k = killing_boundary(MinkVec::new(1.0, 0.5, 0.0), 128).unwrap();
        assert!(cross_ratio_norm_estimate(&k, 2000, 1).unwrap() < 1e-8);
        let zero = BoundaryField::new(vec![0.0; 64], Interp::Trigonometric).unwrap();
        assert_eq!(cross_ratio_norm_estimate(&zero, 100, 1).unwrap(), 0.0);
        assert!(cross_ratio_norm_estimate(&zero, 0, 1).is_err());
        let x = BoundaryField::cos_mode(2, 128).unwrap();
        let a = cross_ratio_norm_estimate(&x, 500, 4).unwrap();
        let b = cross_ratio_norm_estimate(&x, 1000, 4).unwrap();
        assert!(b >= a && a > 0.0);
    }

    #[test]
    fn json_forms() {
        let f = BoundaryField::from_json(r#"{"fourier":{"a":[1],"b":[]}}"#).unwrap();
        assert!(f.phi().iter().all(|&x| x == 1.0));
        let x = BoundaryField::from_fourier(&[0.1, 0.4, -0.3], &[0.2, 0.7], 64).unwrap();
        let back = BoundaryField::from_json(&x.to_json()).unwrap();
        assert_eq!(back, x);
        let pl = r#"{"n":32,"interp":"pl","phi":[0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1]}"#;
        assert_eq!(BoundaryField::from_json(pl).unwrap().interp(), Interp::PiecewiseLinear);
    }

    #[test]
    fn json_errors_name_the_key() {
        let cases = [
            (r#"{"n":32,"interp":"trig"}"#, "phi"),
            (r#"{"interp":"trig","phi":[]}"#, "n"),
            (r#"{"n":32,"interp":"cubic","phi":[]}"#, "interp"),
            (r#"{"n":32,"interp":"trig","phi":[1,2]}"#, "phi"),
            (r#"{"fourier":{"b":[1]}}"#, "fourier.a"),
            (r#"{"fourier":{"a":[1,"x"]}}"#, "fourier.a[1]"),
            (r#"[1,2]"#, "<root>"),
        ];
        for (text, key) in cases {
            match BoundaryField::from_json(text) {
                Err(Error::Schema { key: k, .. }) => assert_eq!(k, key, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
        let bad_n = r#"{"n":48,"interp":"trig","phi":[]}"#;
        assert_eq!(BoundaryField::from_json(bad_n).unwrap_err().exit_code(), 2);
    }
}
