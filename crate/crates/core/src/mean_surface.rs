//! The mean surface over the Klein disk: `ū` solving
//! `(1−x²)ū_xx + (1−y²)ū_yy − 2xy ū_xy = 0` with `ū = φ` on the circle.
//!
//! In polar coordinates the operator reads `r²(1−r²)ū_rr + r ū_r + ū_θθ`, so
//! each Fourier mode `c_k(r)` solves `r²(1−r²)c'' + r c' − k² c = 0`. The
//! solver discretises this per mode on the grid of [`PolarGrid`].

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::circle::{half_spectrum, synthesize, BoundaryField};
use crate::error::{Error, Result};
use crate::geometry::KleinPoint;
use crate::grid::{fd_weights, PolarGrid};
use crate::ode::Dopri5;

/// Shooting start for [`radial_mode_oracle`].
pub const EPSILON_POLE: f64 = 1e-6;
/// Tolerance of the adaptive integrator in [`radial_mode_oracle`].
pub const ORACLE_TOL: f64 = 1e-10;
/// Outer radius of the region used by [`hyperbolic_residual`].
pub const RESIDUAL_RADIUS: f64 = 0.9;

/// Value, gradient and Hessian of a scalar field in the Klein chart.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Jet {
    pub u: f64,
    pub ux: f64,
    pub uy: f64,
    pub uxx: f64,
    pub uxy: f64,
    pub uyy: f64,
}

/// Polar derivatives of one field at every node, laid out like the values.
#[derive(Clone, Debug)]
pub struct PolarDerivatives {
    pub u_r: Vec<f64>,
    pub u_rr: Vec<f64>,
    pub u_t: Vec<f64>,
    pub u_tt: Vec<f64>,
    pub u_rt: Vec<f64>,
}

/// A scalar field on a [`PolarGrid`], with its per-ring Fourier modes and the
/// radial derivative fields of those modes.
#[derive(Clone, Debug)]
pub struct DiskField {
    grid: PolarGrid,
    values: Vec<f64>,
    /// `modes[i][k]`, `k = 0..=n_θ/2`, on ring `i`.
    modes: Vec<Vec<Complex64>>,
    d1: Vec<Vec<Complex64>>,
    d2: Vec<Vec<Complex64>>,
}

/// Diagnostics of a mean-surface solve.
#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    pub residual_sup: f64,
    pub iterations: usize,
    pub n_r: usize,
    pub n_theta: usize,
    pub solver: &'static str,
}

fn parity(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Weight of mode `k` in the real synthesis on `n` points.
fn multiplicity(k: usize, n: usize) -> f64 {
    if k == 0 || 2 * k == n {
        1.0
    } else {
        2.0
    }
}

/// Radial exponent used to factor mode `k` near the pole: `c_k = r^p g(r²)`.
fn pole_exponent(k: usize) -> i32 {
    match k {
        0 => 0,
        1 => 1,
        _ => 2 + (k % 2) as i32,
    }
}

impl DiskField {
    /// Builds a field from nodal values; ring 0 should be constant in `θ`.
    pub fn from_values(grid: PolarGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Precondition(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        let nt = grid.n_theta;
        let modes: Vec<Vec<Complex64>> = values.chunks(nt).map(half_spectrum).collect();
        Ok(DiskField::assemble(grid, values, modes))
    }

    /// Builds a field from the Fourier modes of every ring.
    fn from_modes(grid: PolarGrid, modes: Vec<Vec<Complex64>>, boundary: Option<&[f64]>) -> Self {
        let nt = grid.n_theta;
        let mut values: Vec<f64> = modes.par_iter().flat_map(|m| synthesize(m, nt)).collect();
        if let Some(b) = boundary {
            let start = grid.index(grid.n_r, 0);
            values[start..start + nt].copy_from_slice(b);
        }
        DiskField::assemble(grid, values, modes)
    }

    /// Evaluates `f` at every node.
    pub fn from_fn(grid: PolarGrid, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..=grid.n_r {
            for j in 0..grid.n_theta {
                let (x, y) = grid.point(i, j);
                values.push(f(x, y));
            }
        }
        DiskField::from_values(grid, values)
    }

    fn assemble(grid: PolarGrid, values: Vec<f64>, modes: Vec<Vec<Complex64>>) -> Self {
        let nm = grid.n_theta / 2 + 1;
        let (d1, d2) = radial_derivatives(&grid, &modes, nm);
        DiskField {
            grid,
            values,
            modes,
            d1,
            d2,
        }
    }

    pub fn grid(&self) -> &PolarGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    pub fn modes(&self, ring: usize) -> &[Complex64] {
        &self.modes[ring]
    }

    pub fn ring(&self, i: usize) -> &[f64] {
        let s = self.grid.index(i, 0);
        &self.values[s..s + self.grid.n_theta]
    }

    /// Interpolated value at `η`.
    pub fn eval(&self, eta: KleinPoint) -> Result<f64> {
        Ok(self.jet(eta)?.u)
    }

    /// Value, gradient and Hessian at `η` from the modal representation:
    /// cubic Lagrange interpolation of the radial derivative fields away from
    /// the pole, a parity-adapted quintic in `r²` near it, and exact Fourier
    /// sums in `θ`.
    pub fn jet(&self, eta: KleinPoint) -> Result<Jet> {
        let r = eta.norm();
        if !(r <= 1.0 + 1e-12) {
            return Err(Error::Domain(format!("|eta| = {r} exceeds 1")));
        }
        let r = r.min(1.0);
        let theta = if r > 0.0 { eta.eta2.atan2(eta.eta1) } else { 0.0 };
        let terms = if r < self.grid.r(3) {
            self.pole_terms(r)
        } else {
            self.direct_terms(r)
        };
        Ok(self.combine(&terms, r, theta))
    }

    fn direct_terms(&self, r: f64) -> Vec<ModeTerms> {
        let g = &self.grid;
        let n = g.n_r;
        let i = g.ring_interval(r);
        let lo = i.saturating_sub(1).min(n - 3);
        let idx: Vec<usize> = (lo..lo + 4).collect();
        let nodes: Vec<f64> = idx.iter().map(|&m| g.r(m)).collect();
        let w = &fd_weights(r, &nodes, 0)[0];
        let nm = g.n_theta / 2 + 1;
        (0..nm)
            .map(|k| {
                let mut c = Complex64::new(0.0, 0.0);
                let mut c1 = c;
                let mut c2 = c;
                for (a, &m) in idx.iter().enumerate() {
                    c += w[a] * self.modes[m][k];
                    c1 += w[a] * self.d1[m][k];
                    c2 += w[a] * self.d2[m][k];
                }
                let kk = (k * k) as f64;
                let over_r = c / r;
                let d1_over_r = c1 / r;
                ModeTerms {
                    c,
                    c_r: c1,
                    c_rr: c2,
                    c_over_r: over_r,
                    lap_part: d1_over_r - kk * over_r / r,
                    mixed_part: d1_over_r - over_r / r,
                }
            })
            .collect()
    }

    fn pole_terms(&self, r: f64) -> Vec<ModeTerms> {
        let g = &self.grid;
        let rho = r * r;
        let nodes: Vec<f64> = (1..=6).map(|m| g.r(m) * g.r(m)).collect();
        let w = fd_weights(rho, &nodes, 2);
        let nm = g.n_theta / 2 + 1;
        (0..nm)
            .map(|k| {
                let p = pole_exponent(k);
                let mut gv = [Complex64::new(0.0, 0.0); 3];
                for m in 1..=6 {
                    let q = self.modes[m][k] / g.r(m).powi(p);
                    for (d, acc) in gv.iter_mut().enumerate() {
                        *acc += w[d][m - 1] * q;
                    }
                }
                let [g0, g1, g2] = gv;
                let pf = p as f64;
                let kk = (k * k) as f64;
                let pw = |e: i32| if e < 0 { 0.0 } else { r.powi(e) };
                let c = pw(p) * g0;
                let c_r = if p == 0 { Complex64::new(0.0, 0.0) } else { pf * pw(p - 1) * g0 }
                    + 2.0 * pw(p + 1) * g1;
                let c_rr = if p >= 2 { pf * (pf - 1.0) * pw(p - 2) * g0 } else { Complex64::new(0.0, 0.0) }
                    + (4.0 * pf + 2.0) * pw(p) * g1
                    + 4.0 * pw(p + 2) * g2;
                let c_over_r = if p == 0 { Complex64::new(0.0, 0.0) } else { pw(p - 1) * g0 };
                let lap_part = if (pf - kk).abs() < 0.5 {
                    Complex64::new(0.0, 0.0)
                } else {
                    (pf - kk) * pw(p - 2) * g0
                } + 2.0 * pw(p) * g1;
                let mixed_part = if p <= 1 {
                    Complex64::new(0.0, 0.0)
                } else {
                    (pf - 1.0) * pw(p - 2) * g0
                } + 2.0 * pw(p) * g1;
                ModeTerms {
                    c,
                    c_r,
                    c_rr,
                    c_over_r,
                    lap_part,
                    mixed_part,
                }
            })
            .collect()
    }

    fn combine(&self, terms: &[ModeTerms], _r: f64, theta: f64) -> Jet {
        let nt = self.grid.n_theta;
        let mut u = 0.0;
        let mut ur = 0.0;
        let mut urr = 0.0;
        let mut ut_r = 0.0;
        let mut lap = 0.0;
        let mut mix = 0.0;
        let step = Complex64::from_polar(1.0, theta);
        let mut e = Complex64::new(1.0, 0.0);
        for (k, t) in terms.iter().enumerate() {
            let m = multiplicity(k, nt);
            let ik = Complex64::new(0.0, k as f64);
            let re = |z: Complex64| m * (z * e).re;
            if 2 * k == nt {
                // The Nyquist mode is a pure cosine.
                let cs = (k as f64 * theta).cos();
                let sn = (k as f64 * theta).sin();
                let kf = k as f64;
                u += m * t.c.re * cs;
                ur += m * t.c_r.re * cs;
                urr += m * t.c_rr.re * cs;
                ut_r += -m * kf * t.c_over_r.re * sn;
                lap += m * t.lap_part.re * cs;
                mix += -m * kf * t.mixed_part.re * sn;
            } else {
                u += re(t.c);
                ur += re(t.c_r);
                urr += re(t.c_rr);
                ut_r += re(ik * t.c_over_r);
                lap += re(t.lap_part);
                mix += re(ik * t.mixed_part);
            }
            e *= step;
        }
        let (s, c) = theta.sin_cos();
        Jet {
            u,
            ux: c * ur - s * ut_r,
            uy: s * ur + c * ut_r,
            uxx: c * c * urr + s * s * lap - 2.0 * c * s * mix,
            uyy: s * s * urr + c * c * lap + 2.0 * c * s * mix,
            uxy: c * s * (urr - lap) + (c * c - s * s) * mix,
        }
    }

    /// Polar derivatives at every node: radial ones from the fourth-order
    /// derivative fields, angular ones spectrally. Ring 0 entries are zero.
    pub fn polar_derivatives(&self) -> PolarDerivatives {
        let g = &self.grid;
        let nt = g.n_theta;
        let rings: Vec<[Vec<f64>; 5]> = (0..=g.n_r)
            .into_par_iter()
            .map(|i| {
                if i == 0 {
                    return std::array::from_fn(|_| vec![0.0; nt]);
                }
                let ik = |m: &[Complex64], pow: u32| -> Vec<Complex64> {
                    m.iter()
                        .enumerate()
                        .map(|(k, &c)| c * Complex64::new(0.0, k as f64).powu(pow))
                        .collect()
                };
                [
                    synthesize(&self.d1[i], nt),
                    synthesize(&self.d2[i], nt),
                    synthesize(&ik(&self.modes[i], 1), nt),
                    synthesize(&ik(&self.modes[i], 2), nt),
                    synthesize(&ik(&self.d1[i], 1), nt),
                ]
            })
            .collect();
        let mut out = PolarDerivatives {
            u_r: Vec::with_capacity(g.len()),
            u_rr: Vec::with_capacity(g.len()),
            u_t: Vec::with_capacity(g.len()),
            u_tt: Vec::with_capacity(g.len()),
            u_rt: Vec::with_capacity(g.len()),
        };
        for [a, b, c, d, e] in rings {
            out.u_r.extend(a);
            out.u_rr.extend(b);
            out.u_t.extend(c);
            out.u_tt.extend(d);
            out.u_rt.extend(e);
        }
        out
    }

    /// Jets at every node; the pole ring uses the limit at `η = 0`.
    pub fn nodal_jets(&self) -> Vec<Jet> {
        let g = &self.grid;
        let d = self.polar_derivatives();
        let pole = self.jet(KleinPoint::default()).unwrap_or_default();
        let mut out = Vec::with_capacity(g.len());
        for i in 0..=g.n_r {
            let r = g.r(i);
            for j in 0..g.n_theta {
                if i == 0 {
                    out.push(pole);
                    continue;
                }
                let q = g.index(i, j);
                let (s, c) = g.theta(j).sin_cos();
                let (ur, urr, ut, utt, urt) = (d.u_r[q], d.u_rr[q], d.u_t[q], d.u_tt[q], d.u_rt[q]);
                let lap = ur / r + utt / (r * r);
                let mix = urt / r - ut / (r * r);
                out.push(Jet {
                    u: self.values[q],
                    ux: c * ur - s * ut / r,
                    uy: s * ur + c * ut / r,
                    uxx: c * c * urr + s * s * lap - 2.0 * c * s * mix,
                    uyy: s * s * urr + c * c * lap + 2.0 * c * s * mix,
                    uxy: c * s * (urr - lap) + (c * c - s * s) * mix,
                });
            }
        }
        out
    }
}

struct ModeTerms {
    c: Complex64,
    c_r: Complex64,
    c_rr: Complex64,
    /// `c/r`
    c_over_r: Complex64,
    /// `c'/r − k² c/r²`
    lap_part: Complex64,
    /// `c'/r − c/r²`
    mixed_part: Complex64,
}

/// Fourth-order first and second radial derivatives of every mode, using
/// ghost values `c_k(−r) = (−1)^k c_k(r)` across the pole and one-sided
/// stencils at the boundary.
fn radial_derivatives(
    grid: &PolarGrid,
    modes: &[Vec<Complex64>],
    nm: usize,
) -> (Vec<Vec<Complex64>>, Vec<Vec<Complex64>>) {
    let n = grid.n_r as isize;
    let rows: Vec<(Vec<Complex64>, Vec<Complex64>)> = (0..=n)
        .into_par_iter()
        .map(|i| {
            let lo = (i - 2).min(n - 4);
            let idx: Vec<isize> = (lo..lo + 5).collect();
            let nodes: Vec<f64> = idx
                .iter()
                .map(|&m| if m < 0 { -grid.r((-m) as usize) } else { grid.r(m as usize) })
                .collect();
            let w = fd_weights(grid.r(i as usize), &nodes, 2);
            let mut d1 = vec![Complex64::new(0.0, 0.0); nm];
            let mut d2 = vec![Complex64::new(0.0, 0.0); nm];
            for k in 0..nm {
                for (a, &m) in idx.iter().enumerate() {
                    let v = if m < 0 {
                        parity(k) * modes[(-m) as usize][k]
                    } else {
                        modes[m as usize][k]
                    };
                    d1[k] += w[1][a] * v;
                    d2[k] += w[2][a] * v;
                }
            }
            (d1, d2)
        })
        .collect();
    rows.into_iter().unzip()
}

/// Boundary modes on `n_θ` points and, when the sample grids coincide, the
/// samples themselves.
fn boundary_modes(x: &BoundaryField, n_theta: usize) -> (Vec<Complex64>, Option<Vec<f64>>) {
    let n = x.n();
    let half = n_theta / 2;
    let src = x.coefficients();
    if n == n_theta {
        return (src.to_vec(), Some(x.phi().to_vec()));
    }
    let mut c = vec![Complex64::new(0.0, 0.0); half + 1];
    if n > n_theta {
        c[..half].copy_from_slice(&src[..half]);
        c[half] = Complex64::new(2.0 * src[half].re, 0.0);
    } else {
        c[..n / 2].copy_from_slice(&src[..n / 2]);
        c[n / 2] = Complex64::new(src[n / 2].re / 2.0, 0.0);
    }
    (c, None)
}

/// Solves the tridiagonal system with real sub/diag/super and complex rhs.
fn thomas(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &mut [Complex64]) -> Result<()> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut b = diag[0];
    if b == 0.0 {
        return Err(Error::Numerical("zero pivot in tridiagonal solve".into()));
    }
    c[0] = sup[0] / b;
    rhs[0] /= b;
    for i in 1..n {
        b = diag[i] - sub[i] * c[i - 1];
        if b == 0.0 || !b.is_finite() {
            return Err(Error::Numerical(format!("zero pivot at row {i}")));
        }
        c[i] = if i + 1 < n { sup[i] / b } else { 0.0 };
        let prev = rhs[i - 1];
        rhs[i] = (rhs[i] - sub[i] * prev) / b;
    }
    for i in (0..n - 1).rev() {
        let next = rhs[i + 1];
        rhs[i] -= c[i] * next;
    }
    Ok(())
}

/// Highest mode solved in the factored form of [`solve_mode`].
const FACTORED_MAX_MODE: usize = 32;

/// Second-order scheme for mode `k` on the grid radii; returns `c_k(r_i)`.
///
/// Modes `1..=FACTORED_MAX_MODE` are solved for `w = c_k/r^k`, which obeys
/// `r²(1−r²)w'' + (2k(1−r²)+1) r w' − k(k−1) r² w = 0` with `w'(0) = 0`, so
/// the discretisation error near the pole scales like `r^k`. Higher modes,
/// negligible near the pole, are solved for `c_k` directly.
fn solve_mode(grid: &PolarGrid, k: usize, boundary: Complex64) -> Result<Vec<Complex64>> {
    let n = grid.n_r;
    let mut sub = vec![0.0; n + 1];
    let mut diag = vec![0.0; n + 1];
    let mut sup = vec![0.0; n + 1];
    let mut rhs = vec![Complex64::new(0.0, 0.0); n + 1];
    let factored = k <= FACTORED_MAX_MODE;
    let kf = k as f64;
    if factored {
        // (2k+2) w''(0) = k(k−1) w(0), with w''(0) ≈ 2(w_1 − w_0)/r_1².
        let r1 = grid.r(1);
        diag[0] = -(2.0 * kf + 2.0) - 0.5 * kf * (kf - 1.0) * r1 * r1;
        sup[0] = 2.0 * kf + 2.0;
    } else {
        diag[0] = 1.0;
    }
    for i in 1..n {
        let (r, hm, hp) = (grid.r(i), grid.r(i) - grid.r(i - 1), grid.r(i + 1) - grid.r(i));
        let a = r * r * (1.0 - r * r);
        let (b, c) = if factored {
            ((2.0 * kf * (1.0 - r * r) + 1.0) * r, -kf * (kf - 1.0) * r * r)
        } else {
            (r, -kf * kf)
        };
        let s = hm + hp;
        sub[i] = a * 2.0 / (hm * s) - b * hp / (hm * s);
        diag[i] = -a * 2.0 / (hm * hp) + b * (hp - hm) / (hm * hp) + c;
        sup[i] = a * 2.0 / (hp * s) + b * hm / (hp * s);
    }
    diag[n] = 1.0;
    rhs[n] = boundary;
    thomas(&sub, &diag, &sup, &mut rhs)?;
    if factored {
        for (i, v) in rhs.iter_mut().enumerate() {
            *v *= grid.r(i).powi(k as i32);
        }
    }
    Ok(rhs)
}

/// Solves for the mean surface with boundary values `φ_X`.
pub fn solve_mean_surface(x: &BoundaryField, n_r: usize, n_theta: usize) -> Result<(DiskField, SolveReport)> {
    if !(n_theta >= 32 && n_theta.is_power_of_two()) {
        return Err(Error::Precondition(format!(
            "n_theta = {n_theta} is not a power of two >= 32"
        )));
    }
    if n_r < 16 {
        return Err(Error::Precondition(format!("n_r = {n_r} is below 16")));
    }
    let grid = PolarGrid::new(n_r, n_theta)?;
    let (bmodes, ring) = boundary_modes(x, n_theta);
    let profiles: Vec<Vec<Complex64>> = bmodes
        .par_iter()
        .enumerate()
        .map(|(k, &b)| solve_mode(&grid, k, b))
        .collect::<Result<_>>()?;
    let nm = bmodes.len();
    let modes: Vec<Vec<Complex64>> = (0..=n_r)
        .map(|i| (0..nm).map(|k| profiles[k][i]).collect())
        .collect();
    let field = DiskField::from_modes(grid, modes, ring.as_deref());
    if field.values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("non-finite solution values".into()));
    }
    let residual = cartesian_residual(&field, 1.0);
    let report = SolveReport {
        residual_sup: residual,
        iterations: nm,
        n_r,
        n_theta,
        solver: "fourier-tridiagonal",
    };
    Ok((field, report))
}

/// `sup |(1−r²)ū_rr + ū_r/r + ū_θθ/r²|` over interior nodes with `0 < r ≤ r_max`,
/// i.e. the Cartesian operator `(1−x²)ū_xx + (1−y²)ū_yy − 2xy ū_xy`.
fn cartesian_residual(u: &DiskField, r_max: f64) -> f64 {
    residual_sup(u, r_max, false)
}

fn residual_sup(u: &DiskField, r_max: f64, hyperbolic: bool) -> f64 {
    let g = u.grid();
    let d = u.polar_derivatives();
    let mut sup: f64 = 0.0;
    for i in 1..g.n_r {
        let r = g.r(i);
        if r > r_max {
            break;
        }
        let w = if hyperbolic { (1.0 - r * r).sqrt() } else { 1.0 };
        for j in 0..g.n_theta {
            let q = g.index(i, j);
            let v = (1.0 - r * r) * d.u_rr[q] + d.u_r[q] / r + d.u_tt[q] / (r * r);
            sup = sup.max((w * v).abs());
        }
    }
    sup
}

/// `sup |Δu − 2u|` for `u = ū/√(1−|η|²)` over nodes with `0 < r ≤ 0.9`.
///
/// In the Klein chart `Δu − 2u = L·((1−x²)ū_xx + (1−y²)ū_yy − 2xy ū_xy)` with
/// `L = √(1−|η|²)`; the derivatives come from the fourth-order derivative
/// fields, not from the solver's stencil.
pub fn hyperbolic_residual(u_bar: &DiskField) -> f64 {
    residual_sup(u_bar, RESIDUAL_RADIUS, true)
}

/// `ū(η)/√(1−|η|²)`, the hyperboloid function `u` at `Π⁻¹(η)`.
pub fn to_hyperboloid(u_bar: &DiskField, eta: KleinPoint) -> Result<f64> {
    let r = eta.norm();
    let limit = 1.0 - 1.0 / u_bar.grid().n_r as f64;
    if r > limit {
        return Err(Error::Domain(format!(
            "|eta| = {r} exceeds 1 - 1/n_r = {limit}"
        )));
    }
    Ok(u_bar.eval(eta)? / (1.0 - r * r).sqrt())
}

/// Regular solution of `r²(1−r²)f'' + r f' − k² f = 0` normalised by `f(1) = 1`,
/// by adaptive shooting from the pole with data `f = r^k(1 + α r²)`.
pub fn radial_mode_oracle(k: usize, r_samples: &[f64]) -> Result<Vec<f64>> {
    if let Some(r) = r_samples.iter().find(|r| !(0.0..=1.0).contains(*r)) {
        return Err(Error::Precondition(format!("sample radius {r} outside [0, 1]")));
    }
    let kf = k as f64;
    if k == 0 {
        return Ok(vec![1.0; r_samples.len()]);
    }
    let alpha = kf * (kf - 1.0) / (4.0 * (kf + 1.0));
    // Keep r0^{-k} representable.
    let r0 = EPSILON_POLE.max(10f64.powf(-100.0 / kf));
    let f0 = 1.0 + alpha * r0 * r0;
    let df0 = (kf / r0) * (1.0 + alpha * r0 * r0) + 2.0 * alpha * r0;
    let kk = kf * kf;
    let rhs = move |r: f64, y: &[f64; 2]| -> [f64; 2] {
        let s = 1.0 - r * r;
        [y[1], (kk * y[0] - r * y[1]) / (r * r * s)]
    };
    let r_end = 1.0 - 1e-12;
    let mut order: Vec<usize> = (0..r_samples.len()).collect();
    order.sort_by(|&a, &b| r_samples[a].total_cmp(&r_samples[b]));
    let mut raw = vec![0.0; r_samples.len()];
    let mut ode = Dopri5::new(rhs, r0, [f0, df0 * 1.0], r0 * 1e-3, ORACLE_TOL);
    for &idx in &order {
        let r = r_samples[idx];
        raw[idx] = if r <= r0 {
            (r / r0).powi(k as i32) * (1.0 + alpha * r * r)
        } else {
            let target = r.min(r_end);
            ode.advance_to(target)?;
            ode.y[0] + ode.y[1] * (r - target)
        };
    }
    ode.advance_to(r_end)?;
    let f1 = ode.y[0] + ode.y[1] * (1.0 - r_end);
    if !(f1.is_finite() && f1 != 0.0) {
        return Err(Error::Numerical(format!("mode {k}: f(1) = {f1}")));
    }
    Ok(raw.into_iter().map(|v| v / f1).collect())
}
