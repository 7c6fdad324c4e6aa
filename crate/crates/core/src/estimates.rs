//! Numerical checks of the quantitative estimates relating the width of the
//! convex core to the `∂̄`-norm of the extension field, and of their decay
//! towards the boundary.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::path::{Path, PathBuf};

use crate::circle::BoundaryField;
use crate::envelope::{ConvexEnvelope, EnvelopeData};
use crate::error::{Error, Result};
use crate::geometry::KleinPoint;
use crate::grid::PolarGrid;
use crate::hl::{shape_from_jet, shape_operator, CURVATURE_RADIUS};
use crate::mean_surface::{solve_mean_surface, DiskField};

/// Samples per random suite member.
pub const SUITE_SAMPLES: usize = 512;
/// Highest mode of a random suite member.
pub const SUITE_MAX_MODE: usize = 8;
/// Radius of the pointwise comparison.
pub const POINTWISE_RADIUS: f64 = 0.9;
/// Default annulus radii for [`little_zygmund_decay`].
pub const DECAY_RADII: [f64; 3] = [0.8, 0.9, 0.95];

/// Grid used by every check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EstimateConfig {
    pub n_r: usize,
    pub n_theta: usize,
}

impl EstimateConfig {
    /// `10·(1/n_r + 1/n_θ)·sup|φ|`.
    pub fn slack(&self, x: &BoundaryField) -> f64 {
        10.0 * (1.0 / self.n_r as f64 + 1.0 / self.n_theta as f64) * x.sup_norm()
    }
}

impl Default for EstimateConfig {
    fn default() -> Self {
        EstimateConfig {
            n_r: 256,
            n_theta: 512,
        }
    }
}

/// A solved field with its envelopes, shared by the checks below.
pub struct Analysis {
    pub u_bar: DiskField,
    pub envelope: ConvexEnvelope,
    pub data: EnvelopeData,
    /// Principal curvature at every grid node with `r ≤ CURVATURE_RADIUS`
    /// (`NaN` elsewhere).
    pub lambda: Vec<f64>,
}

impl Analysis {
    pub fn new(x: &BoundaryField, cfg: EstimateConfig) -> Result<Self> {
        let (u_bar, _) = solve_mean_surface(x, cfg.n_r, cfg.n_theta)?;
        let envelope = ConvexEnvelope::new(x)?;
        let grid = PolarGrid::new(cfg.n_r, cfg.n_theta)?;
        let data = envelope.sample(&grid);
        let jets = u_bar.nodal_jets();
        let lambda = (0..grid.len())
            .into_par_iter()
            .map(|k| {
                let (i, j) = (k / grid.n_theta, k % grid.n_theta);
                if grid.r(i) > CURVATURE_RADIUS {
                    return f64::NAN;
                }
                let (x, y) = grid.point(i, j);
                shape_from_jet(&jets[k], KleinPoint::new(x, y)).lambda
            })
            .collect();
        Ok(Analysis {
            u_bar,
            envelope,
            data,
            lambda,
        })
    }

    pub fn grid(&self) -> &PolarGrid {
        self.u_bar.grid()
    }

    /// Max of the principal curvature over the nodes with `r ≤ CURVATURE_RADIUS`.
    pub fn dbar_sup(&self) -> f64 {
        self.lambda.iter().copied().filter(|v| !v.is_nan()).fold(0.0, f64::max)
    }

    /// Nodes with `0 < r ≤ POINTWISE_RADIUS` where `λ > 6·w + slack`.
    pub fn pointwise_violations(&self, slack: f64) -> usize {
        let g = self.grid();
        let last = g.last_ring_within(POINTWISE_RADIUS);
        (0..=last)
            .flat_map(|i| (0..g.n_theta).map(move |j| (i, j)))
            .filter(|&(i, j)| {
                let k = g.index(i, j);
                self.lambda[k] > 6.0 * self.data.width_field[k] + slack
            })
            .count()
    }

    /// Max of the width field and of `λ` on the circle of radius `r`,
    /// sampled at `n_θ` angles.
    pub fn annulus(&self, r: f64) -> Result<DecayRow> {
        let nt = self.grid().n_theta;
        let rows = (0..nt)
            .into_par_iter()
            .map(|j| {
                let eta = KleinPoint::from_polar(r, std::f64::consts::TAU * j as f64 / nt as f64);
                Ok((self.envelope.width_at(eta), shape_operator(&self.u_bar, eta)?.lambda))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DecayRow {
            radius: r,
            width_max: rows.iter().map(|p| p.0).fold(0.0, f64::max),
            lambda_max: rows.iter().map(|p| p.1).fold(0.0, f64::max),
        })
    }
}

/// Annulus maxima at one radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecayRow {
    pub radius: f64,
    pub width_max: f64,
    pub lambda_max: f64,
}

/// Whether both columns decrease strictly with the radius.
pub fn strictly_decreasing(rows: &[DecayRow]) -> bool {
    rows.windows(2)
        .all(|w| w[1].width_max < w[0].width_max && w[1].lambda_max < w[0].lambda_max)
}

/// Both sides of `‖∂̄‖/6 ≤ ω ≤ 2‖∂̄‖` for one field.
#[derive(Clone, Debug, Serialize)]
pub struct EstimateReport {
    pub id: String,
    pub n_r: usize,
    pub n_theta: usize,
    pub dbar_sup: f64,
    pub width: f64,
    /// `(dbar_sup/6) / width`, zero when the width vanishes.
    pub ratio_lower: f64,
    /// `width / (2·dbar_sup)`, zero when `dbar_sup` vanishes.
    pub ratio_upper: f64,
    pub slack: f64,
    pub lower_violated: bool,
    pub upper_violated: bool,
    pub pointwise_violations: usize,
    pub annulus_decay: Vec<DecayRow>,
    pub decay_strict: bool,
}

impl EstimateReport {
    pub fn violations(&self) -> usize {
        self.pointwise_violations + self.lower_violated as usize + self.upper_violated as usize
    }
}

const RATIO_GUARD: f64 = 1e-12;

/// Evaluates both global inequalities, the pointwise one and the annulus
/// decay for `x`.
pub fn two_sided_check(id: &str, x: &BoundaryField, cfg: EstimateConfig) -> Result<EstimateReport> {
    let a = Analysis::new(x, cfg)?;
    let slack = cfg.slack(x);
    let dbar_sup = a.dbar_sup();
    let width = a.data.width().width;
    let annulus_decay = DECAY_RADII.iter().map(|&r| a.annulus(r)).collect::<Result<Vec<_>>>()?;
    Ok(EstimateReport {
        id: id.to_string(),
        n_r: cfg.n_r,
        n_theta: cfg.n_theta,
        dbar_sup,
        width,
        ratio_lower: if width > RATIO_GUARD { dbar_sup / 6.0 / width } else { 0.0 },
        ratio_upper: if dbar_sup > RATIO_GUARD { width / (2.0 * dbar_sup) } else { 0.0 },
        slack,
        lower_violated: dbar_sup / 6.0 > width + slack,
        upper_violated: width > 2.0 * dbar_sup + slack,
        pointwise_violations: a.pointwise_violations(slack),
        decay_strict: strictly_decreasing(&annulus_decay),
        annulus_decay,
    })
}

/// Count of nodes with `r ≤ 0.9` where `λ > 6·w + slack`.
pub fn pointwise_check(x: &BoundaryField, cfg: EstimateConfig) -> Result<usize> {
    Ok(Analysis::new(x, cfg)?.pointwise_violations(cfg.slack(x)))
}

/// Annulus maxima of the width field and of `λ` at each radius.
pub fn little_zygmund_decay(x: &BoundaryField, radii: &[f64], cfg: EstimateConfig) -> Result<Vec<DecayRow>> {
    let a = Analysis::new(x, cfg)?;
    radii.iter().map(|&r| a.annulus(r)).collect()
}

/// A named list of boundary fields.
#[derive(Clone, Debug)]
pub struct Suite {
    pub spec: String,
    pub members: Vec<(String, BoundaryField)>,
}

/// `k` band-limited fields with modes up to 8 and coefficients uniform in
/// `[-1, 1]`, drawn from one ChaCha8 stream.
pub fn random_suite(k: usize, seed: u64) -> Result<Suite> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let members = (0..k)
        .map(|i| {
            let x = BoundaryField::random_band_limited(&mut rng, SUITE_MAX_MODE, SUITE_SAMPLES)?;
            Ok((format!("random:{seed}:{i}"), x))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Suite {
        spec: format!("random:{k}:{seed}"),
        members,
    })
}

impl Suite {
    /// `random:K:SEED`, or a text file listing one boundary file per line
    /// (blank lines and `#` comments skipped, paths relative to the list).
    pub fn parse(spec: &str) -> Result<Self> {
        Suite::parse_with_seed(spec, 42)
    }

    /// As [`Suite::parse`], with `seed` used when a random spec has none.
    pub fn parse_with_seed(spec: &str, default_seed: u64) -> Result<Self> {
        if let Some(rest) = spec.strip_prefix("random:") {
            let parts: Vec<&str> = rest.split(':').collect();
            let bad = || Error::schema("suite", format!("expected random:K:SEED, got `{spec}`"));
            let k = parts.first().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
            let seed = match parts.get(1) {
                Some(s) => s.parse().map_err(|_| bad())?,
                None => default_seed,
            };
            return random_suite(k, seed);
        }
        let list = Path::new(spec);
        let text = std::fs::read_to_string(list)?;
        let base = list.parent().map(Path::to_path_buf).unwrap_or_default();
        let members = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| {
                let p: PathBuf = base.join(l);
                Ok((l.to_string(), BoundaryField::load(&p)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Suite {
            spec: spec.to_string(),
            members,
        })
    }
}

/// Reports for every member of a suite.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub n_r: usize,
    pub n_theta: usize,
    pub slack_rule: &'static str,
    pub members: Vec<EstimateReport>,
    pub total_violations: usize,
}

pub fn run_suite(suite: &Suite, cfg: EstimateConfig) -> Result<SuiteReport> {
    let members = suite
        .members
        .par_iter()
        .map(|(id, x)| two_sided_check(id, x, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(SuiteReport {
        suite: suite.spec.clone(),
        n_r: cfg.n_r,
        n_theta: cfg.n_theta,
        slack_rule: "10*(1/n_r + 1/n_theta)*sup|phi|",
        total_violations: members.iter().map(EstimateReport::violations).sum(),
        members,
    })
}
