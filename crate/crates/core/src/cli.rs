//! Command-line runner: argument parsing, file I/O and summaries.
//!
//! Every subcommand writes its tabular output atomically and returns a JSON
//! summary recording the parameters it used.

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};

use crate::circle::{cross_ratio_norm_estimate, BoundaryField};
use crate::douady_earle::{DouadyEarle, QuadratureSpec, NODES_PER_PEAK};
use crate::envelope::{earthquake_eval, ConvexEnvelope, AFFINE_TOL, HULL_TOL};
use crate::error::{Error, Result};
use crate::estimates::{run_suite, EstimateConfig, Suite};
use crate::geometry::{
    klein_to_poincare, klein_to_poincare_tangent, poincare_to_klein, KleinPoint, PoincarePoint,
};
use crate::grid::PolarGrid;
use crate::hl::{
    dbar_norm_fd, divergence_at, divergence_check, hl_eval, shape_operator, HlPoincare, CURVATURE_RADIUS,
    FD_STEP, VALUE_RADIUS,
};
use crate::io::{write_atomic, CsvTable};
use crate::mean_surface::{solve_mean_surface, RESIDUAL_RADIUS};
use crate::samples::SampleSpec;

#[derive(Debug, Parser)]
#[command(name = "halfpipe", version, about = "Harmonic Lagrangian extensions of circle vector fields")]
pub struct Cli {
    /// Seed for every randomised choice not fixed by its own spec.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long, default_value_t = 128)]
    pub nr: usize,
    #[arg(long, default_value_t = 256)]
    pub ntheta: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Klein,
    Poincare,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve for the mean surface and write its nodal values.
    Solve {
        #[arg(long)]
        boundary: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample the extension field, its curvature and divergence.
    Hl {
        #[arg(long)]
        boundary: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
        /// `polar:RINGS:PER_RING:RMAX`, `random:COUNT:RMAX[:SEED]` or `points:x,y;...`.
        #[arg(long, default_value = "polar:8:32:0.9")]
        samples: String,
        #[arg(long, value_enum, default_value_t = ModelArg::Poincare)]
        model: ModelArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate the Douady–Earle extension and its z̄-derivative by quadrature.
    De {
        #[arg(long)]
        boundary: PathBuf,
        /// A file of `x,y` lines or a sample spec, in the Poincaré chart.
        #[arg(long, default_value = "polar:8:32:0.9")]
        points: String,
        #[arg(long, default_value_t = 1024)]
        m: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample the convex envelopes, width field and support planes.
    Envelope {
        #[arg(long)]
        boundary: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Width of the convex core, with a cross-ratio norm estimate.
    Width {
        #[arg(long)]
        boundary: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
        /// Quadruples used for the cross-ratio estimate.
        #[arg(long, default_value_t = 4096)]
        quadruples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample the left infinitesimal earthquake in the Klein chart.
    Earthquake {
        #[arg(long)]
        boundary: PathBuf,
        #[arg(long, default_value = "polar:8:64:0.95")]
        samples: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare the extension field with the Douady–Earle extension.
    Compare {
        #[arg(long)]
        boundary: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = 2048)]
        m: usize,
        /// Poincaré-chart samples.
        #[arg(long, default_value = "random:200:0.8")]
        samples: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the width and curvature estimates on a suite of fields.
    Report {
        /// A file listing boundary files, or `random:K[:SEED]`.
        #[arg(long)]
        suite: String,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn check_out(path: &Path) -> Result<()> {
    match path.parent() {
        Some(d) if !d.as_os_str().is_empty() && !d.is_dir() => Err(Error::Io(std::io::Error::new(
            std::io::ErrorKind::NotFound,
            format!("output directory {} does not exist", d.display()),
        ))),
        _ => Ok(()),
    }
}

fn write_json(path: &Path, v: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(v).map_err(|e| Error::Numerical(e.to_string()))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

fn load_points(spec: &str, seed: u64) -> Result<Vec<Complex64>> {
    let path = Path::new(spec);
    if !path.is_file() {
        return Ok(SampleSpec::parse(spec, seed)?.points());
    }
    let text = std::fs::read_to_string(path)?;
    let mut pts = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: Option<Vec<f64>> = cells.iter().map(|c| c.parse().ok()).collect();
        match parsed {
            Some(v) if v.len() == 2 => pts.push(Complex64::new(v[0], v[1])),
            // A non-numeric first line is a header.
            None if pts.is_empty() && no == 0 => {}
            _ => return Err(Error::schema(format!("points line {}", no + 1), "expected `x,y`")),
        }
    }
    Ok(pts)
}

fn nan_on_domain(r: Result<f64>) -> Result<f64> {
    match r {
        Ok(v) => Ok(v),
        Err(Error::Domain(_)) => Ok(f64::NAN),
        Err(e) => Err(e),
    }
}

/// Runs one command and returns its JSON summary.
pub fn run(cli: &Cli) -> Result<Value> {
    let seed = cli.seed;
    match &cli.command {
        Command::Solve { boundary, grid, out } => {
            check_out(out)?;
            let x = BoundaryField::load(boundary)?;
            let (u, report) = solve_mean_surface(&x, grid.nr, grid.ntheta)?;
            let g = u.grid();
            let mut t = CsvTable::new(&["r", "theta", "eta1", "eta2", "u_bar"]);
            for i in 0..=g.n_r {
                for j in 0..g.n_theta {
                    let (e1, e2) = g.point(i, j);
                    t.row(&[g.r(i), g.theta(j), e1, e2, u.value(i, j)]);
                }
            }
            t.write(out)?;
            Ok(json!({
                "command": "solve",
                "n_r": grid.nr,
                "n_theta": grid.ntheta,
                "residual_radius": RESIDUAL_RADIUS,
                "report": report,
            }))
        }
        Command::Hl {
            boundary,
            grid,
            samples,
            model,
            out,
        } => {
            check_out(out)?;
            let pts = SampleSpec::parse(samples, seed)?.points();
            let x = BoundaryField::load(boundary)?;
            let (u, report) = solve_mean_surface(&x, grid.nr, grid.ntheta)?;
            let field = HlPoincare(&u);
            let rows = pts
                .par_iter()
                .map(|&p| {
                    let (eta, z) = match model {
                        ModelArg::Klein => {
                            let eta = KleinPoint::from_complex(p);
                            (eta, klein_to_poincare(eta)?.z)
                        }
                        ModelArg::Poincare => (poincare_to_klein(PoincarePoint::new(p))?, p),
                    };
                    let vk = hl_eval(&u, eta)?;
                    let v = match model {
                        ModelArg::Klein => vk,
                        ModelArg::Poincare => klein_to_poincare_tangent(eta, vk),
                    };
                    let lambda = nan_on_domain(shape_operator(&u, eta).map(|s| s.lambda))?;
                    let dbar = nan_on_domain(dbar_norm_fd(&field, z, FD_STEP))?;
                    let div = nan_on_domain(divergence_at(&u, eta, FD_STEP))?;
                    Ok([p.re, p.im, v.re, v.im, lambda, dbar, div])
                })
                .collect::<Result<Vec<_>>>()?;
            let mut t = CsvTable::new(&["x", "y", "Vx", "Vy", "lambda", "dbar_norm", "div_residual"]);
            for r in &rows {
                t.row(r);
            }
            t.write(out)?;
            let sup = |c: usize| rows.iter().map(|r| r[c].abs()).filter(|v| !v.is_nan()).fold(0.0, f64::max);
            Ok(json!({
                "command": "hl",
                "n_r": grid.nr,
                "n_theta": grid.ntheta,
                "model": format!("{model:?}").to_lowercase(),
                "samples": rows.len(),
                "value_radius": VALUE_RADIUS,
                "curvature_radius": CURVATURE_RADIUS,
                "fd_step": FD_STEP,
                "residual_sup": report.residual_sup,
                "lambda_sup": sup(4),
                "dbar_gap_sup": rows.iter().map(|r| (r[4] - r[5]).abs()).filter(|v| !v.is_nan()).fold(0.0, f64::max),
                "div_residual_sup": sup(6),
                "grid_divergence_sup": divergence_check(&u, RESIDUAL_RADIUS),
            }))
        }
        Command::De { boundary, points, m, out } => {
            check_out(out)?;
            let q = QuadratureSpec::new(*m)?;
            let pts = load_points(points, seed)?;
            let x = BoundaryField::load(boundary)?;
            let vals = DouadyEarle::new(&x, q).batch(&pts)?;
            let mut t = CsvTable::new(&["x", "y", "L0_re", "L0_im", "dbar_re", "dbar_im"]);
            for (z, (l, d)) in pts.iter().zip(&vals) {
                t.row(&[z.re, z.im, l.re, l.im, d.re, d.im]);
            }
            t.write(out)?;
            Ok(json!({
                "command": "de",
                "m": m,
                "points": pts.len(),
                "nodes_per_peak": NODES_PER_PEAK,
                "dbar_sup": vals.iter().map(|v| v.1.norm()).fold(0.0, f64::max),
            }))
        }
        Command::Envelope { boundary, grid, out } => {
            check_out(out)?;
            let x = BoundaryField::load(boundary)?;
            let g = PolarGrid::new(grid.nr, grid.ntheta)?;
            let env = ConvexEnvelope::new(&x)?;
            let d = env.sample(&g);
            let mut t = CsvTable::new(&[
                "eta1",
                "eta2",
                "phi_minus",
                "phi_plus",
                "width_field",
                "sigma0",
                "sigma1",
                "sigma2",
            ]);
            for k in 0..g.len() {
                let (e1, e2) = g.point(k / g.n_theta, k % g.n_theta);
                let s = d.support_sigma[k];
                t.row(&[e1, e2, d.phi_minus[k], d.phi_plus[k], d.width_field[k], s.x0, s.x1, s.x2]);
            }
            t.write(out)?;
            let (lower, upper) = env.facet_counts();
            Ok(json!({
                "command": "envelope",
                "n_r": grid.nr,
                "n_theta": grid.ntheta,
                "boundary_samples": x.n(),
                "hull_tol": HULL_TOL,
                "affine_tol": AFFINE_TOL,
                "affine": env.is_affine(),
                "lower_facets": lower,
                "upper_facets": upper,
                "width": d.width(),
            }))
        }
        Command::Width {
            boundary,
            grid,
            quadruples,
            out,
        } => {
            if let Some(o) = out {
                check_out(o)?;
            }
            let x = BoundaryField::load(boundary)?;
            let g = PolarGrid::new(grid.nr, grid.ntheta)?;
            let w = ConvexEnvelope::new(&x)?.sample(&g).width();
            let cr = cross_ratio_norm_estimate(&x, *quadruples, seed)?;
            let v = json!({
                "command": "width",
                "n_r": grid.nr,
                "n_theta": grid.ntheta,
                "boundary_samples": x.n(),
                "width": w.width,
                "arg_sup": w.arg_sup,
                "cross_ratio_norm": cr,
                "quadruples": quadruples,
                "seed": seed,
            });
            if let Some(o) = out {
                write_json(o, &v)?;
            }
            Ok(v)
        }
        Command::Earthquake { boundary, samples, out } => {
            check_out(out)?;
            let pts = SampleSpec::parse(samples, seed)?.points();
            let x = BoundaryField::load(boundary)?;
            let env = ConvexEnvelope::new(&x)?;
            let mut t = CsvTable::new(&["eta1", "eta2", "E_re", "E_im"]);
            let mut sup: f64 = 0.0;
            for &p in &pts {
                let e = earthquake_eval(&env, KleinPoint::from_complex(p))?;
                sup = sup.max(e.norm());
                t.row(&[p.re, p.im, e.re, e.im]);
            }
            t.write(out)?;
            Ok(json!({
                "command": "earthquake",
                "boundary_samples": x.n(),
                "samples": pts.len(),
                "sup_norm": sup,
            }))
        }
        Command::Compare {
            boundary,
            grid,
            m,
            samples,
            out,
        } => {
            check_out(out)?;
            let q = QuadratureSpec::new(*m)?;
            let pts = SampleSpec::parse(samples, seed)?.points();
            let x = BoundaryField::load(boundary)?;
            let (u, _) = solve_mean_surface(&x, grid.nr, grid.ntheta)?;
            let de = DouadyEarle::new(&x, q);
            let hl = HlPoincare(&u);
            let rows = pts
                .par_iter()
                .map(|&z| {
                    use crate::hl::VectorField;
                    let a = hl.eval(z)?;
                    let b = de.l0(z)?;
                    Ok([z.re, z.im, a.re, a.im, b.re, b.im, (a - b).norm()])
                })
                .collect::<Result<Vec<_>>>()?;
            let mut t = CsvTable::new(&["x", "y", "hl_re", "hl_im", "l0_re", "l0_im", "discrepancy"]);
            for r in &rows {
                t.row(r);
            }
            t.write(out)?;
            let sup = rows.iter().map(|r| r[6]).fold(0.0, f64::max);
            let mean = rows.iter().map(|r| r[6]).sum::<f64>() / rows.len().max(1) as f64;
            Ok(json!({
                "command": "compare",
                "n_r": grid.nr,
                "n_theta": grid.ntheta,
                "m": m,
                "samples": rows.len(),
                "sup_discrepancy": sup,
                "mean_discrepancy": mean,
            }))
        }
        Command::Report { suite, grid, out } => {
            if let Some(o) = out {
                check_out(o)?;
            }
            let s = Suite::parse_with_seed(suite, seed)?;
            let report = run_suite(
                &s,
                EstimateConfig {
                    n_r: grid.nr,
                    n_theta: grid.ntheta,
                },
            )?;
            let v = serde_json::to_value(&report).map_err(|e| Error::Numerical(e.to_string()))?;
            if let Some(o) = out {
                write_json(o, &v)?;
            }
            Ok(json!({
                "command": "report",
                "suite": report.suite,
                "n_r": grid.nr,
                "n_theta": grid.ntheta,
                "slack_rule": report.slack_rule,
                "members": report.members.len(),
                "total_violations": report.total_violations,
            }))
        }
    }
}

/// Parses the process arguments, runs, prints the summary and returns the
/// exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(summary) => {
            use std::io::Write;
            let text = serde_json::to_string_pretty(&summary).unwrap_or_default();
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
