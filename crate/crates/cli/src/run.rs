//! Subcommand pipelines.

use std::f64::consts::TAU;
use std::io::Write;
use std::sync::Arc;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use sd_twistor::fields::SeparableField;
use sd_twistor::geometry::{
    circle_height, classify_direction, cone_relation, side_of_circle, CausalType, ConeRelation,
    CylinderPoint, MinkowskiVector, SpacetimePoint,
};
use sd_twistor::metric::{
    beta_check, curvature_sweep, monopole_curvature, write_sweep_csv, Point4,
};
use sd_twistor::monopole::{
    gauge_fix, monopole_residual, positivity_gate, recover_u, write_fields_csv, GaugeConfig,
    MonopolePair, RecoverConfig, DEFAULT_FD_STEP,
};
use sd_twistor::transforms::{
    cauchy_to_h, CylinderFunction, InversionConfig, LineGrid, LineQuadrature, PlaneFunction,
    RTransform,
};
use sd_twistor::twistor::{
    default_n_theta, disk_point_from, fourier_h, holomorphy_residual, in_ph_residual, project_pi,
    sample_disk, underline_disk_point,
};
use sd_twistor::Error;

use crate::config::{Command, RunConfig};
use crate::report::{Artifact, Check, RunReport, Stage};

/// Angular samples of the brute-force circle containment test.
const CONE_SAMPLES: usize = 2048;

struct Run {
    report: RunReport,
    rng: ChaCha8Rng,
    h: CylinderFunction,
    start: Instant,
    stage: Instant,
}

impl Run {
    fn cfg(&self) -> &RunConfig {
        &self.report.config
    }

    fn lap(&mut self, name: &str) {
        let now = Instant::now();
        let dt = now.duration_since(self.stage).as_secs_f64();
        self.report.timing.stages.push(Stage {
            name: name.into(),
            seconds: dt,
        });
        self.stage = now;
    }

    fn check(&mut self, c: Check) {
        self.report.checks.push(c);
    }

    fn artifact(&mut self, name: &str, contents: Vec<u8>) {
        self.report.artifacts.push(Artifact {
            name: name.into(),
            contents,
        });
    }

    fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.rng.gen::<f64>()
    }

    /// Uniform point of the configured `t × x1 × x2` box.
    fn random_point(&mut self) -> SpacetimePoint {
        let g = self.cfg().grid.clone();
        SpacetimePoint::new(
            self.uniform(g.t.min, g.t.max),
            self.uniform(g.x1.min, g.x1.max),
            self.uniform(g.x2.min, g.x2.max),
        )
    }

    fn random_points(&mut self) -> Vec<SpacetimePoint> {
        (0..self.cfg().grid.samples)
            .map(|_| self.random_point())
            .collect()
    }

    /// All nodes of the configured grid.
    fn grid_points(&self) -> Vec<SpacetimePoint> {
        let g = &self.cfg().grid;
        let mut out = Vec::new();
        for t in g.t.points() {
            for x1 in g.x1.points() {
                for x2 in g.x2.points() {
                    out.push(SpacetimePoint::new(t, x1, x2));
                }
            }
        }
        out
    }

    /// Grid nodes inside `|x| ≤ radius`.
    fn disk_points(&self) -> Vec<SpacetimePoint> {
        let r = self.cfg().grid.radius;
        self.grid_points()
            .into_iter()
            .filter(|p| p.x1.hypot(p.x2) <= r * (1.0 + 1e-12))
            .collect()
    }

    fn inversion_config(&self) -> InversionConfig {
        let g = &self.cfg().grid;
        InversionConfig {
            grid: LineGrid {
                n_theta: g.line_n_theta,
                n_v: g.line_n_v,
                v_max: g.line_v_max,
            },
            line: LineQuadrature {
                half_length: g.line_half_length,
                n_s: g.line_n_s,
            },
            ..InversionConfig::default()
        }
    }

    /// Order check over a convergence sequence, or an exactness check when
    /// the coarsest error already sits at the floor.
    fn convergence_check(&mut self, name: &str, errors: &[f64], min_order: f64) {
        let floor = self.cfg().tolerances.zero_floor;
        if errors[0] <= floor {
            let worst = errors.iter().cloned().fold(0.0, f64::max);
            self.check(Check::upper(&format!("{name}_max"), worst, floor));
        } else {
            let order = errors
                .windows(2)
                .map(|w| (w[0] / w[1]).log2())
                .fold(f64::INFINITY, f64::min);
            self.check(Check::lower(&format!("{name}_order"), order, min_order));
        }
    }
}

/// Runs the configured pipeline. Random sampling draws from a ChaCha8
/// stream seeded with `cfg.seed`.
pub fn run_command(cfg: RunConfig) -> Result<RunReport> {
    cfg.validate()?;
    let h = cfg.h()?;
    let now = Instant::now();
    let mut run = Run {
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        report: RunReport::new(cfg),
        h,
        start: now,
        stage: now,
    };
    match run.report.command {
        Command::Transform => transform(&mut run),
        Command::Invert => invert(&mut run),
        Command::Monopole => monopole(&mut run),
        Command::Metric => metric(&mut run),
        Command::Disks => disks(&mut run),
        Command::Geodesics => geodesics(&mut run),
        Command::Roundtrip => roundtrip(&mut run),
    }
    .with_context(|| format!("{} failed", run.report.command))?;
    run.report.timing.total_seconds = run.start.elapsed().as_secs_f64();
    Ok(run.report)
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn eval_all(r: &RTransform, pts: &[SpacetimePoint]) -> Result<Vec<f64>> {
    Ok(pts
        .par_iter()
        .map(|p| r.eval(p, [0, 0, 0]))
        .collect::<sd_twistor::Result<Vec<_>>>()?)
}

fn transform(run: &mut Run) -> Result<()> {
    let r = RTransform::new(run.h.clone(), run.cfg().grid.n_theta)?;
    let pts = run.grid_points();
    let u = eval_all(&r, &pts)?;
    let mut csv = Vec::new();
    writeln!(csv, "t,x1,x2,u")?;
    for (p, v) in pts.iter().zip(&u) {
        writeln!(csv, "{},{},{},{}", p.t, p.x1, p.x2, v + 0.0)?;
    }
    run.artifact("rh_grid.csv", csv);
    run.lap("grid");

    let samples = run.random_points();
    let steps = run.cfg().grid.fd_steps.clone();
    let mut errors = Vec::new();
    for h in &steps {
        let e = samples
            .par_iter()
            .map(|p| wave_residual(&r, p, *h))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        errors.push(e);
    }
    let mut csv = Vec::new();
    writeln!(csv, "step,max_residual")?;
    for (h, e) in steps.iter().zip(&errors) {
        writeln!(csv, "{h},{e:e}")?;
    }
    run.artifact("wave_convergence.csv", csv);
    let tol = run.cfg().tolerances.wave_order;
    run.convergence_check("wave_fd", &errors, tol);
    run.lap("wave residual");
    Ok(())
}

/// `|u_tt − u_11 − u_22|` by centred differences.
fn wave_residual(r: &RTransform, p: &SpacetimePoint, h: f64) -> Result<f64> {
    let u = |dt: f64, d1: f64, d2: f64| {
        r.eval(
            &SpacetimePoint::new(p.t + dt, p.x1 + d1, p.x2 + d2),
            [0, 0, 0],
        )
    };
    let c = 2.0 * u(0.0, 0.0, 0.0)?;
    let utt = u(h, 0.0, 0.0)? - c + u(-h, 0.0, 0.0)?;
    let u11 = u(0.0, h, 0.0)? - c + u(0.0, -h, 0.0)?;
    let u22 = u(0.0, 0.0, h)? - c + u(0.0, 0.0, -h)?;
    Ok((utt - u11 - u22).abs() / (h * h))
}

fn cauchy_data(
    r: Arc<RTransform>,
    extent: f64,
    spacing: f64,
) -> Result<(PlaneFunction, PlaneFunction)> {
    let r1 = r.clone();
    let f0 = PlaneFunction::new(move |x1, x2| {
        r.eval(&SpacetimePoint::new(0.0, x1, x2), [0, 0, 0])
            .unwrap_or(f64::NAN)
    })
    .tabulate(extent, spacing)?;
    let f1 = PlaneFunction::new(move |x1, x2| {
        r1.eval(&SpacetimePoint::new(0.0, x1, x2), [1, 0, 0])
            .unwrap_or(f64::NAN)
    })
    .tabulate(extent, spacing)?;
    Ok((f0, f1))
}

fn invert(run: &mut Run) -> Result<()> {
    let g = run.cfg().grid.clone();
    let r = Arc::new(RTransform::new(run.h.clone(), g.n_theta)?);
    let (f0, f1) = cauchy_data(r.clone(), g.plane_extent, g.plane_spacing)?;
    run.lap("cauchy data");
    let inv = cauchy_to_h(&f0, &f1, &run.inversion_config()).context("inverting Cauchy data")?;
    let mut csv = Vec::new();
    inv.h.write_csv(&mut csv)?;
    run.artifact("h_rec.csv", csv);
    run.lap("inversion");

    let pts = run.disk_points();
    let u = eval_all(&r, &pts)?;
    let rebuilt = pts
        .par_iter()
        .map(|p| inv.h.circle_average(p.t, p.x1, p.x2))
        .collect::<sd_twistor::Result<Vec<_>>>()?;
    let mut csv = Vec::new();
    writeln!(csv, "t,x1,x2,u,u_rec")?;
    for ((p, a), b) in pts.iter().zip(&u).zip(&rebuilt) {
        writeln!(csv, "{},{},{},{},{}", p.t, p.x1, p.x2, a + 0.0, b + 0.0)?;
    }
    run.artifact("roundtrip.csv", csv);
    let tol = run.cfg().tolerances.roundtrip;
    run.check(Check::upper(
        "roundtrip_sup_error",
        max_abs_diff(&u, &rebuilt),
        tol,
    ));
    run.lap("comparison");
    Ok(())
}

/// Smallest `V` over `points`, or the offending value when it is not positive.
fn min_v(m: &MonopolePair, points: &[SpacetimePoint]) -> Result<f64> {
    match positivity_gate(m, points) {
        Ok(v) => Ok(v),
        Err(Error::Degenerate { v, .. }) => Ok(v),
        Err(e) => Err(e.into()),
    }
}

fn monopole(run: &mut Run) -> Result<()> {
    let m = MonopolePair::from_h(&run.h, run.cfg().grid.n_theta)?;
    let samples = run.random_points();
    let worst = samples
        .par_iter()
        .map(|p| monopole_residual(&m, p, DEFAULT_FD_STEP).map(|r| r.max_abs))
        .collect::<sd_twistor::Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let tol = run.cfg().tolerances.monopole_residual;
    run.check(Check::upper("monopole_residual", worst, tol));
    run.lap("residual sweep");

    let pts = run.grid_points();
    let mut all = pts.clone();
    all.extend(samples);
    let floor = run.cfg().tolerances.zero_floor;
    run.check(Check::lower("positivity_min_v", min_v(&m, &all)?, floor));
    let mut csv = Vec::new();
    write_fields_csv(&m, &pts, &mut csv)?;
    run.artifact("fields.csv", csv);
    run.lap("positivity");
    Ok(())
}

fn metric(run: &mut Run) -> Result<()> {
    let g = run.cfg().grid.clone();
    let tol = run.cfg().tolerances;
    let m = MonopolePair::from_h(&run.h, g.n_theta)?;
    let reports = g
        .fd_steps
        .par_iter()
        .map(|s| monopole_curvature(&m, &g.point, *s))
        .collect::<sd_twistor::Result<Vec<_>>>()
        .context("curvature at grid.point")?;
    let mut csv = Vec::new();
    writeln!(csv, "step,weyl_sd_norm,weyl_asd_norm")?;
    for r in &reports {
        writeln!(csv, "{},{:e},{:e}", r.step, r.weyl_sd_norm, r.weyl_asd_norm)?;
    }
    run.artifact("weyl_convergence.csv", csv);
    let finest = reports.last().expect("at least two steps");
    run.artifact("curvature.json", finest.to_json()?.into_bytes());
    let asd: Vec<f64> = reports.iter().map(|r| r.weyl_asd_norm).collect();
    run.convergence_check("weyl_asd", &asd, tol.asd_order);
    run.lap("convergence study");

    let sweep_points: Vec<Point4> = run
        .grid_points()
        .iter()
        .map(|p| [g.point[0], p.t, p.x1, p.x2])
        .collect();
    let rows = curvature_sweep(&m, &sweep_points, finest.step).context("curvature sweep")?;
    let mut csv = Vec::new();
    write_sweep_csv(&rows, &mut csv)?;
    run.artifact("curvature_sweep.csv", csv);
    run.lap("curvature sweep");

    let mut worst: f64 = 0.0;
    let (mut accepted, mut tried) = (0, 0);
    while accepted < g.samples {
        tried += 1;
        if tried > 100 * g.samples {
            bail!("too few sample points with V > 0 for the β-frame check");
        }
        let p = run.random_point();
        let s = run.uniform(-1.0, 1.0);
        let omega = Complex64::from_polar(1.0, run.uniform(0.0, TAU));
        let v = m.v_at(&p);
        if v.is_nan() || v <= 0.0 {
            continue;
        }
        worst = worst.max(beta_check(&m, &[s, p.t, p.x1, p.x2], omega)?.max_g);
        accepted += 1;
    }
    run.check(Check::upper("beta_degeneracy", worst, tol.beta));
    run.lap("beta frame");
    Ok(())
}

fn disks(run: &mut Run) -> Result<()> {
    let g = run.cfg().grid.clone();
    let tol = run.cfg().tolerances;
    let n_theta = default_n_theta(g.k);
    let draws: Vec<(f64, f64, Complex64, f64, Complex64)> = (0..g.samples)
        .map(|_| {
            let s = run.uniform(-1.0, 1.0);
            let t = run.uniform(g.t.min, g.t.max);
            let z = Complex64::from_polar(run.uniform(0.0, g.radius), run.uniform(0.0, TAU));
            let theta = run.uniform(0.0, TAU);
            let w = Complex64::from_polar(run.uniform(0.0, 1.0).sqrt(), run.uniform(0.0, TAU));
            (s, t, z, theta, w)
        })
        .collect();
    let h = &run.h;
    let rows = draws
        .par_iter()
        .map(|&(s, t, z, theta, w)| -> Result<[f64; 3]> {
            let split = fourier_h(h, t, z, g.k, n_theta)?;
            let edge = disk_point_from(&split, s, Complex64::from_polar(1.0, theta))?;
            let incidence = in_ph_residual(h, &edge)?.abs();
            let holo = holomorphy_residual(h, s, t, z, g.k, n_theta)?;
            let inner = disk_point_from(&split, s, w)?;
            let quotient = project_pi(&inner)?.affine_distance(&underline_disk_point(t, z, w)?)?;
            Ok([incidence, holo, quotient])
        })
        .collect::<Result<Vec<_>>>()?;
    let worst = |i: usize| rows.iter().map(|r| r[i]).fold(0.0, f64::max);
    let (incidence, holo, quotient) = (worst(0), worst(1), worst(2));
    run.check(Check::upper(
        "disk_incidence",
        incidence,
        tol.disk_incidence,
    ));
    run.check(Check::upper("disk_holomorphy", holo, tol.disk_holomorphy));
    run.check(Check::upper(
        "quotient_compatibility",
        quotient,
        tol.quotient,
    ));
    run.lap("disk sweep");

    let [s, t, x1, x2] = g.point;
    let sample = sample_disk(
        &run.h,
        s,
        t,
        Complex64::new(x1, x2),
        g.k,
        g.n_boundary,
        g.n_radial,
    )?;
    let mut csv = Vec::new();
    sample.write_boundary_csv(&mut csv)?;
    run.artifact("disk_boundary.csv", csv);
    run.artifact("disk.json", sample.to_json()?.into_bytes());
    run.lap("disk sample");
    Ok(())
}

fn causal_name(c: CausalType) -> &'static str {
    match c {
        CausalType::Spacelike => "spacelike",
        CausalType::Null => "null",
        CausalType::Timelike => "timelike",
    }
}

/// Containment of `C_{c2}` in `Ω±_c` decided by sampling the circle.
fn cone_by_sampling(c: &SpacetimePoint, c2: &SpacetimePoint) -> ConeRelation {
    if c == c2 {
        return ConeRelation::Equal;
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for j in 0..CONE_SAMPLES {
        let th = TAU * j as f64 / CONE_SAMPLES as f64;
        let s = side_of_circle(c, &CylinderPoint::new(th, circle_height(c2, th)));
        lo = lo.min(s);
        hi = hi.max(s);
    }
    if lo >= 0.0 {
        ConeRelation::Future
    } else if hi <= 0.0 {
        ConeRelation::Past
    } else {
        ConeRelation::Neither
    }
}

fn geodesics(run: &mut Run) -> Result<()> {
    let n = run.cfg().grid.samples;
    let mut csv = Vec::new();
    writeln!(csv, "tau,xi1,xi2,by_metric,by_axis,axis_distance")?;
    let mut disagree = 0;
    for k in 0..n {
        let (xi1, xi2) = (run.uniform(-2.0, 2.0), run.uniform(-2.0, 2.0));
        // every tenth direction is null
        let tau = if k % 10 == 0 {
            xi1.hypot(xi2) * if run.rng.gen_bool(0.5) { 1.0 } else { -1.0 }
        } else {
            run.uniform(-2.0, 2.0)
        };
        let d = MinkowskiVector::new(tau, xi1, xi2);
        let c = classify_direction(&d)?;
        if c.by_metric != c.by_axis {
            disagree += 1;
        }
        writeln!(
            csv,
            "{tau},{xi1},{xi2},{},{},{}",
            causal_name(c.by_metric),
            causal_name(c.by_axis),
            c.axis_distance
        )?;
    }
    run.artifact("directions.csv", csv);
    run.check(Check::upper(
        "classification_disagreements",
        disagree as f64,
        0.0,
    ));
    run.lap("classification");

    let pairs: Vec<(SpacetimePoint, SpacetimePoint)> = (0..n)
        .map(|_| (run.random_point(), run.random_point()))
        .collect();
    let disagree = pairs
        .par_iter()
        .filter(|(c, c2)| cone_by_sampling(c, c2) != cone_relation(c, c2))
        .count();
    run.check(Check::upper("cone_disagreements", disagree as f64, 0.0));
    run.lap("cone relation");
    Ok(())
}

fn roundtrip(run: &mut Run) -> Result<()> {
    let g = run.cfg().grid.clone();
    let tol = run.cfg().tolerances;
    let m = MonopolePair::from_h(&run.h, g.n_theta)?;
    let r = RTransform::new(run.h.clone(), g.n_theta)?;
    let perturbed = m.gauge_transform(Arc::new(SeparableField::gaussian(g.gauge_amplitude)));
    let gauge_cfg = GaugeConfig {
        half_width: g.gauge_half_width,
        spacing: g.gauge_spacing,
        ..GaugeConfig::default()
    };
    let rep = gauge_fix(&perturbed, &gauge_cfg).context("gauge fixing")?;
    run.artifact("gauge.json", rep.to_json()?.into_bytes());
    run.check(Check::upper(
        "poisson_residual",
        rep.poisson_residual,
        tol.poisson_residual,
    ));
    let pts = run.disk_points();
    let a_err = pts
        .iter()
        .map(|p| {
            let (a, b) = (rep.fixed_pair.a_at(p), m.a_at(p));
            (0..3).map(|mu| (a[mu] - b[mu]).abs()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    run.check(Check::upper("gauge_a_error", a_err, tol.gauge_a));
    run.lap("gauge fixing");

    let recover_cfg = RecoverConfig {
        extent: g.plane_extent,
        spacing: g.plane_spacing,
        ..RecoverConfig::default()
    };
    let rec = recover_u(&rep.fixed_pair, &recover_cfg).context("recovering u")?;
    run.lap("recover u");
    let inv = cauchy_to_h(&rec.f0, &rec.f1, &run.inversion_config()).context("rebuilding h")?;
    let mut csv = Vec::new();
    inv.h.write_csv(&mut csv)?;
    run.artifact("h_rec.csv", csv);
    run.lap("rebuild h");

    let u = eval_all(&r, &pts)?;
    let evolved = pts
        .iter()
        .map(|p| rec.u.value(p))
        .collect::<sd_twistor::Result<Vec<_>>>()?;
    let rebuilt = pts
        .par_iter()
        .map(|p| inv.h.circle_average(p.t, p.x1, p.x2))
        .collect::<sd_twistor::Result<Vec<_>>>()?;
    let mut csv = Vec::new();
    writeln!(csv, "t,x1,x2,u,u_evolved,u_rec")?;
    for i in 0..pts.len() {
        let p = &pts[i];
        writeln!(
            csv,
            "{},{},{},{},{},{}",
            p.t,
            p.x1,
            p.x2,
            u[i] + 0.0,
            evolved[i] + 0.0,
            rebuilt[i] + 0.0
        )?;
    }
    run.artifact("roundtrip.csv", csv);
    run.check(Check::upper(
        "roundtrip_sup_error",
        max_abs_diff(&u, &rebuilt),
        tol.roundtrip,
    ));
    run.lap("comparison");
    Ok(())
}
