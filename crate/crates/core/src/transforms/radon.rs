//! Radon transform on the initial plane, its dual, the filtered inversion and
//! the reconstruction of `h` from Cauchy data.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::hilbert::{hilbert_grid, TailClosure};
use super::plane::PlaneFunction;
use super::sampled::{LineGrid, SampledLineFunction};
use crate::geometry::CylinderPoint;
use crate::quadrature::derivative_4th;
use crate::{Error, Result};

/// Endpoint magnitude above which a line integral is flagged as truncated.
pub const TAIL_BOUND: f64 = 1e-8;

/// Quadrature along `x = v·ω + s·ω^⊥`, `s ∈ [−half_length, half_length]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineQuadrature {
    pub half_length: f64,
    pub n_s: usize,
}

impl Default for LineQuadrature {
    fn default() -> Self {
        Self {
            half_length: 10.0,
            n_s: 401,
        }
    }
}

impl LineQuadrature {
    pub fn validate(&self) -> Result<()> {
        if !(self.half_length > 0.0) || self.n_s < 3 {
            return Err(Error::InvalidArgument(format!(
                "line quadrature needs half_length > 0 and n_s ≥ 3, got {} and {}",
                self.half_length, self.n_s
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadonValue {
    pub value: f64,
    /// Largest `|f|` at the two ends of the truncated line.
    pub tail: f64,
    pub truncated: bool,
}

fn line_integral(f: &PlaneFunction, theta: f64, v: f64, line: &LineQuadrature) -> (f64, f64) {
    let (c, s) = (theta.cos(), theta.sin());
    let ds = 2.0 * line.half_length / (line.n_s - 1) as f64;
    let mut sum = 0.0;
    let mut tail: f64 = 0.0;
    for k in 0..line.n_s {
        let sk = -line.half_length + ds * k as f64;
        let val = f.value(v * c - sk * s, v * s + sk * c);
        if k == 0 || k == line.n_s - 1 {
            sum += 0.5 * val;
            tail = tail.max(val.abs());
        } else {
            sum += val;
        }
    }
    (sum * ds, tail)
}

/// `f̂(ω, v) = ∫ f` over the line `⟨ω, x⟩ = v` by the composite trapezoid rule.
pub fn radon(
    f: &PlaneFunction,
    p: &CylinderPoint,
    half_length: f64,
    n_s: usize,
) -> Result<RadonValue> {
    let line = LineQuadrature { half_length, n_s };
    line.validate()?;
    if f.is_zero() {
        return Ok(RadonValue {
            value: 0.0,
            tail: 0.0,
            truncated: false,
        });
    }
    let (value, tail) = line_integral(f, p.theta(), p.v, &line);
    Ok(RadonValue {
        value,
        tail,
        truncated: tail > TAIL_BOUND,
    })
}

/// Tail diagnostics for a sampled Radon transform.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TailReport {
    pub max_tail: f64,
    pub truncated_lines: usize,
}

impl TailReport {
    fn merge(self, other: Self) -> Self {
        Self {
            max_tail: self.max_tail.max(other.max_tail),
            truncated_lines: self.truncated_lines + other.truncated_lines,
        }
    }
}

/// `f̂` on every grid node. Rows `i + N_θ/2` are filled from rows `i` by the
/// antipodal identity `f̂(−ω, −v) = f̂(ω, v)`.
pub fn radon_sampled(
    f: &PlaneFunction,
    grid: LineGrid,
    line: LineQuadrature,
) -> Result<(SampledLineFunction, TailReport)> {
    grid.validate()?;
    line.validate()?;
    if f.is_zero() {
        return Ok((SampledLineFunction::zeros(grid)?, TailReport::default()));
    }
    let half = grid.n_theta / 2;
    let n_v = grid.n_v;
    let rows: Vec<(Vec<f64>, TailReport)> = (0..half)
        .into_par_iter()
        .map(|i| {
            let th = grid.theta(i);
            let mut report = TailReport::default();
            let row = (0..n_v)
                .map(|j| {
                    let (val, tail) = line_integral(f, th, grid.v(j), &line);
                    report.max_tail = report.max_tail.max(tail);
                    if tail > TAIL_BOUND {
                        report.truncated_lines += 1;
                    }
                    val
                })
                .collect();
            (row, report)
        })
        .collect();
    let mut values = vec![0.0; grid.n_theta * n_v];
    let mut report = TailReport::default();
    for (i, (row, r)) in rows.into_iter().enumerate() {
        for (j, val) in row.iter().enumerate() {
            values[i * n_v + j] = *val;
            values[(i + half) * n_v + (n_v - 1 - j)] = *val;
        }
        report = report.merge(r);
    }
    report.truncated_lines *= 2;
    Ok((SampledLineFunction::from_values(grid, values)?, report))
}

/// `ǧ(x) = (1/2π) ∫ g(ω, ⟨ω, x⟩) dθ` with linear interpolation in `v`.
pub fn dual_radon(g: &SampledLineFunction, x1: f64, x2: f64) -> Result<f64> {
    g.circle_average(0.0, x1, x2)
}

/// `∂_v` on every row by fourth-order differences.
pub fn differentiate_v(g: &SampledLineFunction) -> Result<SampledLineFunction> {
    let dv = g.grid().dv();
    g.map_rows(|_, row| derivative_4th(row, dv))
}

/// Grids for the inversion pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InversionConfig {
    pub grid: LineGrid,
    pub line: LineQuadrature,
    pub tail: TailClosure,
}

impl Default for InversionConfig {
    fn default() -> Self {
        Self {
            grid: LineGrid::default(),
            line: LineQuadrature::default(),
            tail: TailClosure::InverseLinear,
        }
    }
}

/// Result of the filtered back-projection: `f = q̌` with `q = −½ Ĥ ∂_v f̂`.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub filtered: SampledLineFunction,
    pub tails: TailReport,
}

impl Reconstruction {
    pub fn value(&self, x1: f64, x2: f64) -> Result<f64> {
        dual_radon(&self.filtered, x1, x2)
    }

    /// Samples the reconstruction on `n × n` points spanning `[−extent, extent]²`.
    pub fn sample_square(&self, extent: f64, n: usize) -> Result<Vec<[f64; 3]>> {
        let step = if n > 1 {
            2.0 * extent / (n - 1) as f64
        } else {
            0.0
        };
        (0..n * n)
            .into_par_iter()
            .map(|k| {
                let x1 = -extent + step * (k / n) as f64;
                let x2 = -extent + step * (k % n) as f64;
                Ok([x1, x2, self.value(x1, x2)?])
            })
            .collect()
    }

    pub fn into_plane_function(self) -> PlaneFunction {
        let q = self.filtered;
        PlaneFunction::new(move |x1, x2| dual_radon(&q, x1, x2).unwrap_or(f64::NAN))
    }
}

/// Inverts the Radon transform of `f` by `f = −½ (Ĥ ∂_v f̂)ˇ`.
pub fn invert_radon(f: &PlaneFunction, cfg: &InversionConfig) -> Result<Reconstruction> {
    let (fhat, tails) = radon_sampled(f, cfg.grid, cfg.line)?;
    let filtered = hilbert_grid(&differentiate_v(&fhat)?, cfg.tail)?;
    let filtered = filtered.map_rows(|_, row| row.iter().map(|x| -0.5 * x).collect())?;
    Ok(Reconstruction { filtered, tails })
}

/// `h` recovered from Cauchy data, with diagnostics.
#[derive(Debug, Clone)]
pub struct CauchyInversion {
    pub h: SampledLineFunction,
    pub tails_f0: TailReport,
    pub tails_f1: TailReport,
    /// Largest `|h|` on the `v = ±V_max` columns.
    pub h_edge: f64,
}

/// `h = −½ Ĥ(∂_v f̂₀ + f̂₁)`, so that `Rh` has Cauchy data `(f0, f1)` at `t = 0`.
pub fn cauchy_to_h(
    f0: &PlaneFunction,
    f1: &PlaneFunction,
    cfg: &InversionConfig,
) -> Result<CauchyInversion> {
    let (f0_hat, tails_f0) = radon_sampled(f0, cfg.grid, cfg.line)?;
    let (f1_hat, tails_f1) = radon_sampled(f1, cfg.grid, cfg.line)?;
    let source = differentiate_v(&f0_hat)?.zip_with(&f1_hat, |a, b| a + b)?;
    let h = hilbert_grid(&source, cfg.tail)?;
    let h = h.map_rows(|_, row| row.iter().map(|x| -0.5 * x).collect())?;
    let h_edge = h.edge_max_abs();
    Ok(CauchyInversion {
        h,
        tails_f0,
        tails_f1,
        h_edge,
    })
}
