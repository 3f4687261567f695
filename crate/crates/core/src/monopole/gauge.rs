//! Gauge fixing `(V, A′) → (V, A′ + dφ)` with `A_t ≡ 0` and a divergence-free
//! spatial part, and recovery of the wave potential from a fixed pair.

use std::f64::consts::TAU;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::poisson::{solve_poisson, PoissonSolution};
use super::{MonopolePair, Provenance};
use crate::fields::{add_axis, partial_or_fd, zero_field, Field, SpacetimeField};
use crate::geometry::SpacetimePoint;
use crate::quadrature::GaussLegendre;
use crate::transforms::{wave_fd_solve, Deriv, PlaneFunction, PlaneGrid, WaveField};
use crate::{Error, Result};

/// Poisson residual above which the report carries a warning.
pub const POISSON_WARN: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaugeConfig {
    pub half_width: f64,
    pub spacing: f64,
    /// Gauss–Legendre nodes for `∫₀ᵗ ∂_i A′_t dτ`.
    pub time_nodes: usize,
    pub anchor: [f64; 2],
    /// Bound on `sup |V − 1|`, `sup |A|` on the circle `|x| = half_width`.
    pub decay_bound: f64,
}

impl Default for GaugeConfig {
    fn default() -> Self {
        Self {
            half_width: 8.0,
            spacing: 0.05,
            time_nodes: 16,
            anchor: [0.0, 0.0],
            decay_bound: 5e-2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaugeSummary {
    pub poisson_residual: f64,
    /// `max |ρ|` for the source `ρ = −div A′(0, ·)`.
    pub source_max: f64,
    /// `max |ρ|` on the boundary of the Poisson box.
    pub source_edge: f64,
    /// `sup |V − 1|` and `sup |A|` on the decay circle.
    pub decay_v: f64,
    pub decay_a: f64,
    /// `max |φ̌|` and `max |∇φ̌|` on a coarse sample of the box.
    pub phi_max: f64,
    pub grad_phi_max: f64,
    pub anchor: [f64; 2],
    pub half_width: f64,
    pub spacing: f64,
    pub warnings: Vec<String>,
}

pub struct GaugeReport {
    pub phi: Field,
    pub fixed_pair: MonopolePair,
    pub poisson_residual: f64,
    pub warnings: Vec<String>,
    pub summary: GaugeSummary,
    pub poisson: Arc<PoissonSolution>,
}

impl std::fmt::Debug for GaugeReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GaugeReport")
            .field("summary", &self.summary)
            .finish()
    }
}

impl GaugeReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.summary)?)
    }
}

/// `∫₀ᵗ g(τ) dτ` by Gauss–Legendre.
fn time_integral(gl: &GaussLegendre, t: f64, g: impl FnMut(f64) -> f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        gl.integrate(0.0, t, g)
    }
}

/// `φ(t, x) = −∫₀ᵗ A′_t(τ, x) dτ + φ̌(x)`.
struct GaugeFunction {
    at: Field,
    poisson: Arc<PoissonSolution>,
    gl: GaussLegendre,
    fd_step: f64,
}

impl SpacetimeField for GaugeFunction {
    fn value(&self, p: &SpacetimePoint) -> f64 {
        let flow = if self.at.is_zero() {
            0.0
        } else {
            time_integral(&self.gl, p.t, |tau| {
                self.at.value(&SpacetimePoint::new(tau, p.x1, p.x2))
            })
        };
        self.poisson.value(p.x1, p.x2) - flow
    }

    fn partial(&self, p: &SpacetimePoint, d: Deriv) -> Option<f64> {
        match d {
            [0, 0, 0] => Some(self.value(p)),
            [1, 0, 0] => Some(-self.at.value(p)),
            [0, 1, 0] | [0, 0, 1] => {
                let i = if d[1] == 1 { 0 } else { 1 };
                let flow = if self.at.is_zero() {
                    0.0
                } else {
                    time_integral(&self.gl, p.t, |tau| {
                        let q = SpacetimePoint::new(tau, p.x1, p.x2);
                        partial_or_fd(self.at.as_ref(), &q, d, self.fd_step)
                    })
                };
                Some(self.poisson.gradient(p.x1, p.x2)[i] - flow)
            }
            _ => None,
        }
    }
}

/// `A_i = A′_i + ∂_i φ` for `i ∈ {1, 2}`.
struct FixedComponent {
    axis: usize,
    a: Field,
    at: Field,
    poisson: Arc<PoissonSolution>,
    gl: GaussLegendre,
    fd_step: f64,
}

impl FixedComponent {
    fn flow(&self, p: &SpacetimePoint, d: Deriv) -> f64 {
        if self.at.is_zero() {
            return 0.0;
        }
        time_integral(&self.gl, p.t, |tau| {
            let q = SpacetimePoint::new(tau, p.x1, p.x2);
            partial_or_fd(self.at.as_ref(), &q, d, self.fd_step)
        })
    }
}

impl SpacetimeField for FixedComponent {
    fn value(&self, p: &SpacetimePoint) -> f64 {
        let i = self.axis - 1;
        self.a.value(p) - self.flow(p, add_axis([0, 0, 0], self.axis))
            + self.poisson.gradient(p.x1, p.x2)[i]
    }

    fn partial(&self, p: &SpacetimePoint, d: Deriv) -> Option<f64> {
        if d == [0, 0, 0] {
            return Some(self.value(p));
        }
        if d[0] >= 1 {
            // ∂_t of the flow term is the integrand itself
            let mut lower = d;
            lower[0] -= 1;
            let from_at = if self.at.is_zero() {
                0.0
            } else {
                self.at.partial(p, add_axis(lower, self.axis))?
            };
            return Some(self.a.partial(p, d)? - from_at);
        }
        if d[1] + d[2] == 1 {
            let j = if d[1] == 1 { 0 } else { 1 };
            let i = self.axis - 1;
            let hess = self.poisson.hessian(p.x1, p.x2);
            let flow = if self.at.is_zero() {
                0.0
            } else {
                let dd = add_axis(d, self.axis);
                time_integral(&self.gl, p.t, |tau| {
                    let q = SpacetimePoint::new(tau, p.x1, p.x2);
                    self.at.partial(&q, dd).unwrap_or(f64::NAN)
                })
            };
            if !flow.is_finite() {
                return None;
            }
            return Some(self.a.partial(p, d)? - flow + hess[i][j]);
        }
        None
    }
}

fn circle_sup(f: impl Fn(f64, f64) -> f64, r: f64) -> f64 {
    (0..128)
        .map(|j| {
            let th = std::f64::consts::TAU * j as f64 / 128.0;
            f(r * th.cos(), r * th.sin()).abs()
        })
        .fold(0.0, f64::max)
}

fn square_edge_sup(f: impl Fn(f64, f64) -> f64, l: f64) -> f64 {
    let n = 256;
    (0..n)
        .map(|k| {
            let s = -l + 2.0 * l * k as f64 / n as f64;
            [f(s, -l), f(l, s), f(-s, l), f(-l, -s)]
                .iter()
                .fold(0.0f64, |m, v| m.max(v.abs()))
        })
        .fold(0.0, f64::max)
}

/// Brings `m` to the gauge `A_t ≡ 0`, `div A(0, ·) = 0` by solving
/// `Δφ̌ = −div A′(0, ·)` on the initial plane. `V` is shared, not copied.
pub fn gauge_fix(m: &MonopolePair, cfg: &GaugeConfig) -> Result<GaugeReport> {
    if cfg.time_nodes == 0 {
        return Err(Error::InvalidArgument("time_nodes must be positive".into()));
    }
    let step = m.fd_step;
    let l = cfg.half_width;

    let v = m.v.clone();
    let a = m.a.clone();
    let decay_v = circle_sup(|x1, x2| v.value(&SpacetimePoint::new(0.0, x1, x2)) - 1.0, l);
    let decay_a = (0..3)
        .map(|mu| circle_sup(|x1, x2| a[mu].value(&SpacetimePoint::new(0.0, x1, x2)), l))
        .fold(0.0, f64::max);
    let worst = decay_v.max(decay_a);
    if !(worst <= cfg.decay_bound) {
        return Err(Error::Decay {
            radius: l,
            value: worst,
        });
    }

    let (a1, a2) = (m.a[1].clone(), m.a[2].clone());
    let rho = move |x1: f64, x2: f64| {
        let p = SpacetimePoint::new(0.0, x1, x2);
        -(partial_or_fd(a1.as_ref(), &p, [0, 1, 0], step)
            + partial_or_fd(a2.as_ref(), &p, [0, 0, 1], step))
    };
    let edge = square_edge_sup(&rho, l);
    let source_max = {
        let g = PlaneGrid::sample(l, 4.0 * cfg.spacing, &rho)?;
        g.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    };
    if !(edge <= 1e-6 * source_max + 1e-12) {
        return Err(Error::Decay {
            radius: l,
            value: edge,
        });
    }

    let poisson = Arc::new(solve_poisson(rho, l, cfg.spacing, cfg.anchor)?);
    let mut warnings = Vec::new();
    if poisson.residual > POISSON_WARN {
        warnings.push(format!(
            "Poisson residual {:.3e} exceeds {POISSON_WARN:e}",
            poisson.residual
        ));
    }

    let gl = GaussLegendre::new(cfg.time_nodes);
    let at = m.a[0].clone();
    let phi: Field = Arc::new(GaugeFunction {
        at: at.clone(),
        poisson: poisson.clone(),
        gl: gl.clone(),
        fd_step: step,
    });
    let fixed = |axis: usize| -> Field {
        Arc::new(FixedComponent {
            axis,
            a: m.a[axis].clone(),
            at: at.clone(),
            poisson: poisson.clone(),
            gl: gl.clone(),
            fd_step: step,
        })
    };
    let fixed_pair = MonopolePair {
        v: m.v.clone(),
        a: [zero_field(), fixed(1), fixed(2)],
        provenance: Provenance::External,
        fd_step: step,
    };

    let (mut phi_max, mut grad_phi_max) = (0.0f64, 0.0f64);
    let n = 33;
    for i in 0..n {
        for j in 0..n {
            let x1 = -l + 2.0 * l * i as f64 / (n - 1) as f64;
            let x2 = -l + 2.0 * l * j as f64 / (n - 1) as f64;
            phi_max = phi_max.max(poisson.value(x1, x2).abs());
            let g = poisson.gradient(x1, x2);
            grad_phi_max = grad_phi_max.max(g[0].hypot(g[1]));
        }
    }

    let summary = GaugeSummary {
        poisson_residual: poisson.residual,
        source_max,
        source_edge: edge,
        decay_v,
        decay_a,
        phi_max,
        grad_phi_max,
        anchor: cfg.anchor,
        half_width: l,
        spacing: cfg.spacing,
        warnings: warnings.clone(),
    };
    Ok(GaugeReport {
        phi,
        fixed_pair,
        poisson_residual: poisson.residual,
        warnings,
        summary,
        poisson,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RecoverConfig {
    /// Half-width and spacing of the tables for `f0`, `f1`.
    pub extent: f64,
    pub spacing: f64,
    pub anchor: [f64; 2],
    /// Half-width of the square on which `div A(0, ·)` is checked.
    pub check_half_width: f64,
    pub check_points: usize,
    pub curl_tol: f64,
    pub fd_dx: f64,
    pub fd_half_box: f64,
    pub t_max: f64,
}

impl Default for RecoverConfig {
    fn default() -> Self {
        Self {
            extent: 24.0,
            spacing: 0.1,
            anchor: [0.0, 0.0],
            check_half_width: 4.0,
            check_points: 17,
            curl_tol: 1e-6,
            fd_dx: 0.04,
            fd_half_box: 4.5,
            t_max: 1.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Recovered {
    pub f0: PlaneFunction,
    pub f1: PlaneFunction,
    pub u: WaveField,
    /// Largest `|div A(0, ·)|` seen by the integrability check.
    pub div_max: f64,
}

/// Cumulative integral of nodal values from node `start`, fourth order.
fn cumulative(values: &[f64], h: f64, start: usize) -> Vec<f64> {
    let n = values.len();
    let step = |k: usize| -> f64 {
        // ∫ over [x_k, x_{k+1}]
        let f = |i: usize| values[i];
        if k >= 1 && k + 2 < n {
            h / 24.0 * (-f(k - 1) + 13.0 * f(k) + 13.0 * f(k + 1) - f(k + 2))
        } else if k + 3 < n {
            h / 24.0 * (9.0 * f(k) + 19.0 * f(k + 1) - 5.0 * f(k + 2) + f(k + 3))
        } else {
            h / 24.0 * (9.0 * f(k + 1) + 19.0 * f(k) - 5.0 * f(k - 1) + f(k - 2))
        }
    };
    let mut out = vec![0.0; n];
    for k in start..n - 1 {
        out[k + 1] = out[k] + step(k);
    }
    for k in (0..start).rev() {
        out[k] = out[k + 1] - step(k);
    }
    out
}

/// Recovers `u` from a pair in the fixed gauge: `f1 = 1 − V(0, ·)`, `f0` by
/// integrating `∂_1 u = A_2`, `∂_2 u = −A_1` from the anchor with the constant
/// fixed by decay at infinity, then evolves `(f0, f1)` with the leapfrog
/// solver.
pub fn recover_u(m: &MonopolePair, cfg: &RecoverConfig) -> Result<Recovered> {
    let step = m.fd_step;
    let k = cfg.check_points.max(2);
    let c = cfg.check_half_width;
    let samples: Vec<(f64, f64)> = (0..k * k)
        .map(|q| {
            let (i, j) = (q / k, q % k);
            let s = |i: usize| -c + 2.0 * c * i as f64 / (k - 1) as f64;
            (s(i), s(j))
        })
        .collect();
    for &(x1, x2) in &samples {
        let at = m.a[0].value(&SpacetimePoint::new(0.0, x1, x2));
        if at.abs() > cfg.curl_tol {
            return Err(Error::InvalidArgument(format!(
                "A_t = {at:e} at ({x1}, {x2}); the pair is not in the fixed gauge"
            )));
        }
    }
    let divs: Vec<(f64, f64, f64)> = samples
        .par_iter()
        .map(|&(x1, x2)| {
            let p = SpacetimePoint::new(0.0, x1, x2);
            let d = partial_or_fd(m.a[1].as_ref(), &p, [0, 1, 0], step)
                + partial_or_fd(m.a[2].as_ref(), &p, [0, 0, 1], step);
            (d, x1, x2)
        })
        .collect();
    let mut div_max = 0.0f64;
    for (d, x1, x2) in divs {
        if !(d.abs() <= cfg.curl_tol) {
            return Err(Error::NotAGradient {
                residual: d.abs(),
                x1,
                x2,
            });
        }
        div_max = div_max.max(d.abs());
    }

    let v = m.v.clone();
    let f1_exact =
        PlaneFunction::new(move |x1, x2| 1.0 - v.value(&SpacetimePoint::new(0.0, x1, x2)));
    let f1 = f1_exact.tabulate(cfg.extent, cfg.spacing)?;

    // ∇u(0, x) = (A_2, −A_1)
    let a = m.a.clone();
    let grad_u = Arc::new(move |x1: f64, x2: f64| -> [f64; 2] {
        let p = SpacetimePoint::new(0.0, x1, x2);
        [a[2].value(&p), -a[1].value(&p)]
    });
    let gu1 = PlaneGrid::sample(cfg.extent, cfg.spacing, |x1, x2| grad_u(x1, x2)[0])?;
    let gu2 = PlaneGrid::sample(cfg.extent, cfg.spacing, |x1, x2| grad_u(x1, x2)[1])?;
    let n = gu1.n;
    let h = gu1.spacing;
    let idx = |x: f64| ((x - gu1.origin) / h).round() as usize;
    let (ia, ja) = (idx(cfg.anchor[0]), idx(cfg.anchor[1]));
    if ia >= n || ja >= n {
        return Err(Error::InvalidArgument("anchor outside the table".into()));
    }
    let axis_row: Vec<f64> = (0..n).map(|i| gu1.at(i, ja)).collect();
    let base = cumulative(&axis_row, h, ia);
    let mut values = vec![0.0; n * n];
    values.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        let col: Vec<f64> = (0..n).map(|j| gu2.at(i, j)).collect();
        let line = cumulative(&col, h, ja);
        for j in 0..n {
            row[j] = base[i] + line[j];
        }
    });
    let mut f0_grid = PlaneGrid::from_values(gu1.origin, h, n, values);
    let shift = f0_grid
        .interpolate(cfg.anchor[0], cfg.anchor[1])
        .unwrap_or(0.0);
    f0_grid.values.iter_mut().for_each(|v| *v -= shift);
    // u → 0 at infinity, and its circle means fall off like β/r, so the
    // constant c of c + β/r fitted at two radii is removed
    let circle_mean = |r: f64| -> f64 {
        let k = 512;
        (0..k)
            .map(|j| {
                let th = TAU * j as f64 / k as f64;
                f0_grid.interpolate(r * th.cos(), r * th.sin()).unwrap_or(0.0)
            })
            .sum::<f64>()
            / k as f64
    };
    let (r1, r2) = (0.5 * cfg.extent, cfg.extent - 2.0 * h);
    let (m1, m2) = (circle_mean(r1), circle_mean(r2));
    let beta = (m1 - m2) / (1.0 / r1 - 1.0 / r2);
    let at_infinity = m2 - beta / r2;
    f0_grid.values.iter_mut().for_each(|v| *v -= at_infinity);

    // outside the table: ray integral from the anchor
    let anchor = cfg.anchor;
    let gl = GaussLegendre::new(24);
    let ray = PlaneFunction::new(move |x1, x2| {
        let (d1, d2) = (x1 - anchor[0], x2 - anchor[1]);
        gl.integrate_composite(0.0, 1.0, 8, |s| {
            let g = grad_u(anchor[0] + s * d1, anchor[1] + s * d2);
            g[0] * d1 + g[1] * d2
        }) - at_infinity
    });
    let f0 = f0_grid.into_function(Some(ray));

    let fd = wave_fd_solve(&f0, &f1, cfg.t_max, cfg.fd_dx, cfg.fd_half_box)?;
    Ok(Recovered {
        f0,
        f1,
        u: WaveField::Fd(Arc::new(fd)),
        div_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{ConstantField, SeparableField};
    use crate::monopole::monopole_from_h;
    use crate::transforms::{CylinderFunction, RTransform, VProfile};

    #[test]
    fn cumulative_integral_is_fourth_order() {
        let h = 0.1;
        let xs: Vec<f64> = (0..41).map(|i| -2.0 + h * i as f64).collect();
        let f: Vec<f64> = xs.iter().map(|x| x.cos()).collect();
        let c = cumulative(&f, h, 20);
        for (x, v) in xs.iter().zip(&c) {
            assert!((v - x.sin()).abs() < 2e-6, "{x}: {v}");
        }
    }

    #[test]
    fn pair_already_in_gauge_is_unchanged() {
        let m = monopole_from_h(&CylinderFunction::cos_gaussian(1.0)).unwrap();
        let cfg = GaugeConfig {
            spacing: 0.1,
            ..GaugeConfig::default()
        };
        let rep = gauge_fix(&m, &cfg).unwrap();
        for p in [
            SpacetimePoint::new(0.0, 0.3, -0.2),
            SpacetimePoint::new(0.7, -1.1, 0.5),
        ] {
            assert_eq!(rep.fixed_pair.v_at(&p), m.v_at(&p));
            let (a, b) = (rep.fixed_pair.a_at(&p), m.a_at(&p));
            for mu in 0..3 {
                assert!((a[mu] - b[mu]).abs() < 1e-9, "{mu}: {} vs {}", a[mu], b[mu]);
            }
            assert!(rep.phi.value(&p).abs() < 1e-9);
        }
    }

    #[test]
    fn time_component_is_cancelled() {
        // A′ = (∂_t ψ, ∂_1 ψ, ∂_2 ψ) with V = 1: pure gauge
        let psi = Arc::new(SeparableField::gaussian(0.5));
        let d = |axis: usize| -> Field {
            Arc::new(crate::fields::DerivedField {
                source: psi.clone(),
                axis,
                factor: 1.0,
                fd_step: 1e-4,
            })
        };
        let m = MonopolePair::new(
            Arc::new(ConstantField(1.0)),
            [d(0), d(1), d(2)],
            Provenance::External,
        );
        let cfg = GaugeConfig::default();
        let rep = gauge_fix(&m, &cfg).unwrap();
        for p in [
            SpacetimePoint::new(0.8, 0.3, -0.2),
            SpacetimePoint::new(-0.5, 1.0, 0.4),
        ] {
            let a = rep.fixed_pair.a_at(&p);
            assert!(a.iter().all(|c| c.abs() < 1e-5), "{a:?}");
            // φ = −ψ + ψ(0, 0, 0)
            let phi = rep.phi.value(&p);
            assert!((phi + psi.value(&p) - 0.5).abs() < 1e-6, "{phi}");
        }
    }

    #[test]
    fn slow_decay_is_rejected() {
        let m = MonopolePair::new(
            Arc::new(ConstantField(1.0)),
            [zero_field(), Arc::new(ConstantField(0.1)), zero_field()],
            Provenance::External,
        );
        assert!(matches!(
            gauge_fix(&m, &GaugeConfig::default()),
            Err(Error::Decay { .. })
        ));
    }

    #[test]
    fn recovery_from_zero_pair() {
        let m = monopole_from_h(&CylinderFunction::zero()).unwrap();
        let cfg = RecoverConfig {
            extent: 4.0,
            t_max: 0.5,
            fd_dx: 0.1,
            fd_half_box: 2.0,
            ..RecoverConfig::default()
        };
        let r = recover_u(&m, &cfg).unwrap();
        assert_eq!(r.f0.value(0.3, 0.1), 0.0);
        assert_eq!(r.f1.value(-1.3, 2.1), 0.0);
        assert_eq!(r.u.value(&SpacetimePoint::new(0.4, 0.1, 0.2)).unwrap(), 0.0);
    }

    #[test]
    fn constant_of_f0_makes_it_decay() {
        // u(0, 0) = 1 here, so pinning u at the anchor would be wrong
        let h = CylinderFunction::cos_mode(0, VProfile::gaussian(1.0, 0.0, 1.0));
        let m = monopole_from_h(&h).unwrap();
        let r = RTransform::new(h, 256).unwrap();
        let cfg = RecoverConfig {
            t_max: 0.1,
            fd_dx: 0.1,
            fd_half_box: 2.0,
            ..RecoverConfig::default()
        };
        let rec = recover_u(&m, &cfg).unwrap();
        for (x1, x2) in [(0.0, 0.0), (1.5, -0.5), (-3.0, 2.0), (10.0, 7.0), (30.0, 0.0)] {
            let u = r.eval(&SpacetimePoint::new(0.0, x1, x2), [0, 0, 0]).unwrap();
            assert!((rec.f0.value(x1, x2) - u).abs() < 2e-4, "({x1}, {x2})");
        }
    }

    #[test]
    fn recovery_rejects_non_gradients() {
        // A_1 = x1 e^{−|x|²}: div A ≠ 0
        let a1 = SeparableField {
            scale: 1.0,
            t: VProfile::constant(1.0),
            x1: VProfile::gaussian_poly(vec![0.0, 1.0], 0.0, 1.0),
            x2: VProfile::gaussian(1.0, 0.0, 1.0),
        };
        let m = MonopolePair::new(
            Arc::new(ConstantField(1.0)),
            [zero_field(), Arc::new(a1), zero_field()],
            Provenance::External,
        );
        assert!(matches!(
            recover_u(&m, &RecoverConfig::default()),
            Err(Error::NotAGradient { .. })
        ));
    }
}
