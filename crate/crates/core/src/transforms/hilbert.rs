//! Real principal-value Hilbert transform `Ĥg(v) = (1/π) pv ∫ g(ν)/(ν − v) dν`
//! along each θ-row of a sampled line function.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::sampled::SampledLineFunction;
use crate::geometry::CylinderPoint;
use crate::quadrature::cubic_weights;
use crate::{Error, Result};

/// Treatment of the data beyond `±V_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailClosure {
    /// Integrate over the grid only.
    #[default]
    None,
    /// Continue each row as `c/ν` past either end and add the exact tail
    /// integrals.
    InverseLinear,
}

/// `Ĥ` of one row at every node.
///
/// The regularized integrand `[g(ν) − g(v)]/(ν − v)` is integrated by the
/// trapezoid rule with an endpoint derivative correction; the subtracted part
/// contributes `g(v) log|(V − v)/(V + v)|`. The two end nodes, where that log
/// diverges, use the log evaluated half a cell inside.
pub fn hilbert_row(row: &[f64], v_max: f64, tail: TailClosure) -> Vec<f64> {
    (0..row.len())
        .map(|j| single_node(row, v_max, j, tail))
        .collect()
}

/// `∫_V^∞ dν / (ν(ν − v))`.
fn tail_plus(v: f64, big_v: f64) -> f64 {
    if v.abs() < 1e-8 * big_v {
        1.0 / big_v
    } else {
        -(-v / big_v).ln_1p() / v
    }
}

/// `∫_{−∞}^{−V} dν / (ν(ν − v))`.
fn tail_minus(v: f64, big_v: f64) -> f64 {
    if v.abs() < 1e-8 * big_v {
        1.0 / big_v
    } else {
        (v / big_v).ln_1p() / v
    }
}

/// `Ĥ` applied row by row.
pub fn hilbert_grid(g: &SampledLineFunction, tail: TailClosure) -> Result<SampledLineFunction> {
    let v_max = g.grid().v_max;
    g.map_rows(|_, row| hilbert_row(row, v_max, tail))
}

/// `Ĥg(θ, v)` at a single cylinder point. Off-grid `θ` interpolates linearly
/// between neighbouring rows; off-grid `v` interpolates the nodal transform
/// with a four-point stencil.
pub fn hilbert_pv(g: &SampledLineFunction, p: &CylinderPoint) -> Result<f64> {
    hilbert_pv_with(g, p, TailClosure::None)
}

pub fn hilbert_pv_with(
    g: &SampledLineFunction,
    p: &CylinderPoint,
    tail: TailClosure,
) -> Result<f64> {
    let grid = *g.grid();
    if p.v.abs() >= grid.v_max {
        return Err(Error::OutOfRange {
            v: p.v,
            lo: -grid.v_max,
            hi: grid.v_max,
        });
    }
    let u_theta = p.theta() / grid.theta(1);
    let i0 = u_theta.floor() as usize % grid.n_theta;
    let frac = u_theta - u_theta.floor();
    let at_row = |i: usize| -> f64 {
        let row = g.row(i);
        let u = (p.v + grid.v_max) / grid.dv();
        let nearest = u.round();
        if (u - nearest).abs() < 1e-12 {
            return single_node(row, grid.v_max, nearest as usize, tail);
        }
        let j = (u.floor() as usize).clamp(2, grid.n_v - 4);
        let w = cubic_weights(u - j as f64);
        (0..4)
            .map(|a| w[a] * single_node(row, grid.v_max, j - 1 + a, tail))
            .sum()
    };
    let a = at_row(i0);
    if frac < 1e-12 {
        return Ok(a);
    }
    let b = at_row((i0 + 1) % grid.n_theta);
    Ok(a * (1.0 - frac) + b * frac)
}

/// `Ĥ` of one row at one node, without building the full row.
fn single_node(row: &[f64], v_max: f64, j: usize, tail: TailClosure) -> f64 {
    let n = row.len();
    let h = 2.0 * v_max / (n - 1) as f64;
    let v = -v_max + h * j as f64;
    let gv = row[j];
    let dj = local_derivative(row, j, h);
    let mut sum = 0.0;
    for (k, gk) in row.iter().enumerate() {
        let r = if k == j {
            dj
        } else {
            (gk - gv) / ((k as f64 - j as f64) * h)
        };
        sum += if k == 0 || k == n - 1 { 0.5 * r } else { r };
    }
    sum *= h;
    let rp = |k: usize| {
        let dv = (k as f64 - j as f64) * h;
        if dv == 0.0 {
            0.0
        } else {
            (local_derivative(row, k, h) * dv - (row[k] - gv)) / (dv * dv)
        }
    };
    sum -= h * h / 12.0 * (rp(n - 1) - rp(0));
    let ve = if j == 0 {
        v + 0.5 * h
    } else if j == n - 1 {
        v - 0.5 * h
    } else {
        v
    };
    sum += gv * ((v_max - ve) / (v_max + ve)).abs().ln();
    if tail == TailClosure::InverseLinear {
        sum += row[n - 1] * v_max * tail_plus(ve, v_max) - row[0] * v_max * tail_minus(ve, v_max);
    }
    sum / PI
}

fn local_derivative(row: &[f64], k: usize, h: f64) -> f64 {
    let n = row.len();
    if k >= 2 && k + 2 < n {
        (row[k - 2] - 8.0 * row[k - 1] + 8.0 * row[k + 1] - row[k + 2]) / (12.0 * h)
    } else if k == 0 {
        (-3.0 * row[0] + 4.0 * row[1] - row[2]) / (2.0 * h)
    } else if k == n - 1 {
        (3.0 * row[n - 1] - 4.0 * row[n - 2] + row[n - 3]) / (2.0 * h)
    } else {
        (row[k + 1] - row[k - 1]) / (2.0 * h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::GaussLegendre;
    use crate::transforms::sampled::LineGrid;

    /// Independent oracle: `(1/π) ∫₀^R [g(v + r) − g(v − r)]/r dr` by
    /// Gauss–Legendre panels.
    fn symmetric_pair(g: impl Fn(f64) -> f64, v: f64, reach: f64) -> f64 {
        let gl = GaussLegendre::new(20);
        gl.integrate_composite(0.0, reach, 200, |r| (g(v + r) - g(v - r)) / r) / PI
    }

    /// Dawson's function `F(x) = e^{−x²} ∫₀^x e^{s²} ds`.
    fn dawson(x: f64) -> f64 {
        let gl = GaussLegendre::new(30);
        gl.integrate_composite(0.0, x, 8, |s| (s * s - x * x).exp())
    }

    fn gaussian_rows(grid: LineGrid) -> SampledLineFunction {
        SampledLineFunction::from_fn(grid, |_, v| (-v * v).exp()).unwrap()
    }

    #[test]
    fn zero_in_zero_out() {
        let g = SampledLineFunction::zeros(LineGrid::default()).unwrap();
        let p = CylinderPoint::new(1.0, 0.3);
        assert_eq!(hilbert_pv(&g, &p).unwrap(), 0.0);
    }

    #[test]
    fn gaussian_matches_symmetric_pair_oracle() {
        let g = gaussian_rows(LineGrid::default());
        let p = CylinderPoint::new(0.0, 0.5);
        let value = hilbert_pv(&g, &p).unwrap();
        let oracle = symmetric_pair(|x| (-x * x).exp(), 0.5, 12.0);
        assert!((value - oracle).abs() < 1e-6, "{value} vs {oracle}");
        // both agree with the closed form −(2/√π) F(v)
        let exact = -2.0 / PI.sqrt() * dawson(0.5);
        assert!((oracle - exact).abs() < 1e-10);
    }

    #[test]
    fn off_grid_points_and_angles() {
        let g = gaussian_rows(LineGrid::default());
        for v in [-2.345, 0.0123, 1.777] {
            let value = hilbert_pv(&g, &CylinderPoint::new(0.77, v)).unwrap();
            let exact = -2.0 / PI.sqrt() * dawson(v);
            assert!((value - exact).abs() < 1e-6, "v = {v}: {value} vs {exact}");
        }
        assert!(hilbert_pv(&g, &CylinderPoint::new(0.0, 8.0)).is_err());
    }

    #[test]
    fn odd_data_about_the_point() {
        // g(ν) = (ν − v) e^{−(ν−v)²} has no singular part at ν = v; the
        // transform is the plain integral (1/π) ∫ e^{−r²} dr = 1/√π.
        let v0 = 0.25;
        let grid = LineGrid {
            n_theta: 8,
            n_v: 1601,
            v_max: 8.0,
        };
        let g =
            SampledLineFunction::from_fn(grid, |_, nu| (nu - v0) * (-(nu - v0) * (nu - v0)).exp())
                .unwrap();
        let value = hilbert_pv(&g, &CylinderPoint::new(0.0, v0)).unwrap();
        assert!((value - 1.0 / PI.sqrt()).abs() < 1e-8, "{value}");
    }

    #[test]
    fn inverse_linear_tail_closure() {
        // g(ν) = ν/(1 + ν²) has Ĥg(v) = 1/(1 + v²) and decays like 1/ν.
        let grid = LineGrid {
            n_theta: 8,
            n_v: 2049,
            v_max: 16.0,
        };
        let g = SampledLineFunction::from_fn(grid, |_, nu| nu / (1.0 + nu * nu)).unwrap();
        let full = hilbert_grid(&g, TailClosure::InverseLinear).unwrap();
        let bare = hilbert_grid(&g, TailClosure::None).unwrap();
        let mut err_full: f64 = 0.0;
        let mut err_bare: f64 = 0.0;
        for j in 0..grid.n_v {
            let v = grid.v(j);
            if v.abs() > 4.0 {
                continue;
            }
            let exact = 1.0 / (1.0 + v * v);
            err_full = err_full.max((full.value(0, j) - exact).abs());
            err_bare = err_bare.max((bare.value(0, j) - exact).abs());
        }
        assert!(err_full < 3e-4, "{err_full}");
        assert!(err_bare > 10.0 * err_full);
    }

    #[test]
    fn single_node_agrees_with_row() {
        let g = gaussian_rows(LineGrid {
            n_theta: 8,
            n_v: 257,
            v_max: 8.0,
        });
        let row = hilbert_row(g.row(0), 8.0, TailClosure::InverseLinear);
        for j in [0, 5, 128, 200, 256] {
            let s = single_node(g.row(0), 8.0, j, TailClosure::InverseLinear);
            assert!((s - row[j]).abs() < 1e-12);
        }
    }
}
