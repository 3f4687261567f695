//! Wave fields: `u = Rh` evaluated by quadrature, or an independent leapfrog
//! solution of `□u = 0` from Cauchy data.

use std::sync::Arc;

use rayon::prelude::*;

use super::cylinder::{Deriv, RTransform};
use super::plane::PlaneFunction;
use crate::geometry::SpacetimePoint;
use crate::{Error, Result};

/// Leapfrog solution stored on the full `(t, x1, x2)` lattice.
#[derive(Debug, Clone)]
pub struct FdWaveField {
    dx: f64,
    dt: f64,
    half_box: f64,
    n: usize,
    steps: usize,
    /// Levels `k = −steps..=steps`, each `n × n` row-major in `(x1, x2)`.
    levels: Vec<Vec<f64>>,
}

/// Solves `□u = 0` on `[−box, box]²` with `Δt = 0.5·Δx` up to `|t| ≤ T`.
///
/// Boundary nodes keep their initial values; any evaluation whose
/// dependence cone reaches them is refused.
pub fn wave_fd_solve(
    f0: &PlaneFunction,
    f1: &PlaneFunction,
    t_max: f64,
    dx: f64,
    half_box: f64,
) -> Result<FdWaveField> {
    if !(dx > 0.0 && half_box > 2.0 * dx && t_max >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "invalid FD grid: T = {t_max}, Δx = {dx}, box = {half_box}"
        )));
    }
    let n = (2.0 * half_box / dx).round() as usize + 1;
    let dx = 2.0 * half_box / (n - 1) as f64;
    let dt = 0.5 * dx;
    let steps = (t_max / dt - 1e-9).ceil().max(0.0) as usize;
    let coord = |i: usize| -half_box + dx * i as f64;
    let sample = |f: &PlaneFunction| -> Vec<f64> {
        (0..n * n)
            .into_par_iter()
            .map(|k| f.value(coord(k / n), coord(k % n)))
            .collect()
    };
    let u0 = sample(f0);
    let v0 = sample(f1);
    let lap0 = laplacian(&u0, n, dx);
    let mut fwd = vec![u0.clone()];
    let mut bwd = vec![u0.clone()];
    if steps > 0 {
        let first = |sign: f64| -> Vec<f64> {
            let mut u1 = u0.clone();
            for i in 1..n - 1 {
                for j in 1..n - 1 {
                    let k = i * n + j;
                    u1[k] = u0[k] + sign * dt * v0[k] + 0.5 * dt * dt * lap0[k];
                }
            }
            u1
        };
        fwd.push(first(1.0));
        bwd.push(first(-1.0));
        let r2 = (dt / dx) * (dt / dx);
        for seq in [&mut fwd, &mut bwd] {
            while seq.len() <= steps {
                let cur = &seq[seq.len() - 1];
                let prev = &seq[seq.len() - 2];
                let mut next = cur.clone();
                next.par_chunks_mut(n)
                    .enumerate()
                    .skip(1)
                    .take(n - 2)
                    .for_each(|(i, row)| {
                        for j in 1..n - 1 {
                            let k = i * n + j;
                            let lap =
                                cur[k + n] + cur[k - n] + cur[k + 1] + cur[k - 1] - 4.0 * cur[k];
                            row[j] = 2.0 * cur[k] - prev[k] + r2 * lap;
                        }
                    });
                seq.push(next);
            }
        }
    }
    bwd.remove(0);
    bwd.reverse();
    bwd.extend(fwd);
    Ok(FdWaveField {
        dx,
        dt,
        half_box,
        n,
        steps,
        levels: bwd,
    })
}

fn laplacian(u: &[f64], n: usize, dx: f64) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    let inv = 1.0 / (dx * dx);
    for i in 1..n - 1 {
        for j in 1..n - 1 {
            let k = i * n + j;
            out[k] = (u[k + n] + u[k - n] + u[k + 1] + u[k - 1] - 4.0 * u[k]) * inv;
        }
    }
    out
}

impl FdWaveField {
    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t_range(&self) -> f64 {
        self.steps as f64 * self.dt
    }

    /// Lattice value at level `k` (signed) and spatial indices, with the
    /// causality guard applied.
    pub fn node(&self, k: i64, i: usize, j: usize) -> Result<f64> {
        let steps = self.steps as i64;
        if k.abs() > steps || i >= self.n || j >= self.n {
            return Err(Error::Causality {
                t: k as f64 * self.dt,
                x1: self.coord(i),
                x2: self.coord(j),
            });
        }
        let margin = i.min(j).min(self.n - 1 - i).min(self.n - 1 - j) as i64;
        if margin < k.abs() {
            return Err(Error::Causality {
                t: k as f64 * self.dt,
                x1: self.coord(i),
                x2: self.coord(j),
            });
        }
        Ok(self.levels[(k + steps) as usize][i * self.n + j])
    }

    fn coord(&self, i: usize) -> f64 {
        -self.half_box + self.dx * i as f64
    }

    /// Trilinear interpolation of the lattice solution.
    pub fn value(&self, p: &SpacetimePoint) -> Result<f64> {
        let err = || Error::Causality {
            t: p.t,
            x1: p.x1,
            x2: p.x2,
        };
        let ut = p.t / self.dt;
        let u1 = (p.x1 + self.half_box) / self.dx;
        let u2 = (p.x2 + self.half_box) / self.dx;
        if !(u1 >= 0.0 && u2 >= 0.0 && u1 <= (self.n - 1) as f64 && u2 <= (self.n - 1) as f64) {
            return Err(err());
        }
        let snap = |u: f64| {
            if (u - u.round()).abs() < 1e-9 {
                u.round()
            } else {
                u
            }
        };
        let (ut, u1, u2) = (snap(ut), snap(u1), snap(u2));
        let k0 = ut.floor() as i64;
        let i0 = (u1.floor() as usize).min(self.n - 2);
        let j0 = (u2.floor() as usize).min(self.n - 2);
        let (st, s1, s2) = (ut - k0 as f64, u1 - i0 as f64, u2 - j0 as f64);
        let mut acc = 0.0;
        for (dk, wt) in [(0, 1.0 - st), (1, st)] {
            if wt == 0.0 {
                continue;
            }
            for (di, w1) in [(0, 1.0 - s1), (1, s1)] {
                if w1 == 0.0 {
                    continue;
                }
                for (dj, w2) in [(0, 1.0 - s2), (1, s2)] {
                    if w2 == 0.0 {
                        continue;
                    }
                    acc += wt * w1 * w2 * self.node(k0 + dk, i0 + di, j0 + dj)?;
                }
            }
        }
        Ok(acc)
    }
}

/// `u(t, x)` backed by the transform `R` or by the lattice oracle.
#[derive(Debug, Clone)]
pub enum WaveField {
    Transform(Arc<RTransform>),
    Fd(Arc<FdWaveField>),
}

impl WaveField {
    pub fn value(&self, p: &SpacetimePoint) -> Result<f64> {
        self.partial(p, [0, 0, 0])
    }

    /// Partials up to order 4 for the transform backing, order 0 for the
    /// lattice backing.
    pub fn partial(&self, p: &SpacetimePoint, deriv: Deriv) -> Result<f64> {
        match self {
            WaveField::Transform(r) => r.eval(p, deriv),
            WaveField::Fd(fd) => {
                let order = deriv.iter().sum::<u32>();
                if order > 0 {
                    return Err(Error::OrderTooHigh { order, max: 0 });
                }
                fd.value(p)
            }
        }
    }
}
