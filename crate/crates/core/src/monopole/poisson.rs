//! Free-space Poisson solver `Δφ = ρ` on the plane by Green-kernel
//! convolution on a truncated grid.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::quadrature::{derivative_4th, trapezoid_weights};
use crate::transforms::PlaneGrid;
use crate::{Error, Result};

const MULTIPOLE_TERMS: usize = 32;

type Source = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// `φ = G * ρ` with `G(x) = (1/2π) log|x|`, shifted to vanish at an anchor.
pub struct PoissonSolution {
    phi: PlaneGrid,
    grad: [PlaneGrid; 2],
    source: Source,
    moments: Vec<Complex64>,
    /// Sup-norm radius inside which the grid interpolant is used.
    inner: f64,
    offset: f64,
    /// Largest `|Δ_h φ − ρ|` over interior grid nodes.
    pub residual: f64,
    pub anchor: [f64; 2],
}

impl std::fmt::Debug for PoissonSolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PoissonSolution")
            .field("n", &self.phi.n)
            .field("spacing", &self.phi.spacing)
            .field("residual", &self.residual)
            .finish()
    }
}

/// Width of the Gaussian used to remove the kernel singularity.
const SUBTRACT_WIDTH: f64 = 1.0;

/// `∫_{ℝ²} G(y) e^{−|y|²/σ²} dy = (σ²/4)(2 ln σ − γ)`.
fn gaussian_moment(sigma: f64) -> f64 {
    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
    0.25 * sigma * sigma * (2.0 * sigma.ln() - EULER_GAMMA)
}

/// Punctured lattice sum `Σ_{k≠0} h² G(kh) e^{−|kh|²/σ²}`.
fn gaussian_lattice_sum(sigma: f64, h: f64) -> f64 {
    let m = (9.0 * sigma / h).ceil() as i64;
    let mut acc = 0.0;
    for a in -m..=m {
        for b in -m..=m {
            if a == 0 && b == 0 {
                continue;
            }
            let r2 = ((a * a + b * b) as f64) * h * h;
            acc += r2.ln() / (4.0 * PI) * (-r2 / (sigma * sigma)).exp();
        }
    }
    acc * h * h
}

fn fft2(data: &mut [Complex64], m: usize, fft: &Arc<dyn Fft<f64>>) {
    data.par_chunks_mut(m).for_each(|row| fft.process(row));
    transpose(data, m);
    data.par_chunks_mut(m).for_each(|row| fft.process(row));
    transpose(data, m);
}

fn transpose(data: &mut [Complex64], m: usize) {
    for i in 0..m {
        for j in i + 1..m {
            data.swap(i * m + j, j * m + i);
        }
    }
}

/// Solves `Δφ = ρ` on `ℝ²` for `ρ` supported (numerically) in
/// `[−half_width, half_width]²`, normalized so that `φ(anchor) = 0`.
///
/// The convolution uses the trapezoid rule on `G(x − y)(ρ(y) − ρ(x) e^{−|x−y|²/σ²})`,
/// whose integrand vanishes at `y = x`, and adds back the Gaussian part in
/// closed form. Outside the box the field is a multipole expansion.
pub fn solve_poisson(
    source: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    half_width: f64,
    spacing: f64,
    anchor: [f64; 2],
) -> Result<PoissonSolution> {
    let source: Source = Arc::new(source);
    let src = source.clone();
    let rho = PlaneGrid::sample(half_width, spacing, move |x1, x2| src(x1, x2))?;
    let n = rho.n;
    let h = rho.spacing;
    let w1 = trapezoid_weights(n, h);

    let m = (2 * n - 1).next_power_of_two();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);

    let mut kernel = vec![Complex64::new(0.0, 0.0); m * m];
    for a in 0..m {
        let da = if a < n {
            a as f64
        } else if a > m - n {
            a as f64 - m as f64
        } else {
            continue;
        };
        for b in 0..m {
            let db = if b < n {
                b as f64
            } else if b > m - n {
                b as f64 - m as f64
            } else {
                continue;
            };
            if da == 0.0 && db == 0.0 {
                continue;
            }
            let r2 = (da * da + db * db) * h * h;
            kernel[a * m + b] = Complex64::new(r2.ln() / (4.0 * PI), 0.0);
        }
    }
    let mut weighted = vec![Complex64::new(0.0, 0.0); m * m];
    for i in 0..n {
        for j in 0..n {
            let w = w1[i] * w1[j];
            weighted[i * m + j] = Complex64::new(w * rho.at(i, j), 0.0);
        }
    }
    fft2(&mut kernel, m, &fwd);
    fft2(&mut weighted, m, &fwd);
    for k in 0..m * m {
        weighted[k] *= kernel[k];
    }
    fft2(&mut weighted, m, &inv);
    let scale = 1.0 / (m * m) as f64;

    let correction = gaussian_moment(SUBTRACT_WIDTH) - gaussian_lattice_sum(SUBTRACT_WIDTH, h);
    let mut phi_vals = vec![0.0; n * n];
    phi_vals.par_iter_mut().enumerate().for_each(|(k, out)| {
        let (i, j) = (k / n, k % n);
        let r = rho.at(i, j);
        let s1 = weighted[i * m + j].re * scale;
        *out = s1 + r * correction;
    });
    let phi = PlaneGrid::from_values(rho.origin, h, n, phi_vals);

    let mut g1 = vec![0.0; n * n];
    let mut g2 = vec![0.0; n * n];
    for j in 0..n {
        let col: Vec<f64> = (0..n).map(|i| phi.at(i, j)).collect();
        for (i, d) in derivative_4th(&col, h).into_iter().enumerate() {
            g1[i * n + j] = d;
        }
    }
    for i in 0..n {
        let d = derivative_4th(&phi.values[i * n..(i + 1) * n], h);
        g2[i * n..(i + 1) * n].copy_from_slice(&d);
    }
    let grad = [
        PlaneGrid::from_values(rho.origin, h, n, g1),
        PlaneGrid::from_values(rho.origin, h, n, g2),
    ];

    let mut residual: f64 = 0.0;
    let c = 1.0 / (12.0 * h * h);
    for i in 4..n.saturating_sub(4) {
        for j in 4..n - 4 {
            let d2 = |f: &dyn Fn(isize) -> f64| {
                (-f(-2) + 16.0 * f(-1) - 30.0 * f(0) + 16.0 * f(1) - f(2)) * c
            };
            let lap = d2(&|s| phi.at((i as isize + s) as usize, j))
                + d2(&|s| phi.at(i, (j as isize + s) as usize));
            residual = residual.max((lap - rho.at(i, j)).abs());
        }
    }

    let mut moments = vec![Complex64::new(0.0, 0.0); MULTIPOLE_TERMS + 1];
    for i in 0..n {
        for j in 0..n {
            let q = w1[i] * w1[j] * rho.at(i, j);
            if q == 0.0 {
                continue;
            }
            let y = Complex64::new(rho.coord(i), rho.coord(j));
            let mut yk = Complex64::new(q, 0.0);
            for mk in moments.iter_mut() {
                *mk += yk;
                yk *= y;
            }
        }
    }

    let mut sol = PoissonSolution {
        phi,
        grad,
        source,
        moments,
        inner: -rho.origin - 3.0 * h,
        offset: 0.0,
        residual,
        anchor,
    };
    sol.offset = sol.value(anchor[0], anchor[1]);
    if !sol.offset.is_finite() {
        return Err(Error::InvalidArgument("anchor evaluation failed".into()));
    }
    Ok(sol)
}

impl PoissonSolution {
    fn inside(&self, x1: f64, x2: f64) -> bool {
        x1.abs().max(x2.abs()) <= self.inner
    }

    fn far(&self, x1: f64, x2: f64) -> [Complex64; 3] {
        let z = Complex64::new(x1, x2);
        let zi = z.inv();
        let q0 = self.moments[0];
        let mut f = q0 * z.ln();
        let mut f1 = q0 * zi;
        let mut f2 = -q0 * zi * zi;
        let mut zk = zi;
        for (k, qk) in self.moments.iter().enumerate().skip(1) {
            let kf = k as f64;
            f -= qk * zk / kf;
            f1 += qk * zk * zi;
            f2 -= qk * zk * zi * zi * (kf + 1.0);
            zk *= zi;
        }
        let s = 1.0 / (2.0 * PI);
        [f * s, f1 * s, f2 * s]
    }

    pub fn value(&self, x1: f64, x2: f64) -> f64 {
        let raw = if self.inside(x1, x2) {
            self.phi.interpolate(x1, x2).expect("inside grid")
        } else {
            self.far(x1, x2)[0].re
        };
        raw - self.offset
    }

    pub fn gradient(&self, x1: f64, x2: f64) -> [f64; 2] {
        if self.inside(x1, x2) {
            [
                self.grad[0].interpolate(x1, x2).expect("inside grid"),
                self.grad[1].interpolate(x1, x2).expect("inside grid"),
            ]
        } else {
            let d = self.far(x1, x2)[1];
            [d.re, -d.im]
        }
    }

    /// Second derivatives `[[φ_11, φ_12], [φ_12, φ_22]]`. Inside the grid the
    /// trace-free part comes from the interpolant and the trace is `ρ(x)`.
    pub fn hessian(&self, x1: f64, x2: f64) -> [[f64; 2]; 2] {
        if self.inside(x1, x2) {
            let d1 = self.grad[0]
                .interpolate_gradient(x1, x2)
                .expect("inside grid");
            let d2 = self.grad[1]
                .interpolate_gradient(x1, x2)
                .expect("inside grid");
            let h11 = d1[0];
            let h22 = d2[1];
            let h12 = 0.5 * (d1[1] + d2[0]);
            let half_diff = 0.5 * (h11 - h22);
            let half_trace = 0.5 * (self.source)(x1, x2);
            [[half_trace + half_diff, h12], [h12, half_trace - half_diff]]
        } else {
            let d = self.far(x1, x2)[2];
            [[d.re, -d.im], [-d.im, -d.re]]
        }
    }

    pub fn source(&self, x1: f64, x2: f64) -> f64 {
        (self.source)(x1, x2)
    }

    pub fn half_width(&self) -> f64 {
        -self.phi.origin
    }

    pub fn spacing(&self) -> f64 {
        self.phi.spacing
    }
}
