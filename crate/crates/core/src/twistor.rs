//! Twistor space `𝒯 = {[y0:y1:y2:y3] ∈ ℂP³ | (y0, y1) ≠ 0}`, the deformed
//! real locus `𝒫_h`, and the holomorphic disks bounding it.

use std::f64::consts::TAU;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::geometry::{normalize_angle, CylinderPoint};
use crate::transforms::CylinderFunction;
use crate::{Error, Result};

/// Default Fourier truncation for `η`.
pub const DEFAULT_K: usize = 32;

const EQUATOR_TOL: f64 = 1e-12;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Index of the largest-modulus entry, lowest index on ties.
fn argmax(ys: &[Complex64]) -> usize {
    let mut best = 0;
    for (i, y) in ys.iter().enumerate() {
        if y.norm() > ys[best].norm() {
            best = i;
        }
    }
    best
}

/// A point of `ℂP³`, stored as the representative whose largest-modulus
/// coordinate is 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProjPoint3 {
    pub y: [Complex64; 4],
}

impl ProjPoint3 {
    pub fn new(y: [Complex64; 4]) -> Result<Self> {
        if y.iter().all(|c| c.norm() == 0.0) {
            return Err(Error::InvalidArgument("zero homogeneous vector".into()));
        }
        if !y.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
            return Err(Error::InvalidArgument("non-finite coordinate".into()));
        }
        let m = y[argmax(&y)];
        Ok(Self {
            y: y.map(|c| c / m),
        })
    }

    /// `σ[y0:y1:y2:y3] = [ȳ1:ȳ0:ȳ3:ȳ2]`.
    pub fn sigma(&self) -> Self {
        let y = self.y;
        Self::new([y[1].conj(), y[0].conj(), y[3].conj(), y[2].conj()]).expect("nonzero")
    }

    /// Largest coordinate difference after scaling both representatives so
    /// that the largest-modulus coordinate of `self` is 1.
    pub fn distance(&self, other: &Self) -> f64 {
        let m = argmax(&self.y);
        if other.y[m].norm() == 0.0 {
            return f64::INFINITY;
        }
        let (sa, sb) = (self.y[m].inv(), other.y[m].inv());
        (0..4)
            .map(|i| (self.y[i] * sa - other.y[i] * sb).norm())
            .fold(0.0, f64::max)
    }

    /// Largest coordinate difference between representatives scaled so that
    /// `y0 = 1`.
    pub fn affine_distance(&self, other: &Self) -> Result<f64> {
        let (a, b) = (self.affine()?, other.affine()?);
        Ok((0..3).map(|i| (a[i] - b[i]).norm()).fold(0.0, f64::max))
    }

    /// `(y1, y2, y3) / y0`.
    pub fn affine(&self) -> Result<[Complex64; 3]> {
        let y0 = self.y[0];
        if y0.norm() == 0.0 {
            return Err(Error::AtInfinity);
        }
        Ok([self.y[1] / y0, self.y[2] / y0, self.y[3] / y0])
    }
}

/// `[y0:y1; v]` with `[λy0:λy1; λ²v]` identified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightedPoint {
    pub base: [Complex64; 2],
    pub fiber: Complex64,
}

impl WeightedPoint {
    pub fn new(base: [Complex64; 2], fiber: Complex64) -> Result<Self> {
        if base[0].norm() == 0.0 && base[1].norm() == 0.0 {
            return Err(Error::AtInfinity);
        }
        let l = base[argmax(&base)].inv();
        Ok(Self {
            base: base.map(|b| b * l),
            fiber: fiber * l * l,
        })
    }

    /// Largest coordinate difference after rescaling both to `y0 = 1`.
    pub fn affine_distance(&self, other: &Self) -> Result<f64> {
        let aff = |w: &Self| -> Result<[Complex64; 2]> {
            let y0 = w.base[0];
            if y0.norm() == 0.0 {
                return Err(Error::AtInfinity);
            }
            Ok([w.base[1] / y0, w.fiber / (y0 * y0)])
        };
        let (a, b) = (aff(self)?, aff(other)?);
        Ok((a[0] - b[0]).norm().max((a[1] - b[1]).norm()))
    }

    /// `(θ, v)` for a point over the real circle: `y1/y0 = e^{iθ}` and
    /// `v = fiber / (y0 y1)`, which is real on `𝒞`.
    pub fn cylinder_coords(&self) -> Result<(f64, f64)> {
        let [y0, y1] = self.base;
        if (y0.norm() - y1.norm()).abs() > EQUATOR_TOL * y0.norm().max(y1.norm()) {
            return Err(Error::NotOverEquator {
                y0: y0.norm(),
                y1: y1.norm(),
            });
        }
        let theta = normalize_angle((y1 / y0).arg());
        let v = self.fiber / (y0 * y1);
        Ok((theta, v.re))
    }
}

/// `[e^{−iθ/2} : e^{iθ/2} : e^{iθ/2}(v − iν) : e^{−iθ/2}(v + iν)]`.
pub fn trivialize(p: &CylinderPoint, nu: Complex64) -> ProjPoint3 {
    let half = Complex64::from_polar(1.0, 0.5 * p.theta());
    let hc = half.conj();
    let v = c(p.v, 0.0);
    let i = Complex64::i();
    ProjPoint3::new([hc, half, half * (v - i * nu), hc * (v + i * nu)]).expect("nonzero")
}

/// Inverse of [`trivialize`] on points over the real circle: `(θ, v, ν)`.
pub fn untrivialize(q: &ProjPoint3) -> Result<(CylinderPoint, Complex64)> {
    let [y0, y1, y2, y3] = q.y;
    let (n0, n1) = (y0.norm(), y1.norm());
    if n0 == 0.0 || (n0 - n1).abs() > EQUATOR_TOL * n0.max(n1) {
        return Err(Error::NotOverEquator { y0: n0, y1: n1 });
    }
    let omega = y1 / y0;
    let theta = normalize_angle(omega.arg());
    // y2 / y1 = v − iν, y3 / y0 = v + iν
    let a = y2 / y1;
    let b = y3 / y0;
    let v = 0.5 * (a + b);
    if v.im.abs() > 1e-9 * (1.0 + v.re.abs()) {
        return Err(Error::InvalidArgument(format!(
            "point is not over the real cylinder: Im v = {:e}",
            v.im
        )));
    }
    let nu = (b - a) / (2.0 * Complex64::i());
    Ok((CylinderPoint::new(theta, v.re), nu))
}

/// `Im ν − h(θ, v)`; zero exactly on `𝒫_h`.
pub fn in_ph_residual(h: &CylinderFunction, q: &ProjPoint3) -> Result<f64> {
    let (p, nu) = untrivialize(q)?;
    Ok(nu.im - h.eval_unchecked(p.theta(), p.v, 0))
}

/// `[y0:y1:y2 − iνy1 : y3 + iνy0]`.
pub fn act_nu(nu: Complex64, q: &ProjPoint3) -> Result<ProjPoint3> {
    let [y0, y1, y2, y3] = q.y;
    if y0.norm() == 0.0 && y1.norm() == 0.0 {
        return Err(Error::AtInfinity);
    }
    let i = Complex64::i();
    ProjPoint3::new([y0, y1, y2 - i * nu * y1, y3 + i * nu * y0])
}

/// `π[y0:y1:y2:y3] = [y0:y1; (y0y2 + y1y3)/2]`.
pub fn project_pi(q: &ProjPoint3) -> Result<WeightedPoint> {
    let [y0, y1, y2, y3] = q.y;
    WeightedPoint::new([y0, y1], 0.5 * (y0 * y2 + y1 * y3))
}

/// `[1:ω; z/2 + tω + (z̄/2)ω²]`.
pub fn underline_disk_point(t: f64, z: Complex64, omega: Complex64) -> Result<WeightedPoint> {
    check_disk(omega)?;
    WeightedPoint::new(
        [c(1.0, 0.0), omega],
        0.5 * z + t * omega + 0.5 * z.conj() * omega * omega,
    )
}

fn check_disk(omega: Complex64) -> Result<()> {
    if omega.norm() > 1.0 + 1e-12 || !omega.norm().is_finite() {
        return Err(Error::OutsideDisk(omega.norm()));
    }
    Ok(())
}

/// Fourier coefficients of `H(θ) = h(θ, t + Re(z e^{−iθ}))`, `|k| ≤ K`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FourierSplit {
    pub t: f64,
    pub z: Complex64,
    /// `H_0, …, H_K`; negative indices are conjugates.
    pub coeffs: Vec<Complex64>,
    pub n_theta: usize,
    /// `|H_{K−1}| + |H_K|`.
    pub tail_bound: f64,
}

impl FourierSplit {
    pub fn k(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `u = H_0`.
    pub fn u(&self) -> f64 {
        self.coeffs[0].re
    }

    /// `H_k` for `|k| ≤ K`, zero beyond.
    pub fn coeff(&self, k: i64) -> Complex64 {
        let a = k.unsigned_abs() as usize;
        if a > self.k() {
            return c(0.0, 0.0);
        }
        if k >= 0 {
            self.coeffs[a]
        } else {
            self.coeffs[a].conj()
        }
    }

    /// `H_+(ω) = Σ_{k=1}^{K} H_k ω^k`.
    pub fn h_plus(&self, omega: Complex64) -> Complex64 {
        // Horner
        let mut acc = c(0.0, 0.0);
        for hk in self.coeffs.iter().skip(1).rev() {
            acc = (acc + hk) * omega;
        }
        acc
    }

    /// `η = u + 2H_+`.
    pub fn eta(&self, omega: Complex64) -> Complex64 {
        self.u() + 2.0 * self.h_plus(omega)
    }
}

/// `H_k` by the trapezoid rule on `n_theta` nodes, with `H_{−k} = conj(H_k)`
/// enforced by averaging.
pub fn fourier_h(
    h: &CylinderFunction,
    t: f64,
    z: Complex64,
    k: usize,
    n_theta: usize,
) -> Result<FourierSplit> {
    if k == 0 {
        return Err(Error::InvalidArgument("K must be at least 1".into()));
    }
    if n_theta < 4 * k {
        return Err(Error::Aliasing { k, n: n_theta });
    }
    let samples: Vec<f64> = (0..n_theta)
        .map(|j| {
            let th = TAU * j as f64 / n_theta as f64;
            h.eval_unchecked(th, t + z.re * th.cos() + z.im * th.sin(), 0)
        })
        .collect();
    let dft = |m: i64| -> Complex64 {
        let mut acc = c(0.0, 0.0);
        for (j, s) in samples.iter().enumerate() {
            let th = TAU * j as f64 / n_theta as f64;
            acc += Complex64::from_polar(*s, -(m as f64) * th);
        }
        acc / n_theta as f64
    };
    let mut coeffs = Vec::with_capacity(k + 1);
    let h0 = samples.iter().sum::<f64>() / n_theta as f64;
    coeffs.push(c(h0, 0.0));
    for m in 1..=k as i64 {
        coeffs.push(0.5 * (dft(m) + dft(-m).conj()));
    }
    let tail_bound = coeffs[k].norm() + coeffs[k - 1].norm();
    Ok(FourierSplit {
        t,
        z,
        coeffs,
        n_theta,
        tail_bound,
    })
}

/// θ-nodes used by default for a truncation `K`.
pub fn default_n_theta(k: usize) -> usize {
    (8 * k).max(64)
}

/// `[1 : ω : (t − is + η)ω + z : t + is − η + z̄ω]` from a precomputed split.
pub fn disk_point_from(split: &FourierSplit, s: f64, omega: Complex64) -> Result<ProjPoint3> {
    check_disk(omega)?;
    let eta = split.eta(omega);
    let (t, z) = (split.t, split.z);
    let is = c(0.0, s);
    ProjPoint3::new([
        c(1.0, 0.0),
        omega,
        (t - is + eta) * omega + z,
        t + is - eta + z.conj() * omega,
    ])
}

pub fn disk_point(
    h: &CylinderFunction,
    s: f64,
    t: f64,
    z: Complex64,
    omega: Complex64,
    k: usize,
) -> Result<ProjPoint3> {
    let split = fourier_h(h, t, z, k, default_n_theta(k))?;
    disk_point_from(&split, s, omega)
}

/// Disk of the flat family `D′_{(a,b)} = {[ω : 1 : ā + bω : b̄ + aω]}`.
pub fn flat_disk_prime(a: Complex64, b: Complex64, omega: Complex64) -> Result<ProjPoint3> {
    check_disk(omega)?;
    ProjPoint3::new([
        omega,
        c(1.0, 0.0),
        a.conj() + b * omega,
        b.conj() + a * omega,
    ])
}

/// Which `κ̃` enters the boundary functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Kappa {
    /// `κ̃ = s + i(H_+ − H_−)`.
    #[default]
    Corrected,
    /// `κ̃ = s`.
    Bare,
}

/// Largest modulus of the strictly negative Fourier coefficients of
/// `F1 = z − ω(iκ̃ − H)` and `F2 = z̄ω + iκ̃ − H` on `|ω| = 1`.
pub fn holomorphy_residual(
    h: &CylinderFunction,
    s: f64,
    t: f64,
    z: Complex64,
    k: usize,
    n_theta: usize,
) -> Result<f64> {
    holomorphy_residual_with(h, s, t, z, k, n_theta, Kappa::Corrected)
}

pub fn holomorphy_residual_with(
    h: &CylinderFunction,
    s: f64,
    t: f64,
    z: Complex64,
    k: usize,
    n_theta: usize,
    kappa: Kappa,
) -> Result<f64> {
    let split = fourier_h(h, t, z, k, n_theta)?;
    let i = Complex64::i();
    let mut f1 = Vec::with_capacity(n_theta);
    let mut f2 = Vec::with_capacity(n_theta);
    for j in 0..n_theta {
        let th = TAU * j as f64 / n_theta as f64;
        let w = Complex64::from_polar(1.0, th);
        let hv = h.eval_unchecked(th, t + z.re * th.cos() + z.im * th.sin(), 0);
        let kt = match kappa {
            Kappa::Corrected => {
                let hp = split.h_plus(w);
                // on |ω| = 1, H_− = conj(H_+)
                s + i * (hp - hp.conj())
            }
            Kappa::Bare => c(s, 0.0),
        };
        f1.push(z - w * (i * kt - hv));
        f2.push(z.conj() * w + i * kt - hv);
    }
    let mut worst = 0.0f64;
    for m in 1..n_theta as i64 / 2 {
        for f in [&f1, &f2] {
            let mut acc = c(0.0, 0.0);
            for (j, v) in f.iter().enumerate() {
                let th = TAU * j as f64 / n_theta as f64;
                acc += v * Complex64::from_polar(1.0, m as f64 * th);
            }
            worst = worst.max(acc.norm() / n_theta as f64);
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryRow {
    pub theta: f64,
    pub v: f64,
    pub im_nu: f64,
    pub residual: f64,
}

/// Samples of one holomorphic disk.
#[derive(Debug, Clone, Serialize)]
pub struct DiskSample {
    pub s: f64,
    pub t: f64,
    pub z: Complex64,
    pub k: usize,
    pub omegas: Vec<Complex64>,
    pub points: Vec<ProjPoint3>,
    pub eta: Vec<Complex64>,
    pub boundary: Vec<BoundaryRow>,
    pub max_boundary_residual: f64,
    pub holomorphy_residual: f64,
    pub tail_bound: f64,
}

#[derive(Debug, Clone, Serialize)]
struct DiskSummary {
    s: f64,
    t: f64,
    z: Complex64,
    k: usize,
    samples: usize,
    boundary_samples: usize,
    max_boundary_residual: f64,
    holomorphy_residual: f64,
    tail_bound: f64,
}

impl DiskSample {
    /// Parameters, truncation and residual summary as JSON.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&DiskSummary {
            s: self.s,
            t: self.t,
            z: self.z,
            k: self.k,
            samples: self.omegas.len(),
            boundary_samples: self.boundary.len(),
            max_boundary_residual: self.max_boundary_residual,
            holomorphy_residual: self.holomorphy_residual,
            tail_bound: self.tail_bound,
        })?)
    }

    /// CSV with columns `theta,v,Im_nu,residual`.
    pub fn write_boundary_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "theta,v,Im_nu,residual")?;
        for r in &self.boundary {
            writeln!(w, "{},{},{},{:e}", r.theta, r.v, r.im_nu, r.residual)?;
        }
        Ok(())
    }
}

/// Samples the disk `𝒟_{(s,t,z)}` on `n_boundary` points of `|ω| = 1` and
/// `n_radial` interior rings of the same angular resolution plus the centre.
pub fn sample_disk(
    h: &CylinderFunction,
    s: f64,
    t: f64,
    z: Complex64,
    k: usize,
    n_boundary: usize,
    n_radial: usize,
) -> Result<DiskSample> {
    if n_boundary == 0 {
        return Err(Error::InvalidArgument("n_boundary must be positive".into()));
    }
    let n_theta = default_n_theta(k);
    let split = fourier_h(h, t, z, k, n_theta)?;
    let mut omegas = vec![c(0.0, 0.0)];
    for r in 1..=n_radial {
        let rad = r as f64 / (n_radial + 1) as f64;
        for j in 0..n_boundary {
            omegas.push(Complex64::from_polar(
                rad,
                TAU * j as f64 / n_boundary as f64,
            ));
        }
    }
    let first_boundary = omegas.len();
    for j in 0..n_boundary {
        let th = TAU * j as f64 / n_boundary as f64;
        omegas.push(c(th.cos(), th.sin()));
    }
    let points = omegas
        .par_iter()
        .map(|w| disk_point_from(&split, s, *w))
        .collect::<Result<Vec<_>>>()?;
    let eta: Vec<Complex64> = omegas.iter().map(|w| split.eta(*w)).collect();
    let boundary = points[first_boundary..]
        .iter()
        .map(|q| {
            let (p, nu) = untrivialize(q)?;
            let residual = nu.im - h.eval_unchecked(p.theta(), p.v, 0);
            Ok(BoundaryRow {
                theta: p.theta(),
                v: p.v,
                im_nu: nu.im,
                residual,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_boundary_residual = boundary.iter().fold(0.0f64, |m, r| m.max(r.residual.abs()));
    let holo = holomorphy_residual(h, s, t, z, k, n_theta)?;
    Ok(DiskSample {
        s,
        t,
        z,
        k,
        omegas,
        points,
        eta,
        boundary,
        max_boundary_residual,
        holomorphy_residual: holo,
        tail_bound: split.tail_bound,
    })
}
