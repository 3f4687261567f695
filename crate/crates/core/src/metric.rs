//! The neutral metric `g = −V⁻¹(ds + A)² + V(−dt² + dx1² + dx2²)` on
//! `ℝ × ℝ^{1,2}`, its curvature, the Weyl split and the β-plane check.
//!
//! Coordinates are ordered `(s, t, x1, x2)`; nothing depends on `s`.

use std::io::Write;

use nalgebra::{Matrix4, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::geometry::SpacetimePoint;
use crate::monopole::MonopolePair;
use crate::{Error, Result};

pub type Point4 = [f64; 4];
pub type Mat4 = [[f64; 4]; 4];
pub type Tensor3 = [[[f64; 4]; 4]; 4];
pub type Tensor4 = [[[[f64; 4]; 4]; 4]; 4];

/// Default step for differentiating the Christoffel symbols.
pub const DEFAULT_STEP: f64 = 1e-3;

/// Sign of `ε_{stx1x2}`. With this choice the anti-self-dual Weyl part of
/// every monopole metric vanishes.
pub const ORIENTATION: f64 = -1.0;

/// Metric components and first partials, `dg[l][i][j] = ∂_l g_ij`.
#[derive(Debug, Clone, Copy)]
pub struct MetricJet {
    pub g: Mat4,
    pub dg: [Mat4; 4],
}

/// A metric on a patch of `ℝ⁴` with first partials.
pub trait MetricField: Send + Sync {
    fn jet(&self, p: &Point4) -> Result<MetricJet>;
}

fn spacetime(p: &Point4) -> SpacetimePoint {
    SpacetimePoint::new(p[1], p[2], p[3])
}

impl MetricField for MonopolePair {
    fn jet(&self, p: &Point4) -> Result<MetricJet> {
        let q = spacetime(p);
        let v = self.v_at(&q);
        if !(v > 0.0) {
            return Err(Error::Degenerate { v, point: *p });
        }
        let axes = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
        let a = self.a_at(&q);
        let dv = axes.map(|d| self.v_partial(&q, d));
        // da[l][mu] = ∂_l A_mu
        let da = axes.map(|d| [0, 1, 2].map(|mu| self.a_partial(mu, &q, d)));
        let eta = [-1.0, 1.0, 1.0];

        let mut g = [[0.0; 4]; 4];
        g[0][0] = -1.0 / v;
        for mu in 0..3 {
            g[0][mu + 1] = -a[mu] / v;
            g[mu + 1][0] = g[0][mu + 1];
            for nu in 0..3 {
                g[mu + 1][nu + 1] = -a[mu] * a[nu] / v;
            }
            g[mu + 1][mu + 1] += v * eta[mu];
        }
        let mut dg = [[[0.0; 4]; 4]; 4];
        for l in 0..3 {
            let d = &mut dg[l + 1];
            let inv2 = dv[l] / (v * v);
            d[0][0] = inv2;
            for mu in 0..3 {
                d[0][mu + 1] = -da[l][mu] / v + a[mu] * inv2;
                d[mu + 1][0] = d[0][mu + 1];
                for nu in 0..3 {
                    d[mu + 1][nu + 1] =
                        -(da[l][mu] * a[nu] + a[mu] * da[l][nu]) / v + a[mu] * a[nu] * inv2;
                }
                d[mu + 1][mu + 1] += dv[l] * eta[mu];
            }
        }
        Ok(MetricJet { g, dg })
    }
}

/// `λ g` for a constant `λ > 0`.
pub struct Scaled<M> {
    pub inner: M,
    pub lambda: f64,
}

impl<M: MetricField> MetricField for Scaled<M> {
    fn jet(&self, p: &Point4) -> Result<MetricJet> {
        let mut j = self.inner.jet(p)?;
        let l = self.lambda;
        j.g.iter_mut().flatten().for_each(|x| *x *= l);
        j.dg.iter_mut().flatten().flatten().for_each(|x| *x *= l);
        Ok(j)
    }
}

/// `g_{μν}` of the monopole metric at `p`.
pub fn metric_at(m: &MonopolePair, p: &Point4) -> Result<Mat4> {
    Ok(m.jet(p)?.g)
}

fn to_matrix(g: &Mat4) -> Matrix4<f64> {
    Matrix4::from_fn(|i, j| g[i][j])
}

pub fn inverse(g: &Mat4) -> Result<Mat4> {
    let inv = to_matrix(g)
        .try_inverse()
        .ok_or_else(|| Error::InvalidArgument("singular metric".into()))?;
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = inv[(i, j)];
        }
    }
    Ok(out)
}

/// `(negative, positive)` eigenvalue counts.
pub fn signature(g: &Mat4) -> (usize, usize) {
    let e = SymmetricEigen::new(to_matrix(g)).eigenvalues;
    let neg = e.iter().filter(|x| **x < 0.0).count();
    let pos = e.iter().filter(|x| **x > 0.0).count();
    (neg, pos)
}

/// `Γ^a_{bc}`.
pub fn christoffel(jet: &MetricJet) -> Result<Tensor3> {
    let gi = inverse(&jet.g)?;
    let dg = &jet.dg;
    let mut out = [[[0.0; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for c in b..4 {
                let s: f64 = (0..4)
                    .map(|d| gi[a][d] * (dg[b][d][c] + dg[c][d][b] - dg[d][b][c]))
                    .sum();
                out[a][b][c] = 0.5 * s;
                out[a][c][b] = 0.5 * s;
            }
        }
    }
    Ok(out)
}

fn shifted(p: &Point4, axis: usize, h: f64) -> Point4 {
    let mut q = *p;
    q[axis] += h;
    q
}

#[derive(Debug, Clone, Serialize)]
pub struct CurvatureReport {
    pub point: Point4,
    pub step: f64,
    pub metric: Mat4,
    pub inverse: Mat4,
    pub christoffel: Tensor3,
    /// All indices down.
    pub riemann: Tensor4,
    pub weyl: Tensor4,
    /// Euclidean coefficient norms `(Σ C±_{abcd}²)^{1/2}`.
    pub weyl_sd_norm: f64,
    pub weyl_asd_norm: f64,
    /// Metric contractions `C±_{abcd} C±^{abcd}`.
    pub weyl_sd_metric_norm: f64,
    pub weyl_asd_metric_norm: f64,
    /// Smallest `V` over the stencil, when the source is a monopole metric.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_v: Option<f64>,
}

impl CurvatureReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn levi_civita(idx: [usize; 4]) -> f64 {
    let mut inversions = 0;
    for i in 0..4 {
        for j in i + 1..4 {
            if idx[i] == idx[j] {
                return 0.0;
            }
            if idx[i] > idx[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn lower_first(g: &Mat4, r_up: &Tensor4) -> Tensor4 {
    let mut out = [[[[0.0; 4]; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    out[a][b][c][d] = (0..4).map(|e| g[a][e] * r_up[e][b][c][d]).sum();
                }
            }
        }
    }
    out
}

/// Weyl tensor from the all-lower Riemann tensor in dimension four.
pub fn weyl_tensor(g: &Mat4, gi: &Mat4, r: &Tensor4) -> Tensor4 {
    let mut ric = [[0.0; 4]; 4];
    for b in 0..4 {
        for d in 0..4 {
            let mut s = 0.0;
            for a in 0..4 {
                for c in 0..4 {
                    s += gi[a][c] * r[a][b][c][d];
                }
            }
            ric[b][d] = s;
        }
    }
    let scalar: f64 = (0..4)
        .flat_map(|b| (0..4).map(move |d| (b, d)))
        .map(|(b, d)| gi[b][d] * ric[b][d])
        .sum();
    let mut w = [[[[0.0; 4]; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    w[a][b][c][d] = r[a][b][c][d]
                        - 0.5
                            * (g[a][c] * ric[b][d] - g[a][d] * ric[b][c] - g[b][c] * ric[a][d]
                                + g[b][d] * ric[a][c])
                        + scalar / 6.0 * (g[a][c] * g[b][d] - g[a][d] * g[b][c]);
                }
            }
        }
    }
    w
}

/// `(⋆C)_{abcd} = ½ ε_{ab}{}^{ef} C_{efcd}`.
pub fn left_dual(g: &Mat4, gi: &Mat4, c: &Tensor4) -> Tensor4 {
    let vol = to_matrix(g).determinant().abs().sqrt() * ORIENTATION;
    // ε_{ab}^{ef}
    let mut eps = [[[[0.0; 4]; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            if a == b {
                continue;
            }
            for e in 0..4 {
                for f in 0..4 {
                    let mut s = 0.0;
                    for gg in 0..4 {
                        for h in 0..4 {
                            let l = levi_civita([a, b, gg, h]);
                            if l != 0.0 {
                                s += l * gi[gg][e] * gi[h][f];
                            }
                        }
                    }
                    eps[a][b][e][f] = vol * s;
                }
            }
        }
    }
    let mut out = [[[[0.0; 4]; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for cc in 0..4 {
                for d in 0..4 {
                    let mut s = 0.0;
                    for e in 0..4 {
                        for f in 0..4 {
                            s += eps[a][b][e][f] * c[e][f][cc][d];
                        }
                    }
                    out[a][b][cc][d] = 0.5 * s;
                }
            }
        }
    }
    out
}

fn euclidean_norm(t: &Tensor4) -> f64 {
    t.iter()
        .flatten()
        .flatten()
        .flatten()
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
}

fn metric_norm(gi: &Mat4, t: &Tensor4) -> f64 {
    let raise = |t: &Tensor4, slot: usize| -> Tensor4 {
        let mut out = [[[[0.0; 4]; 4]; 4]; 4];
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let idx = [a, b, c, d];
                        out[a][b][c][d] = (0..4)
                            .map(|e| {
                                let mut j = idx;
                                j[slot] = e;
                                gi[idx[slot]][e] * t[j[0]][j[1]][j[2]][j[3]]
                            })
                            .sum();
                    }
                }
            }
        }
        out
    };
    let mut up = *t;
    for slot in 0..4 {
        up = raise(&up, slot);
    }
    let mut s = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    s += t[a][b][c][d] * up[a][b][c][d];
                }
            }
        }
    }
    s
}

/// Curvature at `p` with the Riemann tensor from centred differences of
/// the Christoffel symbols.
pub fn curvature_report(m: &dyn MetricField, p: &Point4, step: f64) -> Result<CurvatureReport> {
    if !(step > 0.0) {
        return Err(Error::InvalidArgument("step must be positive".into()));
    }
    let jet = m.jet(p)?;
    let gamma = christoffel(&jet)?;
    // dgamma[c] = ∂_c Γ; the metric does not depend on s
    let mut dgamma = [[[[0.0; 4]; 4]; 4]; 4];
    for c in 1..4 {
        let plus = christoffel(&m.jet(&shifted(p, c, step))?)?;
        let minus = christoffel(&m.jet(&shifted(p, c, -step))?)?;
        for a in 0..4 {
            for b in 0..4 {
                for d in 0..4 {
                    dgamma[c][a][b][d] = (plus[a][b][d] - minus[a][b][d]) / (2.0 * step);
                }
            }
        }
    }
    // R^a_{bcd} = ∂_c Γ^a_{db} − ∂_d Γ^a_{cb} + Γ^a_{ce} Γ^e_{db} − Γ^a_{de} Γ^e_{cb}
    let mut r_up = [[[[0.0; 4]; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let mut s = dgamma[c][a][d][b] - dgamma[d][a][c][b];
                    for e in 0..4 {
                        s += gamma[a][c][e] * gamma[e][d][b] - gamma[a][d][e] * gamma[e][c][b];
                    }
                    r_up[a][b][c][d] = s;
                }
            }
        }
    }
    let g = jet.g;
    let gi = inverse(&g)?;
    let riemann = lower_first(&g, &r_up);
    let weyl = weyl_tensor(&g, &gi, &riemann);
    let dual = left_dual(&g, &gi, &weyl);
    let mut sd = weyl;
    let mut asd = weyl;
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    sd[a][b][c][d] = 0.5 * (weyl[a][b][c][d] + dual[a][b][c][d]);
                    asd[a][b][c][d] = 0.5 * (weyl[a][b][c][d] - dual[a][b][c][d]);
                }
            }
        }
    }
    Ok(CurvatureReport {
        point: *p,
        step,
        metric: g,
        inverse: gi,
        christoffel: gamma,
        riemann,
        weyl,
        weyl_sd_norm: euclidean_norm(&sd),
        weyl_asd_norm: euclidean_norm(&asd),
        weyl_sd_metric_norm: metric_norm(&gi, &sd),
        weyl_asd_metric_norm: metric_norm(&gi, &asd),
        min_v: None,
    })
}

/// [`curvature_report`] for a monopole metric, with the smallest `V` over
/// the stencil recorded.
pub fn monopole_curvature(m: &MonopolePair, p: &Point4, step: f64) -> Result<CurvatureReport> {
    let mut rep = curvature_report(m, p, step)?;
    let mut min_v = m.v_at(&spacetime(p));
    for c in 1..4 {
        for h in [step, -step] {
            min_v = min_v.min(m.v_at(&spacetime(&shifted(p, c, h))));
        }
    }
    rep.min_v = Some(min_v);
    Ok(rep)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub point: Point4,
    pub weyl_sd_norm: f64,
    pub weyl_asd_norm: f64,
    pub min_v: f64,
}

/// Curvature over a list of points, in parallel.
pub fn curvature_sweep(m: &MonopolePair, points: &[Point4], step: f64) -> Result<Vec<SweepRow>> {
    points
        .par_iter()
        .map(|p| {
            let r = monopole_curvature(m, p, step)?;
            Ok(SweepRow {
                point: *p,
                weyl_sd_norm: r.weyl_sd_norm,
                weyl_asd_norm: r.weyl_asd_norm,
                min_v: r.min_v.unwrap_or(f64::NAN),
            })
        })
        .collect()
}

/// CSV with columns `s,t,x1,x2,weyl_sd_norm,weyl_asd_norm,min_v`.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut w: W) -> Result<()> {
    writeln!(w, "s,t,x1,x2,weyl_sd_norm,weyl_asd_norm,min_v")?;
    for r in rows {
        let p = r.point;
        writeln!(
            w,
            "{},{},{},{},{:e},{:e},{}",
            p[0], p[1], p[2], p[3], r.weyl_sd_norm, r.weyl_asd_norm, r.min_v
        )?;
    }
    Ok(())
}

/// The frame `𝔪₁, 𝔪₂` in `(s, t, x1, x2)` components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaFrame {
    pub point: Point4,
    pub omega: Complex64,
    pub m1: [Complex64; 4],
    pub m2: [Complex64; 4],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaCheck {
    pub frame: BetaFrame,
    pub max_g: f64,
}

/// `𝔪₁ = −∂_t + 2ω∂_z − i(1 − u_t − 2ωu_z)∂_s`,
/// `𝔪₂ = −ω∂_t + 2∂_z̄ + i(ω(1 − u_t) − 2u_z̄)∂_s`, with
/// `∂_z = ½(∂_1 − i∂_2)` and `u` read off the pair.
pub fn beta_frame(m: &MonopolePair, p: &Point4, omega: Complex64) -> Result<BetaFrame> {
    if !((omega.norm() - 1.0).abs() <= 1e-12) {
        return Err(Error::InvalidArgument(format!(
            "|ω| = {} is not 1",
            omega.norm()
        )));
    }
    let q = spacetime(p);
    let v = m.v_at(&q);
    if !(v > 0.0) {
        return Err(Error::Degenerate { v, point: *p });
    }
    let [ut, u1, u2] = m.potential_gradient(&q);
    let i = Complex64::i();
    let one = Complex64::new(1.0, 0.0);
    let uz = 0.5 * Complex64::new(u1, -u2);
    let uzb = uz.conj();
    let m1 = [-i * (1.0 - ut - 2.0 * omega * uz), -one, omega, -i * omega];
    let m2 = [i * (omega * (1.0 - ut) - 2.0 * uzb), -omega, one, i];
    Ok(BetaFrame {
        point: *p,
        omega,
        m1,
        m2,
    })
}

/// Largest `|g(𝔪_j, 𝔪_k)|` with `g` extended complex-bilinearly.
pub fn frame_residual(g: &Mat4, f: &BetaFrame) -> f64 {
    let form = |a: &[Complex64; 4], b: &[Complex64; 4]| -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for i in 0..4 {
            for j in 0..4 {
                s += a[i] * g[i][j] * b[j];
            }
        }
        s
    };
    [form(&f.m1, &f.m1), form(&f.m1, &f.m2), form(&f.m2, &f.m2)]
        .iter()
        .fold(0.0, |m, z| m.max(z.norm()))
}

pub fn beta_check(m: &MonopolePair, p: &Point4, omega: Complex64) -> Result<BetaCheck> {
    let frame = beta_frame(m, p, omega)?;
    let g = metric_at(m, p)?;
    Ok(BetaCheck {
        max_g: frame_residual(&g, &frame),
        frame,
    })
}
