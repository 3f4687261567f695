//! Cylinder functions `h(θ, v)` and the circle-average transform `R`.

use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use super::profile::{VProfile, TABLE_ORDER};
use crate::geometry::{CylinderPoint, SpacetimePoint};
use crate::{Error, Result};

/// Highest derivative order accepted by the public evaluators.
pub const MAX_ORDER: u32 = 4;

/// One Fourier mode `a_k(v) cos kθ + b_k(v) sin kθ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Mode {
    pub k: u32,
    #[serde(rename = "cos")]
    pub cos_profile: VProfile,
    #[serde(rename = "sin", default, skip_serializing_if = "Option::is_none")]
    pub sin_profile: Option<VProfile>,
}

/// `h(θ, v) = Σ_k [a_k(v) cos kθ + b_k(v) sin kθ]`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CylinderFunction {
    modes: Vec<Mode>,
}

impl CylinderFunction {
    pub fn zero() -> Self {
        Self { modes: Vec::new() }
    }

    pub fn new(modes: Vec<Mode>) -> Result<Self> {
        for m in &modes {
            if m.k == 0 && m.sin_profile.is_some() {
                return Err(Error::InvalidArgument(
                    "mode k = 0 cannot carry a sine profile".into(),
                ));
            }
            m.cos_profile
                .validate()
                .map_err(|e| Error::InvalidArgument(format!("mode k = {}: {e}", m.k)))?;
            if let Some(s) = &m.sin_profile {
                s.validate()
                    .map_err(|e| Error::InvalidArgument(format!("mode k = {}: {e}", m.k)))?;
            }
        }
        Ok(Self { modes })
    }

    /// `a(v) cos kθ`.
    pub fn cos_mode(k: u32, profile: VProfile) -> Self {
        Self::new(vec![Mode {
            k,
            cos_profile: profile,
            sin_profile: None,
        }])
        .expect("valid single mode")
    }

    /// `b(v) sin kθ` for `k ≥ 1`.
    pub fn sin_mode(k: u32, profile: VProfile) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("sine mode needs k ≥ 1".into()));
        }
        Self::new(vec![Mode {
            k,
            cos_profile: VProfile::zero(),
            sin_profile: Some(profile),
        }])
    }

    /// `amplitude · cos θ · e^{−v²}`, the running example of the test suite.
    pub fn cos_gaussian(amplitude: f64) -> Self {
        Self::cos_mode(1, VProfile::gaussian(amplitude, 0.0, 1.0))
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn max_k(&self) -> u32 {
        self.modes.iter().map(|m| m.k).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.modes
            .iter()
            .all(|m| m.cos_profile.is_zero() && m.sin_profile.as_ref().is_none_or(|s| s.is_zero()))
    }

    /// Whether every profile is rapidly decreasing in `v`.
    pub fn is_rapidly_decreasing(&self) -> bool {
        self.profiles().all(|p| p.is_rapidly_decreasing())
    }

    fn profiles(&self) -> impl Iterator<Item = &VProfile> {
        self.modes
            .iter()
            .flat_map(|m| std::iter::once(&m.cos_profile).chain(m.sin_profile.as_ref()))
    }

    /// Checks `|v|⁴ |∂_v^l a_k(v)| < bound` for `|v| ≥ cutoff`, `l ≤ 4`.
    pub fn check_decay(&self, cutoff: f64, bound: f64) -> Result<()> {
        for p in self.profiles() {
            let b = p.tail_bound(cutoff);
            if !(b < bound) {
                return Err(Error::Decay {
                    radius: cutoff,
                    value: b,
                });
            }
        }
        Ok(())
    }

    /// `∂_v^n h(θ, v)`.
    pub fn eval(&self, p: &CylinderPoint, dv_order: u32) -> Result<f64> {
        if dv_order > MAX_ORDER {
            return Err(Error::OrderTooHigh {
                order: dv_order,
                max: MAX_ORDER,
            });
        }
        Ok(self.eval_unchecked(p.theta(), p.v, dv_order as usize))
    }

    pub(crate) fn eval_unchecked(&self, theta: f64, v: f64, n: usize) -> f64 {
        self.modes
            .iter()
            .map(|m| {
                let kt = m.k as f64 * theta;
                let mut s = m.cos_profile.derivative(v, n) * kt.cos();
                if let Some(b) = &m.sin_profile {
                    s += b.derivative(v, n) * kt.sin();
                }
                s
            })
            .sum()
    }

    /// Writes `∂_v^n h(θ, v)` for `n = 0..out.len()` given `cos kθ`, `sin kθ`
    /// tables indexed by mode.
    fn derivatives_at(&self, trig: &[(f64, f64)], v: f64, scratch: &mut [f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (m, (c, s)) in self.modes.iter().zip(trig) {
            m.cos_profile.derivatives_into(v, scratch);
            for (o, d) in out.iter_mut().zip(scratch.iter()) {
                *o += d * c;
            }
            if let Some(b) = &m.sin_profile {
                b.derivatives_into(v, scratch);
                for (o, d) in out.iter_mut().zip(scratch.iter()) {
                    *o += d * s;
                }
            }
        }
    }
}

/// `∂_v^n h(θ, v)` for `n ≤ 4`.
pub fn eval_cylinder_fn(h: &CylinderFunction, p: &CylinderPoint, dv_order: u32) -> Result<f64> {
    h.eval(p, dv_order)
}

/// Multi-index `(n_t, n_1, n_2)` of a spacetime partial derivative.
pub type Deriv = [u32; 3];

fn order_of(d: Deriv) -> u32 {
    d[0] + d[1] + d[2]
}

/// Trapezoid-in-θ evaluator for `∂^α Rh` with node tables cached once.
#[derive(Debug, Clone)]
pub struct RTransform {
    h: CylinderFunction,
    n_theta: usize,
    cos: Vec<f64>,
    sin: Vec<f64>,
    /// `(cos kθ_j, sin kθ_j)` per node and mode.
    trig: Vec<Vec<(f64, f64)>>,
}

impl RTransform {
    pub fn new(h: CylinderFunction, n_theta: usize) -> Result<Self> {
        if n_theta < 16 {
            return Err(Error::InvalidArgument(format!(
                "N_theta = {n_theta} is below the minimum of 16"
            )));
        }
        let mut cos = Vec::with_capacity(n_theta);
        let mut sin = Vec::with_capacity(n_theta);
        let mut trig = Vec::with_capacity(n_theta);
        for j in 0..n_theta {
            let th = TAU * j as f64 / n_theta as f64;
            cos.push(th.cos());
            sin.push(th.sin());
            trig.push(
                h.modes
                    .iter()
                    .map(|m| {
                        let kt = m.k as f64 * th;
                        (kt.cos(), kt.sin())
                    })
                    .collect(),
            );
        }
        Ok(Self {
            h,
            n_theta,
            cos,
            sin,
            trig,
        })
    }

    pub fn h(&self) -> &CylinderFunction {
        &self.h
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    /// `∂^deriv (Rh)(p)`.
    pub fn eval(&self, p: &SpacetimePoint, deriv: Deriv) -> Result<f64> {
        let order = order_of(deriv);
        if order > MAX_ORDER {
            return Err(Error::OrderTooHigh {
                order,
                max: MAX_ORDER,
            });
        }
        let n = order as usize;
        let mut scratch = [0.0; TABLE_ORDER + 1];
        let mut d = [0.0; TABLE_ORDER + 1];
        let mut sum = 0.0;
        for j in 0..self.n_theta {
            let (c, s) = (self.cos[j], self.sin[j]);
            let v = p.t + p.x1 * c + p.x2 * s;
            self.h
                .derivatives_at(&self.trig[j], v, &mut scratch[..=n], &mut d[..=n]);
            sum += d[n] * c.powi(deriv[1] as i32) * s.powi(deriv[2] as i32);
        }
        Ok(sum / self.n_theta as f64)
    }

    /// All partials of `Rh` with total order `≤ max_order` at `p`, sharing one
    /// pass over the quadrature nodes.
    pub fn jet(&self, p: &SpacetimePoint, max_order: u32) -> Result<Jet> {
        if max_order > MAX_ORDER {
            return Err(Error::OrderTooHigh {
                order: max_order,
                max: MAX_ORDER,
            });
        }
        let n = max_order as usize;
        let indices = Jet::indices(max_order);
        let mut values = vec![0.0; indices.len()];
        let mut scratch = [0.0; TABLE_ORDER + 1];
        let mut d = [0.0; TABLE_ORDER + 1];
        let mut cpow = [1.0; MAX_ORDER as usize + 1];
        let mut spow = [1.0; MAX_ORDER as usize + 1];
        for j in 0..self.n_theta {
            let (c, s) = (self.cos[j], self.sin[j]);
            let v = p.t + p.x1 * c + p.x2 * s;
            self.h
                .derivatives_at(&self.trig[j], v, &mut scratch[..=n], &mut d[..=n]);
            for k in 1..=n {
                cpow[k] = cpow[k - 1] * c;
                spow[k] = spow[k - 1] * s;
            }
            for (val, idx) in values.iter_mut().zip(&indices) {
                let ord = order_of(*idx) as usize;
                *val += d[ord] * cpow[idx[1] as usize] * spow[idx[2] as usize];
            }
        }
        let inv = 1.0 / self.n_theta as f64;
        values.iter_mut().for_each(|v| *v *= inv);
        Ok(Jet {
            max_order,
            indices,
            values,
        })
    }
}

/// Partial derivatives of a field at one point, keyed by multi-index.
#[derive(Debug, Clone)]
pub struct Jet {
    max_order: u32,
    indices: Vec<Deriv>,
    values: Vec<f64>,
}

impl Jet {
    fn indices(max_order: u32) -> Vec<Deriv> {
        let mut out = Vec::new();
        for ord in 0..=max_order {
            for nt in (0..=ord).rev() {
                for n1 in (0..=ord - nt).rev() {
                    out.push([nt, n1, ord - nt - n1]);
                }
            }
        }
        out
    }

    pub fn max_order(&self) -> u32 {
        self.max_order
    }

    pub fn get(&self, d: Deriv) -> Option<f64> {
        self.indices
            .iter()
            .position(|i| *i == d)
            .map(|k| self.values[k])
    }
}

/// `∂^deriv (Rh)(p)` with an `N_theta`-node trapezoid rule in θ.
pub fn transform_r(
    h: &CylinderFunction,
    p: &SpacetimePoint,
    deriv: Deriv,
    n_theta: usize,
) -> Result<f64> {
    RTransform::new(h.clone(), n_theta)?.eval(p, deriv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::GaussLegendre;
    use std::f64::consts::PI;

    fn cos_gauss() -> CylinderFunction {
        CylinderFunction::cos_gaussian(1.0)
    }

    #[test]
    fn eval_examples() {
        let z = CylinderFunction::zero();
        assert_eq!(z.eval(&CylinderPoint::new(1.0, 2.0), 3).unwrap(), 0.0);
        let h = cos_gauss();
        assert_eq!(h.eval(&CylinderPoint::new(0.0, 0.0), 0).unwrap(), 1.0);
        let d = h.eval(&CylinderPoint::new(0.0, 1.0), 1).unwrap();
        assert!((d + 2.0 * (-1f64).exp()).abs() < 1e-15);
        assert!(matches!(
            h.eval(&CylinderPoint::new(0.0, 1.0), 5),
            Err(Error::OrderTooHigh { .. })
        ));
    }

    #[test]
    fn sine_mode_rules() {
        assert!(CylinderFunction::sin_mode(0, VProfile::gaussian(1.0, 0.0, 1.0)).is_err());
        let h = CylinderFunction::sin_mode(2, VProfile::gaussian(1.0, 0.0, 1.0)).unwrap();
        let v = h.eval(&CylinderPoint::new(PI / 4.0, 0.0), 0).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn transform_of_zero_and_radial() {
        let p = SpacetimePoint::new(0.3, -0.2, 0.7);
        assert_eq!(
            transform_r(&CylinderFunction::zero(), &p, [0, 0, 0], 64).unwrap(),
            0.0
        );
        let g = VProfile::sech_pow(1.0, 0.2, 1.3, 2.0);
        let h = CylinderFunction::cos_mode(0, g.clone());
        for t in [-1.0, 0.0, 0.4] {
            let r = transform_r(&h, &SpacetimePoint::new(t, 0.0, 0.0), [0, 0, 0], 32).unwrap();
            assert!((r - g.value(t)).abs() < 1e-15);
        }
    }

    #[test]
    fn transform_matches_adaptive_oracle() {
        // (1/2π) ∫ cos θ e^{-cos² θ} dθ over the circle through (0,(1,0)); the
        // integrand is odd about θ = π/2 so the value is 0. Use an off-axis
        // point for a nonzero value.
        let h = cos_gauss();
        let gl = GaussLegendre::new(30);
        for p in [
            SpacetimePoint::new(0.0, 1.0, 0.0),
            SpacetimePoint::new(0.3, 0.8, -0.5),
        ] {
            let oracle = gl.integrate_composite(0.0, TAU, 16, |th| {
                let v = p.t + p.x1 * th.cos() + p.x2 * th.sin();
                th.cos() * (-v * v).exp()
            }) / TAU;
            let r = transform_r(&h, &p, [0, 0, 0], 256).unwrap();
            assert!((r - oracle).abs() < 1e-10, "{r} vs {oracle}");
        }
    }

    #[test]
    fn v_independent_profile_is_in_kernel() {
        let h = CylinderFunction::cos_mode(1, VProfile::constant(1.0));
        assert!(!h.is_rapidly_decreasing());
        assert!(h.check_decay(8.0, 1.0).is_err());
        for p in [
            SpacetimePoint::new(0.0, 0.0, 0.0),
            SpacetimePoint::new(1.3, -2.0, 0.4),
        ] {
            assert!(transform_r(&h, &p, [0, 0, 0], 64).unwrap().abs() < 1e-15);
        }
    }

    #[test]
    fn order_limits() {
        let h = cos_gauss();
        let p = SpacetimePoint::ORIGIN;
        assert!(transform_r(&h, &p, [2, 2, 1], 64).is_err());
        assert!(transform_r(&h, &p, [0, 0, 0], 8).is_err());
    }

    #[test]
    fn jet_matches_single_evaluations() {
        let h = CylinderFunction::new(vec![
            Mode {
                k: 1,
                cos_profile: VProfile::gaussian(1.0, 0.0, 1.0),
                sin_profile: Some(VProfile::sech_pow(0.5, 0.3, 1.0, 2.0)),
            },
            Mode {
                k: 0,
                cos_profile: VProfile::gaussian_poly(vec![0.0, 1.0], 0.0, 1.5),
                sin_profile: None,
            },
        ])
        .unwrap();
        let r = RTransform::new(h, 128).unwrap();
        let p = SpacetimePoint::new(0.2, -0.4, 0.9);
        let jet = r.jet(&p, 4).unwrap();
        for idx in Jet::indices(4) {
            let single = r.eval(&p, idx).unwrap();
            assert!((jet.get(idx).unwrap() - single).abs() < 1e-14);
        }
        assert_eq!(Jet::indices(3).len(), 20);
    }

    #[test]
    fn time_derivative_matches_finite_difference() {
        let r = RTransform::new(cos_gauss(), 256).unwrap();
        let p = SpacetimePoint::new(0.4, 0.5, -0.3);
        let exact = r.eval(&p, [1, 0, 0]).unwrap();
        let mut errs = Vec::new();
        for d in [1e-2, 5e-3] {
            let fd = (r
                .eval(&SpacetimePoint::new(p.t + d, p.x1, p.x2), [0, 0, 0])
                .unwrap()
                - r.eval(&SpacetimePoint::new(p.t - d, p.x1, p.x2), [0, 0, 0])
                    .unwrap())
                / (2.0 * d);
            errs.push((fd - exact).abs());
        }
        let order = (errs[0] / errs[1]).log2();
        assert!(order > 1.9, "order {order}");
    }

    #[test]
    fn wave_operator_cancels_exactly() {
        let r = RTransform::new(cos_gauss(), 256).unwrap();
        let p = SpacetimePoint::new(-0.7, 1.1, 0.25);
        let box_u = -r.eval(&p, [2, 0, 0]).unwrap()
            + r.eval(&p, [0, 2, 0]).unwrap()
            + r.eval(&p, [0, 0, 2]).unwrap();
        assert!(box_u.abs() < 1e-13);
    }
}
