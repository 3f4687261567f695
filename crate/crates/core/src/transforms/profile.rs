//! One-dimensional profiles in `v` with closed-form derivatives.

use serde::{Deserialize, Serialize};

/// Highest derivative order cached in a profile's derivative table. Public
/// evaluation stops at order 4; the extra orders serve finite-difference
/// checks and separable test fields.
pub const TABLE_ORDER: usize = 8;

/// Serializable description of a profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileSpec {
    Zero,
    /// `P((v − center)/width) · exp(−((v − center)/width)²)` with `P` given by
    /// ascending coefficients.
    GaussianPoly {
        coeffs: Vec<f64>,
        center: f64,
        width: f64,
    },
    /// `amplitude · sech^power((v − center)/width)`.
    SechPow {
        amplitude: f64,
        center: f64,
        width: f64,
        power: f64,
    },
    /// Plain polynomial in `v` (ascending coefficients). Not decaying; used
    /// for kernel demonstrations and synthetic fields.
    Polynomial {
        coeffs: Vec<f64>,
    },
}

/// A profile `a(v)` together with a precomputed table of derivative
/// polynomials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "ProfileSpec", into = "ProfileSpec")]
pub struct VProfile {
    spec: ProfileSpec,
    /// Polynomial for each derivative order; meaning depends on the kind.
    table: Vec<Vec<f64>>,
}

impl From<VProfile> for ProfileSpec {
    fn from(p: VProfile) -> Self {
        p.spec
    }
}

impl From<ProfileSpec> for VProfile {
    fn from(spec: ProfileSpec) -> Self {
        let table = match &spec {
            ProfileSpec::Zero => Vec::new(),
            ProfileSpec::GaussianPoly { coeffs, .. } => {
                // d/dy [Q(y) e^{-y²}] = (Q' − 2yQ) e^{-y²}
                let mut t = vec![trim(coeffs.clone())];
                for _ in 0..TABLE_ORDER {
                    let q = t.last().unwrap();
                    let mut next = poly_deriv(q);
                    let shifted = poly_shift_mul(q, -2.0);
                    poly_add_into(&mut next, &shifted);
                    t.push(trim(next));
                }
                t
            }
            ProfileSpec::SechPow { power, .. } => {
                // f = T_n(tanh y) sech^p y with
                // T_{n+1}(s) = T_n'(s)(1 − s²) − p s T_n(s)
                let mut t = vec![vec![1.0]];
                for _ in 0..TABLE_ORDER {
                    let q = t.last().unwrap();
                    let d = poly_deriv(q);
                    let mut next = d.clone();
                    let d_s2 = poly_shift_mul(&poly_shift_mul(&d, 1.0), -1.0);
                    poly_add_into(&mut next, &d_s2);
                    poly_add_into(&mut next, &poly_shift_mul(q, -power));
                    t.push(trim(next));
                }
                t
            }
            ProfileSpec::Polynomial { coeffs } => {
                let mut t = vec![trim(coeffs.clone())];
                for _ in 0..TABLE_ORDER {
                    let next = poly_deriv(t.last().unwrap());
                    t.push(trim(next));
                }
                t
            }
        };
        Self { spec, table }
    }
}

impl VProfile {
    pub fn zero() -> Self {
        ProfileSpec::Zero.into()
    }

    /// `amplitude · exp(−((v − center)/width)²)`.
    pub fn gaussian(amplitude: f64, center: f64, width: f64) -> Self {
        Self::gaussian_poly(vec![amplitude], center, width)
    }

    pub fn gaussian_poly(coeffs: Vec<f64>, center: f64, width: f64) -> Self {
        ProfileSpec::GaussianPoly {
            coeffs,
            center,
            width,
        }
        .into()
    }

    pub fn sech_pow(amplitude: f64, center: f64, width: f64, power: f64) -> Self {
        ProfileSpec::SechPow {
            amplitude,
            center,
            width,
            power,
        }
        .into()
    }

    pub fn polynomial(coeffs: Vec<f64>) -> Self {
        ProfileSpec::Polynomial { coeffs }.into()
    }

    pub fn constant(c: f64) -> Self {
        Self::polynomial(vec![c])
    }

    pub fn spec(&self) -> &ProfileSpec {
        &self.spec
    }

    pub fn is_zero(&self) -> bool {
        match &self.spec {
            ProfileSpec::Zero => true,
            ProfileSpec::GaussianPoly { coeffs, .. } | ProfileSpec::Polynomial { coeffs } => {
                coeffs.iter().all(|c| *c == 0.0)
            }
            ProfileSpec::SechPow { amplitude, .. } => *amplitude == 0.0,
        }
    }

    /// Whether the profile belongs to the rapidly decreasing class.
    pub fn is_rapidly_decreasing(&self) -> bool {
        match &self.spec {
            ProfileSpec::Zero => true,
            ProfileSpec::GaussianPoly { width, .. } => *width > 0.0 && width.is_finite(),
            ProfileSpec::SechPow { width, power, .. } => *width > 0.0 && *power > 0.0,
            ProfileSpec::Polynomial { .. } => self.is_zero(),
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        let finite = |x: f64, name: &str| {
            if x.is_finite() {
                Ok(())
            } else {
                Err(format!("{name} must be finite"))
            }
        };
        match &self.spec {
            ProfileSpec::Zero => Ok(()),
            ProfileSpec::GaussianPoly {
                coeffs,
                center,
                width,
            } => {
                finite(*center, "center")?;
                if !(*width > 0.0 && width.is_finite()) {
                    return Err("width must be positive".into());
                }
                coeffs.iter().try_for_each(|c| finite(*c, "coefficient"))
            }
            ProfileSpec::SechPow {
                amplitude,
                center,
                width,
                power,
            } => {
                finite(*amplitude, "amplitude")?;
                finite(*center, "center")?;
                if !(*width > 0.0 && width.is_finite()) {
                    return Err("width must be positive".into());
                }
                if !(*power > 0.0 && power.is_finite()) {
                    return Err("power must be positive".into());
                }
                Ok(())
            }
            ProfileSpec::Polynomial { coeffs } => {
                coeffs.iter().try_for_each(|c| finite(*c, "coefficient"))
            }
        }
    }

    /// `dⁿa/dvⁿ (v)` for `n ≤ TABLE_ORDER`.
    pub fn derivative(&self, v: f64, n: usize) -> f64 {
        let mut out = [0.0; TABLE_ORDER + 1];
        self.derivatives_into(v, &mut out[..=n]);
        out[n]
    }

    /// Writes `a(v), a'(v), …` into `out` (length at most `TABLE_ORDER + 1`).
    pub fn derivatives_into(&self, v: f64, out: &mut [f64]) {
        debug_assert!(out.len() <= TABLE_ORDER + 1);
        match &self.spec {
            ProfileSpec::Zero => out.iter_mut().for_each(|o| *o = 0.0),
            ProfileSpec::GaussianPoly { center, width, .. } => {
                let y = (v - center) / width;
                let e = (-y * y).exp();
                let inv_w = 1.0 / width;
                let mut scale = e;
                for (n, o) in out.iter_mut().enumerate() {
                    *o = horner(&self.table[n], y) * scale;
                    scale *= inv_w;
                }
            }
            ProfileSpec::SechPow {
                amplitude,
                center,
                width,
                power,
            } => {
                let y = (v - center) / width;
                let s = y.tanh();
                // sech^p via exp for large |y| to avoid cosh overflow
                let ay = y.abs();
                let sech_p = ((2.0 * (-ay).exp()) / (1.0 + (-2.0 * ay).exp())).powf(*power);
                let inv_w = 1.0 / width;
                let mut scale = amplitude * sech_p;
                for (n, o) in out.iter_mut().enumerate() {
                    *o = horner(&self.table[n], s) * scale;
                    scale *= inv_w;
                }
            }
            ProfileSpec::Polynomial { .. } => {
                for (n, o) in out.iter_mut().enumerate() {
                    *o = horner(&self.table[n], v);
                }
            }
        }
    }

    pub fn value(&self, v: f64) -> f64 {
        self.derivative(v, 0)
    }

    /// `sup |v|⁴ |a^{(l)}(v)|` over sampled `|v| ≥ cutoff`, `l ≤ 4`.
    pub fn tail_bound(&self, cutoff: f64) -> f64 {
        let mut worst: f64 = 0.0;
        let mut out = [0.0; 5];
        for i in 0..=400 {
            let r = cutoff + i as f64 * 0.25;
            for v in [r, -r] {
                self.derivatives_into(v, &mut out);
                let w = v.powi(4);
                for d in out {
                    worst = worst.max(w * d.abs());
                }
            }
        }
        worst
    }
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

fn poly_deriv(p: &[f64]) -> Vec<f64> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * i as f64)
        .collect()
}

/// `factor · x · p(x)`.
fn poly_shift_mul(p: &[f64], factor: f64) -> Vec<f64> {
    let mut out = vec![0.0; p.len() + 1];
    for (i, c) in p.iter().enumerate() {
        out[i + 1] = c * factor;
    }
    out
}

fn poly_add_into(acc: &mut Vec<f64>, other: &[f64]) {
    if acc.len() < other.len() {
        acc.resize(other.len(), 0.0);
    }
    for (a, b) in acc.iter_mut().zip(other) {
        *a += b;
    }
}

fn trim(mut p: Vec<f64>) -> Vec<f64> {
    while p.len() > 1 && *p.last().unwrap() == 0.0 {
        p.pop();
    }
    if p.is_empty() {
        p.push(0.0);
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_check(p: &VProfile, v: f64) {
        let h = 2e-5;
        for n in 0..5 {
            let fd = (p.derivative(v + h, n) - p.derivative(v - h, n)) / (2.0 * h);
            let exact = p.derivative(v, n + 1);
            assert!(
                (fd - exact).abs() < 1e-6 * (1.0 + exact.abs()),
                "order {n}: fd {fd} exact {exact}"
            );
        }
    }

    #[test]
    fn gaussian_derivatives() {
        let g = VProfile::gaussian(1.0, 0.0, 1.0);
        assert_eq!(g.value(0.0), 1.0);
        assert!((g.derivative(1.0, 1) + 2.0 * (-1f64).exp()).abs() < 1e-15);
        // second derivative (4v² − 2) e^{-v²}
        assert!((g.derivative(0.5, 2) - (4.0 * 0.25 - 2.0) * (-0.25f64).exp()).abs() < 1e-14);
        fd_check(
            &VProfile::gaussian_poly(vec![0.3, -1.0, 0.5], 0.4, 1.7),
            0.9,
        );
    }

    #[test]
    fn sech_derivatives() {
        let s = VProfile::sech_pow(2.0, 0.5, 0.8, 2.0);
        let y: f64 = (1.1 - 0.5) / 0.8;
        assert!((s.value(1.1) - 2.0 / y.cosh().powi(2)).abs() < 1e-14);
        fd_check(&s, 1.1);
        fd_check(&VProfile::sech_pow(1.0, 0.0, 1.0, 1.5), -0.7);
        // no overflow far out
        assert!(s.value(2000.0).is_finite());
    }

    #[test]
    fn polynomial_derivatives() {
        let p = VProfile::polynomial(vec![1.0, 2.0, 3.0]);
        assert_eq!(p.value(2.0), 17.0);
        assert_eq!(p.derivative(2.0, 1), 14.0);
        assert_eq!(p.derivative(2.0, 2), 6.0);
        assert_eq!(p.derivative(2.0, 3), 0.0);
        assert!(!p.is_rapidly_decreasing());
    }

    #[test]
    fn tail_bounds() {
        assert!(VProfile::gaussian(1.0, 0.0, 1.0).tail_bound(8.0) < 1e-15);
        assert!(VProfile::constant(1.0).tail_bound(8.0) > 1.0);
        assert_eq!(VProfile::zero().tail_bound(0.0), 0.0);
    }

    #[test]
    fn serde_uses_spec_form() {
        let g = VProfile::gaussian(1.0, 0.0, 2.0);
        let s = serde_json::to_string(&g).unwrap();
        assert!(s.contains("\"kind\":\"gaussian_poly\""));
        let back: VProfile = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
    }
}
