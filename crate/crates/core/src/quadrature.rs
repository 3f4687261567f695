//! Small quadrature helpers shared by the transforms and the gauge solver.

use std::f64::consts::{PI, TAU};

/// Nodes `θ_j = 2πj/N` of the periodic trapezoid rule.
pub fn periodic_nodes(n: usize) -> Vec<f64> {
    (0..n).map(|j| TAU * j as f64 / n as f64).collect()
}

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess, then Newton on P_n
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }

    /// Integrates over `[a, b]` split into `panels` equal sub-intervals.
    pub fn integrate_composite<F: FnMut(f64) -> f64>(
        &self,
        a: f64,
        b: f64,
        panels: usize,
        mut f: F,
    ) -> f64 {
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|k| {
                let lo = a + h * k as f64;
                self.integrate(lo, lo + h, &mut f)
            })
            .sum()
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Trapezoid weights for `n` uniformly spaced samples with spacing `h`.
pub fn trapezoid_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![h; n];
    if n > 1 {
        w[0] = 0.5 * h;
        w[n - 1] = 0.5 * h;
    }
    w
}

/// Fourth-order centered first derivative of uniformly sampled data, falling
/// back to lower-order one-sided stencils at the two ends.
pub fn derivative_4th(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    let mut d = vec![0.0; n];
    if n < 5 {
        for i in 0..n {
            d[i] = if n < 2 {
                0.0
            } else if i == 0 {
                (values[1] - values[0]) / h
            } else if i == n - 1 {
                (values[n - 1] - values[n - 2]) / h
            } else {
                (values[i + 1] - values[i - 1]) / (2.0 * h)
            };
        }
        return d;
    }
    for i in 2..n - 2 {
        d[i] = (values[i - 2] - 8.0 * values[i - 1] + 8.0 * values[i + 1] - values[i + 2])
            / (12.0 * h);
    }
    d[1] = (values[2] - values[0]) / (2.0 * h);
    d[n - 2] = (values[n - 1] - values[n - 3]) / (2.0 * h);
    d[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * h);
    d[n - 1] = (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * h);
    d
}

/// Four-point Lagrange weights for a sample at fractional offset `s ∈ [0, 1)`
/// between nodes 1 and 2 of the stencil `{-1, 0, 1, 2}`.
pub(crate) fn cubic_weights(s: f64) -> [f64; 4] {
    let sm1 = s - 1.0;
    let sm2 = s - 2.0;
    let sp1 = s + 1.0;
    [
        -s * sm1 * sm2 / 6.0,
        sp1 * sm1 * sm2 / 2.0,
        -sp1 * s * sm2 / 2.0,
        sp1 * s * sm1 / 6.0,
    ]
}

/// Derivative of [`cubic_weights`] with respect to `s`.
pub(crate) fn cubic_weights_deriv(s: f64) -> [f64; 4] {
    [
        -(3.0 * s * s - 6.0 * s + 2.0) / 6.0,
        (3.0 * s * s - 4.0 * s - 1.0) / 2.0,
        -(3.0 * s * s - 2.0 * s - 2.0) / 2.0,
        (3.0 * s * s - 1.0) / 6.0,
    ]
}

#[cfg(test)]
/// Second derivative of [`cubic_weights`] with respect to `s`.
pub(crate) fn cubic_weights_deriv2(s: f64) -> [f64; 4] {
    [-(s - 1.0), (3.0 * s - 2.0), -(3.0 * s - 1.0), s]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let gl = GaussLegendre::new(8);
        let sum: f64 = gl.weights.iter().sum();
        assert!((sum - 2.0).abs() < 1e-14);
        // degree 15 is the exactness limit for 8 nodes
        let v = gl.integrate(0.0, 2.0, |x| x.powi(15));
        assert!((v - 2f64.powi(16) / 16.0).abs() < 1e-9);
    }

    #[test]
    fn gauss_legendre_high_order_smooth() {
        let gl = GaussLegendre::new(40);
        let v = gl.integrate_composite(-6.0, 6.0, 4, |x| (-x * x).exp());
        assert!((v - PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn cubic_weights_reproduce_cubics() {
        let f = |x: f64| 1.0 - 2.0 * x + 0.5 * x * x - 0.25 * x * x * x;
        let df = |x: f64| -2.0 + x - 0.75 * x * x;
        let d2f = |x: f64| 1.0 - 1.5 * x;
        for s in [0.0, 0.3, 0.77] {
            let w = cubic_weights(s);
            let dw = cubic_weights_deriv(s);
            let d2w = cubic_weights_deriv2(s);
            let nodes = [-1.0, 0.0, 1.0, 2.0];
            let v: f64 = (0..4).map(|i| w[i] * f(nodes[i])).sum();
            let dv: f64 = (0..4).map(|i| dw[i] * f(nodes[i])).sum();
            let d2v: f64 = (0..4).map(|i| d2w[i] * f(nodes[i])).sum();
            assert!((v - f(s)).abs() < 1e-14);
            assert!((dv - df(s)).abs() < 1e-13);
            assert!((d2v - d2f(s)).abs() < 1e-13);
        }
    }

    #[test]
    fn fourth_order_derivative_is_exact_on_quartics() {
        let h = 0.1;
        let vals: Vec<f64> = (0..20).map(|i| (i as f64 * h).powi(4)).collect();
        let d = derivative_4th(&vals, h);
        for i in 2..18 {
            let x = i as f64 * h;
            assert!((d[i] - 4.0 * x * x * x).abs() < 1e-11);
        }
    }
}
