//! Functions on the initial plane `M₀ = {t = 0}`.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::quadrature::{cubic_weights, cubic_weights_deriv};
use crate::{Error, Result};

type ValueFn = dyn Fn(f64, f64) -> f64 + Send + Sync;
type GradFn = dyn Fn(f64, f64) -> [f64; 2] + Send + Sync;

/// An evaluator for `f(x1, x2)` and its first partials.
#[derive(Clone)]
pub struct PlaneFunction {
    value: Arc<ValueFn>,
    gradient: Option<Arc<GradFn>>,
    zero: bool,
    /// Radius beyond which `f` is expected to be negligible.
    pub decay_radius: f64,
}

impl fmt::Debug for PlaneFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PlaneFunction")
            .field("analytic_gradient", &self.gradient.is_some())
            .field("decay_radius", &self.decay_radius)
            .finish()
    }
}

const FD_STEP: f64 = 1e-5;

impl PlaneFunction {
    pub fn new(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            value: Arc::new(f),
            gradient: None,
            zero: false,
            decay_radius: f64::INFINITY,
        }
    }

    pub fn with_gradient(
        f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        grad: impl Fn(f64, f64) -> [f64; 2] + Send + Sync + 'static,
    ) -> Self {
        Self {
            value: Arc::new(f),
            gradient: Some(Arc::new(grad)),
            zero: false,
            decay_radius: f64::INFINITY,
        }
    }

    pub fn zero() -> Self {
        Self {
            value: Arc::new(|_, _| 0.0),
            gradient: Some(Arc::new(|_, _| [0.0, 0.0])),
            zero: true,
            decay_radius: 0.0,
        }
    }

    /// `e^{−|x|²}`.
    pub fn gaussian() -> Self {
        Self::with_gradient(
            |x1, x2| (-(x1 * x1 + x2 * x2)).exp(),
            |x1, x2| {
                let e = (-(x1 * x1 + x2 * x2)).exp();
                [-2.0 * x1 * e, -2.0 * x2 * e]
            },
        )
        .with_decay_radius(6.5)
    }

    pub fn with_decay_radius(mut self, r: f64) -> Self {
        self.decay_radius = r;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    pub fn value(&self, x1: f64, x2: f64) -> f64 {
        (self.value)(x1, x2)
    }

    pub fn gradient(&self, x1: f64, x2: f64) -> [f64; 2] {
        match &self.gradient {
            Some(g) => g(x1, x2),
            None => {
                let h = FD_STEP;
                [
                    (self.value(x1 + h, x2) - self.value(x1 - h, x2)) / (2.0 * h),
                    (self.value(x1, x2 + h) - self.value(x1, x2 - h)) / (2.0 * h),
                ]
            }
        }
    }

    /// Largest `|f|` sampled on circles of the given radii (64 angles each).
    pub fn sample_sup_on_circles(&self, radii: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for &r in radii {
            for j in 0..64 {
                let th = std::f64::consts::TAU * j as f64 / 64.0;
                worst = worst.max(self.value(r * th.cos(), r * th.sin()).abs());
            }
        }
        worst
    }

    /// Fails if `|x|^k |f(x)|` exceeds `bound` on a circle of the given radius.
    pub fn check_decay(&self, radius: f64, k: i32, bound: f64) -> Result<()> {
        let v = self.sample_sup_on_circles(&[radius]) * radius.powi(k);
        if v <= bound {
            Ok(())
        } else {
            Err(Error::Decay { radius, value: v })
        }
    }

    /// Samples `f` on a square grid and returns a bicubic interpolant that
    /// falls back to `self` outside the grid.
    pub fn tabulate(&self, half_width: f64, spacing: f64) -> Result<PlaneFunction> {
        let grid = PlaneGrid::sample(half_width, spacing, |x1, x2| self.value(x1, x2))?;
        Ok(grid.into_function(Some(self.clone())))
    }
}

/// Uniform square grid of samples with bicubic Lagrange interpolation.
#[derive(Debug, Clone)]
pub struct PlaneGrid {
    pub origin: f64,
    pub spacing: f64,
    pub n: usize,
    /// Row-major: index `i1 * n + i2`.
    pub values: Vec<f64>,
}

impl PlaneGrid {
    pub fn sample(
        half_width: f64,
        spacing: f64,
        f: impl Fn(f64, f64) -> f64 + Sync,
    ) -> Result<Self> {
        if !(spacing > 0.0 && half_width > 2.0 * spacing) {
            return Err(Error::InvalidArgument(format!(
                "grid half-width {half_width} with spacing {spacing} is too small"
            )));
        }
        let n = (2.0 * half_width / spacing).round() as usize + 1;
        let origin = -spacing * (n - 1) as f64 / 2.0;
        let values: Vec<f64> = (0..n * n)
            .into_par_iter()
            .map(|k| {
                let (i, j) = (k / n, k % n);
                f(origin + spacing * i as f64, origin + spacing * j as f64)
            })
            .collect();
        Ok(Self {
            origin,
            spacing,
            n,
            values,
        })
    }

    pub fn from_values(origin: f64, spacing: f64, n: usize, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), n * n);
        Self {
            origin,
            spacing,
            n,
            values,
        }
    }

    pub fn coord(&self, i: usize) -> f64 {
        self.origin + self.spacing * i as f64
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    /// Stencil base index and fractional offset, or `None` outside the
    /// region where a centred 4×4 stencil fits.
    fn locate(&self, x: f64) -> Option<(usize, f64)> {
        let u = (x - self.origin) / self.spacing;
        if !(u >= 1.0 && u <= (self.n - 2) as f64) {
            return None;
        }
        let i = (u.floor() as usize).min(self.n - 3);
        Some((i - 1, u - i as f64))
    }

    pub fn contains(&self, x1: f64, x2: f64) -> bool {
        self.locate(x1).is_some() && self.locate(x2).is_some()
    }

    pub fn interpolate(&self, x1: f64, x2: f64) -> Option<f64> {
        let (i0, s) = self.locate(x1)?;
        let (j0, r) = self.locate(x2)?;
        let wi = cubic_weights(s);
        let wj = cubic_weights(r);
        let mut acc = 0.0;
        for (a, wa) in wi.iter().enumerate() {
            let row = (i0 + a) * self.n + j0;
            let inner: f64 = (0..4).map(|b| wj[b] * self.values[row + b]).sum();
            acc += wa * inner;
        }
        Some(acc)
    }

    pub fn interpolate_gradient(&self, x1: f64, x2: f64) -> Option<[f64; 2]> {
        let (i0, s) = self.locate(x1)?;
        let (j0, r) = self.locate(x2)?;
        let wi = cubic_weights(s);
        let wj = cubic_weights(r);
        let di = cubic_weights_deriv(s);
        let dj = cubic_weights_deriv(r);
        let (mut g1, mut g2) = (0.0, 0.0);
        for a in 0..4 {
            let row = (i0 + a) * self.n + j0;
            let (mut v, mut dv) = (0.0, 0.0);
            for b in 0..4 {
                v += wj[b] * self.values[row + b];
                dv += dj[b] * self.values[row + b];
            }
            g1 += di[a] * v;
            g2 += wi[a] * dv;
        }
        Some([g1 / self.spacing, g2 / self.spacing])
    }

    /// Interpolant inside the grid, `fallback` (or zero) outside.
    pub fn into_function(self, fallback: Option<PlaneFunction>) -> PlaneFunction {
        let grid = Arc::new(self);
        let g1 = grid.clone();
        let g2 = grid.clone();
        let fb1 = fallback.clone();
        let fb2 = fallback.clone();
        let decay = fallback.as_ref().map_or(f64::INFINITY, |f| f.decay_radius);
        PlaneFunction::with_gradient(
            move |x1, x2| match g1.interpolate(x1, x2) {
                Some(v) => v,
                None => fb1.as_ref().map_or(0.0, |f| f.value(x1, x2)),
            },
            move |x1, x2| match g2.interpolate_gradient(x1, x2) {
                Some(v) => v,
                None => fb2.as_ref().map_or([0.0, 0.0], |f| f.gradient(x1, x2)),
            },
        )
        .with_decay_radius(decay)
    }
}
