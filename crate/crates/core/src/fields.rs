//! Scalar fields on ℝ^{1,2} with analytic partials where available and a
//! centred finite-difference fallback otherwise.

use std::fmt;
use std::sync::Arc;

use crate::geometry::SpacetimePoint;
use crate::transforms::{Deriv, RTransform, VProfile, MAX_ORDER};

/// A smooth function of `(t, x1, x2)`.
pub trait SpacetimeField: Send + Sync {
    fn value(&self, p: &SpacetimePoint) -> f64;

    /// Analytic partial `∂^deriv`, or `None` when only values are available.
    fn partial(&self, p: &SpacetimePoint, deriv: Deriv) -> Option<f64> {
        if deriv == [0, 0, 0] {
            Some(self.value(p))
        } else {
            None
        }
    }

    /// True when the field is known to vanish identically.
    fn is_zero(&self) -> bool {
        false
    }
}

pub type Field = Arc<dyn SpacetimeField>;

impl fmt::Debug for dyn SpacetimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SpacetimeField")
    }
}

fn shift(p: &SpacetimePoint, axis: usize, h: f64) -> SpacetimePoint {
    let mut a = p.as_array();
    a[axis] += h;
    SpacetimePoint::new(a[0], a[1], a[2])
}

/// `∂^deriv f(p)`: analytic when the field provides it, otherwise centred
/// differences with step `step`, one axis at a time.
pub fn partial_or_fd(f: &dyn SpacetimeField, p: &SpacetimePoint, deriv: Deriv, step: f64) -> f64 {
    if let Some(v) = f.partial(p, deriv) {
        return v;
    }
    let axis = deriv
        .iter()
        .position(|n| *n > 0)
        .expect("order 0 always analytic");
    let mut lower = deriv;
    lower[axis] -= 1;
    let plus = partial_or_fd(f, &shift(p, axis, step), lower, step);
    let minus = partial_or_fd(f, &shift(p, axis, -step), lower, step);
    (plus - minus) / (2.0 * step)
}

/// `∇ = (∂_t, ∂_1, ∂_2)`.
pub fn gradient(f: &dyn SpacetimeField, p: &SpacetimePoint, step: f64) -> [f64; 3] {
    [
        partial_or_fd(f, p, [1, 0, 0], step),
        partial_or_fd(f, p, [0, 1, 0], step),
        partial_or_fd(f, p, [0, 0, 1], step),
    ]
}

pub(crate) fn add_axis(d: Deriv, axis: usize) -> Deriv {
    let mut out = d;
    out[axis] += 1;
    out
}

#[derive(Debug, Clone, Copy)]
pub struct ConstantField(pub f64);

impl SpacetimeField for ConstantField {
    fn value(&self, _: &SpacetimePoint) -> f64 {
        self.0
    }

    fn partial(&self, _: &SpacetimePoint, deriv: Deriv) -> Option<f64> {
        Some(if deriv == [0, 0, 0] { self.0 } else { 0.0 })
    }

    fn is_zero(&self) -> bool {
        self.0 == 0.0
    }
}

pub fn zero_field() -> Field {
    Arc::new(ConstantField(0.0))
}

/// `scale · a(t) · b(x1) · c(x2)`.
#[derive(Debug, Clone)]
pub struct SeparableField {
    pub scale: f64,
    pub t: VProfile,
    pub x1: VProfile,
    pub x2: VProfile,
}

impl SeparableField {
    /// `scale · e^{−t² − x1² − x2²}`.
    pub fn gaussian(scale: f64) -> Self {
        let g = VProfile::gaussian(1.0, 0.0, 1.0);
        Self {
            scale,
            t: g.clone(),
            x1: g.clone(),
            x2: g,
        }
    }
}

impl SpacetimeField for SeparableField {
    fn value(&self, p: &SpacetimePoint) -> f64 {
        self.scale * self.t.value(p.t) * self.x1.value(p.x1) * self.x2.value(p.x2)
    }

    fn partial(&self, p: &SpacetimePoint, d: Deriv) -> Option<f64> {
        if d.iter()
            .any(|n| *n as usize > crate::transforms::TABLE_ORDER)
        {
            return None;
        }
        Some(
            self.scale
                * self.t.derivative(p.t, d[0] as usize)
                * self.x1.derivative(p.x1, d[1] as usize)
                * self.x2.derivative(p.x2, d[2] as usize),
        )
    }

    fn is_zero(&self) -> bool {
        self.scale == 0.0 || self.t.is_zero() || self.x1.is_zero() || self.x2.is_zero()
    }
}

/// `f + g`.
pub struct SumField(pub Field, pub Field);

impl SpacetimeField for SumField {
    fn value(&self, p: &SpacetimePoint) -> f64 {
        self.0.value(p) + self.1.value(p)
    }

    fn partial(&self, p: &SpacetimePoint, d: Deriv) -> Option<f64> {
        Some(self.0.partial(p, d)? + self.1.partial(p, d)?)
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero() && self.1.is_zero()
    }
}

/// `c · ∂_axis f`, with partials delegated to `f`.
pub struct DerivedField {
    pub source: Field,
    pub axis: usize,
    pub factor: f64,
    pub fd_step: f64,
}

impl SpacetimeField for DerivedField {
    fn value(&self, p: &SpacetimePoint) -> f64 {
        let mut d = [0, 0, 0];
        d[self.axis] = 1;
        self.factor * partial_or_fd(self.source.as_ref(), p, d, self.fd_step)
    }

    fn partial(&self, p: &SpacetimePoint, d: Deriv) -> Option<f64> {
        Some(self.factor * self.source.partial(p, add_axis(d, self.axis))?)
    }

    fn is_zero(&self) -> bool {
        self.factor == 0.0 || self.source.is_zero()
    }
}

/// `u = Rh` as a field, with analytic partials up to order 4.
#[derive(Debug, Clone)]
pub struct RhField(pub Arc<RTransform>);

impl SpacetimeField for RhField {
    fn value(&self, p: &SpacetimePoint) -> f64 {
        self.0.eval(p, [0, 0, 0]).expect("order 0")
    }

    fn partial(&self, p: &SpacetimePoint, d: Deriv) -> Option<f64> {
        if d.iter().sum::<u32>() > MAX_ORDER {
            return None;
        }
        self.0.eval(p, d).ok()
    }

    fn is_zero(&self) -> bool {
        self.0.h().is_zero()
    }
}

/// Field given by a closure, values only.
pub struct FnField<F>(pub F);

impl<F: Fn(&SpacetimePoint) -> f64 + Send + Sync> SpacetimeField for FnField<F> {
    fn value(&self, p: &SpacetimePoint) -> f64 {
        (self.0)(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finite_difference_fallback_matches_analytic() {
        let g = SeparableField::gaussian(1.5);
        let vals = FnField(move |p: &SpacetimePoint| g.value(p));
        let g = SeparableField::gaussian(1.5);
        let p = SpacetimePoint::new(0.3, -0.2, 0.5);
        for d in [[1, 0, 0], [0, 1, 1], [2, 0, 0], [0, 0, 2]] {
            let exact = g.partial(&p, d).unwrap();
            let fd = partial_or_fd(&vals, &p, d, 1e-3);
            assert!((exact - fd).abs() < 1e-5, "{d:?}: {exact} vs {fd}");
        }
    }

    #[test]
    fn constants_and_sums() {
        let c: Field = Arc::new(ConstantField(2.0));
        let s = SumField(c.clone(), Arc::new(SeparableField::gaussian(1.0)));
        let p = SpacetimePoint::ORIGIN;
        assert_eq!(s.value(&p), 3.0);
        assert_eq!(s.partial(&p, [0, 1, 0]).unwrap(), 0.0);
        assert!(zero_field().is_zero());
        assert!(!c.is_zero());
    }
}
