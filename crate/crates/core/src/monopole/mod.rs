//! Monopole pairs `(V, A)` on ℝ^{1,2}: construction from `h`, the residual of
//! `*dV = dA`, gauge fixing and recovery of the wave potential.

mod gauge;
mod poisson;

pub use gauge::{
    gauge_fix, recover_u, GaugeConfig, GaugeReport, GaugeSummary, RecoverConfig, Recovered,
};
pub use poisson::{solve_poisson, PoissonSolution};

use std::io::Write;
use std::sync::Arc;

use serde::Serialize;

use crate::fields::{partial_or_fd, ConstantField, DerivedField, Field, RhField, SumField};
use crate::geometry::SpacetimePoint;
use crate::transforms::{CylinderFunction, Deriv, RTransform};
use crate::{Error, Result};

/// Default number of θ-nodes for pairs built from `h`.
pub const DEFAULT_N_THETA: usize = 256;

/// Default finite-difference step for partials without a closed form.
pub const DEFAULT_FD_STEP: f64 = 1e-4;

#[derive(Debug, Clone)]
pub enum Provenance {
    FromH(Arc<CylinderFunction>),
    External,
}

/// `V` and `A = A_t dt + A_1 dx1 + A_2 dx2`.
#[derive(Clone)]
pub struct MonopolePair {
    pub v: Field,
    pub a: [Field; 3],
    pub provenance: Provenance,
    pub fd_step: f64,
}

impl std::fmt::Debug for MonopolePair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MonopolePair")
            .field("provenance", &self.provenance)
            .field("fd_step", &self.fd_step)
            .finish()
    }
}

/// Hodge star of a 1-form `(a_t, a_1, a_2)` on ℝ^{1,2} with metric
/// `−dt² + dx1² + dx2²` and volume `dt∧dx1∧dx2`, returned in the basis
/// `(dt∧dx1, dt∧dx2, dx1∧dx2)`.
pub fn hodge_star_1form(a: [f64; 3]) -> [f64; 3] {
    [a[2], -a[1], -a[0]]
}

/// Hodge star of a 2-form in the basis `(dt∧dx1, dt∧dx2, dx1∧dx2)`.
pub fn hodge_star_2form(f: [f64; 3]) -> [f64; 3] {
    [f[2], f[1], -f[0]]
}

/// Exterior derivative of a 1-form given its gradient rows `∂_μ a_ν`
/// (`grads[ν][μ]`), in the basis `(dt∧dx1, dt∧dx2, dx1∧dx2)`.
fn exterior_d(grads: [[f64; 3]; 3]) -> [f64; 3] {
    [
        grads[1][0] - grads[0][1],
        grads[2][0] - grads[0][2],
        grads[2][1] - grads[1][2],
    ]
}

impl MonopolePair {
    pub fn new(v: Field, a: [Field; 3], provenance: Provenance) -> Self {
        Self {
            v,
            a,
            provenance,
            fd_step: DEFAULT_FD_STEP,
        }
    }

    /// `V = 1 − u_t`, `A = ⋆̌ď u = −u_2 dx1 + u_1 dx2`.
    pub fn from_potential(u: Field, provenance: Provenance) -> Self {
        let step = DEFAULT_FD_STEP;
        let v: Field = Arc::new(SumField(
            Arc::new(ConstantField(1.0)),
            Arc::new(DerivedField {
                source: u.clone(),
                axis: 0,
                factor: -1.0,
                fd_step: step,
            }),
        ));
        let a1: Field = Arc::new(DerivedField {
            source: u.clone(),
            axis: 2,
            factor: -1.0,
            fd_step: step,
        });
        let a2: Field = Arc::new(DerivedField {
            source: u,
            axis: 1,
            factor: 1.0,
            fd_step: step,
        });
        Self::new(v, [Arc::new(ConstantField(0.0)), a1, a2], provenance)
    }

    /// Pair from `u = Rh` with `n_theta` quadrature nodes.
    pub fn from_h(h: &CylinderFunction, n_theta: usize) -> Result<Self> {
        let r = Arc::new(RTransform::new(h.clone(), n_theta)?);
        Ok(Self::from_potential(
            Arc::new(RhField(r)),
            Provenance::FromH(Arc::new(h.clone())),
        ))
    }

    /// Same `V`, with `A` replaced.
    pub fn with_a(&self, a: [Field; 3]) -> Self {
        Self {
            v: self.v.clone(),
            a,
            provenance: Provenance::External,
            fd_step: self.fd_step,
        }
    }

    /// `(V, A + dψ)`.
    pub fn gauge_transform(&self, psi: Field) -> Self {
        let a = [0, 1, 2].map(|mu| -> Field {
            Arc::new(SumField(
                self.a[mu].clone(),
                Arc::new(DerivedField {
                    source: psi.clone(),
                    axis: mu,
                    factor: 1.0,
                    fd_step: self.fd_step,
                }),
            ))
        });
        self.with_a(a)
    }

    pub fn v_at(&self, p: &SpacetimePoint) -> f64 {
        self.v.value(p)
    }

    pub fn a_at(&self, p: &SpacetimePoint) -> [f64; 3] {
        [0, 1, 2].map(|mu| self.a[mu].value(p))
    }

    pub fn v_partial(&self, p: &SpacetimePoint, d: Deriv) -> f64 {
        partial_or_fd(self.v.as_ref(), p, d, self.fd_step)
    }

    pub fn a_partial(&self, mu: usize, p: &SpacetimePoint, d: Deriv) -> f64 {
        partial_or_fd(self.a[mu].as_ref(), p, d, self.fd_step)
    }

    /// `(u_t, u_1, u_2)` of the potential with `V = 1 − u_t`, `A_1 = −u_2`,
    /// `A_2 = u_1`.
    pub fn potential_gradient(&self, p: &SpacetimePoint) -> [f64; 3] {
        let a = self.a_at(p);
        [1.0 - self.v_at(p), a[2], -a[1]]
    }
}

/// Pair built from `h` with the default quadrature.
pub fn monopole_from_h(h: &CylinderFunction) -> Result<MonopolePair> {
    MonopolePair::from_h(h, DEFAULT_N_THETA)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residual {
    pub max_abs: f64,
    /// `*dV − dA` in the basis `(dt∧dx1, dt∧dx2, dx1∧dx2)`.
    pub components: [f64; 3],
}

/// `*dV − dA` at `p`, using analytic partials where the fields provide them
/// and centred differences with `step` otherwise.
pub fn monopole_residual(m: &MonopolePair, p: &SpacetimePoint, step: f64) -> Result<Residual> {
    if !(step > 0.0) {
        return Err(Error::InvalidArgument("step must be positive".into()));
    }
    let axes: [Deriv; 3] = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
    let dv = axes.map(|d| partial_or_fd(m.v.as_ref(), p, d, step));
    let grads = [0, 1, 2].map(|nu| axes.map(|d| partial_or_fd(m.a[nu].as_ref(), p, d, step)));
    let star = hodge_star_1form(dv);
    let da = exterior_d(grads);
    let components = [star[0] - da[0], star[1] - da[1], star[2] - da[2]];
    let max_abs = components.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    Ok(Residual {
        max_abs,
        components,
    })
}

/// Smallest `V` over the sample points; fails if it is not positive.
pub fn positivity_gate(m: &MonopolePair, points: &[SpacetimePoint]) -> Result<f64> {
    let mut min_v = f64::INFINITY;
    for p in points {
        let v = m.v_at(p);
        if !(v > 0.0) {
            return Err(Error::Degenerate {
                v,
                point: [0.0, p.t, p.x1, p.x2],
            });
        }
        min_v = min_v.min(v);
    }
    Ok(min_v)
}

/// CSV with columns `t,x1,x2,V,A_t,A_1,A_2`.
pub fn write_fields_csv<W: Write>(
    m: &MonopolePair,
    points: &[SpacetimePoint],
    mut w: W,
) -> Result<()> {
    writeln!(w, "t,x1,x2,V,A_t,A_1,A_2")?;
    for p in points {
        // `+ 0.0` prints negative zero as `0`
        let a = m.a_at(p).map(|x| x + 0.0);
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            p.t,
            p.x1,
            p.x2,
            m.v_at(p) + 0.0,
            a[0],
            a[1],
            a[2]
        )?;
    }
    Ok(())
}
