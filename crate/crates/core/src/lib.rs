//! Numerical toolkit for the twistor correspondence of ℝ-invariant neutral
//! self-dual metrics on ℝ⁴.
//!
//! The forward direction runs cylinder function `h(θ, v)` → wave field
//! `u = Rh` → monopole `(V, A)` → metric `g_(V,A)`, with curvature-level
//! checks. The converse runs monopole → gauge-fixed wave field → Cauchy data
//! → `h` through Radon and Hilbert inversion. The [`twistor`] module builds
//! the holomorphic disks on the deformed twistor space and checks their
//! incidence with the real locus.
//!
//! Module map:
//!
//! * [`geometry`]: planar circles on the cylinder and the flat Lorentz space.
//! * [`transforms`]: the circle-average transform, Radon/dual Radon, Hilbert
//!   transform, inversion and a leapfrog wave solver.
//! * [`fields`]: scalar fields on ℝ^{1,2} with analytic or finite-difference
//!   partials.
//! * [`monopole`]: monopole pairs, residual of `*dV = dA`, gauge fixing and
//!   recovery of the wave potential.
//! * [`metric`]: the metric `g_(V,A)`, Christoffel/Riemann/Weyl tensors, the
//!   self-dual split and the β-plane degeneracy check.
//! * [`twistor`]: projective coordinates, the `(ℂ,ℝ)`-action, quotient maps
//!   and holomorphic disks.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod fields;
pub mod geometry;
pub mod metric;
pub mod monopole;
pub mod quadrature;
pub mod transforms;
pub mod twistor;

pub use error::{Error, Result};
