//! Integral transforms between cylinder functions, wave fields and data on
//! the initial plane.

mod cylinder;
mod hilbert;
mod plane;
mod profile;
mod radon;
mod sampled;
mod wave;

pub use cylinder::{
    eval_cylinder_fn, transform_r, CylinderFunction, Deriv, Jet, Mode, RTransform, MAX_ORDER,
};
pub use hilbert::{hilbert_grid, hilbert_pv, hilbert_pv_with, hilbert_row, TailClosure};
pub use plane::{PlaneFunction, PlaneGrid};
pub use profile::{ProfileSpec, VProfile, TABLE_ORDER};
pub use radon::{
    cauchy_to_h, differentiate_v, dual_radon, invert_radon, radon, radon_sampled, CauchyInversion,
    InversionConfig, LineQuadrature, RadonValue, Reconstruction, TailReport, TAIL_BOUND,
};
pub use sampled::{LineGrid, SampledLineFunction};
pub use wave::{wave_fd_solve, FdWaveField, WaveField};
