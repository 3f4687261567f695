use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("derivative order {order} exceeds the supported maximum {max}")]
    OrderTooHigh { order: u32, max: u32 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("zero direction vector has no causal character")]
    ZeroVector,

    #[error("v = {v} lies outside the sampled range [{lo}, {hi}]")]
    OutOfRange { v: f64, lo: f64, hi: f64 },

    #[error("point is not over the real equator: |y0| = {y0}, |y1| = {y1}")]
    NotOverEquator { y0: f64, y1: f64 },

    #[error("point is at infinity: (y0, y1) = 0")]
    AtInfinity,

    #[error("|ω| = {0} lies outside the closed unit disk")]
    OutsideDisk(f64),

    #[error("Fourier truncation K = {k} aliases with {n} quadrature nodes (need N ≥ 4K)")]
    Aliasing { k: usize, n: usize },

    #[error("degenerate region: V = {v} ≤ 0 at {point:?}")]
    Degenerate { v: f64, point: [f64; 4] },

    #[error("causality violation: ({t}, {x1}, {x2}) depends on the boundary of the finite-difference box")]
    Causality { t: f64, x1: f64, x2: f64 },

    #[error("decay check failed: |f| = {value:.3e} at radius {radius}")]
    Decay { radius: f64, value: f64 },

    #[error("potential is not a gradient: curl residual {residual:.3e} at ({x1}, {x2})")]
    NotAGradient { residual: f64, x1: f64, x2: f64 },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("parse error: {0}")]
    Parse(String),
}
