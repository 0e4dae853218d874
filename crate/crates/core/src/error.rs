use crate::scalar::Mode;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("mixed-mode arithmetic: {left:?} vs {right:?}")]
    ModeMismatch { left: Mode, right: Mode },

    #[error("division by zero")]
    DivisionByZero,

    #[error("degenerate boundary data: {0}")]
    DegenerateData(String),

    #[error("pivot magnitude {magnitude:e} fell below threshold {threshold:e} at (k, l) = ({k}, {l})")]
    PivotVanished {
        k: usize,
        l: usize,
        magnitude: f64,
        threshold: f64,
    },

    #[error("point ({x}, {y}, {z}) lies on the z-axis where the map is singular")]
    OnAxis { x: f64, y: f64, z: f64 },

    #[error("point with u = {u}, z = {z} lies outside the configured evaluation region")]
    OutOfDomain { u: f64, z: f64 },

    #[error("radicand {re} + {im}i crosses the principal branch cut")]
    BranchCut { re: f64, im: f64 },

    #[error("need at least {needed} nonzero tail coefficients, found {found}")]
    InsufficientTerms { needed: usize, found: usize },

    #[error("unknown solution family `{0}`")]
    UnknownFamily(String),

    #[error("root finding found no real point on the fibre")]
    NoRealPoint,

    #[error("degenerate fibre: imaginary part of the fibre vector vanishes")]
    Degenerate,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
