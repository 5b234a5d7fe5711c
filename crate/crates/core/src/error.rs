use thiserror::Error;

/// Errors raised by the special-function, root-finding and mode layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid mode index: {0}")]
    InvalidIndex(String),

    #[error("truncation for q = {q} exceeded the cap of {cap} coefficients")]
    TruncationCap { q: f64, cap: usize },

    #[error("characteristic value iteration did not converge after {0} steps")]
    NoConvergence(usize),

    #[error("characteristic value left its branch: moved {moved:e}, allowed {allowed:e}")]
    BranchJump { moved: f64, allowed: f64 },

    #[error("normalization sum vanishes; eigenvector is degenerate or mis-selected")]
    DegenerateNormalization,

    #[error("expansion has {found} basis but {wanted} was requested")]
    BasisMismatch {
        found: &'static str,
        wanted: &'static str,
    },

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("radial series overflow guard: harmonic {harmonic} at beta = {beta}")]
    Overflow { harmonic: u32, beta: f64 },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("scan found {found} of {wanted} sign changes below q_max = {q_max}")]
    TooFewBrackets {
        found: usize,
        wanted: usize,
        q_max: f64,
    },

    #[error("root refinement did not converge in {0} iterations")]
    RootNotConverged(usize),

    #[error("root at q = {q} has {found} radial zeros, expected {expected}")]
    ZeroCountMismatch {
        q: f64,
        expected: usize,
        found: usize,
    },

    #[error("root at q = {q} has residual {residual:e} above certificate bound {bound:e}")]
    ResidualTooLarge { q: f64, residual: f64, bound: f64 },

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("point ({x}, {y}) lies outside the membrane")]
    OutsideBoundary { x: f64, y: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
