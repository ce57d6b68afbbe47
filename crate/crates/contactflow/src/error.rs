use thiserror::Error;

/// Errors produced by the simulation library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("axis {axis} out of range for {ndim}-dimensional grid")]
    AxisOutOfRange { axis: usize, ndim: usize },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("operation `{op}` is not defined for model kind {kind}")]
    UnsupportedKind { op: &'static str, kind: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite values encountered in {context}")]
    NonFinite { context: String },

    /// Terminal status of a diverging run. Carries the time of detection,
    /// the momentum sup-norm there and the breakdown integral
    /// `∫ ‖E(f)‖_∞ dt` accumulated up to that time.
    #[error(
        "numerical blowup at t = {t:.6}: |m|_inf = {m_linf:.3e}, ∫|E(f)| dt = {bkm_integral:.3e}"
    )]
    Blowup {
        t: f64,
        m_linf: f64,
        bkm_integral: f64,
    },

    #[error("snapshot format error: {0}")]
    SnapshotFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
