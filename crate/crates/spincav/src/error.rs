use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported Stevens operator (k={k}, q={q}); supply a raw Hermitian matrix instead")]
    UnsupportedOperator { k: u32, q: i32 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("singular evaluation in {op}: {detail}")]
    SingularEvaluation { op: &'static str, detail: String },

    #[error("resonant denominator for pair ({a}, {b}): |E - ({sign}) omega_c| = {gap:e} GHz below tolerance")]
    ResonantDenominator { a: usize, b: usize, sign: char, gap: f64 },

    #[error("non-dispersive regime: {0}")]
    NonDispersive(String),

    #[error("no real working point: anisotropy {d} GHz does not exceed cavity frequency {omega} GHz")]
    NoRealWorkingPoint { d: f64, omega: f64 },

    #[error("phase pattern (-,+) is unclassifiable (out-of-model input)")]
    Unclassifiable,

    #[error("config error: {0}")]
    Config(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
