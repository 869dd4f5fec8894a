use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cutoff n_max={n_max} too small: truncated tail mass {tail:.3e}")]
    CutoffTooSmall { n_max: usize, tail: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("quantity undefined for the vacuum state")]
    UndefinedForVacuum,

    #[error("channel output trace {trace} deviates from 1")]
    TraceLoss { trace: f64 },

    #[error("state is not supported on the noon span (sector n={n}, stray weight {weight:.3e})")]
    NotNoonSupported { n: usize, weight: f64 },

    #[error("heralded branch has zero norm")]
    ZeroNorm,

    #[error("negative spectral weight {0:.3e}")]
    NegativeWeight(f64),

    #[error("series did not converge within {terms} terms")]
    SeriesCapExceeded { terms: usize },

    #[error("analytic mixture trace deficit {deficit:.3e} exceeds tolerance")]
    TailTooHeavy { deficit: f64 },

    #[error("mixed-state QFI routes disagree: sum form {sum_form}, eigen-derivative form {literal}")]
    RouteMismatch { sum_form: f64, literal: f64 },

    #[error("N_av={n_av} outside sampled range [{lo}, {hi}]")]
    OutOfRange { n_av: f64, lo: f64, hi: f64 },

    #[error("N_av is not monotone in alpha for {0}")]
    NonMonotone(String),

    #[error("no sign change of the delta-phi difference over the bracket")]
    NoSignChange,

    #[error("no closed form for {0}")]
    Unsupported(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
