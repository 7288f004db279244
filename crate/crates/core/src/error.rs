use thiserror::Error;

/// Errors raised by the solvers, verifiers and spec loaders.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GameError {
    #[error("invalid probability for {what}: {value}")]
    InvalidProbability { what: String, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("utilities violate the cheap-talk ordering: {0}")]
    UtilityOrdering(String),

    #[error("detector uninformative; regimes collapse")]
    UninformativeDetector,

    #[error("knife-edge detector (beta = 1 - alpha); equilibrium construction inapplicable")]
    KnifeEdgeDetector,

    #[error("boundary prior; receiver indifferent at p = {0}")]
    BoundaryPrior(f64),

    #[error("prior {p} is not inside the {expected} regime")]
    WrongRegime { p: f64, expected: String },

    #[error("internal consistency: {0}")]
    Internal(String),

    #[error("state {theta} lies beyond the separating domain (cutoff {cutoff})")]
    BeyondCutoff { theta: f64, cutoff: f64 },

    #[error(
        "empty investigation sub-interval: partition state {partition} at an edge of [{lo}, {hi}]"
    )]
    EmptySubInterval { lo: f64, hi: f64, partition: f64 },

    #[error("mixed region; split first (interval [{lo}, {hi}] straddles boundary {boundary})")]
    MixedRegion { lo: f64, hi: f64, boundary: f64 },

    #[error("K = {requested} infeasible; max feasible K = {max_feasible:?}")]
    InfeasiblePools {
        requested: usize,
        max_feasible: Option<usize>,
    },

    #[error("policy undefined at stage {stage}, state {state}, belief ({a}, {b})")]
    PolicyUndefined {
        stage: usize,
        state: usize,
        a: f64,
        b: f64,
    },

    #[error("search too large: {profiles} profiles at resolution {resolution} (max 101)")]
    SearchTooLarge { resolution: usize, profiles: u128 },

    #[error("root not bracketed on [{lo}, {hi}]")]
    NotBracketed { lo: f64, hi: f64 },
}

pub type Result<T> = std::result::Result<T, GameError>;
