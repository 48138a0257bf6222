use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("infeasible target: mu_d = {mu_d} must exceed mu = {mu}")]
    InfeasibleTarget { mu: f64, mu_d: f64 },

    #[error("empty lambda range ({lower}, {upper})")]
    EmptyLambdaRange { lower: f64, upper: f64 },

    #[error("lambda = {lambda} outside admissible range ({lower}, {upper})")]
    LambdaOutOfRange { lambda: f64, lower: f64, upper: f64 },

    #[error("unsupported exponent p = {0}; analytic bounds need p > 1")]
    UnsupportedExponent(f64),

    #[error("infeasible certificate: {name} = {value} must be positive")]
    InfeasibleCertificate { name: &'static str, value: f64 },

    #[error("inconsistent bounds: {0}")]
    InconsistentBounds(String),

    #[error("requested inter-event floor {requested} not below the supremum {max}")]
    UnachievableFloor { requested: f64, max: f64 },

    #[error("unknown trigger preset `{0}`")]
    UnknownPreset(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("simulation diverged at t = {t}: {detail}")]
    Divergence { t: f64, detail: String },

    #[error("event localization called without a sign change on [{t0}, {t1}]")]
    NoSignChange { t0: f64, t1: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
