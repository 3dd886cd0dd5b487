use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension `{name}` must be strictly positive, got {value}")]
    NonPositiveDimension { name: &'static str, value: f64 },

    #[error("degenerate section: {0}")]
    DegenerateSection(String),

    #[error("invalid material: {0}")]
    InvalidMaterial(String),

    #[error("singular geometry: {0}")]
    SingularGeometry(String),

    #[error("position {x} m outside beam span [0, {span}] m")]
    OutOfRange { x: f64, span: f64 },

    #[error("sensor radius {radius_mm} mm outside the beam window [{lo_mm}, {hi_mm}) mm")]
    SensorOffBeam { radius_mm: f64, lo_mm: f64, hi_mm: f64 },

    #[error("matrix is rank deficient (sigma_min / sigma_max = {ratio:e})")]
    RankDeficient { ratio: f64 },

    #[error("no feasible point found after {starts} starts")]
    NoFeasiblePoint { starts: usize },

    #[error("underdetermined fit: need at least {needed} distinct abscissae, got {got}")]
    Underdetermined { needed: usize, got: usize },

    #[error("ill-conditioned fit (condition {condition:e})")]
    IllConditioned { condition: f64 },

    #[error("voltage {value} V outside calibrated domain [{lo}, {hi}] V")]
    DomainExceeded { value: f64, lo: f64, hi: f64 },

    #[error("excitation does not span all six axes (rank {rank})")]
    DeficientExcitation { rank: usize },

    #[error("series length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("trace format: {0}")]
    TraceFormat(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::TraceFormat(e.to_string())
    }
}
