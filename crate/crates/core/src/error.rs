use thiserror::Error;

/// Crate-wide error type. Numeric payloads are stored as `f64` regardless of
/// the scalar the computation ran in; they are diagnostics, not data.
#[derive(Debug, Error)]
pub enum Error {
    #[error("closed forms require omega1 == omega2 (got {omega1} and {omega2})")]
    UnequalAtomFrequencies { omega1: f64, omega2: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error(
        "degenerate scattering point: |denominator| = {denominator:.3e} below floor {floor:.3e}"
    )]
    DegeneratePoint { denominator: f64, floor: f64 },

    #[error("probability conservation violated: |sum - 1| = {residual:.3e}")]
    ConservationViolation { residual: f64 },

    #[error("singular linear system: pivot {pivot:.3e} below floor {floor:.3e}")]
    SingularSystem { pivot: f64, floor: f64 },

    #[error("amplitudes carry no inner-region fields; spatial wavefunctions need a solver result")]
    MissingInnerAmplitudes,

    #[error("empty search box on axis {axis}: min {min} >= max {max}")]
    EmptyBox {
        axis: &'static str,
        min: f64,
        max: f64,
    },

    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    #[error("config schema error at `{path}`: {message}")]
    SchemaError { path: String, message: String },

    #[error("config conflict: {0}")]
    ConflictError(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
