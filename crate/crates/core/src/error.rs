use thiserror::Error;

/// Errors raised by the geometry kernel and the surface builders.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("frame vectors live at different base points")]
    BaseMismatch,
    #[error("parameter ({u}, {v}) is outside the patch domain")]
    OutOfDomain { u: f64, v: f64 },
    #[error("patch is not regular at ({u}, {v}): |σ_u × σ_v| = {cross}")]
    NotRegular { u: f64, v: f64, cross: f64 },
    #[error("characteristic point: |N^h| = {norm} below threshold {eps}")]
    CharacteristicPoint { norm: f64, eps: f64 },
    #[error("plane curve has zero speed")]
    ZeroSpeed,
    #[error("flow leaf left the domain before enough samples were collected")]
    FlowEscapedDomain,
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("curve is not horizontal: residual {residual} exceeds {tol}")]
    NotHorizontal { residual: f64, tol: f64 },
    #[error("curve does not have unit horizontal speed: deviation {deviation}")]
    NotUnitSpeed { deviation: f64 },
    #[error("curve is a straight line (curvature {kappa})")]
    StraightLine { kappa: f64 },
    #[error("v range {v_min}..{v_max} contains the curve itself (v = 0)")]
    ZeroInRange { v_min: f64, v_max: f64 },
    #[error("profile curve is not regular at s = {s}")]
    NotRegularProfile { s: f64 },
    #[error("η vanishes identically: projected curve is a straight line and the ruling is tangent")]
    DegenerateRuling,
    #[error("ruling direction is constant (a ḃ − b ȧ ≡ 0); no plane contactomorphism factor")]
    ConstantRulingDirection,
    #[error("unknown catalog surface `{0}`")]
    UnknownName(String),
    #[error("invalid surface spec: {0}")]
    InvalidSpec(String),
    #[error("surface spec, line {line} column {column}: {msg}")]
    Parse { line: usize, column: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, GeomError>;
