use crate::segre::SegrePoint;

/// Errors shared by all geometry modules.
#[derive(Debug, Clone, thiserror::Error)]
pub enum GeometryError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("points live on different manifold shapes")]
    ShapeMismatch,

    #[error("tangent vectors are based at different points")]
    BaseMismatch,

    #[error("invalid manifold shape: {0}")]
    InvalidShape(String),

    #[error("vector norm {norm} is not 1 within 1e-12")]
    NotUnit { norm: f64 },

    #[error("cannot normalize a (near-)zero vector")]
    ZeroVector,

    #[error("tangent is not orthogonal to its base point: <v,u> = {inner:e}")]
    NotOrthogonal { inner: f64 },

    #[error("radius {lambda} must be positive")]
    InvalidLambda { lambda: f64 },

    #[error("antipodal points (angle {angle}): spherical log is not defined")]
    Antipodal { angle: f64 },

    #[error("factor {index} is antipodal (angle {angle}): connecting geodesic is not unique")]
    AntipodalFactor { index: usize, angle: f64 },

    #[error("points are not compatible: alpha*M = {alpha_m} >= pi = {pi}", pi = std::f64::consts::PI)]
    Incompatible { alpha_m: f64 },

    #[error(
        "no minimizing geodesic: matched representatives have alpha*M = {alpha_m} >= pi = {pi}",
        pi = std::f64::consts::PI
    )]
    NotConnected { alpha_m: f64 },

    #[error("tangent leaves the exponential domain: purely radial step {lambda_dot} from radius {lambda} hits the puncture")]
    Domain { lambda: f64, lambda_dot: f64 },

    #[error("dense tensor would hold {entries} entries, exceeding the cap of {cap}")]
    SizeCapExceeded { entries: u128, cap: usize },

    #[error("sign pattern is not a deck transform: product over odd-multiplicity factors is -1")]
    InfeasiblePattern,

    #[error("fiber enumeration over {d} factors exceeds the supported maximum of {max}")]
    FiberTooLarge { d: usize, max: usize },

    #[error("unsupported curvature plane: {0}")]
    UnsupportedPlane(String),

    #[error("mean iteration cap {max_iters} reached with gradient norm {grad_norm:e}")]
    MaxItersExceeded {
        max_iters: usize,
        grad_norm: f64,
        /// Last iterate, so callers can inspect or continue from it.
        last: Box<SegrePoint>,
    },

    #[error("path relaxation did not converge after {sweeps} sweeps (residual {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),
}
