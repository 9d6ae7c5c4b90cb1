use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate bounds on {axis}: [{min}, {max})")]
    DegenerateBounds { axis: &'static str, min: f64, max: f64 },

    #[error("partition needs at least one cell per axis (got {cells_q}x{cells_p})")]
    ZeroCells { cells_q: usize, cells_p: usize },

    #[error("point ({q}, {p}) lies outside the region")]
    OutOfRegion { q: f64, p: f64 },

    #[error("point ({q}, {p}) is outside the domain of map `{map}`")]
    Domain { map: String, q: f64, p: f64 },

    #[error("derivative of `{map}` undefined at ({q}, {p})")]
    UndefinedDerivative { map: String, q: f64, p: f64 },

    #[error("tangent iteration hit the discontinuity set {restarts} times")]
    RestartsExhausted { restarts: usize },

    #[error("orbit left the region at ({q}, {p})")]
    OrbitEscape { q: f64, p: f64 },

    #[error("weights are not normalized (sum = {sum})")]
    NotNormalized { sum: f64 },

    #[error("fit window [{lo}, {hi}] spans fewer than 3 depths")]
    WindowTooShort { lo: usize, hi: usize },

    #[error("entropy increments never fell below the saturation threshold")]
    NoSaturation,

    #[error("power iteration did not converge after {iters} iterations (residual {residual:e})")]
    NonConvergence { iters: usize, residual: f64 },

    #[error("dimension {0} is even; the discrete Wigner grid needs odd N")]
    EvenDimension(usize),

    #[error("eigensolver failed to converge")]
    Eigensolver,

    #[error("classical map `{0}` does not permute the Z_N x Z_N lattice")]
    GridMismatch(String),

    #[error("invalid map spec `{0}`")]
    MapSpec(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Numerical failures map to exit code 2, everything else to 1.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::UndefinedDerivative { .. }
                | Error::RestartsExhausted { .. }
                | Error::OrbitEscape { .. }
                | Error::NoSaturation
                | Error::NonConvergence { .. }
                | Error::Eigensolver
                | Error::WindowTooShort { .. }
        )
    }
}
