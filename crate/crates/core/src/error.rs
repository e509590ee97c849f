use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("division by zero: curvature equals -mu with nonzero e")]
    SingularTorsion,
    #[error("no oscillation: the radicand has no admissible pair of simple roots")]
    NoOscillation,
    #[error("singular profile: kappa = -mu lies inside [kappa_min, kappa_max]")]
    SingularProfile,
    #[error("degenerate radius: 4d(kappa+mu)^2 - e^2 <= 0 on the profile")]
    DegenerateRadius,
    #[error("gcd(p, q) = {gcd} for (q, p) = ({q}, {p}); need coprime winding numbers")]
    NotCoprime { p: u32, q: u32, gcd: u32 },
    #[error("target rotation {target:.6} not reached; scanned range [{min:.6}, {max:.6}]")]
    NotFound { target: f64, min: f64, max: f64 },
    #[error("negative discriminant in the Delaunay radius equation")]
    NegativeDiscriminant,
    #[error("nonpositive radius {0}")]
    NonpositiveRadius(f64),
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("vertex {0} has a zero-area star")]
    ZeroAreaStar(usize),
    #[error("boundary loop has {0} vertices, at least 8 are needed")]
    TooCoarseLoop(usize),
    #[error("curve is not closed")]
    OpenCurve,
    #[error("parameters out of scope: {0}")]
    OutOfScope(String),
    #[error("parameter mismatch: {0}")]
    ParameterMismatch(String),
    #[error("sample count mismatch: {0} vs {1}")]
    SampleCountMismatch(usize, usize),
    #[error("time step {dt:e} exceeds the explicit stability bound {bound:e}")]
    UnstableStep { dt: f64, bound: f64 },
    #[error("flow diverged at iteration {0}")]
    Diverged(usize),
}

impl Error {
    pub(crate) fn params(msg: impl Into<String>) -> Self {
        Error::InvalidParameters(msg.into())
    }
}
