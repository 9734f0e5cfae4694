use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("metric is singular (det h too small)")]
    SingularMetric,
    #[error("zero vector at branch {0}")]
    ZeroVector(usize),
    #[error("not a hyperpolygon: complex moment map residual {0:e}")]
    NotAHyperpolygon(f64),
    #[error("weights too close to a wall: |W_I| = {0:e}")]
    WallWeights(f64),
    #[error("group element is singular")]
    SingularGroupElt,
    #[error("no convergence after {iters} iterations (residual {residual:e})")]
    NoConvergence { iters: usize, residual: f64 },
    #[error("representation is not stable")]
    NotStable,
    #[error("representation is not unitary: real moment map residual {0:e}")]
    NotUnitary(f64),
    #[error("tangent not in the kernel of d(mu_C): residual {0:e}")]
    NotInKernel(f64),
    #[error("R = {r} outside (0, {r_max})")]
    ROutOfRange { r: f64, r_max: f64 },
    #[error("residue {0} is not nilpotent")]
    NotNilpotent(usize),
    #[error("flag {0} is inconsistent with its residue")]
    FlagMismatch(usize),
    #[error("point coincides with puncture {0}")]
    AtPuncture(usize),
    #[error("weights outside the Biswas polytope")]
    OutsideBiswas,
    #[error("unsupported number of punctures {0}")]
    UnsupportedN(usize),
    #[error("not a U(1)-fixed point")]
    NotFixedPoint,
    #[error("radius {0} outside the local model domain")]
    OutOfDomain(f64),
    #[error("h_app not positive at z = {0}")]
    NotPositive(String),
    #[error("quadrature refinement changed the result by {0:e}")]
    QuadratureNoConvergence(f64),
    #[error("point coincides with center {0}")]
    AtCenter(usize),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
