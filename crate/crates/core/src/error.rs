use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("pole hit: denominator vanishes at {0}")]
    PoleHit(String),
    #[error("{0} is not a pole")]
    NotAPole(String),
    #[error("expansion cap exceeded: {needed} terms requested, cap is {cap}")]
    CapExceeded { needed: usize, cap: usize },
    #[error("zero input")]
    ZeroInput,
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("curve is not closed")]
    NotClosed,
    #[error("point {0} is too close to the curve")]
    TooCloseToCurve(String),
    #[error("integrand is singular on the path")]
    SingularOnPath,
    #[error("quadrature did not converge (error estimate {0:e})")]
    NoConvergence(f64),
    #[error("pole {0} lies on the curve")]
    PoleOnCurve(String),
    #[error("path passes too close to a branch point")]
    PathTooCloseToBranchPoint,
    #[error("newton corrector diverged at t = {0}")]
    NewtonDivergence(String),
    #[error("branch values collided (separation {0:e})")]
    BranchCollision(f64),
    #[error("branch points {0} and {1} are nearly degenerate")]
    NearDegenerateBranchPoints(String, String),
    #[error("closure exceeded cap of {0} elements")]
    ClosureCapExceeded(usize),
    #[error("face/pole correspondence failed: {0}")]
    FacePoleMismatch(String),
    #[error("t = {0} is not in the admissible range near infinity")]
    TNotInRange(String),
    #[error("logarithm tracking failed along the curve")]
    LogTrackingFailure,
    #[error("branch partition is inconsistent across samples")]
    InconsistentPartition,
    #[error("rational interpolation failed: {0}")]
    InterpolationFailure(String),
    #[error("verification failed: {0}")]
    VerificationFailure(String),
    #[error("monodromy group is not doubly transitive")]
    NotDoublyTransitive,
    #[error("no witness found within bound {0}")]
    WitnessNotFoundWithinBound(usize),
    #[error("congruence condition unmet: {0}")]
    CongruenceUnmet(String),
    #[error("cross-check mismatch: {0}")]
    CrossCheckMismatch(String),
    #[error("poles lie on one side of the curve; the subspace is zero")]
    PolesOneSide,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
