use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("mass must be positive, got {0}")]
    NonPositiveMass(f64),

    #[error("domain [{lo}, {hi}] is empty or reversed")]
    EmptyDomain { lo: f64, hi: f64 },

    #[error("r_lo = {r_lo} does not lie beyond the degenerate radius {bound}")]
    DegenerateLowerBound { r_lo: f64, bound: f64 },

    #[error("radius {r} lies outside the domain [{lo}, {hi}]")]
    OutOfDomain { r: f64, lo: f64, hi: f64 },

    /// The metric degenerates at this endpoint; only one-sided limits exist.
    #[error("radius {r} is a degenerate endpoint; only the one-sided limit is defined")]
    OneSidedLimit { r: f64 },

    #[error("Buchdahl bound violated: 2m/R_b = {ratio} is not below 8/9")]
    Buchdahl { ratio: f64 },

    #[error("invalid tabulated profile: {0}")]
    InvalidTable(String),

    #[error("finite-difference stencil [{lo}, {hi}] leaves the domain")]
    StencilOutsideDomain { lo: f64, hi: f64 },

    #[error("lapse vanishes at {r}; the Fermat metric is undefined there")]
    VanishingLapse { r: f64 },

    #[error("initial data violates the null constraint by {violation:e}")]
    NotNull { violation: f64 },

    #[error("integrator failed at affine parameter {lambda}: {reason}")]
    Integration { lambda: f64, reason: String },

    #[error("sphere r = {r} fails the photon-sphere audit: {residual} = {value:e}")]
    AuditFailed { r: f64, residual: &'static str, value: f64 },

    #[error("manifold has no minimal boundary to double across")]
    NoMinimalBoundary,

    #[error("manifold has no reflected asymptotic end")]
    NoReflectedEnd,

    #[error("no gluing surface with id {0}")]
    UnknownSurface(usize),

    #[error("no chart with id {0}")]
    UnknownChart(usize),

    #[error("|psi| = {value} >= 1 at chart {chart}, r = {r}")]
    PsiBound { chart: usize, r: f64, value: f64 },

    #[error("conformal factor u = {value} is not positive at chart {chart}, r = {r}")]
    NonPositiveConformalFactor { chart: usize, r: f64, value: f64 },

    #[error("sample r = {r} lies inside the guard band around a gluing surface")]
    GuardBand { r: f64 },

    #[error("radius schedule is invalid: {0}")]
    BadSchedule(String),

    #[error("verdict is not schwarzschild_rigid")]
    NotRigid,

    #[error("reconstruction disagrees with audit: {quantity} differs by {diff:e}")]
    ReconstructionMismatch { quantity: &'static str, diff: f64 },
}
