use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point ({re}, {im}) is not inside the unit disk")]
    OutsideDisk { re: f64, im: f64 },
    #[error("geodesic endpoints coincide")]
    DegenerateGeodesic,
    #[error("matrix does not define a disk isometry")]
    DegenerateIsometry,
    #[error("orientation-reversing isometry has no translation length")]
    OrientationReversing,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("sides {index} and {next} do not meet (cos γ = {cosine})")]
    SidesDoNotMeet { index: usize, next: usize, cosine: f64 },
    #[error("vertex {index} is degenerate (cos γ = {cosine})")]
    DegenerateAngle { index: usize, cosine: f64 },
    #[error("angle sum {target} is not below the Gauss-Bonnet bound {bound}")]
    TargetUnreachable { target: f64, bound: f64 },
    #[error("vertex {index} degenerates before the target angle sum is reached")]
    DegenerateVertex { index: usize },
    #[error("angle sum {angle_sum} is not 2π/k for any k in 1..=64")]
    NoIntegerCycle { angle_sum: f64 },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("geodesics do not intersect: {0}")]
    NoIntersection(String),
    #[error("neutralizing pairs are not disjoint; route through the dual polygon")]
    DualTrickRequired,
    #[error("dual polygon needs total angle 4π, got {angle_sum}")]
    PreconditionAngleSum { angle_sum: f64 },
    #[error("reconstruction failed: {0}")]
    ReconstructionFailed(String),

    #[error("dimension m = {m} must be at least 3")]
    InvalidDimension { m: usize },

    #[error("invalid step distribution: {0}")]
    InvalidDistribution(String),
    #[error("first-passage iteration did not converge after {iterations} steps (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("cylinder denominator 1 - x·x̌ vanishes for symbol {index}")]
    DegenerateDenominator { index: usize },
    #[error("symbol {index} is never reached; its Green distance is infinite")]
    InfiniteDistance { index: usize },
    #[error("sigma = {sigma} ≥ 1, so no witness is guaranteed (found {witnesses:?})")]
    NoWitnessGuarantee { sigma: f64, witnesses: Vec<usize> },

    #[error("expected {expected} generator symbols, got {found}")]
    SymbolMismatch { expected: usize, found: usize },
    #[error("sample too small: {0}")]
    InsufficientSample(String),
    #[error("convolution support would need {products} products")]
    SupportTooLarge { products: u64 },

    #[error("angle {angle} at vertex {index} is not π/k for an integer k ≥ 2")]
    AngleNotSubmultiple { index: usize, angle: f64 },
    #[error("measure is not geometrically symmetric: μ(r_{index}) ≠ μ(r_{opposite})")]
    NotGeometricallySymmetric { index: usize, opposite: usize },
    #[error("wrong measure kind: {0}")]
    WrongKind(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::OutsideDisk { .. } => "OutsideDisk",
            Error::DegenerateGeodesic => "DegenerateGeodesic",
            Error::DegenerateIsometry => "DegenerateIsometry",
            Error::OrientationReversing => "OrientationReversing",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::SidesDoNotMeet { .. } => "SidesDoNotMeet",
            Error::DegenerateAngle { .. } => "DegenerateAngle",
            Error::TargetUnreachable { .. } => "TargetUnreachable",
            Error::DegenerateVertex { .. } => "DegenerateVertex",
            Error::NoIntegerCycle { .. } => "NoIntegerCycle",
            Error::PreconditionViolated(_) => "PreconditionViolated",
            Error::NoIntersection(_) => "NoIntersection",
            Error::DualTrickRequired => "DualTrickRequired",
            Error::PreconditionAngleSum { .. } => "PreconditionAngleSum",
            Error::ReconstructionFailed(_) => "ReconstructionFailed",
            Error::InvalidDimension { .. } => "InvalidDimension",
            Error::InvalidDistribution(_) => "InvalidDistribution",
            Error::NonConvergence { .. } => "NonConvergence",
            Error::DegenerateDenominator { .. } => "DegenerateDenominator",
            Error::InfiniteDistance { .. } => "InfiniteDistance",
            Error::NoWitnessGuarantee { .. } => "NoWitnessGuarantee",
            Error::SymbolMismatch { .. } => "SymbolMismatch",
            Error::InsufficientSample(_) => "InsufficientSample",
            Error::SupportTooLarge { .. } => "SupportTooLarge",
            Error::AngleNotSubmultiple { .. } => "AngleNotSubmultiple",
            Error::NotGeometricallySymmetric { .. } => "NotGeometricallySymmetric",
            Error::WrongKind(_) => "WrongKind",
        }
    }
}
