use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes shared by every module of the crate.
///
/// Errors split into two families: validation problems (bad input, point in
/// the wrong place, unsupported domain kind) and numerical failures
/// (non-convergent iterations, regularity breakdown, uncertified containment).
/// The CLI maps the first family to exit status 2 and the second to 3.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("malformed defining function: {0}")]
    MalformedDefiningFunction(String),

    #[error("point is not on the boundary (|psi| = {residual:e}, tolerance {tolerance:e})")]
    NotOnBoundary { residual: f64, tolerance: f64 },

    #[error("defining function has vanishing gradient at a boundary point")]
    ZeroGradient,

    #[error("strong pseudoconvexity violated: {0}")]
    NotPseudoconvex(String),

    #[error("point outside the admissible region: {0}")]
    OutsideDomain(String),

    #[error("evaluation point coincides with the pole")]
    PoleCoincidence,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("curve is tangential at the pole: Re theta(gamma'(1)) = {0:e}")]
    TangentialCurve(f64),

    #[error("candidate list is empty")]
    EmptyCandidates,

    #[error("{what} did not converge after {iterations} iterations (trace tail: {trace:?})")]
    NonConvergence {
        what: String,
        iterations: usize,
        trace: Vec<f64>,
    },

    #[error("containment not certified: {0}")]
    ContainmentNotCertified(String),

    #[error("difference quotients are not Cauchy: {0}")]
    Regularity(String),

    #[error("map leaves the target domain at a sampled point (|f(z)| = {norm})")]
    MapExitsTarget { norm: f64 },

    #[error("boundary dilation is infinite: {0}")]
    InfiniteDilation(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// True for failures of the numerics rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::ContainmentNotCertified(_)
                | Error::Regularity(_)
                | Error::InfiniteDilation(_)
        )
    }

    /// Stable machine-readable identifier.
    pub fn code(&self) -> &'static str {
        match self {
            Error::MalformedDefiningFunction(_) => "malformed_defining_function",
            Error::NotOnBoundary { .. } => "not_on_boundary",
            Error::ZeroGradient => "zero_gradient",
            Error::NotPseudoconvex(_) => "not_pseudoconvex",
            Error::OutsideDomain(_) => "outside_domain",
            Error::PoleCoincidence => "pole_coincidence",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::Unsupported(_) => "unsupported",
            Error::TangentialCurve(_) => "tangential_curve",
            Error::EmptyCandidates => "empty_candidates",
            Error::NonConvergence { .. } => "non_convergence",
            Error::ContainmentNotCertified(_) => "containment_not_certified",
            Error::Regularity(_) => "regularity_failure",
            Error::MapExitsTarget { .. } => "map_exits_target",
            Error::InfiniteDilation(_) => "infinite_dilation",
            Error::Parse(_) => "parse_error",
            Error::InvalidArgument(_) => "invalid_argument",
        }
    }
}
