//! Error type shared by every module.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Exact division by (x - a) left a remainder above tolerance.
    #[error("nonzero remainder in exact polynomial division (residual {residual:.3e})")]
    NonzeroRemainder { residual: f64 },

    /// Eigenvalue clustering is ambiguous at the requested tolerance.
    #[error("eigenvalue clustering ill-conditioned: gap {gap:.3e} < 10 * tol {tol:.3e}")]
    IllConditioned { gap: f64, tol: f64 },

    /// A matrix required to be diagonalizable is not (within tolerance).
    #[error("matrix is not diagonalizable within tolerance")]
    NotDiagonalizable,

    /// Input state violates the constraint manifold beyond tolerance.
    #[error("constraint violation: residual {residual:.3e} exceeds {tol:.3e}")]
    ConstraintViolation { residual: f64, tol: f64 },

    /// Lax-variable relations violated (input not from the constraint manifold).
    #[error("spectral relation violated: residual {residual:.3e} exceeds {tol:.3e}")]
    RelationViolation { residual: f64, tol: f64 },

    /// Adaptive step size underflow; reports the ray parameter of failure.
    #[error("integrator step failure at t = {t:.6e}")]
    StepFailure { t: f64 },

    /// No admissible integration contour at the separation threshold.
    #[error("no admissible contour avoids the branch points: {0}")]
    ContourTooClose(String),

    /// Complex AGM iteration failed to converge.
    #[error("AGM iteration did not converge")]
    AgmNonconvergence,

    /// Numerically computed third-kind residues are not opposite.
    #[error("third-kind normalization failure: residues {0:.3e} and {1:.3e} not opposite")]
    NormalizationFailure(f64, f64),

    /// Integration path cannot avoid a branch point.
    #[error("path passes through a branch point neighborhood: {0}")]
    PathThroughBranchPoint(String),

    /// The eigenvector divisor has collided points.
    #[error("degenerate eigenvector divisor (root separation {sep:.3e})")]
    DegenerateDivisor { sep: f64 },

    /// Lattice generators do not have full rank.
    #[error("rank-deficient lattice (smallest singular value {sv:.3e})")]
    RankDeficientLattice { sv: f64 },

    /// Degenerate tau parameters for the model lattice.
    #[error("degenerate tau parameters for model lattice")]
    DegenerateTau,

    /// Abel-flow fit segments disagree across divisor degeneracies.
    #[error("divisor degeneracy: {0}")]
    DivisorDegeneracy(String),

    /// Branch points could not be tracked through a continuation step.
    #[error("branch collision during continuation (step refinement exhausted)")]
    BranchCollision,

    /// Monodromy change of basis did not round to integers.
    #[error("non-integer monodromy: rounding residual {residual:.3e}")]
    NonIntegerMonodromy { residual: f64 },

    /// No real invariant torus at the requested (h, k).
    #[error("no real invariant torus at (h, k) = ({0}, {1})")]
    NoRealTorus(f64, f64),

    /// Bounded integer-relation search failed.
    #[error("integer relation search failed: {0}")]
    IntegerRelationFailure(String),

    /// Consecutive samples moved by more than the safe fraction of a lattice
    /// cell; callers resample more densely.
    #[error("sampling too coarse for lattice unwrapping (jump = {fraction:.2} cells)")]
    SamplingTooCoarse { fraction: f64 },

    /// Period operations require a smooth curve.
    #[error("curve is singular (|disc| = {disc_abs:.3e})")]
    SingularCurve { disc_abs: f64 },

    /// Quadrature refinement did not reach the agreement target.
    #[error("quadrature refinement did not converge (last delta {delta:.3e})")]
    QuadratureNonconvergence { delta: f64 },

    /// Anything rejected before numerics start.
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Stable machine-readable tag, used in CLI artifacts.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonzeroRemainder { .. } => "NonzeroRemainder",
            Error::IllConditioned { .. } => "IllConditioned",
            Error::NotDiagonalizable => "NotDiagonalizable",
            Error::ConstraintViolation { .. } => "ConstraintViolation",
            Error::RelationViolation { .. } => "RelationViolation",
            Error::StepFailure { .. } => "StepFailure",
            Error::ContourTooClose(_) => "ContourTooClose",
            Error::AgmNonconvergence => "AGMNonconvergence",
            Error::NormalizationFailure(_, _) => "NormalizationFailure",
            Error::PathThroughBranchPoint(_) => "PathThroughBranchPoint",
            Error::DegenerateDivisor { .. } => "DegenerateDivisor",
            Error::RankDeficientLattice { .. } => "RankDeficientLattice",
            Error::DegenerateTau => "DegenerateTau",
            Error::DivisorDegeneracy(_) => "DivisorDegeneracy",
            Error::BranchCollision => "BranchCollision",
            Error::NonIntegerMonodromy { .. } => "NonIntegerMonodromy",
            Error::NoRealTorus(_, _) => "NoRealTorus",
            Error::IntegerRelationFailure(_) => "IntegerRelationFailure",
            Error::SamplingTooCoarse { .. } => "SamplingTooCoarse",
            Error::SingularCurve { .. } => "SingularCurve",
            Error::QuadratureNonconvergence { .. } => "QuadratureNonconvergence",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }
}
