//! Library-wide error type.
//!
//! Every fallible operation returns one of these variants; none of them are
//! recoverable by retrying with the same arguments, but callers switching a
//! tuple to the float backend can clear `UnsupportedBackend`.

/// Errors shared across the matrix, invariant, and verification layers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// The operation needs floating-point machinery (eigenvalues, square
    /// roots of arbitrary values) that the exact backend does not provide.
    #[error("operation is only available on the float64 backend")]
    UnsupportedBackend,

    /// A tuple must hold at least one matrix.
    #[error("a matrix tuple must contain at least one matrix")]
    EmptyTuple,

    /// The operation requires a tuple of a specific length.
    #[error("expected a tuple of {expected} matrices, got {got}")]
    WrongArity { expected: usize, got: usize },

    /// Two tuples that must have equal length do not.
    #[error("tuples have mismatched lengths {left} and {right}")]
    LengthMismatch { left: usize, right: usize },

    /// Both homogeneous coordinates of a projective line vanish.
    #[error("(0 : 0) does not represent a projective line")]
    ZeroLine,

    /// A matrix that must be traceless is not, beyond tolerance.
    #[error("matrix is not traceless (|trace| residual {residual:.3e})")]
    NotTraceless { residual: f64 },

    /// A conjugating matrix is singular or too close to singular.
    #[error("conjugating matrix is singular (|det| = {det_abs:.3e} below threshold {threshold:.3e})")]
    SingularConjugator { det_abs: f64, threshold: f64 },

    /// The span test and the eigenline search disagreed about a tuple and
    /// widening the tolerance did not reconcile them.  This flags a genuine
    /// numerical breakdown and is never silently absorbed.
    #[error("span closure reports dimension {span_dim} but no common eigenline was found (tol {tol:.3e})")]
    InconsistentClassification { span_dim: usize, tol: f64 },

    /// The base matrix of a commuting-family chart may not be scalar.
    #[error("base matrix of a commuting chart must not be scalar")]
    ScalarBase,

    /// A sample fell closer to an excluded locus than the derivative step
    /// allows, so finite differences there would be meaningless.
    #[error("sample is {margin:.3e} from an excluded locus; at least {required:.3e} required")]
    MarginViolation { margin: f64, required: f64 },

    /// The tuple is not in the stratum the operation requires.
    #[error("tuple is not in the shared-eigenline stratum")]
    WrongStratum,

    /// The common eigenline lies outside the requested coordinate chart.
    #[error("common eigenline lies outside chart {chart}")]
    LineOutsideChart { chart: usize },

    /// The point lies on the excluded quadric where the model degenerates.
    #[error("point lies on the quadric x^2 - z1*z2 = 0")]
    OnQuadric,

    /// A circle parameter must have unit modulus.
    #[error("|lambda| = {modulus} is not 1 within 1e-12")]
    NotUnitModulus { modulus: f64 },

    /// A real vector that must lie on the unit sphere does not.
    #[error("vector norm {norm} is not 1 within tolerance")]
    NotOnSphere { norm: f64 },

    /// A model point failed its defining equation.
    #[error("invalid model point: {0}")]
    InvalidPoint(String),

    /// The requested square root does not exist inside the Gaussian
    /// rationals, so the exact backend cannot represent the result.
    #[error("value has no square root in the Gaussian rationals")]
    NoExactSqrt,
}
