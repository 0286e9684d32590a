use thiserror::Error;

/// Errors shared across the geometry modules.
///
/// Rank decisions near a degeneracy are reported as [`GeomError::RankAmbiguous`]
/// rather than silently truncated; callers that probe degeneracy loci catch it
/// and widen their brackets.
#[derive(Debug, Error)]
pub enum GeomError {
    #[error("rank decision ambiguous: pivot ratio {ratio:.3e} lies in the band ({lo:.1e}, {hi:.1e})")]
    RankAmbiguous { ratio: f64, lo: f64, hi: f64 },

    #[error("matrix is not antisymmetric: max |A + A^T| = {residual:.3e} exceeds {tol:.1e}")]
    NotAntisymmetric { residual: f64, tol: f64 },

    #[error("dimension mismatch: expected {expected}, got {got} ({context})")]
    DimensionMismatch {
        expected: usize,
        got: usize,
        context: String,
    },

    #[error("subspace is not Lagrangian: {0}")]
    NotLagrangian(String),

    #[error("structure is not a graph: blocking intersection has dimension {kernel_dim}")]
    NotAGraph { kernel_dim: usize },

    #[error("point is not on the fiber: |mu(x)| = {distance:.3e} exceeds {tol:.1e}")]
    NotOnFiber { distance: f64, tol: f64 },

    #[error("flow blew up: state norm {norm:.3e} exceeded bound {bound:.1e} at t = {t}")]
    BlowUp { norm: f64, bound: f64, t: f64 },

    #[error("flow left the chart domain at t = {t}")]
    ChartExit { t: f64 },

    #[error("non-finite value encountered in {0}")]
    NonFiniteValue(String),

    #[error("unsupported valence for this operation: {0}")]
    UnsupportedValence(String),

    #[error("matrix not invertible (condition proxy {cond:.3e} exceeds {limit:.1e})")]
    NotInvertible { cond: f64, limit: f64 },

    #[error("horizontal distribution not complementary to the vertical at this point")]
    NonComplementary,

    #[error("value depends on the representative: spread {spread:.3e} exceeds {tol:.1e}")]
    WellDefinednessViolation { spread: f64, tol: f64 },

    #[error("submanifold not transversal at this point")]
    NotTransversal,

    #[error("two routes disagree: distance {distance:.3e} exceeds {tol:.1e}")]
    FormulaDiscrepancy { distance: f64, tol: f64 },

    #[error("missing data: {0}")]
    MissingData(String),

    #[error("representation mismatch: {0}")]
    RepresentationMismatch(String),

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("invalid configuration: {field}: {message}")]
    ConfigInvalid { field: String, message: String },

    #[error("io error for {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, GeomError>;
