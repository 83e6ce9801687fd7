use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate simplex: vertex {vertex} repeated in {simplex:?}")]
    DegenerateSimplex { simplex: Vec<usize>, vertex: usize },

    #[error("duplicate tetrahedron {0:?}")]
    DuplicateTetrahedron([usize; 4]),

    #[error("empty complex: at least one tetrahedron is required")]
    EmptyComplex,

    #[error("missing squared length for edge {0}-{1}")]
    MissingEdgeLength(usize, usize),

    #[error("length assigned to {0}, which is not an edge of the complex")]
    UnknownEdge(String),

    #[error("metric has {found} squared lengths but the complex has {expected} edges")]
    MetricSizeMismatch { expected: usize, found: usize },

    #[error("squared length of edge {edge} is not strictly positive ({value})")]
    NonPositiveLength { edge: usize, value: f64 },

    #[error("simplex is not realizable in Euclidean space: {0}")]
    NonRealizable(String),

    #[error("degenerate face: {0}")]
    DegenerateFace(String),

    #[error("dual area vanishes at {0}")]
    ZeroDualArea(String),

    #[error("weights of the average at {site} sum to zero")]
    ZeroWeightSum { site: String },

    #[error("operation requires a closed complex (every triangle shared by two tetrahedra)")]
    NotCompact,

    #[error("mass matrix is singular or ill-conditioned (condition estimate {condition:e})")]
    MatrixSingular { condition: f64 },

    #[error("adaptive step size fell below dt_min = {dt_min:e} at t = {t}")]
    StepTooSmall { t: f64, dt_min: f64 },

    #[error("closed-form model evaluated past extinction: t = {t} exceeds {t_max}")]
    CollapseExceeded { t: f64, t_max: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("I/O error: {0}")]
    Io(String),

    #[error("eigenvalue solver failed: {0}")]
    Eigensolver(String),

    #[error("mesh format: {0}")]
    Format(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
