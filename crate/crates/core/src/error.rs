use thiserror::Error;

/// Errors raised by the geometry kernels.
///
/// Every variant names the invariant that failed so that callers (and the
/// CLI) can report a structured message.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("unbounded polytope: recession direction {direction:?}")]
    UnboundedPolytope { direction: Vec<f64> },
    #[error("point outside the open domain: min functional value {min_value:e} <= tolerance")]
    PointOutside { min_value: f64 },
    #[error("direction vector is zero")]
    ZeroDirection,
    #[error("wrong dimension: expected {expected}, got {got}")]
    WrongDimension { expected: usize, got: usize },
    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),
    #[error("point is not a vertex of the polytope: {0:?}")]
    InvalidVertex(Vec<f64>),
    #[error("invalid conical flag neighborhood: {0}")]
    InvalidNeighborhood(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

impl GeomError {
    /// Short machine-readable name of the violated invariant.
    pub fn invariant(&self) -> &'static str {
        match self {
            GeomError::DegenerateInput(_) => "DegenerateInput",
            GeomError::UnboundedPolytope { .. } => "UnboundedPolytope",
            GeomError::PointOutside { .. } => "PointOutside",
            GeomError::ZeroDirection => "ZeroDirection",
            GeomError::WrongDimension { .. } => "WrongDimension",
            GeomError::InsufficientSamples(_) => "InsufficientSamples",
            GeomError::InvalidVertex(_) => "InvalidVertex",
            GeomError::InvalidNeighborhood(_) => "InvalidNeighborhood",
            GeomError::Numerical(_) => "Numerical",
            GeomError::Parse(_) => "Parse",
            GeomError::Io(_) => "Io",
        }
    }
}

impl From<std::io::Error> for GeomError {
    fn from(e: std::io::Error) -> Self {
        GeomError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for GeomError {
    fn from(e: serde_json::Error) -> Self {
        GeomError::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, GeomError>;
