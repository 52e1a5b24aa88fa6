use thiserror::Error;

pub type Result<T> = std::result::Result<T, TorickError>;

/// Errors raised by the workbench.
///
/// `Schema` errors come from malformed input files; everything else is a
/// mathematical precondition failing on otherwise well-formed data.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum TorickError {
    #[error("schema violation: {0}")]
    Schema(String),

    #[error("incompatible value rings: base {left_base}^(1/{left_root}) vs {right_base}^(1/{right_root})")]
    IncompatibleBase {
        left_base: String,
        left_root: u32,
        right_base: String,
        right_root: u32,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("vector {0:?} is not primitive")]
    NotPrimitive(Vec<i64>),

    #[error("vector {0:?} is not in the support of the fan")]
    NotInSupport(Vec<i64>),

    #[error("divisor is not Q-Cartier on cone {cone}")]
    NotQCartier { cone: usize },

    #[error("divisor is not nef: convexity fails for ray {ray} against cone {cone}")]
    NotNef { cone: usize, ray: usize },

    #[error("divisor is not relatively nef: negative on the curve of the wall between cones {left} and {right}")]
    NotRelativelyNef { left: usize, right: usize },

    #[error("polarization restricts to a class of non-positive degree {0} on the generic fiber")]
    DegenerateFiberDegree(String),

    #[error("fan carries no projectivity witness and none could be found")]
    NoProjectivityWitness,

    #[error("linear feasibility problem is infeasible: {0}")]
    Infeasible(String),

    #[error("projection is not dominant: rank {rank} < base rank {base_rank}")]
    NonDominant { rank: usize, base_rank: usize },

    #[error("cone is not Q-Gorenstein")]
    NotQGorenstein,

    #[error("direction changes the fiber class: {0}")]
    FiberClassChanged(String),

    #[error("divisor is not vertical over the marked base stratum (ray {0})")]
    NotVertical(usize),

    #[error("invalid refinement assignment: {0}")]
    InvalidAssignment(String),

    #[error("not a refinement: {0}")]
    NotRefinement(String),

    #[error("mismatched fans")]
    MismatchedFans,

    #[error("invalid fan: {0}")]
    InvalidFan(String),

    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("operation requires a base of dimension one, got {0}")]
    BaseNotCurve(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl TorickError {
    pub fn schema(msg: impl Into<String>) -> Self {
        TorickError::Schema(msg.into())
    }

    pub fn is_schema(&self) -> bool {
        matches!(self, TorickError::Schema(_))
    }
}

impl From<serde_json::Error> for TorickError {
    fn from(e: serde_json::Error) -> Self {
        TorickError::Schema(e.to_string())
    }
}
