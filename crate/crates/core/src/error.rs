use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("variable `{0}` has no levels")]
    EmptyLevels(String),
    #[error("variable `{variable}` lists level `{level}` twice")]
    DuplicateLevel { variable: String, level: String },
    #[error("duplicate variable name `{0}`")]
    DuplicateVariable(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("unknown level `{level}` for variable `{variable}`")]
    UnknownLevel { variable: String, level: String },

    #[error("edge endpoint {index} out of range for {count} variables")]
    InvalidEndpoint { index: usize, count: usize },
    #[error("self-loop on `{0}`")]
    SelfLoop(String),
    #[error("duplicate edge `{0}` -> `{1}`")]
    DuplicateEdge(String, String),
    #[error("graph contains a directed cycle through `{0}`")]
    Cycle(String),

    #[error("expected one CPT per variable ({expected}), got {found}")]
    CptCount { expected: usize, found: usize },
    #[error("CPT for `{node}` lists parents {found:?} but the DAG has {expected:?}")]
    ParentMismatch {
        node: String,
        expected: Vec<String>,
        found: Vec<String>,
    },
    #[error("CPT for `{node}`: {detail}")]
    Cardinality { node: String, detail: String },
    #[error("CPT for `{node}`, row {row}: sums to {sum}")]
    NotNormalized { node: String, row: usize, sum: f64 },
    #[error("CPT for `{node}`, row {row}: entry {value} is not a probability")]
    InvalidProbability { node: String, row: usize, value: f64 },

    #[error("level index {index} out of range for `{variable}` ({cardinality} levels)")]
    LevelOutOfRange {
        variable: String,
        index: usize,
        cardinality: usize,
    },
    #[error("expected {expected} values, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("variable index {0} out of range")]
    VariableOutOfRange(usize),

    #[error("query has no target variables")]
    EmptyTargets,
    #[error("variable `{0}` appears in more than one of the given sets")]
    OverlappingSets(String),
    #[error("evidence has zero probability")]
    ImpossibleEvidence,
    #[error("joint state space of {size} states exceeds the cap of {cap}")]
    StateSpaceTooLarge { size: u128, cap: usize },

    #[error("hyperparameter shape does not match the network: {0}")]
    ShapeMismatch(String),
    #[error("Dirichlet hyperparameter {0} must be strictly positive")]
    NonPositiveAlpha(f64),

    #[error("new value {0} is outside [0, 1]")]
    InvalidNewValue(f64),
    #[error("target probability {0} must lie strictly inside (0, 1)")]
    InvalidTarget(f64),
    #[error("degenerate row: entry {index} equals {value}, leaving no mass to co-vary")]
    DegenerateRow { index: usize, value: f64 },
    #[error("parameter p({node}={level} | row {row}) = {value} cannot be varied under proportional co-variation")]
    BoundaryParameter {
        node: String,
        level: String,
        row: usize,
        value: f64,
    },
    #[error("new value {0} would change the rank order of the row")]
    OrderViolation(f64),

    #[error("{path}: row {row}, column `{column}`: {message}")]
    Data {
        path: String,
        row: usize,
        column: String,
        message: String,
    },
    #[error("{0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures caused by a numerical degeneracy of the model rather
    /// than malformed input.
    pub fn is_degeneracy(&self) -> bool {
        matches!(
            self,
            Error::ImpossibleEvidence
                | Error::DegenerateRow { .. }
                | Error::BoundaryParameter { .. }
                | Error::OrderViolation(_)
        )
    }
}
