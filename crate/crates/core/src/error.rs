use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("coordinate {0} does not fit the fixed-point range at this scale")]
    CoordOverflow(String),
    #[error("point {index} has y outside [0, delta]")]
    OutOfStrip { index: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("tree grid was not built from this point set")]
    GridMismatch,
    #[error("segment ({0}) does not lie on the grid")]
    OffGrid(String),
    #[error("{got} terminals exceed the oracle limit of {limit}")]
    TooManyTerminals { got: usize, limit: usize },
    #[error("grid graph does not connect all terminals")]
    DisconnectedGrid,
    #[error("{got} grid edges exceed the brute-force limit of {limit}")]
    TooManyEdges { got: usize, limit: usize },
    #[error("no tree respects the boundary patterns")]
    Infeasible,
    #[error("cap=auto needs the sparseness bound k of the point set")]
    MissingSparsenessK,
    #[error("the final table entry is empty")]
    NoSolution,
    #[error("index {index} out of range for {n} points")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("interval of points {start}..={end} has {terminals} terminals, above the oracle limit")]
    SubproblemTooLarge { start: usize, end: usize, terminals: usize },
    #[error("cannot parse input: {0}")]
    Parse(String),
    #[error("inputs disagree: {0}")]
    Mismatch(String),
    #[error("probe choice {choice} is invalid for hook {hook}")]
    InvalidProbe { hook: usize, choice: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
