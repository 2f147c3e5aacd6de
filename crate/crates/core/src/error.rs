use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("invalid node name `{0}`")]
    InvalidName(String),

    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("duplicate edge {0}")]
    DuplicateEdge(String),

    #[error("self-loop on `{0}`")]
    SelfLoop(String),

    #[error("directed cycle through `{0}`")]
    Cycle(String),

    #[error("node sets overlap: {0}")]
    Overlap(String),

    #[error("graph is not reduced: de({x}) = {{{descendants}}}, expected {{{x}, {y}}}")]
    Unreduced {
        x: String,
        y: String,
        descendants: String,
    },

    #[error("`{y}` is not a descendant of `{x}`")]
    NoCausalPath { x: String, y: String },

    #[error("invalid conditional instrumental set {0}")]
    InvalidTuple(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("enumeration over {candidates} candidates exceeds the cap of {cap}")]
    CapExceeded { candidates: usize, cap: usize },

    #[error("degenerate conditioning: {0}")]
    Degenerate(String),

    #[error("weak or invalid instrument: strength {0:e}")]
    WeakInstrument(f64),

    #[error("rank deficient design: {0}")]
    RankDeficient(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid data: {0}")]
    Data(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable identifier used by the CLI.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Syntax { .. } => "syntax",
            Error::InvalidName(_) => "invalid_name",
            Error::UnknownNode(_) => "unknown_node",
            Error::DuplicateEdge(_) => "duplicate_edge",
            Error::SelfLoop(_) => "self_loop",
            Error::Cycle(_) => "cycle",
            Error::Overlap(_) => "overlap",
            Error::Unreduced { .. } => "unreduced_graph",
            Error::NoCausalPath { .. } => "no_causal_path",
            Error::InvalidTuple(_) => "invalid_tuple",
            Error::Precondition(_) => "precondition",
            Error::CapExceeded { .. } => "cap_exceeded",
            Error::Degenerate(_) => "degenerate",
            Error::WeakInstrument(_) => "weak_instrument",
            Error::RankDeficient(_) => "rank_deficient",
            Error::InvalidModel(_) => "invalid_model",
            Error::Data(_) => "data",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
