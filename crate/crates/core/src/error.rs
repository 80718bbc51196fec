use crate::rational::Rational;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Per bucket pair `(i, j)`: `|Ŵ' ∩ (S_i×T_j)|` and `|W' ∩ (S_i×T_j)|`.
pub type BucketRow = (usize, usize, usize, usize);

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{what}: search space 2^{log2_size:.1} exceeds cap 2^{log2_cap:.1}")]
    SearchSpaceTooLarge {
        what: &'static str,
        log2_size: f64,
        log2_cap: f64,
    },
    #[error("game has no edges")]
    EmptyGame,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("rectangle contains no edge")]
    EmptyRectangle,
    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("invalid game: {0}")]
    InvalidGame(String),
    #[error("invalid repetition scheme: {0}")]
    InvalidSpec(String),
    #[error("strategy undefined on vertex {0}")]
    UndefinedVertex(String),
    #[error("graph is not regular")]
    NotRegular,
    #[error("eps {0} outside (0, 1/23)")]
    EpsOutOfRange(Rational),
    #[error("invalid constraint density {0}")]
    InvalidDensity(Rational),
    #[error("circuit too large: {size} > cap {cap}")]
    CircuitTooLarge { size: usize, cap: usize },
    #[error("gadget too large: {size} > cap {cap}")]
    GadgetTooLarge { size: usize, cap: usize },
    #[error("cloud too large: {size} > cap {cap}")]
    CloudTooLarge { size: usize, cap: usize },
    #[error("walk space too large: {size} > cap {cap}")]
    WalkSpaceTooLarge { size: u128, cap: u128 },
    #[error("code does not match alphabet: {0}")]
    CodeMismatch(String),
    #[error("invalid code: {0}")]
    InvalidCode(String),
    #[error("not a composed graph: {0}")]
    NotComposedGraph(String),
    #[error("coordinate embedding violated at coordinate {coordinate} by {side}-vertex {vertex}")]
    CoordinateEmbeddingViolated {
        side: char,
        vertex: usize,
        coordinate: usize,
    },
    #[error("embedding image outside X^k x Y^k: {0}")]
    ImageNotInH(String),
    #[error("embedding not robust enough: fraction {fraction} < 1 - eps")]
    NotRobustEnough { fraction: Rational },
    #[error("no good bucket pair in {stage}")]
    NoGoodBucket {
        stage: &'static str,
        table: Vec<BucketRow>,
    },
    #[error("parallel edge count {count} exceeds bound {bound}")]
    ParallelEdgesExceeded { count: usize, bound: Rational },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::SearchSpaceTooLarge { .. } => "SearchSpaceTooLarge",
            Error::EmptyGame => "EmptyGame",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::EmptyRectangle => "EmptyRectangle",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::InvalidGame(_) => "InvalidGame",
            Error::InvalidSpec(_) => "InvalidSpec",
            Error::UndefinedVertex(_) => "UndefinedVertex",
            Error::NotRegular => "NotRegular",
            Error::EpsOutOfRange(_) => "EpsOutOfRange",
            Error::InvalidDensity(_) => "InvalidDensity",
            Error::CircuitTooLarge { .. } => "CircuitTooLarge",
            Error::GadgetTooLarge { .. } => "GadgetTooLarge",
            Error::CloudTooLarge { .. } => "CloudTooLarge",
            Error::WalkSpaceTooLarge { .. } => "WalkSpaceTooLarge",
            Error::CodeMismatch(_) => "CodeMismatch",
            Error::InvalidCode(_) => "InvalidCode",
            Error::NotComposedGraph(_) => "NotComposedGraph",
            Error::CoordinateEmbeddingViolated { .. } => "CoordinateEmbeddingViolated",
            Error::ImageNotInH(_) => "ImageNotInH",
            Error::NotRobustEnough { .. } => "NotRobustEnough",
            Error::NoGoodBucket { .. } => "NoGoodBucket",
            Error::ParallelEdgesExceeded { .. } => "ParallelEdgesExceeded",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::Format(_) => "Format",
            Error::Io(_) => "Io",
            Error::Json(_) => "Json",
        }
    }

    /// True for every "too large for the configured cap" failure.
    pub fn is_cap_exceeded(&self) -> bool {
        matches!(
            self,
            Error::SearchSpaceTooLarge { .. }
                | Error::CircuitTooLarge { .. }
                | Error::GadgetTooLarge { .. }
                | Error::CloudTooLarge { .. }
                | Error::WalkSpaceTooLarge { .. }
        )
    }

    pub(crate) fn space(what: &'static str, log2_size: f64, cap: u64) -> Self {
        Error::SearchSpaceTooLarge {
            what,
            log2_size,
            log2_cap: (cap as f64).log2(),
        }
    }
}
