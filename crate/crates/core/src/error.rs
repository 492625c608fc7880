use thiserror::Error;

/// Errors raised while building or parsing nets, squares and templates.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("order {0} is out of range (supported: 1..=11)")]
    UnsupportedOrder(usize),

    #[error("square {square} is not Latin: {detail}")]
    NotLatin { square: usize, detail: String },

    #[error("squares {a} and {b} are not orthogonal: the ordered pair ({x}, {y}) occurs more than once")]
    NotOrthogonal {
        a: usize,
        b: usize,
        x: usize,
        y: usize,
    },

    #[error("frequency square {square} is invalid: {detail}")]
    BadFrequencySquare { square: usize, detail: String },

    #[error("net is incomplete: class {class} has {lines} of {n} lines")]
    IncompleteNet { class: usize, lines: usize, n: usize },

    #[error("invalid net: {0}")]
    InvalidNet(String),

    #[error("line set is not a relation: its column sum is neither zero nor all-ones")]
    NotARelation,

    #[error("odd order {0}: point-type systems require an even order")]
    OddOrder(usize),

    #[error("weight {weight} of class {class} is outside 0..={n}")]
    WeightOutOfRange { class: usize, weight: usize, n: usize },

    #[error("weights {0:?} admit no point-type counts: the counting equations are inconsistent")]
    InconsistentWeights(Vec<usize>),

    #[error("unsupported class count {0}")]
    UnsupportedClassCount(usize),

    #[error("value {numerator}/{denominator} is not integral")]
    NonIntegral { numerator: i64, denominator: i64 },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("malformed Q4 encoding: {0}")]
    BadEncoding(String),

    #[error("invalid template: {0}")]
    InvalidTemplate(String),

    #[error("unsupported template type: {0}")]
    UnsupportedType(String),

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: &std::path::Path, e: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }

    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}
