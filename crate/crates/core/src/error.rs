use thiserror::Error;

use crate::phonology::Vowel;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid syllable `{text}`")]
    InvalidSyllable { text: String },

    #[error("invalid tone in `{text}`")]
    InvalidTone { text: String },

    #[error("cannot segment `{span}` at character offset {offset}")]
    Unsegmentable { span: String, offset: usize },

    /// A parse error located inside a longer text.
    #[error("at character offset {offset}: {source}")]
    At {
        offset: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("insufficient data{}: {found} sample(s), need at least {needed}", vowel_suffix(.vowel))]
    InsufficientData {
        vowel: Option<Vowel>,
        found: usize,
        needed: usize,
    },

    #[error("numeric domain error: {0}")]
    NumericDomain(String),

    #[error("allocation violates its constraints: {0}")]
    Constraint(String),

    #[error("incomplete table: {0}")]
    Incomplete(String),

    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
}

fn vowel_suffix(v: &Option<Vowel>) -> String {
    match v {
        Some(v) => format!(" for vowel `{v}`"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn format(line: usize, message: impl Into<String>) -> Self {
        Error::Format {
            line,
            message: message.into(),
        }
    }

    /// Moves any character offset carried by the error by `delta`.
    pub fn shifted(self, delta: usize) -> Self {
        match self {
            Error::At { offset, source } => Error::At {
                offset: offset + delta,
                source,
            },
            Error::Unsegmentable { span, offset } => Error::Unsegmentable {
                span,
                offset: offset + delta,
            },
            e => e,
        }
    }

    pub(crate) fn at(self, offset: usize) -> Self {
        match self {
            e @ (Error::At { .. } | Error::Unsegmentable { .. }) => e,
            e => Error::At {
                offset,
                source: Box::new(e),
            },
        }
    }
}
