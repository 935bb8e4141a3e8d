use thiserror::Error;

/// Errors produced by the codecs and channels.
///
/// Every variant maps to a stable code name (see [`Error::code`]) which the
/// CLI prints on failure.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("bit count {len} is not a multiple of 8")]
    PartialByte { len: usize },

    #[error("payload of {len} bits does not fit a 32-bit length prefix")]
    TooLong { len: usize },

    #[error("no length header found{}", detail.as_deref().map(|d| format!(": {d}")).unwrap_or_default())]
    NoHeader { detail: Option<String> },

    #[error("declared {declared} bits but only {available} are available")]
    Truncated { declared: usize, available: usize },

    #[error("payload needs {needed} channel bits but the cover holds {available}")]
    Capacity { needed: usize, available: usize },

    #[error("document ends inside the tag opened at offset {offset}")]
    UnterminatedTag { offset: usize },

    #[error("byte {byte:#04x} is not an ASCII letter")]
    NotAlpha { byte: u8 },

    #[error("string literal starting at offset {offset} is not terminated")]
    UnterminatedString { offset: usize },

    #[error("comment starting at offset {offset} is not terminated")]
    UnterminatedComment { offset: usize },

    #[error("{reason}")]
    AmbiguousCover { reason: String },

    #[error("renaming `{name}` would collide with an existing identifier")]
    Collision { name: String },

    #[error("xor key must contain at least one byte")]
    EmptyKey,

    #[error("invalid bit string: {0:?}")]
    InvalidBits(String),

    #[error("profile line {line}: {message}")]
    Profile { line: usize, message: String },
}

impl Error {
    /// Stable machine-readable name of the error kind.
    pub fn code(&self) -> &'static str {
        match self {
            Error::PartialByte { .. } => "E_PARTIAL_BYTE",
            Error::TooLong { .. } => "E_TOO_LONG",
            Error::NoHeader { .. } => "E_NO_HEADER",
            Error::Truncated { .. } => "E_TRUNCATED",
            Error::Capacity { .. } => "E_CAPACITY",
            Error::UnterminatedTag { .. } => "E_UNTERMINATED_TAG",
            Error::NotAlpha { .. } => "E_NOT_ALPHA",
            Error::UnterminatedString { .. } => "E_UNTERMINATED_STRING",
            Error::UnterminatedComment { .. } => "E_UNTERMINATED_COMMENT",
            Error::AmbiguousCover { .. } => "E_AMBIGUOUS_COVER",
            Error::Collision { .. } => "E_COLLISION",
            Error::EmptyKey => "E_EMPTY_KEY",
            Error::InvalidBits(_) => "E_INVALID_BITS",
            Error::Profile { .. } => "E_PROFILE",
        }
    }

    pub(crate) fn no_header(detail: impl Into<String>) -> Self {
        Error::NoHeader {
            detail: Some(detail.into()),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
