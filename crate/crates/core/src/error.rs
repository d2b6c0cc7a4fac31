use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid color language: {0}")]
    Language(String),

    #[error("unknown color {0}")]
    UnknownColor(String),

    #[error("color index {index} is outside a palette of {len} colors")]
    ColorOutOfRange { index: u8, len: usize },

    #[error("palette mismatch: {0}")]
    PaletteMismatch(String),

    #[error("vertex {vertex} out of range for a structure on {len} vertices")]
    VertexOutOfRange { vertex: usize, len: usize },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("structure is not in Forb_c(S): {0}")]
    NotInClass(String),

    #[error("capability exceeded: {0}")]
    Capability(String),

    #[error("construction failed: {}", .0.message)]
    Construction(Box<crate::generic::ConstructionFailure>),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }
}
