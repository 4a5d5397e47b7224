use thiserror::Error;

/// Errors surfaced by the library. Display strings are one-line diagnostics
/// prefixed with the error kind.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ParseError: {message} at byte {offset}")]
    Parse { offset: usize, message: String },

    #[error("InvalidTree: {0}")]
    InvalidTree(String),

    #[error("NotBinary: node {label} has {children} children")]
    NotBinary { label: String, children: usize },

    #[error("SizeCap: tree sizes {sizes:?} exceed the enumeration cap of {cap} nodes")]
    SizeCap { sizes: (usize, usize), cap: usize },

    #[error("InvalidCost: {0}")]
    InvalidCost(String),

    #[error("UnknownSymbol: {0:?} is not in the cost table alphabet")]
    UnknownSymbol(String),

    #[error("MissingEntry: no cost given for ({0}, {1})")]
    MissingEntry(String, String),

    #[error("Asymmetric: p({x}, {y}) = {xy} but p({y}, {x}) = {yx}")]
    Asymmetric { x: String, y: String, xy: String, yx: String },

    #[error("NotPositiveDefinite: p({x}, {y}) = {value}")]
    NotPositiveDefinite { x: String, y: String, value: String },

    #[error("TriangleViolation: p({x}, {z}) > p({x}, {y}) + p({y}, {z})")]
    TriangleViolation { x: String, y: String, z: String },

    #[error("CostTableSyntax: line {line}: {message}")]
    CostTableSyntax { line: usize, message: String },

    #[error("Terrain: {0}")]
    Terrain(String),

    #[error("Io: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
