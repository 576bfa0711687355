use std::fmt;

use thiserror::Error;

/// One-based line and column in a manifest.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl Pos {
    pub fn new(line: usize, col: usize) -> Self {
        Pos { line, col }
    }

    pub fn shift(self, chars: usize) -> Self {
        Pos { line: self.line, col: self.col + chars }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ManifestError {
    #[error("{pos}: syntax error: {msg}")]
    Syntax { pos: Pos, msg: String },
    #[error("{pos}: unknown generator `{name}`")]
    UnknownGenerator { pos: Pos, name: String },
    #[error("{pos}: unresolved reference `{name}`")]
    UnresolvedReference { pos: Pos, name: String },
    #[error("{pos}: degree error: {msg}")]
    Degree { pos: Pos, msg: String },
    #[error("{pos}: {source}")]
    Engine { pos: Pos, source: nqcalc_core::Error },
}

impl ManifestError {
    pub fn syntax(pos: Pos, msg: impl Into<String>) -> Self {
        ManifestError::Syntax { pos, msg: msg.into() }
    }

    pub fn degree(pos: Pos, msg: impl Into<String>) -> Self {
        ManifestError::Degree { pos, msg: msg.into() }
    }

    pub fn engine(pos: Pos, source: nqcalc_core::Error) -> Self {
        ManifestError::Engine { pos, source }
    }

    pub fn pos(&self) -> Pos {
        match self {
            ManifestError::Syntax { pos, .. }
            | ManifestError::UnknownGenerator { pos, .. }
            | ManifestError::UnresolvedReference { pos, .. }
            | ManifestError::Degree { pos, .. }
            | ManifestError::Engine { pos, .. } => *pos,
        }
    }
}
