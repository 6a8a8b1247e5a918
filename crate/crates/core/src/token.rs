//! Whitespace-delimited corpus tokens.

use std::fmt;

use crate::error::{Error, Result};

/// A single corpus token: a non-empty sequence of Unicode scalar values
/// containing no whitespace. All character-level noise operations index
/// into a token by scalar value (code point), not by byte.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Token(String);

impl Token {
    /// Validates that `text` is non-empty and whitespace-free.
    pub fn new(text: impl Into<String>) -> Result<Self> {
        let text = text.into();
        if text.is_empty() {
            return Err(Error::InvalidToken("token must be non-empty".into()));
        }
        if let Some(ws) = text.chars().find(|c| c.is_whitespace()) {
            return Err(Error::InvalidToken(format!(
                "token {text:?} contains whitespace character {ws:?}"
            )));
        }
        Ok(Token(text))
    }

    /// Constructor for text already known to satisfy the invariants
    /// (e.g. the output of a whitespace split). Checked in debug builds.
    pub(crate) fn from_trusted(text: String) -> Self {
        debug_assert!(!text.is_empty() && !text.chars().any(char::is_whitespace));
        Token(text)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Number of Unicode scalar values.
    pub fn char_len(&self) -> usize {
        self.0.chars().count()
    }

    pub fn chars(&self) -> impl Iterator<Item = char> + '_ {
        self.0.chars()
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Token {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl std::str::FromStr for Token {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Token::new(s)
    }
}
