//! Symbol pools for insertion and substitution noise.

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::Path;

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::RandomSource;

/// An ordered, duplicate-free set of candidate noise characters.
/// Whitespace is never a member, so noised tokens stay single tokens.
#[derive(Debug, Clone)]
pub struct Alphabet {
    symbols: Vec<char>,
    index: HashMap<char, usize>,
}

impl Alphabet {
    /// Builds an alphabet from the given symbols, preserving first-occurrence
    /// order and dropping duplicates. Errors on whitespace members or an
    /// empty result.
    pub fn new(symbols: impl IntoIterator<Item = char>) -> Result<Self> {
        let mut ordered = Vec::new();
        let mut index = HashMap::new();
        for ch in symbols {
            if ch.is_whitespace() {
                return Err(Error::InvalidAlphabet(format!(
                    "whitespace character {ch:?} is not allowed"
                )));
            }
            if let std::collections::hash_map::Entry::Vacant(slot) = index.entry(ch) {
                slot.insert(ordered.len());
                ordered.push(ch);
            }
        }
        if ordered.is_empty() {
            return Err(Error::InvalidAlphabet(
                "alphabet must contain at least one symbol".into(),
            ));
        }
        Ok(Alphabet {
            symbols: ordered,
            index,
        })
    }

    /// The set of non-whitespace characters observed in `text`, in code
    /// point order. This is the default alphabet for corpus noising: noise
    /// stays within the corpus's own script.
    pub fn from_text(text: &str) -> Result<Self> {
        let set: BTreeSet<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
        Alphabet::new(set)
    }

    /// Reads a UTF-8 file and builds the alphabet from its non-whitespace
    /// characters, in code point order.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Alphabet::from_text(&text)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn contains(&self, ch: char) -> bool {
        self.index.contains_key(&ch)
    }

    pub fn symbols(&self) -> &[char] {
        &self.symbols
    }

    /// Uniform draw over all symbols.
    pub fn sample(&self, rng: &mut RandomSource) -> char {
        self.symbols[rng.gen_range(0..self.symbols.len())]
    }

    /// Uniform draw over all symbols except `excluded`. Returns `None`
    /// when no candidate remains (the alphabet is exactly `{excluded}`).
    /// Consumes one draw regardless of whether `excluded` is a member.
    pub fn sample_excluding(&self, rng: &mut RandomSource, excluded: char) -> Option<char> {
        match self.index.get(&excluded) {
            None => Some(self.sample(rng)),
            Some(_) if self.symbols.len() == 1 => None,
            Some(&skip) => {
                let i = rng.gen_range(0..self.symbols.len() - 1);
                Some(self.symbols[if i >= skip { i + 1 } else { i }])
            }
        }
    }
}
