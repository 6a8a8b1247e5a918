//! Synthetic character-level noise: the four edit operations and the
//! per-token mixture sampler that composes them.
//!
//! All operations act on Unicode scalar values (code points), never on
//! bytes or grapheme clusters. Positions are 0-based. Each operation is a
//! pure function; randomness enters only through [`noise_token`], which
//! draws, in order: noise type, position, then symbol where applicable.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::rng::RandomSource;
use crate::token::Token;

/// The per-token noise outcome. `Clean` is the identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoiseType {
    Clean,
    Deletion,
    Insertion,
    Substitution,
    Swap,
}

impl NoiseType {
    /// All variants, in canonical order. This order fixes the mixture's
    /// cumulative-weight layout, so it is part of the determinism contract.
    pub const ALL: [NoiseType; 5] = [
        NoiseType::Clean,
        NoiseType::Deletion,
        NoiseType::Insertion,
        NoiseType::Substitution,
        NoiseType::Swap,
    ];

    /// The four non-clean variants, in canonical order.
    pub const NOISES: [NoiseType; 4] = [
        NoiseType::Deletion,
        NoiseType::Insertion,
        NoiseType::Substitution,
        NoiseType::Swap,
    ];

    /// Key used in mixture configuration strings.
    pub fn key(self) -> &'static str {
        match self {
            NoiseType::Clean => "clean",
            NoiseType::Deletion => "del",
            NoiseType::Insertion => "ins",
            NoiseType::Substitution => "sub",
            NoiseType::Swap => "swap",
        }
    }

    /// Human-readable name, as used in condition labels.
    pub fn name(self) -> &'static str {
        match self {
            NoiseType::Clean => "Clean",
            NoiseType::Deletion => "Deletion",
            NoiseType::Insertion => "Insertion",
            NoiseType::Substitution => "Substitution",
            NoiseType::Swap => "Swap",
        }
    }
}

impl fmt::Display for NoiseType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Tolerance for the stored weights summing to 1.
const MIXTURE_SUM_TOLERANCE: f64 = 1e-9;
/// Tolerance accepted when parsing a mixture configuration string.
const MIXTURE_PARSE_TOLERANCE: f64 = 1e-6;

/// A categorical distribution over `{clean, deletion, insertion,
/// substitution, swap}`. Weights are non-negative and sum to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseMixture {
    // Indexed by position in NoiseType::ALL.
    weights: [f64; 5],
}

impl NoiseMixture {
    /// Builds a mixture from explicit weights. The weights must be finite,
    /// non-negative, and sum to 1 within 1e-9.
    pub fn new(clean: f64, deletion: f64, insertion: f64, substitution: f64, swap: f64) -> Result<Self> {
        let weights = [clean, deletion, insertion, substitution, swap];
        for (ty, w) in NoiseType::ALL.iter().zip(weights) {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidMixture(format!(
                    "weight for {ty} must be a finite non-negative number, got {w}"
                )));
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > MIXTURE_SUM_TOLERANCE {
            return Err(Error::InvalidMixture(format!(
                "weights must sum to 1, got {sum}"
            )));
        }
        Ok(NoiseMixture { weights })
    }

    /// The default training mixture: 60% clean and 10% per noise type.
    pub fn balanced_default() -> Self {
        NoiseMixture {
            weights: [0.6, 0.1, 0.1, 0.1, 0.1],
        }
    }

    /// The all-clean mixture (identity on every token).
    pub fn all_clean() -> Self {
        NoiseMixture {
            weights: [1.0, 0.0, 0.0, 0.0, 0.0],
        }
    }

    /// A point mass on one noise type.
    pub fn point_mass(ty: NoiseType) -> Self {
        let mut weights = [0.0; 5];
        weights[Self::slot(ty)] = 1.0;
        NoiseMixture { weights }
    }

    /// `clean = 1 - p`, with `p` split equally over the four noise types.
    pub fn equal_split(noise_probability: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&noise_probability) {
            return Err(Error::InvalidMixture(format!(
                "noise probability must lie in [0, 1], got {noise_probability}"
            )));
        }
        let per_type = noise_probability / 4.0;
        let mut weights = [per_type; 5];
        weights[0] = 1.0 - noise_probability;
        Ok(NoiseMixture { weights })
    }

    fn slot(ty: NoiseType) -> usize {
        NoiseType::ALL.iter().position(|&t| t == ty).unwrap()
    }

    pub fn weight(&self, ty: NoiseType) -> f64 {
        self.weights[Self::slot(ty)]
    }

    /// Draws a noise type. Cumulative weights are walked in the canonical
    /// `NoiseType::ALL` order; a draw landing past the final boundary (only
    /// possible through floating-point rounding) resolves to the last
    /// positively-weighted type.
    pub fn sample(&self, rng: &mut RandomSource) -> NoiseType {
        let u: f64 = rng.gen_range(0.0..1.0);
        let mut acc = 0.0;
        let mut last_positive = NoiseType::Clean;
        for (&ty, &w) in NoiseType::ALL.iter().zip(&self.weights) {
            if w > 0.0 {
                last_positive = ty;
            }
            acc += w;
            if u < acc {
                return ty;
            }
        }
        last_positive
    }
}

impl fmt::Display for NoiseMixture {
    /// Renders the configuration-string form, e.g.
    /// `clean=0.6,del=0.1,ins=0.1,sub=0.1,swap=0.1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (&ty, &w) in NoiseType::ALL.iter().zip(&self.weights) {
            if !first {
                f.write_str(",")?;
            }
            write!(f, "{}={}", ty.key(), w)?;
            first = false;
        }
        Ok(())
    }
}

impl FromStr for NoiseMixture {
    type Err = Error;

    /// Parses `clean=0.6,del=0.1,ins=0.1,sub=0.1,swap=0.1`. All five keys
    /// must appear exactly once, in any order; values must be non-negative
    /// decimals summing to 1 within 1e-6. Parsed weights are normalized by
    /// their sum so the stored mixture satisfies the 1e-9 invariant.
    fn from_str(s: &str) -> Result<Self> {
        let mut seen: [Option<f64>; 5] = [None; 5];
        for part in s.split(',') {
            let part = part.trim();
            let (key, value) = part.split_once('=').ok_or_else(|| {
                Error::InvalidMixture(format!("expected key=value, got {part:?}"))
            })?;
            let slot = NoiseType::ALL
                .iter()
                .position(|t| t.key() == key.trim())
                .ok_or_else(|| Error::InvalidMixture(format!("unknown key {key:?}")))?;
            let value: f64 = value.trim().parse().map_err(|_| {
                Error::InvalidMixture(format!("invalid weight {value:?} for key {key:?}"))
            })?;
            if seen[slot].replace(value).is_some() {
                return Err(Error::InvalidMixture(format!("duplicate key {key:?}")));
            }
        }
        let mut weights = [0.0; 5];
        for (slot, ty) in NoiseType::ALL.iter().enumerate() {
            let w = seen[slot].ok_or_else(|| {
                Error::InvalidMixture(format!("missing key {:?}", ty.key()))
            })?;
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidMixture(format!(
                    "weight for {ty} must be a finite non-negative number, got {w}"
                )));
            }
            weights[slot] = w;
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > MIXTURE_PARSE_TOLERANCE {
            return Err(Error::InvalidMixture(format!(
                "weights must sum to 1 within {MIXTURE_PARSE_TOLERANCE}, got {sum}"
            )));
        }
        // Normalize only when the parse tolerance was actually used, so
        // exact inputs round-trip unchanged.
        if (sum - 1.0).abs() > MIXTURE_SUM_TOLERANCE {
            for w in &mut weights {
                *w /= sum;
            }
        }
        Ok(NoiseMixture { weights })
    }
}

/// Removes the character at `index` (0-based). The token must have at
/// least two characters so the result remains a valid token.
pub fn delete_char(token: &Token, index: usize) -> Result<Token> {
    let chars: Vec<char> = token.chars().collect();
    if chars.len() < 2 {
        return Err(Error::contract(
            "delete_char",
            format!("token {token:?} is too short to delete from (length must be >= 2)"),
        ));
    }
    if index >= chars.len() {
        return Err(Error::contract(
            "delete_char",
            format!("index {index} out of range for length {}", chars.len()),
        ));
    }
    let out: String = chars
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != index)
        .map(|(_, &c)| c)
        .collect();
    Ok(Token::from_trusted(out))
}

/// Inserts `symbol` at `gap` (0-based, both ends inclusive: `gap = 0`
/// prepends, `gap = len` appends). The symbol must be an alphabet member.
pub fn insert_char(token: &Token, gap: usize, symbol: char, alphabet: &Alphabet) -> Result<Token> {
    if !alphabet.contains(symbol) {
        return Err(Error::contract(
            "insert_char",
            format!("symbol {symbol:?} is not in the alphabet"),
        ));
    }
    let chars: Vec<char> = token.chars().collect();
    if gap > chars.len() {
        return Err(Error::contract(
            "insert_char",
            format!("gap {gap} out of range for length {}", chars.len()),
        ));
    }
    let mut out = String::with_capacity(token.as_str().len() + symbol.len_utf8());
    out.extend(&chars[..gap]);
    out.push(symbol);
    out.extend(&chars[gap..]);
    Ok(Token::from_trusted(out))
}

/// Replaces the character at `index` with `symbol`. The replacement must
/// differ from the character it replaces, so substitution is never a
/// silent no-op.
pub fn substitute_char(token: &Token, index: usize, symbol: char) -> Result<Token> {
    if symbol.is_whitespace() {
        return Err(Error::contract(
            "substitute_char",
            format!("symbol {symbol:?} is whitespace"),
        ));
    }
    let mut chars: Vec<char> = token.chars().collect();
    if index >= chars.len() {
        return Err(Error::contract(
            "substitute_char",
            format!("index {index} out of range for length {}", chars.len()),
        ));
    }
    if chars[index] == symbol {
        return Err(Error::contract(
            "substitute_char",
            format!("symbol {symbol:?} equals the character at index {index}"),
        ));
    }
    chars[index] = symbol;
    Ok(Token::from_trusted(chars.into_iter().collect()))
}

/// Exchanges the adjacent characters at `index` and `index + 1`. Both
/// positions must be interior: the first and last characters of a token
/// are never moved, so the token must have at least four characters and
/// `index` must lie in `[1, len - 3]`.
pub fn swap_chars(token: &Token, index: usize) -> Result<Token> {
    let mut chars: Vec<char> = token.chars().collect();
    if chars.len() < 4 {
        return Err(Error::contract(
            "swap_chars",
            format!(
                "token {token:?} is too short to swap interior characters (length must be >= 4)"
            ),
        ));
    }
    if index < 1 || index > chars.len() - 3 {
        return Err(Error::contract(
            "swap_chars",
            format!(
                "index {index} out of range [1, {}] for length {}",
                chars.len() - 3,
                chars.len()
            ),
        ));
    }
    chars.swap(index, index + 1);
    Ok(Token::from_trusted(chars.into_iter().collect()))
}

/// Draws a noise type from `mixture`.
pub fn sample_noise_type(mixture: &NoiseMixture, rng: &mut RandomSource) -> NoiseType {
    mixture.sample(rng)
}

/// Applies one round of mixture noise to a token and reports which noise
/// type actually took effect.
///
/// Single-character tokens are exempt and consume no randomness. A drawn
/// operation that cannot apply falls back to clean rather than resampling,
/// which keeps the per-token draw independent of token content:
/// - `Swap` on tokens shorter than four characters (no interior pair);
/// - `Substitution` when the alphabet offers no symbol other than the one
///   being replaced.
///
/// Draw order within the token's stream: noise type, position, symbol.
pub fn noise_token_traced(
    token: &Token,
    mixture: &NoiseMixture,
    alphabet: &Alphabet,
    rng: &mut RandomSource,
) -> (Token, NoiseType) {
    let len = token.char_len();
    if len < 2 {
        return (token.clone(), NoiseType::Clean);
    }
    let drawn = mixture.sample(rng);
    let noised = match drawn {
        NoiseType::Clean => None,
        NoiseType::Deletion => {
            let index = rng.gen_range(0..len);
            Some(delete_char(token, index).expect("deletion contract holds for len >= 2"))
        }
        NoiseType::Insertion => {
            let gap = rng.gen_range(0..=len);
            let symbol = alphabet.sample(rng);
            Some(
                insert_char(token, gap, symbol, alphabet)
                    .expect("insertion contract holds for sampled gap and symbol"),
            )
        }
        NoiseType::Substitution => {
            let index = rng.gen_range(0..len);
            let current = token.chars().nth(index).expect("index < len");
            alphabet.sample_excluding(rng, current).map(|symbol| {
                substitute_char(token, index, symbol)
                    .expect("substitution contract holds for sampled symbol")
            })
        }
        NoiseType::Swap => {
            if len < 4 {
                None
            } else {
                let index = rng.gen_range(1..=len - 3);
                Some(swap_chars(token, index).expect("swap contract holds for len >= 4"))
            }
        }
    };
    match noised {
        Some(out) => (out, drawn),
        None => (token.clone(), NoiseType::Clean),
    }
}

/// [`noise_token_traced`] without the applied-type report.
pub fn noise_token(
    token: &Token,
    mixture: &NoiseMixture,
    alphabet: &Alphabet,
    rng: &mut RandomSource,
) -> Token {
    noise_token_traced(token, mixture, alphabet, rng).0
}
