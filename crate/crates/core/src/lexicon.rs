//! Natural spelling-error lexicons and per-token error injection.
//!
//! A lexicon maps clean token forms to the spelling errors observed for
//! them. Injection replaces eligible test-corpus tokens with one of their
//! recorded errors at a configurable per-token probability, which is how
//! naturally-noised evaluation sets are materialized.
//!
//! Lexicon file format: UTF-8 TSV, one clean form per line; column 1 is
//! the clean form, columns 2..n its error forms. Lines starting with `#`
//! and blank lines are skipped. Duplicate clean forms merge their error
//! lists. Matching at injection time is exact and case-sensitive.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use rand::Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::rng::RandomSource;
use crate::token::Token;

/// Mapping from clean token form to its known error forms. Error lists
/// are non-empty, duplicate-free, and never contain the clean form.
#[derive(Debug, Clone, Default)]
pub struct ErrorLexicon {
    entries: BTreeMap<String, Vec<String>>,
}

impl ErrorLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds one clean/error pair, deduplicating repeats. Rejects pairs
    /// whose error equals the clean form, and forms that are empty or
    /// contain whitespace (injection must preserve token counts).
    pub fn insert(&mut self, clean: &str, error: &str) -> Result<()> {
        validate_form("clean form", clean)?;
        validate_form("error form", error)?;
        if clean == error {
            return Err(Error::InvalidConfig(format!(
                "error form {error:?} equals its clean form"
            )));
        }
        let list = self.entries.entry(clean.to_string()).or_default();
        if !list.iter().any(|e| e == error) {
            list.push(error.to_string());
        }
        Ok(())
    }

    /// Parses the TSV lexicon format from any reader. Malformed lines are
    /// rejected with their 1-based line number.
    pub fn from_reader(reader: impl Read) -> Result<Self> {
        let mut lexicon = ErrorLexicon::new();
        for (number, line) in BufReader::new(reader).lines().enumerate() {
            let number = number + 1;
            let line = line.map_err(|e| Error::LexiconParse {
                line: number,
                detail: e.to_string(),
            })?;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split('\t');
            let clean = fields.next().unwrap_or("");
            let errors: Vec<&str> = fields.collect();
            if errors.is_empty() {
                return Err(Error::LexiconParse {
                    line: number,
                    detail: format!("entry {clean:?} has no error forms"),
                });
            }
            for error in errors {
                lexicon.insert(clean, error).map_err(|e| Error::LexiconParse {
                    line: number,
                    detail: e.to_string(),
                })?;
            }
        }
        Ok(lexicon)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(file)
    }

    /// Errors recorded for `clean`, if any. List order is load order and
    /// is part of the lexicon's identity: a uniform draw selects by index.
    pub fn errors_for(&self, clean: &str) -> Option<&[String]> {
        self.entries.get(clean).map(Vec::as_slice)
    }

    pub fn contains(&self, clean: &str) -> bool {
        self.entries.contains_key(clean)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[String])> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    /// SHA-256 over the canonical serialization (clean forms in sorted
    /// order, fields tab-joined, one entry per line). Two lexicons with
    /// the same digest inject identically under the same seed.
    pub fn content_digest(&self) -> String {
        let mut hasher = Sha256::new();
        for (clean, errors) in &self.entries {
            hasher.update(clean.as_bytes());
            for error in errors {
                hasher.update(b"\t");
                hasher.update(error.as_bytes());
            }
            hasher.update(b"\n");
        }
        let digest = hasher.finalize();
        let mut hex = String::with_capacity(64);
        for byte in digest {
            use std::fmt::Write;
            let _ = write!(hex, "{byte:02x}");
        }
        hex
    }
}

fn validate_form(what: &str, form: &str) -> Result<()> {
    if form.is_empty() {
        return Err(Error::InvalidConfig(format!("{what} is empty")));
    }
    if form.chars().any(char::is_whitespace) {
        return Err(Error::InvalidConfig(format!(
            "{what} {form:?} contains whitespace"
        )));
    }
    Ok(())
}

/// Per-token natural-noise injection settings.
#[derive(Debug, Clone, Copy)]
pub struct NaturalNoiseConfig {
    probability: f64,
    seed: u64,
}

impl NaturalNoiseConfig {
    /// `probability` is the chance that an eligible token (one with a
    /// lexicon entry) is replaced by an error form.
    pub fn new(probability: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&probability) {
            return Err(Error::InvalidConfig(format!(
                "noise probability must lie in [0, 1], got {probability}"
            )));
        }
        Ok(NaturalNoiseConfig { probability, seed })
    }

    pub fn probability(&self) -> f64 {
        self.probability
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Exact injection tallies for one corpus pass.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct InjectionStats {
    /// All tokens seen.
    pub total_tokens: u64,
    /// Tokens with a lexicon entry.
    pub eligible_tokens: u64,
    /// Tokens actually replaced.
    pub noised_tokens: u64,
}

impl InjectionStats {
    /// Fraction of all tokens that were replaced (0 on an empty corpus).
    pub fn noised_fraction(&self) -> f64 {
        if self.total_tokens == 0 {
            0.0
        } else {
            self.noised_tokens as f64 / self.total_tokens as f64
        }
    }

    /// Fraction of all tokens that have a lexicon entry (lexicon coverage).
    pub fn coverage(&self) -> f64 {
        if self.total_tokens == 0 {
            0.0
        } else {
            self.eligible_tokens as f64 / self.total_tokens as f64
        }
    }
}

/// Noises one token. Tokens without a lexicon entry are returned
/// unchanged and consume no randomness, so the output is invariant to
/// edits of lexicon entries that never match. For eligible tokens, a
/// Bernoulli draw at the configured probability decides replacement;
/// on success a uniformly-chosen error form is returned with the flag set.
pub fn inject_natural_noise(
    token: &Token,
    lexicon: &ErrorLexicon,
    config: &NaturalNoiseConfig,
    rng: &mut RandomSource,
) -> (Token, bool) {
    let Some(errors) = lexicon.errors_for(token.as_str()) else {
        return (token.clone(), false);
    };
    let roll: f64 = rng.gen_range(0.0..1.0);
    if roll >= config.probability() {
        return (token.clone(), false);
    }
    let pick = rng.gen_range(0..errors.len());
    (Token::from_trusted(errors[pick].clone()), true)
}

/// Noises one line. The line's randomness comes from the stream derived
/// at `(config.seed, [line_index])`; eligible tokens draw from it in
/// token order.
pub fn noise_line_naturally(
    line: &str,
    line_index: u64,
    lexicon: &ErrorLexicon,
    config: &NaturalNoiseConfig,
    stats: &mut InjectionStats,
) -> String {
    let mut rng = RandomSource::derive(config.seed(), &[line_index]);
    let mut out: Vec<String> = Vec::new();
    for raw in line.split_whitespace() {
        stats.total_tokens += 1;
        let token = Token::from_trusted(raw.to_string());
        if lexicon.contains(raw) {
            stats.eligible_tokens += 1;
            let (noised, flagged) = inject_natural_noise(&token, lexicon, config, &mut rng);
            if flagged {
                stats.noised_tokens += 1;
            }
            out.push(noised.into_string());
        } else {
            out.push(token.into_string());
        }
    }
    out.join(" ")
}

/// Noises a whole corpus held in memory. Line count and per-line token
/// count are preserved; runs of whitespace normalize to single spaces.
pub fn noise_corpus_naturally(
    lines: &[String],
    lexicon: &ErrorLexicon,
    config: &NaturalNoiseConfig,
) -> (Vec<String>, InjectionStats) {
    let mut stats = InjectionStats::default();
    let noised = lines
        .iter()
        .enumerate()
        .map(|(i, line)| noise_line_naturally(line, i as u64, lexicon, config, &mut stats))
        .collect();
    (noised, stats)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lexicon_from(text: &str) -> Result<ErrorLexicon> {
        ErrorLexicon::from_reader(text.as_bytes())
    }

    #[test]
    fn parses_clean_form_with_multiple_errors() {
        let lex = lexicon_from("whale\twhle\twahle\n").unwrap();
        assert_eq!(
            lex.errors_for("whale").unwrap(),
            &["whle".to_string(), "wahle".to_string()]
        );
    }

    #[test]
    fn empty_input_yields_empty_lexicon() {
        let lex = lexicon_from("").unwrap();
        assert!(lex.is_empty());
    }

    #[test]
    fn rejects_error_equal_to_clean_with_line_number() {
        let err = lexicon_from("cat\tkat\ndog\tdog\n").unwrap_err();
        match err {
            Error::LexiconParse { line, .. } => assert_eq!(line, 2),
            other => panic!("expected LexiconParse, got {other:?}"),
        }
    }

    #[test]
    fn rejects_entry_without_error_forms() {
        assert!(lexicon_from("alone\n").is_err());
    }

    #[test]
    fn rejects_empty_and_whitespace_fields() {
        assert!(lexicon_from("cat\t\n").is_err(), "empty error field");
        assert!(lexicon_from("\tkat\n").is_err(), "empty clean field");
        assert!(lexicon_from("cat\tk at\n").is_err(), "space inside error");
    }

    #[test]
    fn skips_comments_and_blank_lines() {
        let lex = lexicon_from("# header\n\ncat\tkat\n").unwrap();
        assert_eq!(lex.len(), 1);
    }

    #[test]
    fn duplicate_clean_forms_merge_and_dedupe() {
        let lex = lexicon_from("cat\tkat\ncat\tcta\tkat\n").unwrap();
        assert_eq!(
            lex.errors_for("cat").unwrap(),
            &["kat".to_string(), "cta".to_string()]
        );
    }

    #[test]
    fn matching_is_case_sensitive() {
        let lex = lexicon_from("cat\tkat\n").unwrap();
        assert!(lex.contains("cat"));
        assert!(!lex.contains("Cat"));
    }

    #[test]
    fn digest_tracks_content_not_formatting() {
        let a = lexicon_from("# comment\ncat\tkat\n\nwhale\twhle\n").unwrap();
        let b = lexicon_from("whale\twhle\ncat\tkat\n").unwrap();
        let c = lexicon_from("cat\tkat\twhale_variant_changes_nothing_here\n").unwrap();
        assert_eq!(a.content_digest(), b.content_digest());
        assert_ne!(a.content_digest(), c.content_digest());
    }

    #[test]
    fn ineligible_token_is_unchanged_even_at_probability_one() {
        let lex = lexicon_from("cat\tkat\n").unwrap();
        let config = NaturalNoiseConfig::new(1.0, 1).unwrap();
        let mut rng = RandomSource::new(1);
        let token = Token::new("dog").unwrap();
        let (out, flagged) = inject_natural_noise(&token, &lex, &config, &mut rng);
        assert_eq!(out, token);
        assert!(!flagged);
    }

    #[test]
    fn probability_zero_never_noises() {
        let lex = lexicon_from("cat\tkat\n").unwrap();
        let config = NaturalNoiseConfig::new(0.0, 1).unwrap();
        let token = Token::new("cat").unwrap();
        for seed in 0..100 {
            let mut rng = RandomSource::new(seed);
            let (out, flagged) = inject_natural_noise(&token, &lex, &config, &mut rng);
            assert_eq!(out, token);
            assert!(!flagged);
        }
    }

    #[test]
    fn probability_one_always_picks_a_listed_error() {
        let lex = lexicon_from("cat\tkat\tcta\n").unwrap();
        let config = NaturalNoiseConfig::new(1.0, 1).unwrap();
        let token = Token::new("cat").unwrap();
        for seed in 0..100 {
            let mut rng = RandomSource::new(seed);
            let (out, flagged) = inject_natural_noise(&token, &lex, &config, &mut rng);
            assert!(flagged);
            assert!(["kat", "cta"].contains(&out.as_str()));
        }
    }

    #[test]
    fn config_rejects_out_of_range_probability() {
        assert!(NaturalNoiseConfig::new(-0.1, 0).is_err());
        assert!(NaturalNoiseConfig::new(1.1, 0).is_err());
        assert!(NaturalNoiseConfig::new(f64::NAN, 0).is_err());
    }

    #[test]
    fn corpus_injection_preserves_line_and_token_counts() {
        let lex = lexicon_from("cat\tkat\nsat\tsta\n").unwrap();
        let config = NaturalNoiseConfig::new(1.0, 5).unwrap();
        let lines = vec!["the cat  sat".to_string(), "".to_string(), "cat cat".to_string()];
        let (noised, stats) = noise_corpus_naturally(&lines, &lex, &config);
        assert_eq!(noised.len(), 3);
        assert_eq!(noised[0].split_whitespace().count(), 3);
        assert_eq!(noised[1], "");
        assert_eq!(noised[2], "kat kat");
        assert_eq!(stats.total_tokens, 5);
        assert_eq!(stats.eligible_tokens, 4);
        assert_eq!(stats.noised_tokens, 4);
    }

    #[test]
    fn corpus_injection_is_deterministic_per_seed() {
        let lex = lexicon_from("a\tx\ty\nb\tz\n").unwrap();
        let config = NaturalNoiseConfig::new(0.5, 42).unwrap();
        let lines: Vec<String> = (0..50).map(|i| format!("a b a b line{i}")).collect();
        let (first, s1) = noise_corpus_naturally(&lines, &lex, &config);
        let (second, s2) = noise_corpus_naturally(&lines, &lex, &config);
        assert_eq!(first, second);
        assert_eq!(s1, s2);
    }

    #[test]
    fn irrelevant_lexicon_entries_do_not_shift_randomness() {
        let config = NaturalNoiseConfig::new(0.5, 42).unwrap();
        let lines: Vec<String> = (0..50).map(|i| format!("a b a b line{i}")).collect();
        let small = lexicon_from("a\tx\ty\nb\tz\n").unwrap();
        let padded = lexicon_from("a\tx\ty\nb\tz\nunmatched\tunmatchd\n").unwrap();
        assert_eq!(
            noise_corpus_naturally(&lines, &small, &config).0,
            noise_corpus_naturally(&lines, &padded, &config).0
        );
    }

    #[test]
    fn stats_json_uses_pinned_keys() {
        let stats = InjectionStats {
            total_tokens: 10,
            eligible_tokens: 4,
            noised_tokens: 2,
        };
        assert_eq!(
            serde_json::to_string(&stats).unwrap(),
            r#"{"total_tokens":10,"eligible_tokens":4,"noised_tokens":2}"#
        );
    }
}
