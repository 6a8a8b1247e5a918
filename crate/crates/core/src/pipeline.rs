//! Streaming corpus tokenization and whole-corpus synthetic noising.
//!
//! Corpora are UTF-8 text, one sentence per line. Tokens are maximal runs
//! of non-whitespace; reassembly joins them with single spaces, so runs of
//! whitespace normalize to one space on output. Every token's randomness
//! derives solely from its coordinates `(base_seed, epoch, line, token)`,
//! never from processing order, which makes noising a pure function of
//! `(corpus bytes, plan, alphabet)` and safe to parallelize over lines.
//!
//! File drivers stream with memory bounded by a fixed chunk of lines, and
//! write through a temporary file renamed into place on success, so a
//! failed run leaves no partial output behind.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::lexicon::{ErrorLexicon, InjectionStats, NaturalNoiseConfig};
use crate::noise::{noise_token, NoiseMixture};
use crate::rng::RandomSource;
use crate::token::Token;

/// Lines processed per parallel batch by the file drivers.
const CHUNK_LINES: usize = 4096;

/// One tokenized corpus line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusLine {
    pub line_index: usize,
    pub tokens: Vec<Token>,
}

impl CorpusLine {
    /// Joins the tokens with single spaces: exactly `tokens.len() - 1`
    /// separators, or the empty string for an empty line.
    pub fn reassemble(&self) -> String {
        let mut out = String::new();
        for (i, token) in self.tokens.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(token.as_str());
        }
        out
    }
}

/// Splits a line on runs of whitespace. An empty (or all-whitespace) line
/// yields zero tokens.
pub fn tokenize(line: &str, line_index: usize) -> CorpusLine {
    CorpusLine {
        line_index,
        tokens: line
            .split_whitespace()
            .map(|t| Token::from_trusted(t.to_string()))
            .collect(),
    }
}

/// One named experimental noising condition: a mixture plus the seeding
/// coordinates that make its output reproducible.
#[derive(Debug, Clone)]
pub struct NoisingPlan {
    pub name: String,
    pub mixture: NoiseMixture,
    pub base_seed: u64,
    pub epoch: u64,
}

impl NoisingPlan {
    pub fn new(name: impl Into<String>, mixture: NoiseMixture, base_seed: u64) -> Self {
        NoisingPlan {
            name: name.into(),
            mixture,
            base_seed,
            epoch: 0,
        }
    }

    pub fn with_epoch(mut self, epoch: u64) -> Self {
        self.epoch = epoch;
        self
    }
}

/// The stream feeding one token's noise draws. Any change to the epoch,
/// line index, or token index selects an independent stream.
pub fn derive_seed(base_seed: u64, epoch: u64, line_index: u64, token_index: u64) -> RandomSource {
    RandomSource::derive(base_seed, &[epoch, line_index, token_index])
}

/// Noises one line under `plan`. Pure: depends only on the arguments.
pub fn noise_line(line: &str, line_index: usize, plan: &NoisingPlan, alphabet: &Alphabet) -> String {
    let parsed = tokenize(line, line_index);
    let noised: Vec<Token> = parsed
        .tokens
        .iter()
        .enumerate()
        .map(|(token_index, token)| {
            let mut rng = derive_seed(
                plan.base_seed,
                plan.epoch,
                line_index as u64,
                token_index as u64,
            );
            noise_token(token, &plan.mixture, alphabet, &mut rng)
        })
        .collect();
    CorpusLine {
        line_index,
        tokens: noised,
    }
    .reassemble()
}

/// Noises a corpus held in memory. Line count is preserved; output is a
/// pure function of `(lines, plan, alphabet)`.
pub fn noise_corpus(lines: &[String], plan: &NoisingPlan, alphabet: &Alphabet) -> Vec<String> {
    lines
        .par_iter()
        .enumerate()
        .map(|(i, line)| noise_line(line, i, plan, alphabet))
        .collect()
}

/// Yields one noised copy of the corpus per epoch `plan.epoch, plan.epoch
/// + 1, ..`. Epoch `e`'s output equals `noise_corpus` with `plan.epoch = e`.
pub fn epoch_stream<'a>(
    lines: &'a [String],
    plan: &'a NoisingPlan,
    alphabet: &'a Alphabet,
    epochs: u64,
) -> impl Iterator<Item = Vec<String>> + 'a {
    (plan.epoch..plan.epoch + epochs).map(move |epoch| {
        let epoch_plan = plan.clone().with_epoch(epoch);
        noise_corpus(lines, &epoch_plan, alphabet)
    })
}

/// Writer that lands output atomically: content goes to a temporary file
/// in the destination directory and is renamed over the target only on
/// success.
struct AtomicWriter {
    tmp: tempfile::NamedTempFile,
    dest: PathBuf,
}

impl AtomicWriter {
    fn create(dest: &Path) -> Result<Self> {
        let dir = dest.parent().filter(|p| !p.as_os_str().is_empty());
        let tmp = match dir {
            Some(dir) => tempfile::NamedTempFile::new_in(dir),
            None => tempfile::NamedTempFile::new_in("."),
        }
        .map_err(|e| Error::io(dest, e))?;
        Ok(AtomicWriter {
            tmp,
            dest: dest.to_path_buf(),
        })
    }

    fn writer(&mut self) -> BufWriter<&mut File> {
        BufWriter::new(self.tmp.as_file_mut())
    }

    fn commit(self) -> Result<()> {
        self.tmp
            .persist(&self.dest)
            .map_err(|e| Error::io(&self.dest, e.error))?;
        Ok(())
    }
}

fn open_lines(path: &Path) -> Result<impl Iterator<Item = std::io::Result<String>>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(BufReader::new(file).lines())
}

/// Streams `input` through [`noise_line`] into `output`. Lines are
/// processed in fixed-size parallel chunks; memory is bounded by the
/// chunk, not the corpus. Returns the number of lines written.
pub fn noise_file(
    input: &Path,
    output: &Path,
    plan: &NoisingPlan,
    alphabet: &Alphabet,
) -> Result<usize> {
    let mut sink = AtomicWriter::create(output)?;
    let mut lines_written = 0usize;
    {
        let mut writer = sink.writer();
        let mut reader = open_lines(input)?;
        let mut chunk: Vec<String> = Vec::with_capacity(CHUNK_LINES);
        loop {
            chunk.clear();
            for line in reader.by_ref().take(CHUNK_LINES) {
                chunk.push(line.map_err(|e| Error::io(input, e))?);
            }
            if chunk.is_empty() {
                break;
            }
            let base = lines_written;
            let noised: Vec<String> = chunk
                .par_iter()
                .enumerate()
                .map(|(offset, line)| noise_line(line, base + offset, plan, alphabet))
                .collect();
            for line in &noised {
                writeln!(writer, "{line}").map_err(|e| Error::io(output, e))?;
            }
            lines_written += chunk.len();
        }
        writer.flush().map_err(|e| Error::io(output, e))?;
    }
    sink.commit()?;
    Ok(lines_written)
}

/// Materializes `epochs` noised copies of `input` as `<stem>.epoch<e>`
/// for `e = plan.epoch .. plan.epoch + epochs`. Returns the paths written.
pub fn materialize_epochs(
    input: &Path,
    output_stem: &Path,
    plan: &NoisingPlan,
    alphabet: &Alphabet,
    epochs: u64,
) -> Result<Vec<PathBuf>> {
    if epochs == 0 {
        return Err(Error::InvalidConfig("epoch count must be >= 1".into()));
    }
    let mut written = Vec::new();
    for epoch in plan.epoch..plan.epoch + epochs {
        let epoch_plan = plan.clone().with_epoch(epoch);
        let mut path = output_stem.as_os_str().to_owned();
        path.push(format!(".epoch{epoch}"));
        let path = PathBuf::from(path);
        noise_file(input, &path, &epoch_plan, alphabet)?;
        written.push(path);
    }
    Ok(written)
}

/// Streams `input` through natural-noise injection into `output`,
/// returning the exact injection tallies.
pub fn noise_file_naturally(
    input: &Path,
    output: &Path,
    lexicon: &ErrorLexicon,
    config: &NaturalNoiseConfig,
) -> Result<InjectionStats> {
    let mut sink = AtomicWriter::create(output)?;
    let mut stats = InjectionStats::default();
    {
        let mut writer = sink.writer();
        for (line_index, line) in open_lines(input)?.enumerate() {
            let line = line.map_err(|e| Error::io(input, e))?;
            let noised = crate::lexicon::noise_line_naturally(
                &line,
                line_index as u64,
                lexicon,
                config,
                &mut stats,
            );
            writeln!(writer, "{noised}").map_err(|e| Error::io(output, e))?;
        }
        writer.flush().map_err(|e| Error::io(output, e))?;
    }
    sink.commit()?;
    Ok(stats)
}

/// Reads a whole corpus file into memory, one string per line.
pub fn read_lines(path: &Path) -> Result<Vec<String>> {
    open_lines(path)?
        .map(|line| line.map_err(|e| Error::io(path, e)))
        .collect()
}

/// Derives the default alphabet for a corpus file: every non-whitespace
/// character that appears in it, in code point order.
pub fn alphabet_from_file(path: &Path) -> Result<Alphabet> {
    Alphabet::from_file(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenize_collapses_whitespace_runs() {
        let line = tokenize("the  whale", 0);
        let texts: Vec<&str> = line.tokens.iter().map(Token::as_str).collect();
        assert_eq!(texts, ["the", "whale"]);
    }

    #[test]
    fn tokenize_empty_line_yields_no_tokens() {
        assert!(tokenize("", 3).tokens.is_empty());
        assert!(tokenize("   \t ", 3).tokens.is_empty());
    }

    #[test]
    fn tokenize_trims_outer_whitespace() {
        let line = tokenize(" a b ", 0);
        let texts: Vec<&str> = line.tokens.iter().map(Token::as_str).collect();
        assert_eq!(texts, ["a", "b"]);
        assert_eq!(line.reassemble(), "a b");
    }

    #[test]
    fn reassemble_uses_single_spaces() {
        assert_eq!(tokenize("a\t b   c", 0).reassemble(), "a b c");
        assert_eq!(tokenize("", 0).reassemble(), "");
    }

    fn sample_corpus(lines: usize) -> Vec<String> {
        (0..lines)
            .map(|i| format!("line{i} alpha beta gamma delta{i}"))
            .collect()
    }

    fn plan(seed: u64) -> NoisingPlan {
        NoisingPlan::new("test", NoiseMixture::balanced_default(), seed)
    }

    #[test]
    fn clean_mixture_is_identity_on_token_content() {
        let lines = vec!["the  whale ".to_string(), "".to_string(), "a b".to_string()];
        let alphabet = Alphabet::from_text("the whale a b").unwrap();
        let clean_plan = NoisingPlan::new("clean", NoiseMixture::all_clean(), 9);
        let noised = noise_corpus(&lines, &clean_plan, &alphabet);
        assert_eq!(noised, vec!["the whale", "", "a b"]);
    }

    #[test]
    fn noising_preserves_line_and_token_counts() {
        let lines = sample_corpus(200);
        let alphabet = Alphabet::from_text(&lines.join("\n")).unwrap();
        let noised = noise_corpus(&lines, &plan(4), &alphabet);
        assert_eq!(noised.len(), lines.len());
        for (orig, out) in lines.iter().zip(&noised) {
            assert_eq!(
                orig.split_whitespace().count(),
                out.split_whitespace().count()
            );
        }
    }

    #[test]
    fn repeat_runs_are_identical_and_epochs_differ() {
        let lines = sample_corpus(300);
        let alphabet = Alphabet::from_text(&lines.join("\n")).unwrap();
        let first = noise_corpus(&lines, &plan(7), &alphabet);
        let second = noise_corpus(&lines, &plan(7), &alphabet);
        assert_eq!(first, second);
        let shifted = noise_corpus(&lines, &plan(7).with_epoch(1), &alphabet);
        assert_ne!(first, shifted);
    }

    #[test]
    fn epoch_stream_matches_per_epoch_noise_corpus() {
        let lines = sample_corpus(40);
        let alphabet = Alphabet::from_text(&lines.join("\n")).unwrap();
        let outputs: Vec<Vec<String>> = epoch_stream(&lines, &plan(5), &alphabet, 3).collect();
        assert_eq!(outputs.len(), 3);
        for (e, output) in outputs.iter().enumerate() {
            let expected = noise_corpus(&lines, &plan(5).with_epoch(e as u64), &alphabet);
            assert_eq!(output, &expected);
        }
        assert_ne!(outputs[0], outputs[1]);
    }

    #[test]
    fn epoch_stream_of_one_equals_noise_corpus() {
        let lines = sample_corpus(20);
        let alphabet = Alphabet::from_text(&lines.join("\n")).unwrap();
        let single: Vec<Vec<String>> = epoch_stream(&lines, &plan(5), &alphabet, 1).collect();
        assert_eq!(single, vec![noise_corpus(&lines, &plan(5), &alphabet)]);
    }

    #[test]
    fn clean_epoch_stream_is_constant() {
        let lines = sample_corpus(20);
        let alphabet = Alphabet::from_text(&lines.join("\n")).unwrap();
        let clean = NoisingPlan::new("clean", NoiseMixture::all_clean(), 5);
        let outputs: Vec<Vec<String>> = epoch_stream(&lines, &clean, &alphabet, 3).collect();
        assert_eq!(outputs[0], outputs[1]);
        assert_eq!(outputs[1], outputs[2]);
    }

    #[test]
    fn file_driver_round_trips_and_counts_lines() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("in.txt");
        let output = dir.path().join("out.txt");
        let lines = sample_corpus(100);
        std::fs::write(&input, lines.join("\n") + "\n").unwrap();
        let alphabet = alphabet_from_file(&input).unwrap();
        let count = noise_file(&input, &output, &plan(11), &alphabet).unwrap();
        assert_eq!(count, 100);
        let from_file = read_lines(&output).unwrap();
        assert_eq!(from_file, noise_corpus(&lines, &plan(11), &alphabet));
    }

    #[test]
    fn failed_run_leaves_no_partial_output() {
        let dir = tempfile::tempdir().unwrap();
        let missing = dir.path().join("missing.txt");
        let output = dir.path().join("out.txt");
        let alphabet = Alphabet::from_text("abc").unwrap();
        assert!(noise_file(&missing, &output, &plan(1), &alphabet).is_err());
        assert!(!output.exists());
    }

    #[test]
    fn epoch_files_match_single_epoch_runs() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("in.txt");
        let stem = dir.path().join("out.txt");
        let lines = sample_corpus(50);
        std::fs::write(&input, lines.join("\n") + "\n").unwrap();
        let alphabet = alphabet_from_file(&input).unwrap();
        let paths = materialize_epochs(&input, &stem, &plan(2), &alphabet, 3).unwrap();
        assert_eq!(paths.len(), 3);
        for (e, path) in paths.iter().enumerate() {
            assert!(path.to_string_lossy().ends_with(&format!(".epoch{e}")));
            let expected = noise_corpus(&lines, &plan(2).with_epoch(e as u64), &alphabet);
            assert_eq!(read_lines(path).unwrap(), expected);
        }
    }

    #[test]
    fn natural_file_driver_reports_stats() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("in.txt");
        let output = dir.path().join("out.txt");
        std::fs::write(&input, "the cat sat\ncat naps\n").unwrap();
        let lexicon = ErrorLexicon::from_reader("cat\tkat\n".as_bytes()).unwrap();
        let config = NaturalNoiseConfig::new(1.0, 3).unwrap();
        let stats = noise_file_naturally(&input, &output, &lexicon, &config).unwrap();
        assert_eq!(stats.total_tokens, 5);
        assert_eq!(stats.eligible_tokens, 2);
        assert_eq!(stats.noised_tokens, 2);
        assert_eq!(read_lines(&output).unwrap(), vec!["the kat sat", "kat naps"]);
    }
}
