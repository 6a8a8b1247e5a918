//! Shared test oracles and corpus builders.
//!
//! Everything here is deliberately independent of the library's own code
//! paths: textbook dynamic-programming edit distances, a second BLEU
//! implementation written without hash maps, and plain generators.

#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::Rng;

/// Classic Levenshtein distance (insert / delete / substitute, unit cost)
/// over Unicode scalar values.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut curr: Vec<usize> = vec![0; b.len() + 1];
    for i in 1..=a.len() {
        curr[0] = i;
        for j in 1..=b.len() {
            let cost = usize::from(a[i - 1] != b[j - 1]);
            curr[j] = (prev[j] + 1)
                .min(curr[j - 1] + 1)
                .min(prev[j - 1] + cost);
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[b.len()]
}

/// Damerau-Levenshtein distance, restricted (optimal string alignment)
/// form: adjacent transposition costs one edit.
pub fn damerau_levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for j in 0..=b.len() {
        d[0][j] = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let cost = usize::from(a[i - 1] != b[j - 1]);
            let mut best = (d[i - 1][j] + 1)
                .min(d[i][j - 1] + 1)
                .min(d[i - 1][j - 1] + cost);
            if i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1] {
                best = best.min(d[i - 2][j - 2] + 1);
            }
            d[i][j] = best;
        }
    }
    d[a.len()][b.len()]
}

pub const TOKEN_CHARS: &[char] = &[
    'a', 'b', 'c', 'd', 'e', 'f', 'g', 'h', 'i', 'j', 'k', 'l', 'm', 'n', 'o', 'p', 'q', 'r',
    's', 't',
];

/// A random token of the given length range.
pub fn random_token(rng: &mut StdRng, min_len: usize, max_len: usize) -> String {
    let len = rng.gen_range(min_len..=max_len);
    (0..len)
        .map(|_| TOKEN_CHARS[rng.gen_range(0..TOKEN_CHARS.len())])
        .collect()
}

/// A random token whose adjacent characters always differ, so a forced
/// interior swap is guaranteed to change it.
pub fn random_token_distinct_adjacent(rng: &mut StdRng, min_len: usize, max_len: usize) -> String {
    let len = rng.gen_range(min_len..=max_len);
    let mut out = String::with_capacity(len);
    let mut previous: Option<char> = None;
    for _ in 0..len {
        let mut ch = TOKEN_CHARS[rng.gen_range(0..TOKEN_CHARS.len())];
        if previous == Some(ch) {
            let at = TOKEN_CHARS.iter().position(|&c| c == ch).unwrap();
            ch = TOKEN_CHARS[(at + 1) % TOKEN_CHARS.len()];
        }
        out.push(ch);
        previous = Some(ch);
    }
    out
}

/// How a noised token differs from its original, as judged purely from
/// the two strings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EditKind {
    Clean,
    Deletion,
    Insertion,
    Substitution,
    Swap,
}

/// Classifies a single noise outcome. Unambiguous when the original has
/// no equal adjacent characters. Panics on shapes none of the four
/// operations can produce.
pub fn classify_edit(original: &str, noised: &str) -> EditKind {
    let a: Vec<char> = original.chars().collect();
    let b: Vec<char> = noised.chars().collect();
    if a == b {
        return EditKind::Clean;
    }
    if b.len() + 1 == a.len() {
        assert_eq!(levenshtein(original, noised), 1, "{original} -> {noised}");
        return EditKind::Deletion;
    }
    if b.len() == a.len() + 1 {
        assert_eq!(levenshtein(original, noised), 1, "{original} -> {noised}");
        return EditKind::Insertion;
    }
    assert_eq!(a.len(), b.len(), "{original} -> {noised}");
    let diffs: Vec<usize> = (0..a.len()).filter(|&i| a[i] != b[i]).collect();
    match diffs.as_slice() {
        [_] => EditKind::Substitution,
        [i, j] if j == &(i + 1) && a[*i] == b[*j] && a[*j] == b[*i] => EditKind::Swap,
        _ => panic!("unclassifiable edit {original} -> {noised}"),
    }
}

/// Corpus-level BLEU computed a second way: per-line window scans and
/// linear searches, no hash maps, counts clipped per distinct n-gram.
/// Mirrors the pinned semantics (vacuous order = 1, empty hypotheses =
/// score 0) through an independent code path.
pub struct NaiveBleu {
    pub precisions: [f64; 4],
    pub bp: f64,
    pub hyp_len: usize,
    pub ref_len: usize,
    pub bleu: f64,
}

pub fn naive_bleu(hyps: &[String], refs: &[String]) -> NaiveBleu {
    assert_eq!(hyps.len(), refs.len());
    let mut matches = [0usize; 4];
    let mut totals = [0usize; 4];
    let mut hyp_len = 0;
    let mut ref_len = 0;
    for (hyp, reference) in hyps.iter().zip(refs) {
        let h: Vec<&str> = hyp.split_whitespace().collect();
        let r: Vec<&str> = reference.split_whitespace().collect();
        assert!(!r.is_empty(), "empty reference line");
        hyp_len += h.len();
        ref_len += r.len();
        for n in 1..=4 {
            if h.len() < n {
                continue;
            }
            totals[n - 1] += h.len() - n + 1;
            // Walk distinct hypothesis n-grams by skipping any window
            // that already occurred earlier in the hypothesis.
            for start in 0..=h.len() - n {
                let gram = &h[start..start + n];
                let first_occurrence = (0..start).all(|s| &h[s..s + n] != gram);
                if !first_occurrence {
                    continue;
                }
                let hyp_count = (0..=h.len() - n).filter(|&s| &h[s..s + n] == gram).count();
                let ref_count = if r.len() < n {
                    0
                } else {
                    (0..=r.len() - n).filter(|&s| &r[s..s + n] == gram).count()
                };
                matches[n - 1] += hyp_count.min(ref_count);
            }
        }
    }
    let mut precisions = [0.0f64; 4];
    for n in 0..4 {
        precisions[n] = if totals[n] == 0 {
            1.0
        } else {
            matches[n] as f64 / totals[n] as f64
        };
    }
    let bp = if hyp_len == 0 {
        0.0
    } else if hyp_len >= ref_len {
        1.0
    } else {
        (1.0 - ref_len as f64 / hyp_len as f64).exp()
    };
    let bleu = if precisions.iter().any(|&p| p == 0.0) {
        0.0
    } else {
        100.0 * bp * (precisions.iter().map(|p| p.ln()).sum::<f64>() / 4.0).exp()
    };
    NaiveBleu {
        precisions,
        bp,
        hyp_len,
        ref_len,
        bleu,
    }
}

/// Builds a deterministic corpus: `lines` lines of `tokens_per_line`
/// tokens drawn by `make_token(rng, line, column)`.
pub fn build_corpus(
    rng: &mut StdRng,
    lines: usize,
    tokens_per_line: usize,
    mut make_token: impl FnMut(&mut StdRng, usize, usize) -> String,
) -> Vec<String> {
    (0..lines)
        .map(|line| {
            (0..tokens_per_line)
                .map(|column| make_token(rng, line, column))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect()
}

#[test]
fn oracle_sanity() {
    assert_eq!(levenshtein("kitten", "sitting"), 3);
    assert_eq!(levenshtein("abc", "abc"), 0);
    assert_eq!(levenshtein("abc", "ab"), 1);
    assert_eq!(damerau_levenshtein("abcd", "acbd"), 1);
    assert_eq!(damerau_levenshtein("ca", "abc"), 3, "OSA form");
    assert_eq!(damerau_levenshtein("abc", "abc"), 0);
    assert_eq!(classify_edit("whale", "whle"), EditKind::Deletion);
    assert_eq!(classify_edit("whale", "wxhale"), EditKind::Insertion);
    assert_eq!(classify_edit("whale", "whalz"), EditKind::Substitution);
    assert_eq!(classify_edit("whale", "wahle"), EditKind::Swap);
    assert_eq!(classify_edit("whale", "whale"), EditKind::Clean);
}
