//! Corpus noising and machine-translation robustness evaluation.
//!
//! The crate materializes character-level noise over one-sentence-per-line
//! corpora and measures how translation quality degrades and recovers:
//!
//! - [`noise`]: the four synthetic edit operations (deletion, insertion,
//!   substitution, adjacent swap) and the per-token mixture sampler.
//! - [`lexicon`]: clean-to-error spelling lexicons and natural-noise
//!   injection at a configurable per-token probability.
//! - [`pipeline`]: streaming whole-corpus noising with per-epoch
//!   regeneration, reproducible from `(seed, epoch, line, token)`
//!   coordinates alone.
//! - [`bleu`]: corpus-level BLEU with clipped n-gram precisions and an
//!   exponential brevity penalty.
//! - [`runner`]: sweep and ablation protocols over a pluggable
//!   line-aligned translation backend.

pub mod alphabet;
pub mod bleu;
pub mod error;
pub mod lexicon;
pub mod noise;
pub mod pipeline;
pub mod report;
pub mod rng;
pub mod runner;
pub mod token;

pub use alphabet::Alphabet;
pub use bleu::{corpus_bleu, corpus_bleu_with, BleuReport, Smoothing};
pub use error::{Error, Result};
pub use lexicon::{
    inject_natural_noise, noise_corpus_naturally, ErrorLexicon, InjectionStats,
    NaturalNoiseConfig,
};
pub use noise::{
    delete_char, insert_char, noise_token, noise_token_traced, sample_noise_type,
    substitute_char, swap_chars, NoiseMixture, NoiseType,
};
pub use pipeline::{
    derive_seed, epoch_stream, materialize_epochs, noise_corpus, noise_file,
    noise_file_naturally, tokenize, CorpusLine, NoisingPlan,
};
pub use report::{
    render_ablation_table, render_sweep_table, score_condition, ConditionFailure,
    ConditionMeta, RunReport, ScoredCondition,
};
pub use rng::RandomSource;
pub use runner::{
    build_ablation_plans, run_ablation, run_degradation_sweep, run_sweep, translate,
    AblationPlan, AblationPlanSet, AblationRole, SweepSpec, TranslatorBackend,
};
pub use token::Token;
