//! Command-line interface for corpus noising and robustness evaluation.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use orthonoise::{
    build_ablation_plans, corpus_bleu_with, pipeline, render_ablation_table, render_sweep_table,
    run_ablation, run_sweep, Alphabet, ErrorLexicon, NaturalNoiseConfig, NoiseMixture,
    NoisingPlan, RunReport, Smoothing, SweepSpec, TranslatorBackend,
};

#[derive(Parser)]
#[command(
    name = "orthonoise",
    about = "Character-level corpus noising and BLEU-based translation robustness evaluation",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Subcommand)]
enum CliCommand {
    /// Apply synthetic mixture noise to a corpus file.
    Noise(NoiseArgs),
    /// Materialize several per-epoch noised copies of a corpus.
    Epochs(EpochsArgs),
    /// Inject natural spelling errors from a lexicon into a corpus file.
    Natural(NaturalArgs),
    /// Score a hypothesis file against a reference file with corpus BLEU.
    Bleu(BleuArgs),
    /// Sweep natural-noise probabilities over a test set and score each
    /// condition through a translation backend.
    Sweep(SweepArgs),
    /// Run the synthetic-noise ablation protocol through a backend.
    Ablate(AblateArgs),
}

#[derive(Args)]
struct NoiseArgs {
    /// Mixture spec, e.g. clean=0.6,del=0.1,ins=0.1,sub=0.1,swap=0.1
    #[arg(long, default_value = "clean=0.6,del=0.1,ins=0.1,sub=0.1,swap=0.1")]
    mix: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    epoch: u64,
    /// `auto` derives the alphabet from the input corpus; otherwise a path
    /// to a UTF-8 file whose non-whitespace characters form the alphabet.
    #[arg(long, default_value = "auto")]
    alphabet: String,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long = "out")]
    output: PathBuf,
}

#[derive(Args)]
struct EpochsArgs {
    #[command(flatten)]
    noise: NoiseArgs,
    /// Number of epochs; writes <out>.epoch<k> for each.
    #[arg(long)]
    count: u64,
}

#[derive(Args)]
struct NaturalArgs {
    /// TSV lexicon: clean form, then tab-separated error forms.
    #[arg(long)]
    lexicon: PathBuf,
    /// Per-token injection probability in [0, 1].
    #[arg(long)]
    prob: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long = "out")]
    output: PathBuf,
    /// Write the injection stats JSON here instead of stdout.
    #[arg(long)]
    stats: Option<PathBuf>,
}

#[derive(Args)]
struct BleuArgs {
    #[arg(long)]
    hyp: PathBuf,
    #[arg(long = "ref")]
    reference: PathBuf,
    /// Add-one smoothing for higher-order precisions (tiny corpora).
    #[arg(long)]
    smooth: bool,
}

#[derive(Args)]
struct SweepArgs {
    /// Clean test source, one sentence per line.
    #[arg(long)]
    test: PathBuf,
    #[arg(long = "ref")]
    reference: PathBuf,
    #[arg(long)]
    lexicon: PathBuf,
    /// Comma-separated, strictly increasing probabilities in [0, 1].
    #[arg(long, default_value = "0,0.0625,0.25,1.0")]
    probs: String,
    /// `identity`, `copy`, or a shell command reading lines on stdin and
    /// writing line-aligned translations to stdout.
    #[arg(long)]
    backend: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "out")]
    output: PathBuf,
    /// `json` (default) only writes the report; `table` also prints an
    /// aligned text table to stdout.
    #[arg(long, default_value = "json")]
    format: String,
}

#[derive(Args)]
struct AblateArgs {
    #[arg(long)]
    test: PathBuf,
    #[arg(long = "ref")]
    reference: PathBuf,
    /// The all-noise mixture the ablation is built from.
    #[arg(long = "mix-default", default_value = "clean=0.6,del=0.1,ins=0.1,sub=0.1,swap=0.1")]
    mix_default: String,
    /// Keep the clean mass fixed in leave-one-out plans instead of the
    /// fixed-per-type reading.
    #[arg(long)]
    renormalize: bool,
    #[arg(long)]
    backend: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "out")]
    output: PathBuf,
    #[arg(long, default_value = "json")]
    format: String,
}

fn load_alphabet(spec: &str, corpus: &Path) -> Result<Alphabet> {
    let alphabet = if spec == "auto" {
        Alphabet::from_file(corpus)
    } else {
        Alphabet::from_file(Path::new(spec))
    };
    alphabet.with_context(|| format!("loading alphabet ({spec})"))
}

fn parse_probs(spec: &str) -> Result<Vec<f64>> {
    spec.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .with_context(|| format!("invalid probability {p:?}"))
        })
        .collect()
}

fn write_report(report: &RunReport, path: &Path) -> Result<()> {
    fs::write(path, report.to_json() + "\n")
        .with_context(|| format!("writing report to {}", path.display()))?;
    if !report.failures.is_empty() {
        for failure in &report.failures {
            eprintln!("condition {:?} failed: {}", failure.name, failure.error);
        }
    }
    Ok(())
}

fn run() -> Result<()> {
    match Cli::parse().command {
        CliCommand::Noise(args) => {
            let mixture: NoiseMixture = args.mix.parse()?;
            let alphabet = load_alphabet(&args.alphabet, &args.input)?;
            let plan = NoisingPlan::new("noise", mixture, args.seed).with_epoch(args.epoch);
            let lines = pipeline::noise_file(&args.input, &args.output, &plan, &alphabet)?;
            eprintln!("wrote {} lines to {}", lines, args.output.display());
        }
        CliCommand::Epochs(args) => {
            let mixture: NoiseMixture = args.noise.mix.parse()?;
            let alphabet = load_alphabet(&args.noise.alphabet, &args.noise.input)?;
            let plan = NoisingPlan::new("epochs", mixture, args.noise.seed)
                .with_epoch(args.noise.epoch);
            let written = pipeline::materialize_epochs(
                &args.noise.input,
                &args.noise.output,
                &plan,
                &alphabet,
                args.count,
            )?;
            for path in written {
                eprintln!("wrote {}", path.display());
            }
        }
        CliCommand::Natural(args) => {
            let lexicon = ErrorLexicon::from_path(&args.lexicon)?;
            let config = NaturalNoiseConfig::new(args.prob, args.seed)?;
            let stats =
                pipeline::noise_file_naturally(&args.input, &args.output, &lexicon, &config)?;
            let json = serde_json::to_string(&stats)?;
            match args.stats {
                Some(path) => fs::write(&path, json + "\n")
                    .with_context(|| format!("writing stats to {}", path.display()))?,
                None => println!("{json}"),
            }
        }
        CliCommand::Bleu(args) => {
            let hyp = pipeline::read_lines(&args.hyp)?;
            let reference = pipeline::read_lines(&args.reference)?;
            let smoothing = if args.smooth {
                Smoothing::AddOne
            } else {
                Smoothing::None
            };
            let report = corpus_bleu_with(&hyp, &reference, smoothing)?;
            println!("{}", serde_json::to_string(&report)?);
        }
        CliCommand::Sweep(args) => {
            let test = pipeline::read_lines(&args.test)?;
            let reference = pipeline::read_lines(&args.reference)?;
            let lexicon = ErrorLexicon::from_path(&args.lexicon)?;
            let spec = SweepSpec::new(parse_probs(&args.probs)?, &lexicon, args.seed)?;
            let backend = TranslatorBackend::from_spec(&args.backend);
            let report = run_sweep(&test, &reference, &spec, &backend)?;
            write_report(&report, &args.output)?;
            match args.format.as_str() {
                "json" => {}
                "table" => print!("{}", render_sweep_table(&report.conditions)),
                other => bail!("unknown format {other:?} (expected json or table)"),
            }
        }
        CliCommand::Ablate(args) => {
            let test = pipeline::read_lines(&args.test)?;
            let reference = pipeline::read_lines(&args.reference)?;
            let mixture: NoiseMixture = args.mix_default.parse()?;
            let plans = build_ablation_plans(&mixture, args.seed, args.renormalize);
            let backend = TranslatorBackend::from_spec(&args.backend);
            let report = run_ablation(&test, &reference, &plans, &backend)?;
            write_report(&report, &args.output)?;
            match args.format.as_str() {
                "json" => {}
                "table" => print!("{}", render_ablation_table(&report.conditions)),
                other => bail!("unknown format {other:?} (expected json or table)"),
            }
        }
    }
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
