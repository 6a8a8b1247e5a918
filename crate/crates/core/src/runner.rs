//! Evaluation protocol orchestration: pluggable translation backends,
//! natural-noise sweeps, synthetic ablation plans, and the synthetic
//! degradation harness.
//!
//! Training a translation model is out of scope; any system that maps n
//! input lines to n output lines can be attached. A subprocess backend
//! receives the test set on standard input, one sentence per line, and
//! must emit line-aligned translations on standard output. Per-condition
//! context is passed through the environment (`ORTHONOISE_CONDITION`,
//! `ORTHONOISE_MIXTURE`, `ORTHONOISE_PROBABILITY`, `ORTHONOISE_SEED`), so
//! a command can, for example, select a per-condition model checkpoint.

use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::lexicon::{ErrorLexicon, NaturalNoiseConfig};
use crate::noise::{NoiseMixture, NoiseType};
use crate::pipeline::{noise_corpus, NoisingPlan};
use crate::report::{
    score_condition, ConditionFailure, ConditionMeta, RunReport, ScoredCondition,
};

/// Default wall-clock budget for one subprocess translation call.
pub const DEFAULT_BACKEND_TIMEOUT: Duration = Duration::from_secs(300);

/// Interval at which a running subprocess is polled for exit.
const POLL_INTERVAL: Duration = Duration::from_millis(5);

/// A pluggable translation system.
#[derive(Debug, Clone)]
pub enum TranslatorBackend {
    /// Returns its input unchanged.
    Identity,
    /// Returns its input unchanged; names the copy-task setup, where the
    /// reference equals the clean source and degradation comes from noise
    /// alone.
    Copy,
    /// Pipes input lines through a shell command (`sh -c <command>`).
    Subprocess { command: String, timeout: Duration },
}

impl TranslatorBackend {
    /// Parses a CLI backend spec: `identity`, `copy`, or a shell command.
    pub fn from_spec(spec: &str) -> Self {
        match spec {
            "identity" => TranslatorBackend::Identity,
            "copy" => TranslatorBackend::Copy,
            command => TranslatorBackend::subprocess(command),
        }
    }

    pub fn subprocess(command: impl Into<String>) -> Self {
        TranslatorBackend::Subprocess {
            command: command.into(),
            timeout: DEFAULT_BACKEND_TIMEOUT,
        }
    }

    pub fn with_timeout(self, timeout: Duration) -> Self {
        match self {
            TranslatorBackend::Subprocess { command, .. } => {
                TranslatorBackend::Subprocess { command, timeout }
            }
            other => other,
        }
    }

    /// Stable identity string recorded in reports.
    pub fn identity_string(&self) -> String {
        match self {
            TranslatorBackend::Identity => "identity".into(),
            TranslatorBackend::Copy => "copy".into(),
            TranslatorBackend::Subprocess { command, .. } => format!("subprocess:{command}"),
        }
    }

    /// Translates `lines`, requiring exactly one output line per input
    /// line.
    pub fn translate(&self, lines: &[String]) -> Result<Vec<String>> {
        self.translate_with_env(lines, &[])
    }

    /// [`translate`](Self::translate) with extra environment variables for
    /// subprocess backends.
    pub fn translate_with_env(
        &self,
        lines: &[String],
        env: &[(String, String)],
    ) -> Result<Vec<String>> {
        match self {
            TranslatorBackend::Identity | TranslatorBackend::Copy => Ok(lines.to_vec()),
            TranslatorBackend::Subprocess { command, timeout } => {
                let output = run_subprocess(command, *timeout, lines, env)?;
                if output.len() != lines.len() {
                    return Err(Error::Backend(format!(
                        "line count mismatch: sent {} lines, received {}",
                        lines.len(),
                        output.len()
                    )));
                }
                Ok(output)
            }
        }
    }

    /// One-line round trip to verify the backend is healthy before a run.
    pub fn probe(&self, line: &str) -> Result<()> {
        let out = self.translate(&[line.to_string()])?;
        if out.len() == 1 {
            Ok(())
        } else {
            Err(Error::Backend(format!(
                "probe returned {} lines for 1 input line",
                out.len()
            )))
        }
    }
}

/// Pipes `lines` through `sh -c command` and returns stdout split into
/// lines. Fails on nonzero exit, timeout, or I/O trouble, with captured
/// stderr in the diagnostic.
fn run_subprocess(
    command: &str,
    timeout: Duration,
    lines: &[String],
    env: &[(String, String)],
) -> Result<Vec<String>> {
    let mut builder = Command::new("/bin/sh");
    builder
        .arg("-c")
        .arg(command)
        .envs(env.iter().map(|(k, v)| (k.as_str(), v.as_str())))
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped());
    // Own process group, so a timeout can take down the whole command
    // tree, not just the shell.
    #[cfg(unix)]
    {
        use std::os::unix::process::CommandExt;
        builder.process_group(0);
    }
    let mut child = builder
        .spawn()
        .map_err(|e| Error::Backend(format!("failed to spawn {command:?}: {e}")))?;

    let mut stdin = child.stdin.take().expect("stdin was piped");
    let mut stdout = child.stdout.take().expect("stdout was piped");
    let mut stderr = child.stderr.take().expect("stderr was piped");

    let mut input = String::new();
    for line in lines {
        input.push_str(line);
        input.push('\n');
    }
    // Writer and readers run on their own threads so neither side can
    // deadlock on a full pipe while the main thread watches the clock.
    let writer = std::thread::spawn(move || {
        let _ = stdin.write_all(input.as_bytes());
        // stdin drops here, closing the pipe.
    });
    let out_reader = std::thread::spawn(move || {
        let mut buf = String::new();
        let _ = stdout.read_to_string(&mut buf);
        buf
    });
    let err_reader = std::thread::spawn(move || {
        let mut buf = String::new();
        let _ = stderr.read_to_string(&mut buf);
        buf
    });

    let started = Instant::now();
    let status = loop {
        match child.try_wait() {
            Ok(Some(status)) => break status,
            Ok(None) => {
                if started.elapsed() > timeout {
                    kill_process_group(&mut child);
                    let _ = child.wait();
                    let _ = writer.join();
                    let _ = out_reader.join();
                    let captured = err_reader.join().unwrap_or_default();
                    return Err(Error::Backend(format!(
                        "{command:?} timed out after {timeout:?}{}",
                        stderr_suffix(&captured)
                    )));
                }
                std::thread::sleep(POLL_INTERVAL);
            }
            Err(e) => {
                let _ = child.kill();
                return Err(Error::Backend(format!("failed to wait on {command:?}: {e}")));
            }
        }
    };

    let _ = writer.join();
    let captured_out = out_reader.join().unwrap_or_default();
    let captured_err = err_reader.join().unwrap_or_default();

    if !status.success() {
        return Err(Error::Backend(format!(
            "{command:?} exited with {status}{}",
            stderr_suffix(&captured_err)
        )));
    }
    Ok(captured_out.lines().map(str::to_string).collect())
}

/// Kills the child's whole process group where supported, otherwise just
/// the child.
fn kill_process_group(child: &mut std::process::Child) {
    #[cfg(unix)]
    unsafe {
        libc::kill(-(child.id() as i32), libc::SIGKILL);
    }
    let _ = child.kill();
}

fn stderr_suffix(captured: &str) -> String {
    let trimmed = captured.trim();
    if trimmed.is_empty() {
        String::new()
    } else {
        let mut snippet: String = trimmed.chars().take(2000).collect();
        if snippet.len() < trimmed.len() {
            snippet.push_str("…");
        }
        format!("; stderr: {snippet}")
    }
}

/// Translates `lines` through `backend`.
pub fn translate(lines: &[String], backend: &TranslatorBackend) -> Result<Vec<String>> {
    backend.translate(lines)
}

/// A natural-noise sweep: evaluate the same test set under increasing
/// injection probabilities.
#[derive(Debug)]
pub struct SweepSpec<'a> {
    probabilities: Vec<f64>,
    lexicon: &'a ErrorLexicon,
    seed: u64,
}

impl<'a> SweepSpec<'a> {
    /// Probabilities must be strictly increasing, each in [0, 1].
    pub fn new(probabilities: Vec<f64>, lexicon: &'a ErrorLexicon, seed: u64) -> Result<Self> {
        if probabilities.is_empty() {
            return Err(Error::InvalidConfig(
                "sweep needs at least one probability".into(),
            ));
        }
        for &p in &probabilities {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidConfig(format!(
                    "sweep probability must lie in [0, 1], got {p}"
                )));
            }
        }
        if probabilities.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig(
                "sweep probabilities must be strictly increasing".into(),
            ));
        }
        Ok(SweepSpec {
            probabilities,
            lexicon,
            seed,
        })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn lexicon(&self) -> &ErrorLexicon {
        self.lexicon
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

fn check_aligned(test: &[String], references: &[String]) -> Result<()> {
    if test.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if test.len() != references.len() {
        return Err(Error::LineCountMismatch {
            hypotheses: test.len(),
            references: references.len(),
        });
    }
    Ok(())
}

/// Runs a natural-noise sweep: for each probability, materialize a noised
/// test set, translate it, and score it. The first scored condition is
/// the run's baseline for deltas. A condition whose backend call or
/// scoring fails is recorded as a failure and the sweep continues.
pub fn run_sweep(
    test: &[String],
    references: &[String],
    spec: &SweepSpec<'_>,
    backend: &TranslatorBackend,
) -> Result<RunReport> {
    check_aligned(test, references)?;
    backend.probe(&test[0])?;
    let lexicon_digest = spec.lexicon().content_digest();

    let mut conditions = Vec::new();
    let mut failures = Vec::new();
    let mut baseline: Option<f64> = None;
    for &probability in spec.probabilities() {
        let name = format!("{:.2}%", probability * 100.0);
        let config = NaturalNoiseConfig::new(probability, spec.seed())?;
        let (noised, stats) =
            crate::lexicon::noise_corpus_naturally(test, spec.lexicon(), &config);
        let env = [
            ("ORTHONOISE_CONDITION".to_string(), name.clone()),
            ("ORTHONOISE_PROBABILITY".to_string(), probability.to_string()),
            ("ORTHONOISE_SEED".to_string(), spec.seed().to_string()),
        ];
        let outcome = backend
            .translate_with_env(&noised, &env)
            .and_then(|translated| {
                let mut meta = ConditionMeta::new(&name, spec.seed(), backend.identity_string());
                meta.noise_probability = Some(probability);
                meta.noised_token_fraction = Some(stats.noised_fraction());
                meta.lexicon_sha256 = Some(lexicon_digest.clone());
                score_condition(&translated, references, meta, None)
            });
        match outcome {
            Ok(mut scored) => {
                if baseline.is_none() {
                    baseline = Some(scored.bleu);
                }
                scored = scored.with_baseline(baseline.unwrap());
                conditions.push(scored);
            }
            Err(e) => failures.push(ConditionFailure {
                name,
                error: e.to_string(),
            }),
        }
    }
    Ok(RunReport {
        conditions,
        failures,
    })
}

/// The role a plan plays in the ablation protocol, which determines its
/// delta baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AblationRole {
    /// All-clean baseline for the single-noise block.
    NoNoise,
    /// Exactly one noise type enabled.
    AddOne(NoiseType),
    /// The full mixture; baseline for the leave-one-out block.
    AllNoise,
    /// The full mixture with one noise type removed.
    RemoveOne(NoiseType),
}

/// One ablation condition: a noising plan plus its protocol role.
#[derive(Debug, Clone)]
pub struct AblationPlan {
    pub role: AblationRole,
    pub plan: NoisingPlan,
}

/// The ten ablation conditions: no-noise, four single-noise plans, the
/// all-noise mixture, and four leave-one-out plans.
#[derive(Debug, Clone)]
pub struct AblationPlanSet {
    plans: Vec<AblationPlan>,
}

/// Condition label. Leave-one-out labels use U+2212 MINUS SIGN, matching
/// the report typography.
fn ablation_label(role: AblationRole) -> String {
    match role {
        AblationRole::NoNoise => "No Training Noise".to_string(),
        AblationRole::AddOne(ty) => format!("+ {}", ty.name()),
        AblationRole::AllNoise => "All Training Noise".to_string(),
        AblationRole::RemoveOne(ty) => format!("\u{2212} {}", ty.name()),
    }
}

/// Builds the ten ablation plans from the full mixture.
///
/// With the default mixture, single-noise plans are `{type: 0.1, clean:
/// 0.9}` and leave-one-out plans keep the remaining three types at 0.1
/// each with clean raised to 0.7. When `renormalize` is set, leave-one-out
/// plans instead keep the clean mass fixed and scale the remaining types
/// up to the full noise budget.
pub fn build_ablation_plans(
    full_mixture: &NoiseMixture,
    base_seed: u64,
    renormalize: bool,
) -> AblationPlanSet {
    let clean = full_mixture.weight(NoiseType::Clean);
    let mut plans = Vec::with_capacity(10);

    plans.push(AblationPlan {
        role: AblationRole::NoNoise,
        plan: NoisingPlan::new(
            ablation_label(AblationRole::NoNoise),
            NoiseMixture::all_clean(),
            base_seed,
        ),
    });
    for ty in NoiseType::NOISES {
        let weight = full_mixture.weight(ty);
        let mut weights = [0.0f64; 4];
        weights[noise_slot(ty)] = weight;
        plans.push(AblationPlan {
            role: AblationRole::AddOne(ty),
            plan: NoisingPlan::new(
                ablation_label(AblationRole::AddOne(ty)),
                mixture_from_noise_weights(weights),
                base_seed,
            ),
        });
    }
    plans.push(AblationPlan {
        role: AblationRole::AllNoise,
        plan: NoisingPlan::new(
            ablation_label(AblationRole::AllNoise),
            full_mixture.clone(),
            base_seed,
        ),
    });
    for ty in NoiseType::NOISES {
        let removed = full_mixture.weight(ty);
        let kept_mass: f64 = NoiseType::NOISES
            .iter()
            .filter(|&&t| t != ty)
            .map(|&t| full_mixture.weight(t))
            .sum();
        let mut weights = [0.0f64; 4];
        for kept in NoiseType::NOISES {
            if kept == ty {
                continue;
            }
            let w = full_mixture.weight(kept);
            weights[noise_slot(kept)] = if renormalize && kept_mass > 0.0 {
                // Scale survivors so clean keeps its original mass.
                w * (kept_mass + removed) / kept_mass
            } else {
                w
            };
        }
        let _ = clean; // clean mass is implied: 1 - sum of noise weights
        plans.push(AblationPlan {
            role: AblationRole::RemoveOne(ty),
            plan: NoisingPlan::new(
                ablation_label(AblationRole::RemoveOne(ty)),
                mixture_from_noise_weights(weights),
                base_seed,
            ),
        });
    }
    AblationPlanSet { plans }
}

fn noise_slot(ty: NoiseType) -> usize {
    NoiseType::NOISES
        .iter()
        .position(|&t| t == ty)
        .expect("ty is a noise type")
}

/// Builds a mixture from the four noise weights, assigning the remainder
/// to clean so the weights sum to 1 exactly.
fn mixture_from_noise_weights(weights: [f64; 4]) -> NoiseMixture {
    let noise_mass: f64 = weights.iter().sum();
    NoiseMixture::new(
        1.0 - noise_mass,
        weights[0],
        weights[1],
        weights[2],
        weights[3],
    )
    .expect("noise weights derived from a valid mixture stay valid")
}

impl AblationPlanSet {
    pub fn plans(&self) -> &[AblationPlan] {
        &self.plans
    }

    pub fn len(&self) -> usize {
        self.plans.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plans.is_empty()
    }
}

/// Runs the ablation protocol: one backend call per plan over the same
/// test set, each scored against the references. Deltas compare the
/// single-noise block against the no-noise row and the leave-one-out
/// block against the all-noise row; the two baseline rows carry no delta.
///
/// The runner itself does not noise the test set — each plan's mixture
/// describes the training-time condition and reaches the backend through
/// `ORTHONOISE_CONDITION` / `ORTHONOISE_MIXTURE`, so a subprocess backend
/// can dispatch to a per-condition model.
pub fn run_ablation(
    test: &[String],
    references: &[String],
    plan_set: &AblationPlanSet,
    backend: &TranslatorBackend,
) -> Result<RunReport> {
    check_aligned(test, references)?;
    backend.probe(&test[0])?;

    let mut scored: Vec<(AblationRole, ScoredCondition)> = Vec::new();
    let mut failures = Vec::new();
    for entry in plan_set.plans() {
        let name = entry.plan.name.clone();
        let env = [
            ("ORTHONOISE_CONDITION".to_string(), name.clone()),
            ("ORTHONOISE_MIXTURE".to_string(), entry.plan.mixture.to_string()),
            ("ORTHONOISE_SEED".to_string(), entry.plan.base_seed.to_string()),
        ];
        let outcome = backend
            .translate_with_env(test, &env)
            .and_then(|translated| {
                let mut meta =
                    ConditionMeta::new(&name, entry.plan.base_seed, backend.identity_string());
                meta.mixture = Some(entry.plan.mixture.to_string());
                score_condition(&translated, references, meta, None)
            });
        match outcome {
            Ok(condition) => scored.push((entry.role, condition)),
            Err(e) => failures.push(ConditionFailure {
                name,
                error: e.to_string(),
            }),
        }
    }

    let bleu_for = |role: AblationRole| {
        scored
            .iter()
            .find(|(r, _)| *r == role)
            .map(|(_, c)| c.bleu)
    };
    let no_noise = bleu_for(AblationRole::NoNoise);
    let all_noise = bleu_for(AblationRole::AllNoise);
    let mut conditions = Vec::with_capacity(scored.len());
    for (role, condition) in scored {
        let baseline = match role {
            AblationRole::AddOne(_) => {
                if no_noise.is_none() {
                    failures.push(ConditionFailure {
                        name: condition.meta.name.clone(),
                        error: Error::MissingBaseline.to_string(),
                    });
                }
                no_noise
            }
            AblationRole::RemoveOne(_) => {
                if all_noise.is_none() {
                    failures.push(ConditionFailure {
                        name: condition.meta.name.clone(),
                        error: Error::MissingBaseline.to_string(),
                    });
                }
                all_noise
            }
            AblationRole::NoNoise | AblationRole::AllNoise => None,
        };
        conditions.push(match baseline {
            Some(b) => condition.with_baseline(b),
            None => condition,
        });
    }
    Ok(RunReport {
        conditions,
        failures,
    })
}

/// The synthetic degradation harness: noise the test corpus itself with
/// `clean = 1 - p` mixtures, translate, and score. On the copy task
/// (references equal the clean source, copy backend) BLEU starts at 100
/// for p = 0 and degrades as p rises. All conditions share `base_seed`,
/// so the set of noised tokens grows monotonically with p.
pub fn run_degradation_sweep(
    test: &[String],
    references: &[String],
    noise_probabilities: &[f64],
    base_seed: u64,
    alphabet: &Alphabet,
    backend: &TranslatorBackend,
) -> Result<RunReport> {
    check_aligned(test, references)?;
    backend.probe(&test[0])?;

    let mut conditions = Vec::new();
    let mut failures = Vec::new();
    let mut baseline: Option<f64> = None;
    for &p in noise_probabilities {
        let mixture = NoiseMixture::equal_split(p)?;
        let name = format!("synthetic {:.2}%", p * 100.0);
        let plan = NoisingPlan::new(&name, mixture, base_seed);
        let noised = noise_corpus(test, &plan, alphabet);
        let env = [
            ("ORTHONOISE_CONDITION".to_string(), name.clone()),
            ("ORTHONOISE_MIXTURE".to_string(), plan.mixture.to_string()),
            ("ORTHONOISE_SEED".to_string(), base_seed.to_string()),
        ];
        let outcome = backend
            .translate_with_env(&noised, &env)
            .and_then(|translated| {
                let mut meta = ConditionMeta::new(&name, base_seed, backend.identity_string());
                meta.noise_probability = Some(p);
                meta.mixture = Some(plan.mixture.to_string());
                score_condition(&translated, references, meta, None)
            });
        match outcome {
            Ok(mut scored) => {
                if baseline.is_none() {
                    baseline = Some(scored.bleu);
                }
                scored = scored.with_baseline(baseline.unwrap());
                conditions.push(scored);
            }
            Err(e) => failures.push(ConditionFailure {
                name,
                error: e.to_string(),
            }),
        }
    }
    Ok(RunReport {
        conditions,
        failures,
    })
}
