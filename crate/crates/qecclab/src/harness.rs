//! Deterministic Monte Carlo word-error-rate engine.
//!
//! Trials are embarrassingly parallel: every trial derives its own RNG
//! substream from `(master_seed, trial_index)` and the only shared state
//! is a commutative error count, so a record is bit-identical across
//! reruns and worker counts. Runs proceed in fixed-size batches until the
//! stopping rule (at least `min_errors` word errors, or `max_trials`) is
//! met.

use crate::channels::{sample_error, PauliChannelParams};
use crate::codes::StabilizerCode;
use crate::error::Result;
use crate::info::cta_inverse;
use crate::stochastic::{gamma_realization, TvPreset};
use crate::toric::{DecodeOutcome, ToricCode};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::io::Write;

/// Schema tag written at the top of every results file.
pub const SCHEMA_HEADER: &str = "# qecc-lab v1";

/// splitmix64 step, used to expand seeds into independent substreams.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent RNG for one trial of one experiment.
pub fn trial_rng(master_seed: u64, trial: u64) -> ChaCha8Rng {
    let mut state = master_seed ^ 0xD1B5_4A32_D192_ED03u64.wrapping_mul(trial.wrapping_add(1));
    let mut seed = [0u8; 32];
    for chunk in seed.chunks_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(seed)
}

/// What counts as a word error.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorRule {
    /// Failure only when the residual leaves the stabilizer group.
    Degenerate,
    /// Failure whenever the physical correction differs from the error.
    PhysicalExact,
}

/// Decoder under test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FiveQubitDecoder {
    Lookup,
    Dqmld,
}

/// One Monte Carlo task: a code plus its decoder.
#[derive(Clone, Debug)]
pub enum DecoderTask {
    Toric { d: usize },
    FiveQubit { decoder: FiveQubitDecoder },
}

/// Stopping rule for a WER run.
#[derive(Clone, Copy, Debug)]
pub struct StopRule {
    pub min_errors: u64,
    pub max_trials: u64,
    /// Trials per scheduling batch; results do not depend on it.
    pub batch: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule {
            min_errors: 100,
            max_trials: 100_000_000,
            batch: 10_000,
        }
    }
}

/// One Monte Carlo result row.
#[derive(Clone, Debug, Serialize)]
pub struct WerRecord {
    /// Channel kind, e.g. `depolarizing`, `tv-cta`, `markov`.
    pub kind: String,
    /// Defining channel point: depolarizing `p` (or `γ` where noted).
    pub param: f64,
    /// Coefficient of variation of `T1` for time-varying runs.
    pub cv: Option<f64>,
    /// Preset name for time-varying runs.
    pub preset: Option<String>,
    /// Markov correlation parameter, when memory is simulated.
    pub mu: Option<f64>,
    pub trials: u64,
    pub word_errors: u64,
    /// Word errors under the exact-physical-match rule, always tracked.
    pub physical_errors: u64,
    pub wer: f64,
    /// 95% normal-approximation confidence half-width.
    pub ci_halfwidth: f64,
    pub master_seed: u64,
}

impl WerRecord {
    fn from_counts(kind: &str, param: f64, trials: u64, word_errors: u64, physical_errors: u64, seed: u64) -> Self {
        let wer = word_errors as f64 / trials as f64;
        let ci = 1.96 * (wer * (1.0 - wer) / trials as f64).sqrt();
        WerRecord {
            kind: kind.to_string(),
            param,
            cv: None,
            preset: None,
            mu: None,
            trials,
            word_errors,
            physical_errors,
            wer,
            ci_halfwidth: ci,
            master_seed: seed,
        }
    }

    /// 95% confidence interval `(wer − h, wer + h)` clamped to `[0, 1]`.
    pub fn ci(&self) -> (f64, f64) {
        (
            (self.wer - self.ci_halfwidth).max(0.0),
            (self.wer + self.ci_halfwidth).min(1.0),
        )
    }
}

enum TaskImpl {
    Toric(Box<ToricCode>),
    Five(Box<StabilizerCode>, FiveQubitDecoder),
}

impl DecoderTask {
    fn build(&self) -> Result<TaskImpl> {
        Ok(match self {
            DecoderTask::Toric { d } => TaskImpl::Toric(Box::new(crate::toric::build_toric(*d)?)),
            DecoderTask::FiveQubit { decoder } => {
                TaskImpl::Five(Box::new(crate::codes::five_qubit_code()), *decoder)
            }
        })
    }
}

impl TaskImpl {
    fn n(&self) -> usize {
        match self {
            TaskImpl::Toric(code) => code.n(),
            TaskImpl::Five(code, _) => code.n(),
        }
    }

    /// Decode one sampled error; returns (degenerate word error, physical
    /// mismatch). For DQMLD the channel params double as the decoder prior.
    fn classify(&self, e: &crate::pauli::PauliString, params: &PauliChannelParams) -> (bool, bool) {
        match self {
            TaskImpl::Toric(code) => {
                let correction = code.decode(e).expect("decode");
                let word = code.logical_failure(e, &correction).expect("classify") != DecodeOutcome::Success;
                let physical = *e != correction;
                (word, physical)
            }
            TaskImpl::Five(code, decoder) => {
                let syndrome = code.syndrome(e).expect("syndrome");
                match decoder {
                    FiveQubitDecoder::Lookup => {
                        let rep = code.decode_lookup(&syndrome).expect("lookup");
                        let word = !code.is_degenerate_success(e, rep).expect("membership");
                        (word, e != rep)
                    }
                    FiveQubitDecoder::Dqmld => {
                        let decoded = code.decode_dqmld(&syndrome, params).expect("dqmld");
                        let truth = code.logical_class(e).expect("class");
                        let word = decoded != truth;
                        (word, word)
                    }
                }
            }
        }
    }
}

fn run_batches(
    task: &TaskImpl,
    stop: &StopRule,
    seed: u64,
    channel_for_trial: impl Fn(u64) -> PauliChannelParams + Sync,
) -> (u64, u64, u64) {
    let mut trials = 0u64;
    let mut word_errors = 0u64;
    let mut physical_errors = 0u64;
    while trials < stop.max_trials && word_errors < stop.min_errors {
        let batch = stop.batch.min(stop.max_trials - trials);
        let (w, p) = (trials..trials + batch)
            .into_par_iter()
            .map(|i| {
                let mut rng = trial_rng(seed, i);
                let params = channel_for_trial(i);
                let e = sample_error(&params, task.n(), &mut rng);
                let (word, phys) = task.classify(&e, &params);
                (u64::from(word), u64::from(phys))
            })
            .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
        word_errors += w;
        physical_errors += p;
        trials += batch;
    }
    (trials, word_errors, physical_errors)
}

/// WER of a decoder task over a static Pauli channel.
pub fn run_static_wer(
    task: &DecoderTask,
    params: &PauliChannelParams,
    rule: ErrorRule,
    stop: &StopRule,
    master_seed: u64,
) -> Result<WerRecord> {
    let built = task.build()?;
    let (trials, word, physical) = run_batches(&built, stop, master_seed, |_| *params);
    let errors = match rule {
        ErrorRule::Degenerate => word,
        ErrorRule::PhysicalExact => physical,
    };
    Ok(WerRecord::from_counts("depolarizing", params.error_probability(), trials, errors, physical, master_seed))
}

/// WER of a decoder task over the Markovian Pauli channel with correlation
/// `mu`; errors repeat the previous qubit's operator with probability `mu`.
pub fn run_markov_wer(
    task: &DecoderTask,
    params: &PauliChannelParams,
    mu: f64,
    rule: ErrorRule,
    stop: &StopRule,
    master_seed: u64,
) -> Result<WerRecord> {
    if !(0.0..=1.0).contains(&mu) {
        return Err(crate::error::Error::domain(format!("mu = {mu} outside [0, 1]")));
    }
    let built = task.build()?;
    let n = built.n();
    let mut trials = 0u64;
    let mut word_errors = 0u64;
    let mut physical_errors = 0u64;
    while trials < stop.max_trials && word_errors < stop.min_errors {
        let batch = stop.batch.min(stop.max_trials - trials);
        let (w, p) = (trials..trials + batch)
            .into_par_iter()
            .map(|i| {
                let mut rng = trial_rng(master_seed, i);
                let e = crate::channels::sample_markov_error(params, mu, n, &mut rng).expect("valid mu");
                let (word, phys) = built.classify(&e, params);
                (u64::from(word), u64::from(phys))
            })
            .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
        word_errors += w;
        physical_errors += p;
        trials += batch;
    }
    let errors = match rule {
        ErrorRule::Degenerate => word_errors,
        ErrorRule::PhysicalExact => physical_errors,
    };
    let mut rec = WerRecord::from_counts("markov", params.error_probability(), trials, errors, physical_errors, master_seed);
    rec.mu = Some(mu);
    Ok(rec)
}

/// WER over the time-varying Clifford-twirled channel: each block draws a
/// fresh `T1(ω)` through the preset, converts the nominal depolarizing
/// probability to a damping parameter and back, and decodes at the
/// realized probability.
pub fn run_tv_wer(
    task: &DecoderTask,
    p_grid: &[f64],
    preset: &TvPreset,
    rule: ErrorRule,
    stop: &StopRule,
    master_seed: u64,
) -> Result<Vec<WerRecord>> {
    let built = task.build()?;
    let dist = preset.t1_dist()?;
    let mut out = Vec::with_capacity(p_grid.len());
    for (point, &p) in p_grid.iter().enumerate() {
        let gamma_nominal = cta_inverse(p)?;
        crate::stochastic::check_gamma_nominal(gamma_nominal)?;
        let point_seed = master_seed ^ (0x5157_BD01_3A6C_22C9u64.wrapping_mul(point as u64 + 1));
        let (trials, word, physical) = run_batches(&built, stop, point_seed, |trial| {
            // one channel realization per block, shared by all qubits
            let mut rng = trial_rng(point_seed ^ 0xB10C_0000_0000_0000, trial);
            let t1 = dist.sample(&mut rng);
            let gamma = gamma_realization(gamma_nominal, dist.mu, t1);
            let p_block = crate::channels::cta(gamma, 0.0).expect("gamma in range");
            PauliChannelParams::depolarizing(p_block.min(0.75)).expect("valid depolarizing")
        });
        let errors = match rule {
            ErrorRule::Degenerate => word,
            ErrorRule::PhysicalExact => physical,
        };
        let mut rec = WerRecord::from_counts("tv-cta", p, trials, errors, physical, master_seed);
        rec.cv = Some(dist.sigma / dist.mu);
        rec.preset = Some(preset.name.clone());
        out.push(rec);
    }
    Ok(out)
}

/// WER(p̂) sensitivity sweep on the five-qubit DQMLD testbed: the channel
/// samples at `p_true` while the decoder's prior is pinned to each `p̂`.
/// Every grid point replays the same `blocks` error streams.
pub fn mismatch_sweep(
    code: &StabilizerCode,
    p_true: f64,
    p_hat_grid: &[f64],
    blocks: u64,
    master_seed: u64,
) -> Result<Vec<WerRecord>> {
    let channel = PauliChannelParams::depolarizing(p_true)?;
    let mut out = Vec::with_capacity(p_hat_grid.len());
    for &p_hat in p_hat_grid {
        let prior = PauliChannelParams::depolarizing(p_hat)?;
        let errors: u64 = (0..blocks)
            .into_par_iter()
            .map(|i| {
                let mut rng = trial_rng(master_seed, i);
                let e = sample_error(&channel, code.n(), &mut rng);
                let syndrome = code.syndrome(&e).expect("syndrome");
                let decoded = code.decode_dqmld(&syndrome, &prior).expect("dqmld");
                let truth = code.logical_class(&e).expect("class");
                u64::from(decoded != truth)
            })
            .sum();
        let mut rec = WerRecord::from_counts("mismatch", p_hat, blocks, errors, errors, master_seed);
        rec.mu = None;
        out.push(rec);
    }
    Ok(out)
}

/// Append records as CSV with the fixed v1 header.
pub fn write_csv<W: Write>(mut w: W, records: &[WerRecord]) -> Result<()> {
    writeln!(w, "{SCHEMA_HEADER}")?;
    writeln!(
        w,
        "kind,param,cv,preset,mu,trials,word_errors,physical_errors,wer,ci_halfwidth,master_seed"
    )?;
    for r in records {
        let opt = |v: &Option<f64>| v.map(|x| format!("{x:.17e}")).unwrap_or_default();
        writeln!(
            w,
            "{},{:.17e},{},{},{},{},{},{},{:.17e},{:.17e},{}",
            r.kind,
            r.param,
            opt(&r.cv),
            r.preset.clone().unwrap_or_default(),
            opt(&r.mu),
            r.trials,
            r.word_errors,
            r.physical_errors,
            r.wer,
            r.ci_halfwidth,
            r.master_seed
        )?;
    }
    Ok(())
}

/// Mirror records as JSON lines under the same schema version.
pub fn write_jsonl<W: Write>(mut w: W, records: &[WerRecord]) -> Result<()> {
    writeln!(w, "{SCHEMA_HEADER}")?;
    for r in records {
        writeln!(w, "{}", serde_json::to_string(r)?)?;
    }
    Ok(())
}
