//! Batch front end: every analysis as a subcommand with deterministic
//! seeding and CSV/JSON output.
//!
//! Exit codes: 2 for usage errors (clap), 1 for numerical domain errors
//! (the message names the violated precondition), 0 otherwise.

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use qecclab::channels::PauliChannelParams;
use qecclab::codes::five_qubit_code;
use qecclab::distances::{
    adjusted_boxplot, diamond_ad, diamond_ad_twirled, diamond_pauli, diamond_pd, mean_diamond_tv,
    TvDiamondKind,
};
use qecclab::estimation::{
    averaged_wer, cramer_rao_var, fisher, online_decode, OnlineChannelKind, Probe,
    SensitivityCurve,
};
use qecclab::harness::{
    mismatch_sweep, run_markov_wer, run_static_wer, run_tv_wer, trial_rng, write_csv, write_jsonl,
    DecoderTask, ErrorRule, FiveQubitDecoder, StopRule, WerRecord, SCHEMA_HEADER,
};
use qecclab::info::{
    capacity_ad, capacity_pd, depolarizing_noise_limit, hashing_bound, noise_limit, outage_tvad,
    ChannelFamily,
};
use qecclab::interleaver::{
    dispersion, jpl, random_interleaver, s_random, spread, welch_costas, Permutation,
};
use qecclab::stochastic::{
    builtin_presets, preset_by_name, simulate_t1_series, tv_gamma_draw, TruncGauss,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::io::Write;
use std::path::PathBuf;

/// Seed used when neither `--seed` nor `QECCLAB_SEED` is given, so bare
/// runs stay reproducible.
const DEFAULT_SEED: u64 = 0x00C0_FFEE;

#[derive(Parser)]
#[command(name = "qecclab", version, about = "Quantum channel and QECC analysis workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: GlobalArgs,
}

#[derive(Args, Clone)]
struct GlobalArgs {
    /// Master seed; overrides the QECCLAB_SEED environment variable.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (results are identical for any count).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output encoding for tabular results.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum CapacityKind {
    Ad,
    Pd,
    Hashing,
    Adpta,
    Adcta,
}

#[derive(Clone, Copy, ValueEnum)]
enum LimitKind {
    Ad,
    Adpta,
    Adcta,
    Depolarizing,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutageKind {
    Ad,
    Adpta,
    Adcta,
}

#[derive(Clone, Copy, ValueEnum)]
enum DiamondKind {
    Pauli,
    Ad,
    Pd,
    Twirled,
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleArg {
    Degenerate,
    Physical,
}

impl RuleArg {
    fn rule(self) -> ErrorRule {
        match self {
            RuleArg::Degenerate => ErrorRule::Degenerate,
            RuleArg::Physical => ErrorRule::PhysicalExact,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DecoderArg {
    Lookup,
    Dqmld,
}

#[derive(Clone, Copy, ValueEnum)]
enum InterleaverKind {
    Random,
    SRandom,
    WelchCostas,
    Jpl,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProbeArg {
    Pure,
    Epr,
}

impl ProbeArg {
    fn probe(self) -> Probe {
        match self {
            ProbeArg::Pure => Probe::Pure,
            ProbeArg::Epr => Probe::Epr,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Capacity / hashing-bound curves; with --rq also the noise limit.
    Capacity {
        #[arg(long, value_enum)]
        kind: CapacityKind,
        /// Rate at which to report the noise limit.
        #[arg(long)]
        rq: Option<f64>,
        #[arg(long, default_value_t = 121)]
        points: usize,
    },
    /// Noise limit gamma* (or p* for the depolarizing family) at a rate.
    NoiseLimit {
        #[arg(long)]
        rq: f64,
        #[arg(long, value_enum)]
        kind: LimitKind,
    },
    /// Closed-form quantum (hashing) outage curves, optionally with the
    /// Monte Carlo counting oracle alongside.
    Outage {
        #[arg(long)]
        rq: f64,
        /// Coefficient of variation of T1; 0 selects the step-function limit.
        #[arg(long)]
        cv: f64,
        #[arg(long, value_enum, default_value_t = OutageKind::Ad)]
        kind: OutageKind,
        #[arg(long, default_value_t = 0.01)]
        gamma_min: f64,
        #[arg(long, default_value_t = 0.42)]
        gamma_max: f64,
        #[arg(long, default_value_t = 20)]
        points: usize,
        /// Also estimate each point by counting T1 draws below threshold.
        #[arg(long)]
        oracle_draws: Option<u64>,
    },
    /// Pairwise diamond distances, or the TV mean + adjusted boxplot.
    Diamond {
        #[arg(long, value_enum)]
        kind: DiamondKind,
        /// First channel parameter (gamma, lambda or depolarizing p).
        #[arg(long, allow_hyphen_values = true)]
        a: Option<f64>,
        /// Second channel parameter.
        #[arg(long, allow_hyphen_values = true)]
        b: Option<f64>,
        /// Run the time-varying analysis at this nominal gamma.
        #[arg(long)]
        tv_gamma: Option<f64>,
        #[arg(long)]
        preset: Option<String>,
        /// Coefficient of variation when no preset is given.
        #[arg(long)]
        cv: Option<f64>,
        #[arg(long, default_value_t = 20_000)]
        rounds: usize,
    },
    /// T1 fluctuation model: draw statistics or a simulated series.
    Stochastic {
        #[arg(long)]
        preset: String,
        /// Number of per-block draws to summarize.
        #[arg(long)]
        draws: Option<u64>,
        /// Emit a simulated T1(t) series of this many samples.
        #[arg(long)]
        series: Option<usize>,
        /// Sampling rate for --series, in Hz.
        #[arg(long, default_value_t = 0.01)]
        fs: f64,
        /// Report one gamma(omega) draw distribution at this nominal gamma.
        #[arg(long)]
        gamma: Option<f64>,
    },
    /// Toric-code WER over static or time-varying depolarizing channels.
    ToricWer {
        #[arg(long, default_value_t = 3)]
        d: usize,
        /// Depolarizing probabilities (repeatable).
        #[arg(long = "p", required = true)]
        ps: Vec<f64>,
        /// Decode over the TVADCTA channel of this preset instead.
        #[arg(long)]
        preset: Option<String>,
        #[arg(long, value_enum, default_value_t = RuleArg::Degenerate)]
        rule: RuleArg,
        #[arg(long, default_value_t = 100)]
        min_errors: u64,
        #[arg(long, default_value_t = 10_000_000)]
        max_trials: u64,
    },
    /// Five-qubit code WER (lookup or DQMLD decoding, optional memory).
    FivequbitWer {
        #[arg(long = "p", required = true)]
        ps: Vec<f64>,
        #[arg(long, value_enum, default_value_t = DecoderArg::Lookup)]
        decoder: DecoderArg,
        /// Markov correlation parameter for channels with memory.
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long, value_enum, default_value_t = RuleArg::Degenerate)]
        rule: RuleArg,
        #[arg(long, default_value_t = 100)]
        min_errors: u64,
        #[arg(long, default_value_t = 10_000_000)]
        max_trials: u64,
    },
    /// Decoder sensitivity to a mismatched depolarizing prior.
    Mismatch {
        #[arg(long)]
        p_true: f64,
        #[arg(long, default_value_t = 0.01)]
        grid_min: f64,
        #[arg(long, default_value_t = 0.45)]
        grid_max: f64,
        #[arg(long, default_value_t = 12)]
        points: usize,
        #[arg(long, default_value_t = 20_000)]
        blocks: u64,
    },
    /// Build an interleaver, measure it, or ingest one from a file.
    Interleaver {
        #[arg(long, value_enum)]
        kind: Option<InterleaverKind>,
        #[arg(long)]
        n: Option<usize>,
        /// Spread parameter for s-random.
        #[arg(long)]
        s: Option<usize>,
        /// Primitive element for welch-costas.
        #[arg(long)]
        alpha: Option<u64>,
        /// Row factor for jpl.
        #[arg(long, default_value_t = 8)]
        k1: usize,
        /// Print spread and dispersion.
        #[arg(long)]
        metrics: bool,
        /// Write the permutation in the line-oriented file format.
        #[arg(long)]
        emit: bool,
        /// Read a permutation from a file instead of constructing one.
        #[arg(long)]
        load: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        max_restarts: u32,
    },
    /// Channel identification tools.
    #[command(subcommand)]
    Estimate(EstimateCommand),
    /// List the built-in T1 fluctuation presets as JSON.
    Presets,
}

#[derive(Subcommand)]
enum EstimateCommand {
    /// Fisher information and Cramér–Rao bound at a depolarizing p.
    Fisher {
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 1)]
        probes: u64,
    },
    /// Average a tabulated WER(p_hat) curve over the estimator density.
    AveragedWer {
        /// Two-column CSV (p_hat, wer).
        #[arg(long)]
        curve: PathBuf,
        #[arg(long)]
        p: f64,
        #[arg(long, value_enum, default_value_t = ProbeArg::Pure)]
        probe: ProbeArg,
        #[arg(long)]
        probes: u64,
    },
    /// Online decoder-coupled estimation on the five-qubit testbed.
    Online {
        #[arg(long)]
        p: f64,
        /// Channel asymmetry; enables the componentwise estimator.
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 10_000)]
        blocks: u64,
        /// Initial estimate; defaults to the code's hashing limit.
        #[arg(long)]
        init: Option<f64>,
        #[arg(long, default_value_t = 32)]
        max_iters: u32,
    },
}

struct Output {
    global: GlobalArgs,
}

impl Output {
    fn writer(&self) -> anyhow::Result<Box<dyn Write>> {
        Ok(match &self.global.out {
            Some(path) => Box::new(std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?),
            None => Box::new(std::io::stdout().lock()),
        })
    }

    /// Write a generic numeric table in the selected encoding.
    fn table(&self, columns: &[&str], rows: &[Vec<f64>]) -> anyhow::Result<()> {
        let mut w = self.writer()?;
        match self.global.format {
            Format::Csv => {
                writeln!(w, "{SCHEMA_HEADER}")?;
                writeln!(w, "{}", columns.join(","))?;
                for row in rows {
                    let cells: Vec<String> = row.iter().map(|v| format!("{v:.11e}")).collect();
                    writeln!(w, "{}", cells.join(","))?;
                }
            }
            Format::Json => {
                writeln!(w, "{SCHEMA_HEADER}")?;
                for row in rows {
                    // mirror the CSV rounding so both encodings carry
                    // bit-identical numbers
                    let obj: serde_json::Map<String, serde_json::Value> = columns
                        .iter()
                        .zip(row)
                        .map(|(c, v)| {
                            let rounded: f64 = format!("{v:.11e}").parse().expect("own format");
                            (c.to_string(), serde_json::json!(rounded))
                        })
                        .collect();
                    writeln!(w, "{}", serde_json::Value::Object(obj))?;
                }
            }
        }
        Ok(())
    }

    fn records(&self, records: &[WerRecord]) -> anyhow::Result<()> {
        let w = self.writer()?;
        match self.global.format {
            Format::Csv => write_csv(w, records)?,
            Format::Json => write_jsonl(w, records)?,
        }
        Ok(())
    }

    fn json_value(&self, value: &serde_json::Value) -> anyhow::Result<()> {
        let mut w = self.writer()?;
        writeln!(w, "{}", serde_json::to_string_pretty(value)?)?;
        Ok(())
    }

    fn text(&self, text: &str) -> anyhow::Result<()> {
        let mut w = self.writer()?;
        write!(w, "{text}")?;
        Ok(())
    }
}

fn summary(line: impl AsRef<str>) {
    eprintln!("{}", line.as_ref());
}

fn resolve_seed(flag: Option<u64>) -> u64 {
    flag.or_else(|| {
        std::env::var("QECCLAB_SEED")
            .ok()
            .and_then(|v| v.parse().ok())
    })
    .unwrap_or(DEFAULT_SEED)
}

fn grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points <= 1 {
        return vec![lo];
    }
    (0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .collect()
}

fn main() {
    let cli = Cli::parse();
    let seed = resolve_seed(cli.global.seed);
    let workers = cli.global.workers.unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool");
    let out = Output {
        global: cli.global.clone(),
    };
    let result = pool.install(|| run(cli.command, seed, &out));
    if let Err(err) = result {
        eprintln!("error: {err}");
        std::process::exit(1);
    }
}

fn run(command: Command, seed: u64, out: &Output) -> anyhow::Result<()> {
    match command {
        Command::Capacity { kind, rq, points } => {
            let (label, curve): (&str, Vec<Vec<f64>>) = match kind {
                CapacityKind::Ad => (
                    "gamma,c_q",
                    grid(0.0, 0.6, points).iter().map(|&g| vec![g, capacity_ad(g)]).collect(),
                ),
                CapacityKind::Pd => (
                    "lambda,c_q",
                    grid(0.0, 1.0, points).iter().map(|&l| vec![l, capacity_pd(l)]).collect(),
                ),
                CapacityKind::Hashing => (
                    "p,c_h",
                    grid(0.0, 0.5, points)
                        .iter()
                        .map(|&p| {
                            let params = PauliChannelParams::depolarizing(p)?;
                            Ok(vec![p, hashing_bound(&params)])
                        })
                        .collect::<qecclab::Result<Vec<_>>>()?,
                ),
                CapacityKind::Adpta => (
                    "gamma,c_h",
                    grid(0.0, 0.9, points)
                        .iter()
                        .map(|&g| vec![g, ChannelFamily::AdPta.rate_limit(g)])
                        .collect(),
                ),
                CapacityKind::Adcta => (
                    "gamma,c_h",
                    grid(0.0, 0.9, points)
                        .iter()
                        .map(|&g| vec![g, ChannelFamily::AdCta.rate_limit(g)])
                        .collect(),
                ),
            };
            let cols: Vec<&str> = label.split(',').collect();
            out.table(&cols, &curve)?;
            match (kind, rq) {
                (CapacityKind::Ad, Some(rq)) => {
                    let g = noise_limit(rq, ChannelFamily::Ad)?;
                    summary(format!("capacity ad: {} points; gamma*({rq}) = {g:.6}", curve.len()));
                }
                (CapacityKind::Adpta, Some(rq)) => {
                    let g = noise_limit(rq, ChannelFamily::AdPta)?;
                    summary(format!("capacity adpta: {} points; gamma*({rq}) = {g:.6}", curve.len()));
                }
                (CapacityKind::Adcta, Some(rq)) => {
                    let g = noise_limit(rq, ChannelFamily::AdCta)?;
                    summary(format!("capacity adcta: {} points; gamma*({rq}) = {g:.6}", curve.len()));
                }
                (CapacityKind::Hashing, Some(rq)) => {
                    let p = depolarizing_noise_limit(rq)?;
                    summary(format!("capacity hashing: {} points; p*({rq}) = {p:.6}", curve.len()));
                }
                _ => summary(format!("capacity curve: {} points", curve.len())),
            }
        }
        Command::NoiseLimit { rq, kind } => {
            let (name, value) = match kind {
                LimitKind::Ad => ("gamma*_AD", noise_limit(rq, ChannelFamily::Ad)?),
                LimitKind::Adpta => ("gamma*_ADPTA", noise_limit(rq, ChannelFamily::AdPta)?),
                LimitKind::Adcta => ("gamma*_ADCTA", noise_limit(rq, ChannelFamily::AdCta)?),
                LimitKind::Depolarizing => ("p*", depolarizing_noise_limit(rq)?),
            };
            out.table(&["rq", "limit"], &[vec![rq, value]])?;
            summary(format!("{name}({rq}) = {value:.6}"));
        }
        Command::Outage {
            rq,
            cv,
            kind,
            gamma_min,
            gamma_max,
            points,
            oracle_draws,
        } => {
            let family = match kind {
                OutageKind::Ad => ChannelFamily::Ad,
                OutageKind::Adpta => ChannelFamily::AdPta,
                OutageKind::Adcta => ChannelFamily::AdCta,
            };
            let gamma_star = noise_limit(rq, family)?;
            let gammas = grid(gamma_min, gamma_max, points);
            let closed_at = |g: f64| -> anyhow::Result<f64> {
                if cv == 0.0 {
                    // step-function limit of vanishing variation
                    return Ok(if g < gamma_star {
                        0.0
                    } else if g > gamma_star {
                        1.0
                    } else {
                        0.5
                    });
                }
                Ok(match kind {
                    OutageKind::Ad => outage_tvad(rq, g, cv)?,
                    OutageKind::Adpta => qecclab::info::hashing_outage(rq, g, cv, qecclab::info::Twirl::Pta)?,
                    OutageKind::Adcta => qecclab::info::hashing_outage(rq, g, cv, qecclab::info::Twirl::Cta)?,
                })
            };
            let mut rows = Vec::with_capacity(gammas.len());
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for &g in &gammas {
                let p_out = closed_at(g)?;
                match oracle_draws {
                    None => rows.push(vec![g, p_out]),
                    Some(draws) => {
                        let dist = TruncGauss::nonnegative(1.0, cv)?;
                        let t1_star = (1.0 - g).ln() / (1.0 - gamma_star).ln();
                        let mut hits = 0u64;
                        for _ in 0..draws {
                            if dist.sample(&mut rng) < t1_star {
                                hits += 1;
                            }
                        }
                        rows.push(vec![g, p_out, hits as f64 / draws as f64]);
                    }
                }
            }
            let cols: &[&str] = if oracle_draws.is_some() {
                &["gamma", "p_out", "p_out_oracle"]
            } else {
                &["gamma", "p_out"]
            };
            out.table(cols, &rows)?;
            summary(format!(
                "outage {kind:?}: rq = {rq}, cv = {cv}, gamma* = {gamma_star:.6}, {} points",
                rows.len(),
                kind = match kind {
                    OutageKind::Ad => "ad",
                    OutageKind::Adpta => "adpta",
                    OutageKind::Adcta => "adcta",
                }
            ));
        }
        Command::Diamond {
            kind,
            a,
            b,
            tv_gamma,
            preset,
            cv,
            rounds,
        } => match tv_gamma {
            None => {
                let (a, b) = match (a, b) {
                    (Some(a), Some(b)) => (a, b),
                    _ => bail!("domain error: pairwise mode needs both --a and --b"),
                };
                let d = match kind {
                    DiamondKind::Pauli => diamond_pauli(
                        &PauliChannelParams::depolarizing(a)?,
                        &PauliChannelParams::depolarizing(b)?,
                    ),
                    DiamondKind::Ad => diamond_ad(a, b)?,
                    DiamondKind::Pd => diamond_pd(a, b)?,
                    DiamondKind::Twirled => diamond_ad_twirled(a, b)?,
                };
                out.table(&["a", "b", "distance"], &[vec![a, b, d]])?;
                summary(format!("diamond distance = {d:.12}"));
            }
            Some(gamma) => {
                let dist = match (&preset, cv) {
                    (Some(name), _) => preset_by_name(name)?.t1_dist()?,
                    (None, Some(cv)) => TruncGauss::nonnegative(1.0, cv)?,
                    (None, None) => bail!("domain error: TV mode needs --preset or --cv"),
                };
                let tv_kind = match kind {
                    DiamondKind::Ad => TvDiamondKind::Ad,
                    DiamondKind::Twirled | DiamondKind::Pauli => TvDiamondKind::AdTwirled,
                    DiamondKind::Pd => bail!("domain error: TV analysis covers ad and twirled kinds"),
                };
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let (mean, samples) = mean_diamond_tv(gamma, &dist, tv_kind, rounds, &mut rng)?;
                let boxplot = adjusted_boxplot(&samples)?;
                out.json_value(&serde_json::json!({
                    "gamma": gamma,
                    "rounds": rounds,
                    "mean": mean,
                    "boxplot": boxplot,
                }))?;
                summary(format!(
                    "TV diamond: mean = {mean:.6}, MC = {:.4}, {} outliers / {rounds}",
                    boxplot.medcouple,
                    boxplot.outliers.len()
                ));
            }
        },
        Command::Stochastic {
            preset,
            draws,
            series,
            fs,
            gamma,
        } => {
            let p = preset_by_name(&preset)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            if let Some(n) = series {
                let data = simulate_t1_series(&p, fs, n, &mut rng)?;
                let rows: Vec<Vec<f64>> = data.iter().enumerate().map(|(i, &v)| vec![i as f64 / fs, v]).collect();
                out.table(&["t_seconds", "t1_us"], &rows)?;
                summary(format!("series: {n} samples of {} at {fs} Hz", p.name));
            } else {
                let n = draws.unwrap_or(100_000);
                let dist = p.t1_dist()?;
                let mut values = Vec::with_capacity(n as usize);
                for _ in 0..n {
                    match gamma {
                        Some(g) => values.push(tv_gamma_draw(g, &dist, &mut rng)?),
                        None => values.push(dist.sample(&mut rng)),
                    }
                }
                let mean = values.iter().sum::<f64>() / n as f64;
                let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
                let (lo, hi) = values
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
                out.table(
                    &["draws", "mean", "sd", "min", "max"],
                    &[vec![n as f64, mean, var.sqrt(), lo, hi]],
                )?;
                let what = if gamma.is_some() { "gamma(omega)" } else { "T1(omega)" };
                summary(format!(
                    "{what} draws from {}: mean {mean:.4}, sd {:.4}",
                    p.name,
                    var.sqrt()
                ));
            }
        }
        Command::ToricWer {
            d,
            ps,
            preset,
            rule,
            min_errors,
            max_trials,
        } => {
            let task = DecoderTask::Toric { d };
            let stop = StopRule {
                min_errors,
                max_trials,
                ..StopRule::default()
            };
            let records = match preset {
                None => ps
                    .iter()
                    .map(|&p| {
                        run_static_wer(&task, &PauliChannelParams::depolarizing(p)?, rule.rule(), &stop, seed)
                    })
                    .collect::<qecclab::Result<Vec<_>>>()?,
                Some(name) => run_tv_wer(&task, &ps, &preset_by_name(&name)?, rule.rule(), &stop, seed)?,
            };
            out.records(&records)?;
            let brief: Vec<String> = records.iter().map(|r| format!("p={}: {:.3e}", r.param, r.wer)).collect();
            summary(format!("toric d={d} WER: {}", brief.join(", ")));
        }
        Command::FivequbitWer {
            ps,
            decoder,
            mu,
            rule,
            min_errors,
            max_trials,
        } => {
            let task = DecoderTask::FiveQubit {
                decoder: match decoder {
                    DecoderArg::Lookup => FiveQubitDecoder::Lookup,
                    DecoderArg::Dqmld => FiveQubitDecoder::Dqmld,
                },
            };
            let stop = StopRule {
                min_errors,
                max_trials,
                ..StopRule::default()
            };
            let records = ps
                .iter()
                .map(|&p| {
                    let params = PauliChannelParams::depolarizing(p)?;
                    match mu {
                        None => run_static_wer(&task, &params, rule.rule(), &stop, seed),
                        Some(mu) => run_markov_wer(&task, &params, mu, rule.rule(), &stop, seed),
                    }
                })
                .collect::<qecclab::Result<Vec<_>>>()?;
            out.records(&records)?;
            let brief: Vec<String> = records.iter().map(|r| format!("p={}: {:.3e}", r.param, r.wer)).collect();
            summary(format!("five-qubit WER: {}", brief.join(", ")));
        }
        Command::Mismatch {
            p_true,
            grid_min,
            grid_max,
            points,
            blocks,
        } => {
            let code = five_qubit_code();
            let grid = grid(grid_min, grid_max, points);
            let records = mismatch_sweep(&code, p_true, &grid, blocks, seed)?;
            out.records(&records)?;
            let best = records
                .iter()
                .min_by(|a, b| a.wer.partial_cmp(&b.wer).expect("no NaN"))
                .expect("nonempty");
            summary(format!(
                "mismatch sweep at p_true = {p_true}: min WER {:.4} at p_hat = {:.3}",
                best.wer, best.param
            ));
        }
        Command::Interleaver {
            kind,
            n,
            s,
            alpha,
            k1,
            metrics,
            emit,
            load,
            max_restarts,
        } => {
            let perm = match (&load, kind) {
                (Some(path), _) => {
                    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                    Permutation::from_file_string(&text)?
                }
                (None, Some(kind)) => {
                    let n = n.ok_or_else(|| anyhow::anyhow!("domain error: --n is required to construct"))?;
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    match kind {
                        InterleaverKind::Random => random_interleaver(n, &mut rng),
                        InterleaverKind::SRandom => {
                            let s = s.ok_or_else(|| anyhow::anyhow!("domain error: s-random needs --s"))?;
                            s_random(n, s, &mut rng, max_restarts)?
                        }
                        InterleaverKind::WelchCostas => {
                            let alpha = alpha.ok_or_else(|| anyhow::anyhow!("domain error: welch-costas needs --alpha"))?;
                            welch_costas(n, alpha)?
                        }
                        InterleaverKind::Jpl => jpl(n, k1)?,
                    }
                }
                (None, None) => bail!("domain error: give --kind to construct or --load to ingest"),
            };
            if emit {
                out.text(&perm.to_file_string())?;
            }
            if metrics || !emit {
                let sp = spread(&perm);
                let ds = dispersion(&perm);
                if !emit {
                    out.table(&["n", "spread", "dispersion"], &[vec![perm.len() as f64, sp as f64, ds]])?;
                }
                summary(format!("interleaver N = {}: spread = {sp}, dispersion = {ds:.4}", perm.len()));
            } else {
                summary(format!("interleaver N = {} emitted", perm.len()));
            }
        }
        Command::Estimate(cmd) => run_estimate(cmd, seed, out)?,
        Command::Presets => {
            out.json_value(&serde_json::to_value(builtin_presets())?)?;
            summary("4 built-in presets");
        }
    }
    Ok(())
}

fn run_estimate(cmd: EstimateCommand, seed: u64, out: &Output) -> anyhow::Result<()> {
    match cmd {
        EstimateCommand::Fisher { p, probes } => {
            let pure = fisher(p, Probe::Pure)?;
            let epr = fisher(p, Probe::Epr)?;
            let rows = vec![
                vec![p, probes as f64, pure, cramer_rao_var(p, Probe::Pure, probes)?],
                vec![p, probes as f64, epr, cramer_rao_var(p, Probe::Epr, probes)?],
            ];
            out.table(&["p", "probes", "fisher", "cramer_rao_var"], &rows)?;
            summary(format!("J1({p}) pure = {pure:.6}, epr = {epr:.6}"));
        }
        EstimateCommand::AveragedWer {
            curve,
            p,
            probe,
            probes,
        } => {
            let text = std::fs::read_to_string(&curve).with_context(|| format!("reading {}", curve.display()))?;
            let curve = SensitivityCurve::from_csv(&text)?;
            let value = averaged_wer(&curve, p, probe.probe(), probes)?;
            out.table(&["p", "probes", "averaged_wer"], &[vec![p, probes as f64, value]])?;
            summary(format!("averaged WER at p = {p}, N = {probes}: {value:.6e}"));
        }
        EstimateCommand::Online {
            p,
            alpha,
            blocks,
            init,
            max_iters,
        } => {
            let code = five_qubit_code();
            let channel = match alpha {
                None => PauliChannelParams::depolarizing(p)?,
                Some(a) => PauliChannelParams::from_alpha(p, a)?,
            };
            let kind = match alpha {
                None => OnlineChannelKind::Depolarizing,
                Some(_) => OnlineChannelKind::Pauli,
            };
            let init_p = match init {
                Some(v) => v,
                None => depolarizing_noise_limit(code.k() as f64 / code.n() as f64)?,
            };
            let init_params = PauliChannelParams::depolarizing(init_p)?;
            // the trajectory depends only on the syndrome: solve the 16
            // fixed points once, then stream blocks through them
            let outcomes: Vec<_> = (0..16usize)
                .map(|idx| {
                    let syndrome: Vec<u8> = (0..4).map(|b| (idx >> (3 - b) & 1) as u8).collect();
                    online_decode(&code, &syndrome, init_params, kind, max_iters)
                })
                .collect::<qecclab::Result<_>>()?;
            let mut p_acc = 0.0f64;
            let mut alpha_acc = 0.0f64;
            let mut alpha_count = 0u64;
            let mut word_errors = 0u64;
            for i in 0..blocks {
                let mut rng = trial_rng(seed, i);
                let e = qecclab::channels::sample_error(&channel, code.n(), &mut rng);
                let s = code.syndrome(&e)?;
                let idx = s.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
                let outcome = &outcomes[idx];
                p_acc += outcome.final_params.error_probability();
                let a = outcome.final_params.asymmetry();
                if a.is_finite() {
                    alpha_acc += a;
                    alpha_count += 1;
                }
                if outcome.decoded != code.logical_class(&e)? {
                    word_errors += 1;
                }
            }
            let mean_p = p_acc / blocks as f64;
            let wer = word_errors as f64 / blocks as f64;
            let mut row = vec![p, blocks as f64, mean_p, wer];
            let mut cols = vec!["p_true", "blocks", "mean_p_hat", "wer"];
            if alpha.is_some() {
                cols.push("mean_alpha_hat");
                row.push(alpha_acc / alpha_count.max(1) as f64);
            }
            out.table(&cols, &[row])?;
            summary(format!(
                "online estimation over {blocks} blocks: mean p_hat = {mean_p:.5}, WER = {wer:.4}"
            ));
        }
    }
    Ok(())
}
