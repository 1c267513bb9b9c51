//! Stochastic models of relaxation-time fluctuations.
//!
//! Per-block `T1` realizations are truncated-Gaussian draws; within a block
//! all qubits share one realization (full correlation). The underlying
//! `T1(t)` process is a mean plus two Lorentzian components and white
//! noise, reproducible here as exact first-order autoregressions.

use crate::error::{Error, Result};
use crate::info::q_function;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

/// Gaussian truncated to `[lo, hi]` (either bound may be infinite).
#[derive(Clone, Copy, Debug)]
pub struct TruncGauss {
    pub mu: f64,
    pub sigma: f64,
    pub lo: f64,
    pub hi: f64,
}

impl TruncGauss {
    pub fn new(mu: f64, sigma: f64, lo: f64, hi: f64) -> Result<Self> {
        if sigma < 0.0 || sigma.is_nan() {
            return Err(Error::domain(format!("sigma = {sigma} must be nonnegative")));
        }
        if !(lo < hi) {
            return Err(Error::domain(format!("empty truncation interval [{lo}, {hi}]")));
        }
        Ok(TruncGauss { mu, sigma, lo, hi })
    }

    /// Truncation to `[0, ∞)`, the `T1(ω)` model.
    pub fn nonnegative(mu: f64, sigma: f64) -> Result<Self> {
        TruncGauss::new(mu, sigma, 0.0, f64::INFINITY)
    }

    /// Truncation to `[0, 1]`, the estimator-distribution model.
    pub fn unit_interval(mu: f64, sigma: f64) -> Result<Self> {
        TruncGauss::new(mu, sigma, 0.0, 1.0)
    }

    /// Mass of the untruncated normal inside `[lo, hi]`.
    fn acceptance(&self) -> f64 {
        let a = q_function((self.lo - self.mu) / self.sigma);
        let b = q_function((self.hi - self.mu) / self.sigma);
        a - b
    }

    /// Rejection sampling from the untruncated normal. The presets keep
    /// `mu/sigma >= 3.8`, so acceptance stays above 99.99%.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.sigma == 0.0 {
            return self.mu.clamp(self.lo, self.hi);
        }
        loop {
            let z: f64 = StandardNormal.sample(rng);
            let v = self.mu + self.sigma * z;
            if v >= self.lo && v <= self.hi {
                return v;
            }
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x < self.lo || x > self.hi || self.sigma == 0.0 {
            return 0.0;
        }
        let z = (x - self.mu) / self.sigma;
        let norm = (-0.5 * z * z).exp() / (self.sigma * (2.0 * std::f64::consts::PI).sqrt());
        norm / self.acceptance()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.lo {
            return 0.0;
        }
        if x >= self.hi {
            return 1.0;
        }
        let upper_lo = q_function((self.lo - self.mu) / self.sigma);
        let upper_x = q_function((x - self.mu) / self.sigma);
        (upper_lo - upper_x) / self.acceptance()
    }

    /// Closed-form mean of the truncated normal.
    pub fn mean(&self) -> f64 {
        if self.sigma == 0.0 {
            return self.mu.clamp(self.lo, self.hi);
        }
        let phi = |z: f64| (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let a = (self.lo - self.mu) / self.sigma;
        let b = (self.hi - self.mu) / self.sigma;
        let (phi_a, phi_b) = (
            if a.is_finite() { phi(a) } else { 0.0 },
            if b.is_finite() { phi(b) } else { 0.0 },
        );
        self.mu + self.sigma * (phi_a - phi_b) / self.acceptance()
    }
}

/// Measured fluctuation parameters of one superconducting qubit.
///
/// `mu_t1`/`sigma_t1` are in µs, `h0` in µs²/Hz, the Lorentzian amplitudes
/// `a1`/`a2` in µs and the inverse timescales `inv_tau01`/`inv_tau02` in µHz.
/// `mu_tphi`/`sigma_tphi` (µs) are present only for qubits that are not
/// T1-limited.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TvPreset {
    pub name: String,
    pub mu_t1: f64,
    pub sigma_t1: f64,
    pub h0: f64,
    pub a1: f64,
    pub inv_tau01: f64,
    pub a2: f64,
    pub inv_tau02: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_tphi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_tphi: Option<f64>,
}

impl TvPreset {
    /// Coefficient of variation `σ(T1)/μ(T1)`.
    pub fn cv(&self) -> f64 {
        self.sigma_t1 / self.mu_t1
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("mu_t1", self.mu_t1),
            ("sigma_t1", self.sigma_t1),
            ("h0", self.h0),
            ("a1", self.a1),
            ("inv_tau01", self.inv_tau01),
            ("a2", self.a2),
            ("inv_tau02", self.inv_tau02),
        ] {
            if v <= 0.0 || !v.is_finite() {
                return Err(Error::domain(format!("preset {}: {name} = {v} must be positive", self.name)));
            }
        }
        let cv = self.cv();
        if !(0.0..1.0).contains(&cv) {
            return Err(Error::domain(format!("preset {}: cv = {cv} outside (0, 1)", self.name)));
        }
        Ok(())
    }

    /// Per-block `T1(ω)` distribution.
    pub fn t1_dist(&self) -> Result<TruncGauss> {
        self.validate()?;
        TruncGauss::nonnegative(self.mu_t1, self.sigma_t1)
    }

    /// Draw one block realization `(T1, T2)`. T1-limited presets give
    /// `T2 = 2·T1`; otherwise `Tφ` is drawn independently and `T2` is
    /// assembled via `1/T2 = 1/(2·T1) + 1/Tφ`.
    pub fn sample_times<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(f64, f64)> {
        let t1 = self.t1_dist()?.sample(rng);
        let t2 = match (self.mu_tphi, self.sigma_tphi) {
            (Some(mu), Some(sigma)) => {
                let tphi = TruncGauss::nonnegative(mu, sigma)?.sample(rng);
                1.0 / (1.0 / (2.0 * t1) + 1.0 / tphi)
            }
            _ => 2.0 * t1,
        };
        Ok((t1, t2))
    }
}

/// The four measured qubits, exactly as tabulated.
pub fn builtin_presets() -> Vec<TvPreset> {
    let mk = |name: &str, mu, sigma, h0, a1, it1, a2, it2| TvPreset {
        name: name.to_string(),
        mu_t1: mu,
        sigma_t1: sigma,
        h0,
        a1,
        inv_tau01: it1,
        a2,
        inv_tau02: it2,
        mu_tphi: None,
        sigma_tphi: None,
    };
    vec![
        mk("QA_C5", 44.49, 11.7, 2e-3, 5.2, 142.9, 2.6, 83.3),
        mk("QB_C5", 81.63, 17.01, 1.4e-2, 3.2, 1000.0, 6.6, 90.9),
        mk("QA_C6", 46.64, 10.24, 1.2e-3, 4.5, 333.3, 1.8, 71.4),
        mk("QB_C6", 71.22, 14.31, 5.7e-3, 4.2, 1111.1, 2.2, 76.9),
    ]
}

pub fn preset_by_name(name: &str) -> Result<TvPreset> {
    builtin_presets()
        .into_iter()
        .find(|p| p.name.eq_ignore_ascii_case(name))
        .ok_or_else(|| Error::domain(format!("unknown preset '{name}'")))
}

/// Parse a JSON array of presets (same schema as the built-ins).
pub fn load_presets(json: &str) -> Result<Vec<TvPreset>> {
    let presets: Vec<TvPreset> = serde_json::from_str(json)?;
    for p in &presets {
        p.validate()?;
    }
    Ok(presets)
}

/// Diagnostic: standard deviation implied by integrating the stated PSD,
/// `sqrt(2*A1^2 + 2*A2^2 + h0*bw)` with `bw = max(1/tau0)` in Hz. The
/// tabulated `sigma_t1` is what draws use; this value is reported only for
/// comparison.
pub fn psd_implied_sigma(preset: &TvPreset) -> f64 {
    let bw = (preset.inv_tau01.max(preset.inv_tau02)) * 1e-6; // microhertz -> Hz
    (2.0 * preset.a1 * preset.a1 + 2.0 * preset.a2 * preset.a2 + preset.h0 * bw).sqrt()
}

/// One-sided white-noise PSD level `h0` becomes discrete variance `h0*fs/2`.
fn white_variance(h0: f64, fs: f64) -> f64 {
    h0 * fs / 2.0
}

/// Exact AR(1) recursion for a Lorentzian component: pole `e^{−Δt/τ0}`,
/// stationary variance `2A²`.
struct Lorentzian {
    pole: f64,
    drive_sigma: f64,
    state: f64,
}

impl Lorentzian {
    fn new<R: Rng + ?Sized>(amplitude: f64, tau0: f64, dt: f64, rng: &mut R) -> Self {
        let pole = (-dt / tau0).exp();
        let stationary = 2.0 * amplitude * amplitude;
        let drive_sigma = (stationary * (1.0 - pole * pole)).sqrt();
        // start in the stationary distribution
        let z: f64 = StandardNormal.sample(rng);
        Lorentzian {
            pole,
            drive_sigma,
            state: stationary.sqrt() * z,
        }
    }

    fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> f64 {
        let out = self.state;
        let z: f64 = StandardNormal.sample(rng);
        self.state = self.pole * self.state + self.drive_sigma * z;
        out
    }
}

/// Simulate `n` samples of the `T1(t)` process at sampling rate `fs` Hz:
/// mean plus two Lorentzian components plus white noise.
///
/// Requires `fs > 2·max(1/τ0)` so both Lorentzian corner frequencies are
/// resolved.
pub fn simulate_t1_series<R: Rng + ?Sized>(
    preset: &TvPreset,
    fs: f64,
    n: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    preset.validate()?;
    if fs <= 0.0 || n == 0 {
        return Err(Error::domain(format!("need fs > 0 and n > 0, got fs = {fs}, n = {n}")));
    }
    let bw = preset.inv_tau01.max(preset.inv_tau02) * 1e-6; // Hz
    if fs <= 2.0 * bw {
        return Err(Error::domain(format!(
            "fs = {fs} Hz does not resolve the Lorentzian bandwidth {bw} Hz"
        )));
    }
    let dt = 1.0 / fs;
    let tau01 = 1e6 / preset.inv_tau01; // seconds
    let tau02 = 1e6 / preset.inv_tau02;
    let mut lor1 = Lorentzian::new(preset.a1, tau01, dt, rng);
    let mut lor2 = Lorentzian::new(preset.a2, tau02, dt, rng);
    let white_sigma = white_variance(preset.h0, fs).sqrt();
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let z: f64 = StandardNormal.sample(rng);
        out.push(preset.mu_t1 + lor1.step(rng) + lor2.step(rng) + white_sigma * z);
    }
    Ok(out)
}

/// Draw a per-block realization of the damping probability.
///
/// The algorithm time is pinned by the nominal damping as
/// `t = −μ(T1)·ln(1−γ)`, then `γ(ω) = 1 − (1−γ)^{μT1/T1(ω)}` for a fresh
/// `T1(ω)` draw. Valid for `γ ∈ (0, 1−e^{−1}]` where the slow-variation
/// hypothesis holds.
pub fn tv_gamma_draw<R: Rng + ?Sized>(gamma_nominal: f64, dist: &TruncGauss, rng: &mut R) -> Result<f64> {
    check_gamma_nominal(gamma_nominal)?;
    let t1 = dist.sample(rng);
    Ok(gamma_realization(gamma_nominal, dist.mu, t1))
}

/// Deterministic part of [`tv_gamma_draw`] for a given `T1(ω)`.
pub fn gamma_realization(gamma_nominal: f64, mu_t1: f64, t1: f64) -> f64 {
    let g = 1.0 - (1.0 - gamma_nominal).powf(mu_t1 / t1);
    g.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON)
}

pub(crate) fn check_gamma_nominal(gamma_nominal: f64) -> Result<()> {
    let limit = 1.0 - (-1.0f64).exp();
    if !(gamma_nominal > 0.0 && gamma_nominal <= limit) {
        return Err(Error::domain(format!(
            "gamma = {gamma_nominal} outside (0, 1 - 1/e] where the block model holds"
        )));
    }
    Ok(())
}
