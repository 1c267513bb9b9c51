//! Quantum capacities, hashing bounds, noise limits and outage probabilities.
//!
//! The amplitude damping capacity has a closed form that is maximized
//! numerically; the twirled channels only have the hashing bound. The
//! noise limit `γ*(R_Q)` inverts either curve by bisection, and the
//! quantum (hashing) outage probability of a slowly time-varying channel
//! follows in closed form from the truncated-Gaussian `T1` model.

use crate::channels::{cta, PauliChannelParams};
use crate::error::{Error, Result};
use serde::Serialize;

/// Binary entropy in bits, with `0·log 0 = 0`.
pub fn binary_entropy(p: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&p));
    let term = |q: f64| if q > 0.0 { -q * q.log2() } else { 0.0 };
    term(p) + term(1.0 - p)
}

/// Entropy in bits of the probability 4-vector.
pub fn entropy4(params: &PauliChannelParams) -> f64 {
    params
        .as_array()
        .iter()
        .map(|&q| if q > 0.0 { -q * q.log2() } else { 0.0 })
        .sum()
}

/// Golden-section refinement of a unimodal maximum after a coarse grid scan.
fn maximize_unimodal(f: impl Fn(f64) -> f64, lo: f64, hi: f64, grid: usize, tol: f64) -> f64 {
    let mut best_x = lo;
    let mut best = f(lo);
    for i in 0..=grid {
        let x = lo + (hi - lo) * i as f64 / grid as f64;
        let v = f(x);
        if v > best {
            best = v;
            best_x = x;
        }
    }
    let step = (hi - lo) / grid as f64;
    let mut a = (best_x - step).max(lo);
    let mut b = (best_x + step).min(hi);
    let inv_phi = 0.5 * (5.0f64.sqrt() - 1.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    f(0.5 * (a + b)).max(best)
}

/// Quantum capacity of the amplitude damping channel:
/// `max_ξ H₂((1−γ)ξ) − H₂(γξ)` for `γ ≤ 1/2`, zero beyond.
pub fn capacity_ad(gamma: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&gamma));
    if gamma >= 0.5 {
        return 0.0;
    }
    if gamma == 0.0 {
        return 1.0;
    }
    let objective = |xi: f64| binary_entropy((1.0 - gamma) * xi) - binary_entropy(gamma * xi);
    maximize_unimodal(objective, 0.0, 1.0, 1024, 1e-9).max(0.0)
}

/// Quantum capacity of the pure dephasing channel: `1 − H₂((1−√(1−λ))/2)`.
pub fn capacity_pd(lambda: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&lambda));
    1.0 - binary_entropy((1.0 - (1.0 - lambda).sqrt()) / 2.0)
}

/// Hashing bound `1 − H(p̄)` of a Pauli channel; may be negative.
pub fn hashing_bound(params: &PauliChannelParams) -> f64 {
    1.0 - entropy4(params)
}

/// Channel family against which rate limits are computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ChannelFamily {
    /// Amplitude damping channel with its true capacity.
    Ad,
    /// Pauli twirl approximation of the AD channel, hashing bound.
    AdPta,
    /// Clifford twirl approximation of the AD channel, hashing bound.
    AdCta,
}

impl ChannelFamily {
    /// Capacity (or hashing-bound) curve as a function of γ, clamped at 0.
    pub fn rate_limit(self, gamma: f64) -> f64 {
        match self {
            ChannelFamily::Ad => capacity_ad(gamma),
            ChannelFamily::AdPta => {
                let p = PauliChannelParams::pta(gamma, 0.0).expect("gamma in range");
                hashing_bound(&p).max(0.0)
            }
            ChannelFamily::AdCta => {
                let p = cta(gamma, 0.0).expect("gamma in range");
                let params = PauliChannelParams::depolarizing(p).expect("valid depolarizing");
                hashing_bound(&params).max(0.0)
            }
        }
    }
}

fn bisect_decreasing(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, target: f64, tol: f64) -> Result<f64> {
    let f_lo = f(lo);
    let f_hi = f(hi);
    if !(f_lo >= target && target >= f_hi) {
        return Err(Error::domain(format!(
            "target {target} outside achievable range [{f_hi}, {f_lo}]"
        )));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if f(mid) >= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Noise limit `γ*(R_Q)`: the unique damping where the family's rate limit
/// equals `R_Q`. Bisection to 1e−6 in γ.
pub fn noise_limit(rq: f64, kind: ChannelFamily) -> Result<f64> {
    if !(rq > 0.0 && rq < 1.0) {
        return Err(Error::domain(format!("R_Q = {rq} outside (0, 1)")));
    }
    let (lo, hi) = match kind {
        ChannelFamily::Ad => (1e-9, 0.5 - 1e-9),
        _ => (1e-9, 1.0 - 1e-9),
    };
    bisect_decreasing(|g| kind.rate_limit(g), lo, hi, rq, 1e-6)
}

/// Depolarizing probability `p*` at which the hashing bound equals `R_Q`.
pub fn depolarizing_noise_limit(rq: f64) -> Result<f64> {
    if !(rq > 0.0 && rq < 1.0) {
        return Err(Error::domain(format!("R_Q = {rq} outside (0, 1)")));
    }
    let f = |p: f64| hashing_bound(&PauliChannelParams::depolarizing(p).expect("valid"));
    bisect_decreasing(f, 1e-12, 0.75, rq, 1e-9)
}

/// Inverse of the ADCTA depolarizing map: the γ with `cta(γ, 0) = p`.
pub fn cta_inverse(p: f64) -> Result<f64> {
    if !(0.0..=0.75).contains(&p) {
        return Err(Error::domain(format!("depolarizing p = {p} outside [0, 0.75]")));
    }
    let f = |g: f64| -cta(g, 0.0).expect("gamma in range");
    bisect_decreasing(f, 0.0, 1.0, -p, 1e-12)
}

/// Critical relaxation time `T1*(R_Q, γ) = μT1·ln(1−γ)/ln(1−γ*)`.
pub fn critical_t1(rq: f64, gamma: f64, mu_t1: f64, kind: ChannelFamily) -> Result<f64> {
    crate::stochastic::check_gamma_nominal(gamma)?;
    let gstar = noise_limit(rq, kind)?;
    Ok(mu_t1 * (1.0 - gamma).ln() / (1.0 - gstar).ln())
}

/// Gaussian tail `Q(x) = erfc(x/√2)/2`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

fn outage_from_ratio(log_ratio: f64, cv: f64) -> f64 {
    let inv_cv = 1.0 / cv;
    1.0 - q_function(inv_cv * (log_ratio - 1.0)) / (1.0 - q_function(inv_cv))
}

/// Quantum outage probability of the time-varying AD channel:
///
/// ```text
/// p_out = 1 − Q((1/cv)·[ln(1−γ)/ln(1−γ*) − 1]) / (1 − Q(1/cv))
/// ```
pub fn outage_tvad(rq: f64, gamma: f64, cv: f64) -> Result<f64> {
    crate::stochastic::check_gamma_nominal(gamma)?;
    if cv <= 0.0 || !cv.is_finite() {
        return Err(Error::domain(format!("cv = {cv} must be positive")));
    }
    let gstar = noise_limit(rq, ChannelFamily::Ad)?;
    Ok(outage_from_ratio((1.0 - gamma).ln() / (1.0 - gstar).ln(), cv))
}

/// Twirl family used for the hashing outage probability.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Twirl {
    Pta,
    Cta,
}

impl Twirl {
    pub fn family(self) -> ChannelFamily {
        match self {
            Twirl::Pta => ChannelFamily::AdPta,
            Twirl::Cta => ChannelFamily::AdCta,
        }
    }
}

/// Quantum hashing outage probability of the time-varying twirled channels;
/// same closed form as [`outage_tvad`] with the twirl's noise limit. Upper
/// bounds the AD outage because the twirled noise limits are smaller.
pub fn hashing_outage(rq: f64, gamma: f64, cv: f64, twirl: Twirl) -> Result<f64> {
    crate::stochastic::check_gamma_nominal(gamma)?;
    if cv <= 0.0 || !cv.is_finite() {
        return Err(Error::domain(format!("cv = {cv} must be positive")));
    }
    let gstar = noise_limit(rq, twirl.family())?;
    Ok(outage_from_ratio((1.0 - gamma).ln() / (1.0 - gstar).ln(), cv))
}

/// Classical slow Rayleigh-fading outage: `1 − e^{−(2^R−1)/SNR}`.
pub fn classical_rayleigh_outage(rate: f64, snr: f64) -> f64 {
    debug_assert!(rate >= 0.0 && snr > 0.0);
    1.0 - (-(2.0f64.powf(rate) - 1.0) / snr).exp()
}

/// A `(γ, p_out)` outage curve for export.
#[derive(Clone, Debug, Serialize)]
pub struct OutageCurve {
    pub rq: f64,
    pub cv: f64,
    pub kind: ChannelFamily,
    pub points: Vec<(f64, f64)>,
}

impl OutageCurve {
    pub fn compute(rq: f64, cv: f64, kind: ChannelFamily, gammas: &[f64]) -> Result<Self> {
        let points = gammas
            .iter()
            .map(|&g| {
                let p = match kind {
                    ChannelFamily::Ad => outage_tvad(rq, g, cv)?,
                    ChannelFamily::AdPta => hashing_outage(rq, g, cv, Twirl::Pta)?,
                    ChannelFamily::AdCta => hashing_outage(rq, g, cv, Twirl::Cta)?,
                };
                Ok((g, p))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(OutageCurve {
            rq,
            cv,
            kind,
            points,
        })
    }
}

/// Crossing abscissa of a monotone curve with level `chi`, interpolating
/// linearly in (log x, log y).
fn crossing(curve: &[(f64, f64)], chi: f64) -> Result<f64> {
    for w in curve.windows(2) {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        if (y0 - chi) * (y1 - chi) <= 0.0 && y0 != y1 {
            let t = (chi.ln() - y0.ln()) / (y1.ln() - y0.ln());
            return Ok((x0.ln() + t * (x1.ln() - x0.ln())).exp());
        }
    }
    Err(Error::NoCrossing { level: chi })
}

/// Gap in dB between the channel points where two curves cross level `chi`:
/// `10·log10(x_outage / x_wer)`.
pub fn delta_out(wer_curve: &[(f64, f64)], outage_curve: &[(f64, f64)], chi: f64) -> Result<f64> {
    let x_wer = crossing(wer_curve, chi)?;
    let x_out = crossing(outage_curve, chi)?;
    Ok(10.0 * (x_out / x_wer).log10())
}
