//! Channel identification: Fisher information bounds, offline estimator
//! averaging, and the online decoder-coupled estimator.
//!
//! The online estimator lives inside an iterative decoder: each iteration
//! turns the current channel estimate into per-qubit error posteriors and
//! reads the next estimate back off them. The decoder-agnostic contract is
//! any map from an estimate to posteriors; the exact `[[5,1,3]]`
//! enumeration instantiates it here.

use crate::channels::PauliChannelParams;
use crate::codes::{LogicalClass, StabilizerCode};
use crate::error::{Error, Result};
use crate::stochastic::TruncGauss;

/// Probe state used for offline channel identification.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Probe {
    /// Unentangled pure states.
    Pure,
    /// Maximally entangled pairs with one protected half.
    Epr,
}

/// Single-use quantum Fisher information for estimating the depolarizing
/// probability: `9/(8p(3−2p))` for pure probes, `9/(16p(1−p))` for EPR.
pub fn fisher(p: f64, probe: Probe) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("p = {p} outside (0, 1)")));
    }
    Ok(match probe {
        Probe::Pure => 9.0 / (8.0 * p * (3.0 - 2.0 * p)),
        Probe::Epr => 9.0 / (16.0 * p * (1.0 - p)),
    })
}

/// Cramér–Rao variance bound for `n` independent probes, `1/(n·J₁(p))`.
pub fn cramer_rao_var(p: f64, probe: Probe, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("need at least one probe".to_string()));
    }
    Ok(1.0 / (n as f64 * fisher(p, probe)?))
}

/// Distribution of an efficient estimator: normal at the true value with
/// the Cramér–Rao variance, truncated to `[0, 1]`.
pub fn estimator_pdf(p: f64, probe: Probe, n: u64) -> Result<TruncGauss> {
    let var = cramer_rao_var(p, probe, n)?;
    TruncGauss::unit_interval(p, var.sqrt())
}

/// Tabulated WER-vs-estimate sensitivity curve with linear interpolation
/// and flat extension beyond the tabulated range.
#[derive(Clone, Debug)]
pub struct SensitivityCurve {
    points: Vec<(f64, f64)>,
}

impl SensitivityCurve {
    pub fn new(mut points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::domain("sensitivity curve needs at least one point".to_string()));
        }
        points.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("no NaN"));
        Ok(SensitivityCurve { points })
    }

    /// Parse a two-column CSV `p_hat,wer`; `#`-prefixed lines are comments.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut points = vec![];
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            // tolerate a header row
            if lineno == 0 && line.chars().any(|c| c.is_alphabetic()) {
                continue;
            }
            let mut cols = line.split(',');
            let x: f64 = cols
                .next()
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| Error::Parse(format!("line {}: bad p_hat", lineno + 1)))?;
            let y: f64 = cols
                .next()
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| Error::Parse(format!("line {}: bad wer", lineno + 1)))?;
            points.push((x, y));
        }
        SensitivityCurve::new(points)
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn eval(&self, x: f64) -> f64 {
        let pts = &self.points;
        if x <= pts[0].0 {
            return pts[0].1;
        }
        if x >= pts[pts.len() - 1].0 {
            return pts[pts.len() - 1].1;
        }
        let idx = pts.partition_point(|&(px, _)| px <= x);
        let (x0, y0) = pts[idx - 1];
        let (x1, y1) = pts[idx];
        if x1 == x0 {
            return y0;
        }
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }
}

/// Adaptive Simpson quadrature with interval-relative tolerance.
fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    fn simpson(f: &impl Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    fn recurse(
        f: &impl Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        eps: f64,
        depth: u32,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * eps {
            left + right + delta / 15.0
        } else {
            recurse(f, a, fa, m, fm, left, lm, flm, eps / 2.0, depth - 1)
                + recurse(f, m, fm, b, fb, right, rm, frm, eps / 2.0, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    let eps = rel_tol * whole.abs().max(1e-300);
    recurse(f, a, fa, b, fb, whole, m, fm, eps, 48)
}

/// Average WER over the estimator distribution:
/// `∫ WER(p̂)·P(p̂) dp̂` on `[0, 1]`, split at the curve knots so the
/// quadrature never straddles a kink.
pub fn averaged_wer(curve: &SensitivityCurve, p: f64, probe: Probe, n: u64) -> Result<f64> {
    let pdf = estimator_pdf(p, probe, n)?;
    let f = |x: f64| curve.eval(x) * pdf.pdf(x);
    let mut knots: Vec<f64> = vec![0.0, 1.0];
    knots.extend(curve.points().iter().map(|&(x, _)| x).filter(|&x| x > 0.0 && x < 1.0));
    // the pdf mass concentrates near p; give the quadrature those edges too
    let sigma = cramer_rao_var(p, probe, n)?.sqrt();
    for k in [-4.0f64, -1.0, 1.0, 4.0] {
        let x = p + k * sigma;
        if x > 0.0 && x < 1.0 {
            knots.push(x);
        }
    }
    knots.sort_by(|a, b| a.partial_cmp(b).expect("no NaN"));
    knots.dedup();
    let mut total = 0.0;
    for w in knots.windows(2) {
        total += adaptive_simpson(&f, w[0], w[1], 1e-6);
    }
    Ok(total)
}

/// Depolarizing estimate from per-qubit posteriors:
/// `p̂ = 1 − (1/n)·Σ_i P(E_i = I | s)`.
pub fn online_estimate_step(marginals: &[[f64; 4]]) -> f64 {
    let n = marginals.len() as f64;
    1.0 - marginals.iter().map(|row| row[0]).sum::<f64>() / n
}

/// Componentwise Pauli estimate from per-qubit posteriors.
#[derive(Clone, Copy, Debug)]
pub struct AsymEstimate {
    pub px: f64,
    pub py: f64,
    pub pz: f64,
    /// `p̂_z/p̂_x`, absent when no X mass was seen.
    pub alpha: Option<f64>,
}

/// Asymmetric Pauli estimate `p̂_g = (1/n)·Σ_i P(E_i = g | s)`.
pub fn online_estimate_step_asym(marginals: &[[f64; 4]]) -> AsymEstimate {
    let n = marginals.len() as f64;
    let sum = |g: usize| marginals.iter().map(|row| row[g]).sum::<f64>() / n;
    let (px, py, pz) = (sum(1), sum(2), sum(3));
    AsymEstimate {
        px,
        py,
        pz,
        alpha: if px > 0.0 { Some(pz / px) } else { None },
    }
}

/// Which channel structure the online loop estimates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OnlineChannelKind {
    /// One scalar `p̂` fed back as a depolarizing prior.
    Depolarizing,
    /// Three independent components fed back as a Pauli prior.
    Pauli,
}

/// Trace of an online estimation run.
#[derive(Clone, Debug)]
pub struct OnlineOutcome {
    /// Channel prior after every iteration, starting with the initial one.
    pub trajectory: Vec<PauliChannelParams>,
    /// Estimate the loop settled on.
    pub final_params: PauliChannelParams,
    /// DQMLD logical class decoded with the final estimate.
    pub decoded: LogicalClass,
    pub converged: bool,
}

impl OnlineOutcome {
    /// Scalar estimate trajectory `p̂^{(j)} = p̂_x + p̂_y + p̂_z`.
    pub fn p_trajectory(&self) -> Vec<f64> {
        self.trajectory.iter().map(|t| t.error_probability()).collect()
    }
}

const ESTIMATE_FLOOR: f64 = 1e-12;

fn clamp_prior(kind: OnlineChannelKind, px: f64, py: f64, pz: f64) -> Result<PauliChannelParams> {
    match kind {
        OnlineChannelKind::Depolarizing => {
            let p = (px + py + pz).clamp(ESTIMATE_FLOOR, 1.0 - ESTIMATE_FLOOR);
            PauliChannelParams::depolarizing(p)
        }
        OnlineChannelKind::Pauli => {
            let floor = ESTIMATE_FLOOR / 3.0;
            let (px, py, pz) = (px.max(floor), py.max(floor), pz.max(floor));
            let total = px + py + pz;
            let scale = if total > 1.0 - ESTIMATE_FLOOR {
                (1.0 - ESTIMATE_FLOOR) / total
            } else {
                1.0
            };
            PauliChannelParams::new(
                1.0 - (px + py + pz) * scale,
                px * scale,
                py * scale,
                pz * scale,
            )
        }
    }
}

/// Run the fixed-point estimation loop on a syndrome: posteriors from the
/// current prior, estimator step, feed back; stop at `max_iters` or when
/// every component moves less than 1e−9. Returns the full trajectory and
/// the DQMLD class under the final estimate.
pub fn online_decode(
    code: &StabilizerCode,
    syndrome: &[u8],
    init: PauliChannelParams,
    kind: OnlineChannelKind,
    max_iters: u32,
) -> Result<OnlineOutcome> {
    let mut current = clamp_prior(kind, init.px, init.py, init.pz)?;
    let mut trajectory = vec![current];
    let mut converged = false;
    for _ in 0..max_iters {
        let marginals = code.posterior_marginals(syndrome, &current)?;
        let next = match kind {
            OnlineChannelKind::Depolarizing => {
                let p = online_estimate_step(&marginals);
                if !p.is_finite() {
                    return Err(Error::domain(format!(
                        "online estimate diverged after {} iterations",
                        trajectory.len()
                    )));
                }
                clamp_prior(kind, p / 3.0, p / 3.0, p / 3.0)?
            }
            OnlineChannelKind::Pauli => {
                let est = online_estimate_step_asym(&marginals);
                if !(est.px.is_finite() && est.py.is_finite() && est.pz.is_finite()) {
                    return Err(Error::domain(format!(
                        "online estimate diverged after {} iterations",
                        trajectory.len()
                    )));
                }
                clamp_prior(kind, est.px, est.py, est.pz)?
            }
        };
        let delta = (next.px - current.px)
            .abs()
            .max((next.py - current.py).abs())
            .max((next.pz - current.pz).abs());
        current = next;
        trajectory.push(current);
        if delta < 1e-9 {
            converged = true;
            break;
        }
    }
    let decoded = code.decode_dqmld(syndrome, &current)?;
    Ok(OnlineOutcome {
        trajectory,
        final_params: current,
        decoded,
        converged,
    })
}
