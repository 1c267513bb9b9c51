//! Diamond-norm distances and adjusted boxplot statistics.
//!
//! Closed forms exist for Pauli, AD and PD channel pairs and for the
//! twirled approximations of AD pairs; the time-varying analysis averages
//! the distance between the static channel and per-block realizations.

use crate::channels::PauliChannelParams;
use crate::error::{Error, Result};
use crate::stochastic::{tv_gamma_draw, TruncGauss};
use rand::Rng;
use serde::Serialize;

/// Diamond distance between Pauli channels: `Σ_k |p_k − q_k|`.
pub fn diamond_pauli(a: &PauliChannelParams, b: &PauliChannelParams) -> f64 {
    a.as_array()
        .iter()
        .zip(b.as_array())
        .map(|(x, y)| (x - y).abs())
        .sum()
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) || v.is_nan() {
        return Err(Error::domain(format!("{name} = {v} outside [0, 1]")));
    }
    Ok(())
}

/// Diamond distance between amplitude damping channels.
pub fn diamond_ad(gamma1: f64, gamma2: f64) -> Result<f64> {
    check_unit("gamma1", gamma1)?;
    check_unit("gamma2", gamma2)?;
    let r1 = (1.0 - gamma1).sqrt();
    let r2 = (1.0 - gamma2).sqrt();
    if r1 + r2 > 1.0 {
        Ok(2.0 * (gamma1 - gamma2).abs())
    } else {
        Ok(2.0 * (r1 - r2).abs() / (2.0 - (r1 + r2)))
    }
}

/// Diamond distance between pure dephasing channels: `|√(1−λ1) − √(1−λ2)|`.
pub fn diamond_pd(lambda1: f64, lambda2: f64) -> Result<f64> {
    check_unit("lambda1", lambda1)?;
    check_unit("lambda2", lambda2)?;
    Ok(((1.0 - lambda1).sqrt() - (1.0 - lambda2).sqrt()).abs())
}

/// Diamond distance between the twirled approximations of two AD channels:
///
/// ```text
/// ‖N_T(γ1) − N_T(γ2)‖◇ = |γ1−γ2|/2 + |√(1−γ1) − √(1−γ2)|
/// ```
///
/// The same value holds for the PTA and the CTA pair, so both reduce to
/// one closed form.
pub fn diamond_ad_twirled(gamma1: f64, gamma2: f64) -> Result<f64> {
    check_unit("gamma1", gamma1)?;
    check_unit("gamma2", gamma2)?;
    let root_gap = ((1.0 - gamma1).sqrt() - (1.0 - gamma2).sqrt()).abs();
    Ok(0.5 * (gamma1 - gamma2).abs() + root_gap)
}

/// Minimum channel-discrimination error probability, `1/2 − d/4`.
pub fn discrimination_error(diamond: f64) -> f64 {
    0.5 - diamond / 4.0
}

/// Which closed form drives the time-varying diamond analysis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TvDiamondKind {
    /// Static vs realized AD channel.
    Ad,
    /// Static vs realized twirled channel (PTA and CTA coincide).
    AdTwirled,
}

/// Average diamond distance between the static channel at `γ_nominal` and
/// `l` per-block realizations drawn through the `T1` model. Returns the
/// mean (Kahan-compensated) and the raw samples for boxplots.
pub fn mean_diamond_tv<R: Rng + ?Sized>(
    gamma_nominal: f64,
    dist: &TruncGauss,
    kind: TvDiamondKind,
    l: usize,
    rng: &mut R,
) -> Result<(f64, Vec<f64>)> {
    if l == 0 {
        return Err(Error::domain("need at least one round".to_string()));
    }
    let mut samples = Vec::with_capacity(l);
    for _ in 0..l {
        let g = tv_gamma_draw(gamma_nominal, dist, rng)?;
        let d = match kind {
            TvDiamondKind::Ad => diamond_ad(gamma_nominal, g)?,
            TvDiamondKind::AdTwirled => diamond_ad_twirled(gamma_nominal, g)?,
        };
        samples.push(d);
    }
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for &s in &samples {
        let y = s - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    Ok((sum / l as f64, samples))
}

/// Type-7 quantile (linear interpolation of order statistics) of sorted data.
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    let pos = q * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let frac = pos - lo as f64;
        sorted[lo] * (1.0 - frac) + sorted[hi] * frac
    }
}

/// Medcouple: median of the kernel
/// `h(x_i, x_j) = ((x_j − m) − (m − x_i)) / (x_j − x_i)` over pairs with
/// `x_i ≤ m ≤ x_j`, with the standard ±1/0 convention for ties at the
/// median. O(n²) pairwise evaluation.
pub fn medcouple(samples: &[f64]) -> Result<f64> {
    if samples.len() < 4 {
        return Err(Error::domain(format!(
            "medcouple needs at least 4 samples, got {}",
            samples.len()
        )));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("no NaN"));
    let m = quantile_sorted(&sorted, 0.5);

    let lower: Vec<f64> = sorted.iter().copied().filter(|&v| v <= m).collect();
    let upper: Vec<f64> = sorted.iter().copied().filter(|&v| v >= m).collect();
    let ties = sorted.iter().filter(|&&v| v == m).count();

    let mut kernels = Vec::with_capacity(lower.len() * upper.len());
    let lower_tie_start = lower.len() - ties;
    for (i, &xi) in lower.iter().enumerate() {
        for (j, &xj) in upper.iter().enumerate() {
            if xi == m && xj == m {
                // 0-based positions inside the tied block; kernel is the
                // sign of a + b - (k - 1)
                let a = i - lower_tie_start;
                let b = j;
                let h = match (a + b).cmp(&(ties - 1)) {
                    std::cmp::Ordering::Less => -1.0,
                    std::cmp::Ordering::Equal => 0.0,
                    std::cmp::Ordering::Greater => 1.0,
                };
                kernels.push(h);
            } else {
                kernels.push(((xj - m) - (m - xi)) / (xj - xi));
            }
        }
    }
    kernels.sort_by(|a, b| a.partial_cmp(b).expect("no NaN"));
    Ok(quantile_sorted(&kernels, 0.5))
}

/// Adjusted boxplot summary with medcouple-scaled whiskers.
#[derive(Clone, Debug, Serialize)]
pub struct BoxplotSummary {
    pub q1: f64,
    pub q3: f64,
    pub median: f64,
    pub medcouple: f64,
    pub whisker_low: f64,
    pub whisker_high: f64,
    pub outliers: Vec<f64>,
}

/// Whisker fences `[Q1 − 1.5·e^{−4MC}·IQR, Q3 + 1.5·e^{3MC}·IQR]` for
/// `MC ≥ 0`, exponents `(−3MC, 4MC)` otherwise; outliers are the points
/// outside the fences.
pub fn adjusted_boxplot(samples: &[f64]) -> Result<BoxplotSummary> {
    let mc = medcouple(samples)?;
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("no NaN"));
    let q1 = quantile_sorted(&sorted, 0.25);
    let q3 = quantile_sorted(&sorted, 0.75);
    let median = quantile_sorted(&sorted, 0.5);
    let iqr = q3 - q1;
    let (lo_exp, hi_exp) = if mc >= 0.0 { (-4.0 * mc, 3.0 * mc) } else { (-3.0 * mc, 4.0 * mc) };
    let whisker_low = q1 - 1.5 * lo_exp.exp() * iqr;
    let whisker_high = q3 + 1.5 * hi_exp.exp() * iqr;
    let outliers = sorted
        .iter()
        .copied()
        .filter(|&v| v < whisker_low || v > whisker_high)
        .collect();
    Ok(BoxplotSummary {
        q1,
        q3,
        median,
        medcouple: mc,
        whisker_low,
        whisker_high,
        outliers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::cta;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pauli_distance_basics() {
        let a = PauliChannelParams::depolarizing(0.3).unwrap();
        assert_eq!(diamond_pauli(&a, &a), 0.0);
        let b = PauliChannelParams::depolarizing(0.1).unwrap();
        // depolarizing pair simplifies to 2|p1 - p2|
        assert_abs_diff_eq!(diamond_pauli(&a, &b), 2.0 * 0.2, epsilon = 1e-15);
        let id = PauliChannelParams::identity();
        let uniform = PauliChannelParams::new(0.25, 0.25, 0.25, 0.25).unwrap();
        assert_abs_diff_eq!(diamond_pauli(&id, &uniform), 1.5, epsilon = 1e-15);
    }

    #[test]
    fn pauli_distance_triangle_inequality() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let random_params = |rng: &mut ChaCha8Rng| {
            let mut v = [rng.random::<f64>(), rng.random(), rng.random(), rng.random()];
            let s: f64 = v.iter().sum();
            v.iter_mut().for_each(|x| *x /= s);
            PauliChannelParams::new(v[0], v[1], v[2], v[3]).unwrap()
        };
        for _ in 0..500 {
            let a = random_params(&mut rng);
            let b = random_params(&mut rng);
            let c = random_params(&mut rng);
            let ab = diamond_pauli(&a, &b);
            let bc = diamond_pauli(&b, &c);
            let ac = diamond_pauli(&a, &c);
            assert!(ac <= ab + bc + 1e-12);
            assert!(ab <= 2.0 + 1e-15);
            assert!(discrimination_error(ab) >= 0.0 && discrimination_error(ab) <= 0.5);
        }
    }

    #[test]
    fn ad_distance_branches() {
        assert_eq!(diamond_ad(0.3, 0.3).unwrap(), 0.0);
        // both nearly undamped: first branch
        assert_abs_diff_eq!(diamond_ad(0.1, 0.2).unwrap(), 0.2, epsilon = 1e-15);
        // extreme pair hits the second branch: 2*1/(2-1) = 2
        assert_abs_diff_eq!(diamond_ad(0.0, 1.0).unwrap(), 2.0, epsilon = 1e-15);
        assert_eq!(diamond_ad(0.1, 0.2).unwrap(), diamond_ad(0.2, 0.1).unwrap());
    }

    #[test]
    fn pd_distance() {
        assert_eq!(diamond_pd(0.4, 0.4).unwrap(), 0.0);
        assert_abs_diff_eq!(diamond_pd(0.0, 1.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_eq!(diamond_pd(0.2, 0.7).unwrap(), diamond_pd(0.7, 0.2).unwrap());
    }

    #[test]
    fn twirled_distance_matches_pauli_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..1000 {
            let g1: f64 = rng.random();
            let g2: f64 = rng.random();
            let closed = diamond_ad_twirled(g1, g2).unwrap();
            let pta = diamond_pauli(
                &PauliChannelParams::pta(g1, 0.0).unwrap(),
                &PauliChannelParams::pta(g2, 0.0).unwrap(),
            );
            let cta_pair = diamond_pauli(
                &PauliChannelParams::depolarizing(cta(g1, 0.0).unwrap()).unwrap(),
                &PauliChannelParams::depolarizing(cta(g2, 0.0).unwrap()).unwrap(),
            );
            assert!((closed - pta).abs() <= 1e-12, "pta mismatch at ({g1}, {g2})");
            assert!((closed - cta_pair).abs() <= 1e-12, "cta mismatch at ({g1}, {g2})");
        }
        assert_eq!(diamond_ad_twirled(0.37, 0.37).unwrap(), 0.0);
    }

    #[test]
    fn all_distances_bounded_and_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..300 {
            let a: f64 = rng.random();
            let b: f64 = rng.random();
            for d in [
                diamond_ad(a, b).unwrap(),
                diamond_pd(a, b).unwrap(),
                diamond_ad_twirled(a, b).unwrap(),
            ] {
                assert!((0.0..=2.0 + 1e-12).contains(&d));
            }
            assert_eq!(diamond_ad(a, b).unwrap(), diamond_ad(b, a).unwrap());
            assert_eq!(diamond_ad_twirled(a, b).unwrap(), diamond_ad_twirled(b, a).unwrap());
        }
    }

    #[test]
    fn tv_mean_degenerate_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        // sigma -> 0: every realization equals the static channel
        let point = TruncGauss::nonnegative(44.49, 0.0).unwrap();
        let (mean, samples) = mean_diamond_tv(0.3, &point, TvDiamondKind::Ad, 100, &mut rng).unwrap();
        assert!(mean < 1e-12);
        assert_eq!(samples.len(), 100);
        // L = 1 returns a single draw equal to its own mean
        let dist = TruncGauss::nonnegative(44.49, 11.7).unwrap();
        let (mean, samples) = mean_diamond_tv(0.3, &dist, TvDiamondKind::AdTwirled, 1, &mut rng).unwrap();
        assert_eq!(samples.len(), 1);
        assert_eq!(mean, samples[0]);
    }

    #[test]
    fn tv_mean_grows_with_cv() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let mut prev = 0.0;
        for cv in [0.01, 0.1, 0.25] {
            let dist = TruncGauss::nonnegative(44.49, cv * 44.49).unwrap();
            let (mean, _) = mean_diamond_tv(0.1, &dist, TvDiamondKind::Ad, 40_000, &mut rng).unwrap();
            assert!(mean > prev, "mean {mean} at cv {cv} not above {prev}");
            prev = mean;
        }
    }

    #[test]
    fn medcouple_symmetric_is_zero() {
        let sym: Vec<f64> = vec![-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0];
        assert_abs_diff_eq!(medcouple(&sym).unwrap(), 0.0, epsilon = 1e-15);
        let b = adjusted_boxplot(&sym).unwrap();
        // MC = 0 reduces to the conventional 1.5*IQR whiskers
        assert_abs_diff_eq!(b.whisker_low, b.q1 - 1.5 * (b.q3 - b.q1), epsilon = 1e-12);
        assert_abs_diff_eq!(b.whisker_high, b.q3 + 1.5 * (b.q3 - b.q1), epsilon = 1e-12);
        assert!(b.outliers.is_empty());
    }

    #[test]
    fn medcouple_handles_median_ties() {
        let data = vec![1.0, 2.0, 2.0, 2.0, 3.0];
        let mc = medcouple(&data).unwrap();
        assert!(mc.abs() <= 1.0);
        assert_abs_diff_eq!(mc, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn exponential_sample_skews_right() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let samples: Vec<f64> = (0..10_000)
            .map(|_| -(1.0f64 - rng.random::<f64>()).ln())
            .collect();
        let b = adjusted_boxplot(&samples).unwrap();
        assert!(b.medcouple > 0.1, "MC = {}", b.medcouple);
        assert!(b.whisker_high - b.q3 > b.q1 - b.whisker_low);
        assert!(b.q1 <= b.median && b.median <= b.q3);
        // fences widen on the long-tail side relative to the classic boxplot
        assert!(b.whisker_high > b.q3 + 1.5 * (b.q3 - b.q1));
    }

    #[test]
    fn medcouple_needs_four_samples() {
        assert!(medcouple(&[1.0, 2.0, 3.0]).is_err());
    }
}
