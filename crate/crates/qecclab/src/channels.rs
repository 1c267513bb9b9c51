//! Kraus-operator decoherence channels and their twirl approximations.
//!
//! The combined amplitude and phase damping channel is parameterized by a
//! damping probability `γ = 1 − e^{−t/T1}` and a scattering probability
//! `λ = 1 − e^{t/T1 − 2t/T2}`. Twirling it yields a Pauli channel (PTA)
//! or a depolarizing channel (CTA) that classical simulation can handle;
//! both closed forms live here together with the Pauli error samplers.

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

type Mat2 = [[Complex64; 2]; 2];

const TOL: f64 = 1e-12;

/// Single-qubit density matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix2 {
    pub rho00: Complex64,
    pub rho01: Complex64,
    pub rho10: Complex64,
    pub rho11: Complex64,
}

impl DensityMatrix2 {
    pub fn new(rho00: Complex64, rho01: Complex64, rho10: Complex64, rho11: Complex64) -> Result<Self> {
        let rho = DensityMatrix2 {
            rho00,
            rho01,
            rho10,
            rho11,
        };
        rho.validate(TOL)?;
        Ok(rho)
    }

    /// `ρ = |0⟩⟨0|`.
    pub fn ground() -> Self {
        DensityMatrix2 {
            rho00: Complex64::new(1.0, 0.0),
            rho01: Complex64::ZERO,
            rho10: Complex64::ZERO,
            rho11: Complex64::ZERO,
        }
    }

    /// Density matrix of the pure state `a|0⟩ + b|1⟩` (normalized by the caller).
    pub fn pure(a: Complex64, b: Complex64) -> Self {
        DensityMatrix2 {
            rho00: a * a.conj(),
            rho01: a * b.conj(),
            rho10: b * a.conj(),
            rho11: b * b.conj(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.rho00 + self.rho11
    }

    /// Check unit trace, Hermiticity and positive semidefiniteness.
    pub fn validate(&self, tol: f64) -> Result<()> {
        if (self.trace() - Complex64::new(1.0, 0.0)).norm() > tol {
            return Err(Error::domain(format!("density matrix trace {} != 1", self.trace())));
        }
        if (self.rho10 - self.rho01.conj()).norm() > tol
            || self.rho00.im.abs() > tol
            || self.rho11.im.abs() > tol
        {
            return Err(Error::domain("density matrix is not Hermitian".to_string()));
        }
        if self.min_eigenvalue() < -tol {
            return Err(Error::domain(format!(
                "density matrix has negative eigenvalue {}",
                self.min_eigenvalue()
            )));
        }
        Ok(())
    }

    /// Smaller eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let a = self.rho00.re;
        let d = self.rho11.re;
        let off = self.rho01.norm();
        let mid = 0.5 * (a + d);
        let disc = (0.25 * (a - d) * (a - d) + off * off).sqrt();
        mid - disc
    }

    /// Max entrywise absolute difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        [
            (self.rho00 - other.rho00).norm(),
            (self.rho01 - other.rho01).norm(),
            (self.rho10 - other.rho10).norm(),
            (self.rho11 - other.rho11).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// A quantum channel in operator-sum form: `ρ → Σ E_k ρ E_k†`.
#[derive(Clone, Debug)]
pub struct KrausChannel {
    ops: Vec<Mat2>,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

impl KrausChannel {
    /// Build from explicit operators, enforcing `Σ E_k†E_k = I` within 1e−12.
    pub fn new(ops: Vec<Mat2>) -> Result<Self> {
        let ch = KrausChannel { ops };
        let r = ch.completeness_residual();
        if r > TOL {
            return Err(Error::domain(format!("Kraus completeness residual {r:.3e} exceeds 1e-12")));
        }
        Ok(ch)
    }

    pub fn identity() -> Self {
        KrausChannel {
            ops: vec![[[c(1.0), c(0.0)], [c(0.0), c(1.0)]]],
        }
    }

    /// Amplitude damping channel with damping probability `γ`.
    pub fn amplitude_damping(gamma: f64) -> Result<Self> {
        KrausChannel::apd(gamma, 0.0)
    }

    /// Pure dephasing channel with scattering probability `λ`.
    pub fn phase_damping(lambda: f64) -> Result<Self> {
        KrausChannel::apd(0.0, lambda)
    }

    /// Combined amplitude and phase damping channel (PD after AD), Kraus rank 3:
    ///
    /// ```text
    /// E0 = diag(1, √(1−γ−(1−γ)λ)),  E1 = [[0, √γ], [0, 0]],  E2 = diag(0, √((1−γ)λ))
    /// ```
    pub fn apd(gamma: f64, lambda: f64) -> Result<Self> {
        check_unit("gamma", gamma)?;
        check_unit("lambda", lambda)?;
        let e0d = (1.0 - gamma - (1.0 - gamma) * lambda).max(0.0).sqrt();
        let e0 = [[c(1.0), c(0.0)], [c(0.0), c(e0d)]];
        let e1 = [[c(0.0), c(gamma.sqrt())], [c(0.0), c(0.0)]];
        let e2 = [[c(0.0), c(0.0)], [c(0.0), c(((1.0 - gamma) * lambda).sqrt())]];
        KrausChannel::new(vec![e0, e1, e2])
    }

    pub fn ops(&self) -> &[Mat2] {
        &self.ops
    }

    /// `‖Σ E_k†E_k − I‖_max`.
    pub fn completeness_residual(&self) -> f64 {
        let mut acc = [[Complex64::ZERO; 2]; 2];
        for e in &self.ops {
            // E†E
            for r in 0..2 {
                for cc in 0..2 {
                    let mut s = Complex64::ZERO;
                    for k in 0..2 {
                        s += e[k][r].conj() * e[k][cc];
                    }
                    acc[r][cc] += s;
                }
            }
        }
        let mut worst: f64 = 0.0;
        for r in 0..2 {
            for cc in 0..2 {
                let target = if r == cc { c(1.0) } else { Complex64::ZERO };
                worst = worst.max((acc[r][cc] - target).norm());
            }
        }
        worst
    }

    /// Apply the channel: `Σ E ρ E†`.
    pub fn apply(&self, rho: &DensityMatrix2) -> DensityMatrix2 {
        let m = [[rho.rho00, rho.rho01], [rho.rho10, rho.rho11]];
        let mut out = [[Complex64::ZERO; 2]; 2];
        for e in &self.ops {
            // E * m
            let mut em = [[Complex64::ZERO; 2]; 2];
            for r in 0..2 {
                for cc in 0..2 {
                    for k in 0..2 {
                        em[r][cc] += e[r][k] * m[k][cc];
                    }
                }
            }
            // (E m) * E†
            for r in 0..2 {
                for cc in 0..2 {
                    for k in 0..2 {
                        out[r][cc] += em[r][k] * e[cc][k].conj();
                    }
                }
            }
        }
        DensityMatrix2 {
            rho00: out[0][0],
            rho01: out[0][1],
            rho10: out[1][0],
            rho11: out[1][1],
        }
    }

    /// Serial concatenation `self ∘ other` (other acts first).
    pub fn compose(&self, other: &Self) -> Result<Self> {
        let mut ops = Vec::with_capacity(self.ops.len() * other.ops.len());
        for a in &self.ops {
            for b in &other.ops {
                let mut m = [[Complex64::ZERO; 2]; 2];
                for r in 0..2 {
                    for cc in 0..2 {
                        for k in 0..2 {
                            m[r][cc] += a[r][k] * b[k][cc];
                        }
                    }
                }
                ops.push(m);
            }
        }
        KrausChannel::new(ops)
    }
}

/// Closed-form action of the APD channel, used as an independent oracle
/// against the Kraus sum:
///
/// ```text
/// ρ → [[1 − (1−γ)ρ11,        ρ01·√(1−γ−(1−γ)λ)],
///      [ρ10·√(1−γ−(1−γ)λ),   (1−γ)ρ11         ]]
/// ```
pub fn apd_closed_form(gamma: f64, lambda: f64, rho: &DensityMatrix2) -> DensityMatrix2 {
    let decay = (1.0 - gamma - (1.0 - gamma) * lambda).max(0.0).sqrt();
    DensityMatrix2 {
        rho00: c(1.0) - c(1.0 - gamma) * rho.rho11,
        rho01: rho.rho01 * decay,
        rho10: rho.rho10 * decay,
        rho11: c(1.0 - gamma) * rho.rho11,
    }
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) || v.is_nan() {
        return Err(Error::domain(format!("{name} = {v} outside [0, 1]")));
    }
    Ok(())
}

/// Damping and scattering probabilities of a qubit idling for `t` µs:
/// `γ = 1 − e^{−t/T1}`, `λ = 1 − e^{t/T1 − 2t/T2}`.
///
/// Requires `0 < T2 ≤ 2·T1`; relaxation always implies dephasing, so a
/// larger `T2` would make `λ` negative.
pub fn decoherence_params(t: f64, t1: f64, t2: f64) -> Result<(f64, f64)> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::domain(format!("t = {t} must be nonnegative")));
    }
    if t1 <= 0.0 {
        return Err(Error::domain(format!("T1 = {t1} must be positive")));
    }
    if t2 <= 0.0 || t2 > 2.0 * t1 {
        return Err(Error::domain(format!("T2 = {t2} outside (0, 2*T1] with T1 = {t1}")));
    }
    let gamma = 1.0 - (-t / t1).exp();
    let lambda = 1.0 - (t / t1 - 2.0 * t / t2).exp();
    // T2 = 2*T1 gives exactly 0 up to rounding
    Ok((gamma, lambda.max(0.0)))
}

/// Probability 4-vector of a Pauli channel `(p_I, p_x, p_y, p_z)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliChannelParams {
    pub pi: f64,
    pub px: f64,
    pub py: f64,
    pub pz: f64,
}

/// Clamp tiny negative rounding residue to zero; anything more negative is an error.
fn clip_probability(name: &str, p: f64) -> Result<f64> {
    if p >= -1e-15 && p < 0.0 {
        return Ok(0.0);
    }
    if !(0.0..=1.0 + 1e-12).contains(&p) || p.is_nan() {
        return Err(Error::domain(format!("probability {name} = {p} outside [0, 1]")));
    }
    Ok(p.min(1.0))
}

impl PauliChannelParams {
    pub fn new(pi: f64, px: f64, py: f64, pz: f64) -> Result<Self> {
        let pi = clip_probability("p_I", pi)?;
        let px = clip_probability("p_x", px)?;
        let py = clip_probability("p_y", py)?;
        let pz = clip_probability("p_z", pz)?;
        let sum = pi + px + py + pz;
        if (sum - 1.0).abs() > TOL {
            return Err(Error::domain(format!("Pauli probabilities sum to {sum}, not 1")));
        }
        Ok(PauliChannelParams { pi, px, py, pz })
    }

    pub fn identity() -> Self {
        PauliChannelParams {
            pi: 1.0,
            px: 0.0,
            py: 0.0,
            pz: 0.0,
        }
    }

    /// Depolarizing channel: `p/3` for each non-identity operator.
    pub fn depolarizing(p: f64) -> Result<Self> {
        check_unit("p", p)?;
        PauliChannelParams::new(1.0 - p, p / 3.0, p / 3.0, p / 3.0)
    }

    /// Asymmetric Pauli channel from total error probability and asymmetry:
    /// `p_x = p_y = p/(α+2)`, `p_z = αp/(α+2)`.
    pub fn from_alpha(p: f64, alpha: f64) -> Result<Self> {
        check_unit("p", p)?;
        if alpha <= 0.0 || !alpha.is_finite() {
            return Err(Error::domain(format!("alpha = {alpha} must be positive and finite")));
        }
        let px = p / (alpha + 2.0);
        PauliChannelParams::new(1.0 - p, px, px, alpha * px)
    }

    /// Pauli twirl approximation of the APD channel:
    /// `p_x = p_y = γ/4`, `p_z = (2 − γ − 2√(1−γ−(1−γ)λ))/4`.
    pub fn pta(gamma: f64, lambda: f64) -> Result<Self> {
        check_unit("gamma", gamma)?;
        check_unit("lambda", lambda)?;
        let root = (1.0 - gamma - (1.0 - gamma) * lambda).max(0.0).sqrt();
        let px = gamma / 4.0;
        let pz = (2.0 - gamma - 2.0 * root) / 4.0;
        PauliChannelParams::new(1.0 - 2.0 * px - pz, px, px, pz)
    }

    /// Sum of the non-identity probabilities.
    pub fn error_probability(&self) -> f64 {
        self.px + self.py + self.pz
    }

    /// Asymmetry coefficient `α = p_z / p_x`.
    pub fn asymmetry(&self) -> f64 {
        self.pz / self.px
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.pi, self.px, self.py, self.pz]
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Pauli {
        let u: f64 = rng.random();
        if u < self.px {
            Pauli::X
        } else if u < self.px + self.py {
            Pauli::Y
        } else if u < self.px + self.py + self.pz {
            Pauli::Z
        } else {
            Pauli::I
        }
    }
}

/// Depolarizing probability of the Clifford twirled APD channel:
/// `p = (2 + γ − 2√(1−γ−(1−γ)λ))/4`, equal to the non-identity mass of the PTA.
pub fn cta(gamma: f64, lambda: f64) -> Result<f64> {
    check_unit("gamma", gamma)?;
    check_unit("lambda", lambda)?;
    let root = (1.0 - gamma - (1.0 - gamma) * lambda).max(0.0).sqrt();
    Ok((2.0 + gamma - 2.0 * root) / 4.0)
}

/// Asymmetry coefficient `α(t) = p_z/p_x` of the PTA at idle time `t`.
pub fn asymmetry(t: f64, t1: f64, t2: f64) -> Result<f64> {
    let (gamma, lambda) = decoherence_params(t, t1, t2)?;
    let p = PauliChannelParams::pta(gamma, lambda)?;
    Ok(p.asymmetry())
}

/// Small-`t` approximation `α ≈ 2·T1/T2 − 1`.
pub fn asymmetry_approx(t1: f64, t2: f64) -> f64 {
    2.0 * t1 / t2 - 1.0
}

/// Sample an n-qubit error with iid per-qubit draws from `params`.
pub fn sample_error<R: Rng + ?Sized>(params: &PauliChannelParams, n: usize, rng: &mut R) -> PauliString {
    let mut e = PauliString::identity(n);
    for i in 0..n {
        let p = params.draw(rng);
        if p != Pauli::I {
            e.set_qubit(i, p);
        }
    }
    e
}

/// Sample an n-qubit error from the Markovian Pauli channel with
/// correlation `μ`: the first qubit follows `params`, each next qubit
/// repeats the previous operator with probability `μ` and otherwise draws
/// fresh, i.e. `q(A_j | A_{j−1}) = (1−μ)·p_{A_j} + μ·δ`.
pub fn sample_markov_error<R: Rng + ?Sized>(
    params: &PauliChannelParams,
    mu: f64,
    n: usize,
    rng: &mut R,
) -> Result<PauliString> {
    if !(0.0..=1.0).contains(&mu) || mu.is_nan() {
        return Err(Error::domain(format!("mu = {mu} outside [0, 1]")));
    }
    let mut e = PauliString::identity(n);
    let mut prev = Pauli::I;
    for i in 0..n {
        let p = if i == 0 || rng.random::<f64>() >= mu {
            params.draw(rng)
        } else {
            prev
        };
        if p != Pauli::I {
            e.set_qubit(i, p);
        }
        prev = p;
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn decoherence_params_basics() {
        let (g, l) = decoherence_params(0.0, 50.0, 100.0).unwrap();
        assert_eq!((g, l), (0.0, 0.0));
        // Ramsey limit kills pure dephasing at any t
        let (_, l) = decoherence_params(17.3, 50.0, 100.0).unwrap();
        assert_abs_diff_eq!(l, 0.0, epsilon = 1e-15);
        let (g, _) = decoherence_params(5.0, 50.0, 100.0).unwrap();
        assert_abs_diff_eq!(g, 0.09516258196404048, epsilon = 1e-15);
        // T2 > 2*T1 violates the Ramsey constraint
        assert!(decoherence_params(1.0, 50.0, 101.0).is_err());
        assert!(decoherence_params(-1.0, 50.0, 100.0).is_err());
    }

    #[test]
    fn apd_limits() {
        let id = KrausChannel::apd(0.0, 0.0).unwrap();
        let rho = DensityMatrix2::pure(Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8));
        assert!(id.apply(&rho).max_abs_diff(&rho) < 1e-15);
        // full damping sends everything to |0><0|
        let full = KrausChannel::apd(1.0, 0.0).unwrap();
        assert!(full.apply(&rho).max_abs_diff(&DensityMatrix2::ground()) < 1e-15);
    }

    #[test]
    fn kraus_action_matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let gamma: f64 = rng.random();
            let lambda: f64 = rng.random();
            let ch = KrausChannel::apd(gamma, lambda).unwrap();
            assert!(ch.completeness_residual() <= 1e-12);
            let theta: f64 = rng.random::<f64>() * std::f64::consts::PI;
            let phi: f64 = rng.random::<f64>() * 2.0 * std::f64::consts::PI;
            let a = Complex64::new((theta / 2.0).cos(), 0.0);
            let b = Complex64::from_polar((theta / 2.0).sin(), phi);
            let rho = DensityMatrix2::pure(a, b);
            let out = ch.apply(&rho);
            let reference = apd_closed_form(gamma, lambda, &rho);
            assert!(out.max_abs_diff(&reference) <= 1e-12);
            assert!((out.trace() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
            assert!(out.min_eigenvalue() >= -1e-10);
        }
    }

    #[test]
    fn serial_ad_composition_compounds_damping() {
        let g1 = 0.23;
        let g2 = 0.41;
        let composed = KrausChannel::amplitude_damping(g1)
            .unwrap()
            .compose(&KrausChannel::amplitude_damping(g2).unwrap())
            .unwrap();
        let direct = KrausChannel::amplitude_damping(1.0 - (1.0 - g1) * (1.0 - g2)).unwrap();
        let rho = DensityMatrix2::pure(Complex64::new(0.6, 0.0), Complex64::new(0.48, 0.64));
        assert!(composed.apply(&rho).max_abs_diff(&direct.apply(&rho)) <= 1e-12);
    }

    #[test]
    fn pta_values() {
        let p = PauliChannelParams::pta(0.0, 0.0).unwrap();
        assert_eq!(p.as_array(), [1.0, 0.0, 0.0, 0.0]);
        // gamma from t = 0.1*T1, lambda = 0
        let (g, _) = decoherence_params(0.1, 1.0, 2.0).unwrap();
        let p = PauliChannelParams::pta(g, 0.0).unwrap();
        assert_abs_diff_eq!(p.px, 0.02379064549101012, epsilon = 1e-12);
        assert_abs_diff_eq!(p.py, p.px);
        assert_abs_diff_eq!(p.pz, 5.946422586328870e-4, epsilon = 1e-12);
        // lambda = 0, gamma = 0.432 spot value
        let p = PauliChannelParams::pta(0.432, 0.0).unwrap();
        assert_abs_diff_eq!(p.pz, (2.0 - 0.432 - 2.0 * 0.568f64.sqrt()) / 4.0, epsilon = 1e-15);
    }

    #[test]
    fn cta_equals_pta_error_mass() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let g: f64 = rng.random();
            let l: f64 = rng.random();
            let p = PauliChannelParams::pta(g, l).unwrap();
            assert_abs_diff_eq!(cta(g, l).unwrap(), p.error_probability(), epsilon = 1e-12);
        }
        assert_eq!(cta(0.0, 0.0).unwrap(), 0.0);
        // t -> infinity: gamma -> 1, lambda -> ... fully depolarized limit 3/4
        assert_abs_diff_eq!(cta(1.0, 0.0).unwrap(), 0.75, epsilon = 1e-15);
    }

    #[test]
    fn cta_time_parameterization() {
        // t = 0.1*T1 with T2 = 2*T1; two independent algebraic routes
        let (g, l) = decoherence_params(0.1, 1.0, 2.0).unwrap();
        let via_gamma = cta(g, l).unwrap();
        let via_time = 0.75 - 0.25 * (-0.1f64).exp() - 0.5 * (-0.05f64).exp();
        assert_abs_diff_eq!(via_gamma, via_time, epsilon = 1e-12);
        assert_abs_diff_eq!(via_gamma, 0.048175933240653286, epsilon = 1e-12);
    }

    #[test]
    fn twirls_monotone_in_gamma_and_lambda() {
        let grid: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
        for window in grid.windows(2) {
            let (a, b) = (window[0], window[1]);
            for &other in &grid {
                assert!(cta(b, other).unwrap() >= cta(a, other).unwrap() - 1e-14);
                assert!(cta(other, b).unwrap() >= cta(other, a).unwrap() - 1e-14);
                let pa = PauliChannelParams::pta(a, other).unwrap();
                let pb = PauliChannelParams::pta(b, other).unwrap();
                assert!(pb.error_probability() >= pa.error_probability() - 1e-14);
            }
        }
    }

    #[test]
    fn asymmetry_limits() {
        // T1 = T2 at small t is close to depolarizing
        let a = asymmetry(1e-4, 50.0, 50.0).unwrap();
        assert!((a - 1.0).abs() < 1e-3, "alpha = {a}");
        assert_abs_diff_eq!(asymmetry_approx(50.0, 100.0), 0.0);
        // strongly asymmetric device: 2*T1/T2 - 1 = 1e4; the small-t limit
        // needs t << T2 as well
        let t1 = 100.0;
        let t2 = 2.0 * t1 / 10001.0;
        let a = asymmetry(1e-8 * t1, t1, t2).unwrap();
        assert!((a / 1e4 - 1.0).abs() < 0.02, "alpha = {a}");
    }

    #[test]
    fn pauli_from_alpha_shapes() {
        let d = PauliChannelParams::from_alpha(0.3, 1.0).unwrap();
        assert_abs_diff_eq!(d.px, 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(d.pz, 0.1, epsilon = 1e-15);
        let a = PauliChannelParams::from_alpha(0.3, 100.0).unwrap();
        assert_abs_diff_eq!(a.pz, 100.0 * 0.3 / 102.0, epsilon = 1e-15);
        assert_abs_diff_eq!(a.px, 0.3 / 102.0, epsilon = 1e-15);
        let id = PauliChannelParams::from_alpha(0.0, 7.0).unwrap();
        assert_eq!(id.as_array(), [1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn sampler_marginals_match_params() {
        let params = PauliChannelParams::new(0.85, 0.03, 0.05, 0.07).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let n = 4usize;
        let draws = 250_000usize;
        let mut counts = [0u64; 4];
        for _ in 0..draws {
            let e = sample_error(&params, n, &mut rng);
            for q in 0..n {
                counts[match e.qubit(q) {
                    Pauli::I => 0,
                    Pauli::X => 1,
                    Pauli::Y => 2,
                    Pauli::Z => 3,
                }] += 1;
            }
        }
        let total = (draws * n) as f64;
        for (k, &target) in params.as_array().iter().enumerate() {
            let freq = counts[k] as f64 / total;
            let sigma = (target * (1.0 - target) / total).sqrt();
            assert!(
                (freq - target).abs() <= 4.0 * sigma,
                "marginal {k}: {freq} vs {target}"
            );
        }
        // degenerate params
        let ident = PauliChannelParams::identity();
        assert!(sample_error(&ident, 64, &mut rng).is_identity());
        assert_eq!(sample_error(&ident, 0, &mut rng).n(), 0);
    }

    #[test]
    fn markov_sampler_limits_and_transitions() {
        let params = PauliChannelParams::depolarizing(0.3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        // mu = 1: all qubits carry the same operator
        for _ in 0..50 {
            let e = sample_markov_error(&params, 1.0, 16, &mut rng).unwrap();
            let first = e.qubit(0);
            assert!((0..16).all(|i| e.qubit(i) == first));
        }
        // mu = 0.5: empirical transition matrix within 4 sigma of (1-mu) p + mu delta
        let mu = 0.5;
        let n = 1_000_001usize;
        let e = sample_markov_error(&params, mu, n, &mut rng).unwrap();
        let idx = |p: Pauli| match p {
            Pauli::I => 0usize,
            Pauli::X => 1,
            Pauli::Y => 2,
            Pauli::Z => 3,
        };
        let mut trans = [[0u64; 4]; 4];
        let mut from = [0u64; 4];
        for i in 1..n {
            let a = idx(e.qubit(i - 1));
            let b = idx(e.qubit(i));
            trans[a][b] += 1;
            from[a] += 1;
        }
        let p = params.as_array();
        for a in 0..4 {
            for b in 0..4 {
                let target = (1.0 - mu) * p[b] + if a == b { mu } else { 0.0 };
                let freq = trans[a][b] as f64 / from[a] as f64;
                let sigma = (target * (1.0 - target) / from[a] as f64).sqrt();
                assert!(
                    (freq - target).abs() <= 4.0 * sigma,
                    "q({b}|{a}) = {freq} vs {target}"
                );
            }
        }
        assert!(sample_markov_error(&params, 1.5, 4, &mut rng).is_err());
    }

    #[test]
    fn probability_clipping() {
        // tiny negative rounding residue is clamped
        let p = PauliChannelParams::new(1.0, -1e-16, 0.0, 1e-16).unwrap();
        assert_eq!(p.px, 0.0);
        // larger negatives are rejected
        assert!(PauliChannelParams::new(1.0, -1e-9, 0.0, 1e-9).is_err());
        assert!(PauliChannelParams::new(0.5, 0.1, 0.1, 0.1).is_err());
    }
}
