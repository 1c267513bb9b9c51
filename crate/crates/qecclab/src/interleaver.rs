//! Interleaver constructions and their spread/dispersion metrics.
//!
//! A quantum interleaver here is a pure qubit permutation (identity
//! single-qubit symplectic parts), so it acts on Pauli strings by index
//! scrambling. Constructors: uniform random, S-random, Welch-Costas and
//! the JPL recurrence; metrics: achieved spread and dispersion.

use crate::error::{Error, Result};
use crate::pauli::PauliString;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

/// A permutation of `{0..N−1}`; `apply` maps qubit `i` of the output to
/// qubit `π(i)` of the input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    /// Build from an explicit target list, validating bijectivity.
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &v in &map {
            if v >= n || seen[v] {
                return Err(Error::Construction(format!(
                    "mapping is not a bijection on 0..{n} (target {v})"
                )));
            }
            seen[v] = true;
        }
        Ok(Permutation { map })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            map: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn targets(&self) -> &[usize] {
        &self.map
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.map.len()];
        for (i, &v) in self.map.iter().enumerate() {
            inv[v] = i;
        }
        Permutation { map: inv }
    }

    /// Permute a Pauli string: output qubit `i` carries input qubit `π(i)`.
    pub fn apply(&self, e: &PauliString) -> Result<PauliString> {
        if e.n() != self.map.len() {
            return Err(Error::LengthMismatch {
                left: self.map.len(),
                right: e.n(),
            });
        }
        let mut out = PauliString::identity(e.n());
        for (i, &src) in self.map.iter().enumerate() {
            out.set_qubit(i, e.qubit(src));
        }
        Ok(out)
    }

    /// Undo [`Permutation::apply`].
    pub fn apply_inverse(&self, e: &PauliString) -> Result<PauliString> {
        if e.n() != self.map.len() {
            return Err(Error::LengthMismatch {
                left: self.map.len(),
                right: e.n(),
            });
        }
        let mut out = PauliString::identity(e.n());
        for (i, &src) in self.map.iter().enumerate() {
            out.set_qubit(src, e.qubit(i));
        }
        Ok(out)
    }

    /// Serialize as the line-oriented file format: `N`, then the targets.
    pub fn to_file_string(&self) -> String {
        let targets: Vec<String> = self.map.iter().map(|v| v.to_string()).collect();
        format!("{}\n{}\n", self.map.len(), targets.join(" "))
    }

    /// Parse the file format produced by [`Permutation::to_file_string`].
    pub fn from_file_string(text: &str) -> Result<Self> {
        let mut tokens = text.split_whitespace();
        let n: usize = tokens
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse("missing permutation length".to_string()))?;
        let map: Vec<usize> = tokens
            .map(|t| {
                t.parse()
                    .map_err(|_| Error::Parse(format!("bad target '{t}'")))
            })
            .collect::<Result<_>>()?;
        if map.len() != n {
            return Err(Error::Parse(format!(
                "expected {n} targets, found {}",
                map.len()
            )));
        }
        Permutation::new(map)
    }
}

/// Uniformly random permutation.
pub fn random_interleaver<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Permutation {
    let mut map: Vec<usize> = (0..n).collect();
    map.shuffle(rng);
    Permutation { map }
}

/// S-random interleaver: every pair of positions within distance `S` maps
/// at least `S + 1` apart.
///
/// Randomized greedy placement; a stalled placement unwinds a random
/// stretch of recent choices and retries, and the whole attempt restarts
/// from scratch once `10·N` placements have stalled. Errors after
/// `max_restarts` full restarts.
pub fn s_random<R: Rng + ?Sized>(n: usize, s: usize, rng: &mut R, max_restarts: u32) -> Result<Permutation> {
    if s >= n {
        return Err(Error::domain(format!("S = {s} must be below N = {n}")));
    }
    let stall_budget = 10 * n as u64;
    for _restart in 0..max_restarts {
        let mut deck: Vec<usize> = (0..n).collect();
        deck.shuffle(rng);
        let mut placed: Vec<usize> = Vec::with_capacity(n);
        let mut stalls = 0u64;
        while placed.len() < n {
            let i = placed.len();
            let lo = i.saturating_sub(s);
            let pick = deck
                .iter()
                .position(|&v| placed[lo..].iter().all(|&w| v.abs_diff(w) > s));
            match pick {
                Some(idx) => placed.push(deck.swap_remove(idx)),
                None => {
                    stalls += 1;
                    if stalls > stall_budget {
                        break;
                    }
                    let unwind = rng.random_range(1..=(2 * s + 1).min(placed.len()));
                    for _ in 0..unwind {
                        deck.push(placed.pop().expect("nonempty"));
                    }
                    deck.shuffle(rng);
                }
            }
        }
        if placed.len() == n {
            return Permutation::new(placed);
        }
    }
    Err(Error::Construction(format!(
        "S-random({n}, {s}) failed after {max_restarts} restarts"
    )))
}

fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: usize) -> Vec<usize> {
    let mut out = vec![];
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn modpow(mut base: u64, mut exp: u64, modulus: u64) -> u64 {
    let mut acc = 1u64;
    base %= modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % modulus;
        }
        base = base * base % modulus;
        exp >>= 1;
    }
    acc
}

/// Welch-Costas interleaver `π(i) = (α^i mod (N+1)) − 1` for prime `N+1`
/// and a primitive `α`.
pub fn welch_costas(n: usize, alpha: u64) -> Result<Permutation> {
    let p = n + 1;
    if !is_prime(p) {
        return Err(Error::Construction(format!("N + 1 = {p} is not prime")));
    }
    let alpha = alpha % p as u64;
    if alpha <= 1 {
        return Err(Error::Construction(format!("alpha = {alpha} cannot generate Z_{p}*")));
    }
    for q in prime_factors(n) {
        if modpow(alpha, (n / q) as u64, p as u64) == 1 {
            return Err(Error::Construction(format!(
                "alpha = {alpha} is not primitive modulo {p} (order divides N/{q})"
            )));
        }
    }
    let mut map = Vec::with_capacity(n);
    let mut power = 1u64; // alpha^0
    for _ in 0..n {
        map.push(power as usize - 1);
        power = power * alpha % p as u64;
    }
    Permutation::new(map)
}

/// Primes driving the JPL intra-row offsets.
const JPL_PRIMES: [u64; 8] = [31, 37, 43, 47, 53, 59, 61, 67];

/// JPL interleaver for `N = k1·k2`. The printed recurrence produces the
/// write order `s ↦ π(s)` (1-based); the returned permutation is its
/// read-side orientation, validated as a bijection rather than repaired.
pub fn jpl(n: usize, k1: usize) -> Result<Permutation> {
    if k1 == 0 || n == 0 || n % k1 != 0 {
        return Err(Error::domain(format!("k1 = {k1} must divide N = {n}")));
    }
    if k1 % 2 != 0 {
        return Err(Error::domain(format!("k1 = {k1} must be even")));
    }
    let k2 = n / k1;
    let mut write_order = Vec::with_capacity(n);
    for s in 1..=n as u64 {
        let m = (s - 1) % 2;
        let i = (s - 1) / (2 * k2 as u64);
        let j = (s - 1) / 2 - i * k2 as u64;
        let t = (19 * i + 1) % (k1 as u64 / 2);
        let q = t % 8 + 1;
        let c = (JPL_PRIMES[q as usize - 1] * j + 21 * m) % k2 as u64;
        let pi_s = 2 * (t + c * k1 as u64 / 2 + 1) - m;
        let target = pi_s as usize - 1; // to 0-based at the boundary
        if target >= n {
            return Err(Error::Construction(format!(
                "JPL recurrence left the index range at s = {s} (π = {pi_s})"
            )));
        }
        write_order.push(target);
    }
    Ok(Permutation::new(write_order)?.inverse())
}

/// Achieved spread: the largest `s` such that every pair of positions
/// within distance `s` maps at least `s` apart.
pub fn spread(perm: &Permutation) -> usize {
    let n = perm.len();
    if n < 2 {
        return n;
    }
    let map = perm.targets();
    // min_gap[k] = min over |i-j| = k of |π(i) − π(j)|
    let min_gap = |k: usize| -> usize {
        (0..n - k)
            .map(|i| map[i].abs_diff(map[i + k]))
            .min()
            .unwrap_or(usize::MAX)
    };
    let mut prefix_min = usize::MAX;
    let mut best = 0;
    for s in 1..n {
        prefix_min = prefix_min.min(min_gap(s));
        if prefix_min >= s {
            best = s;
        } else {
            break;
        }
    }
    best
}

/// Dispersion `η = |D(π)| / C(N,2)` with displacement vectors
/// `D = {(j−i, π(j)−π(i)) : i < j}`. The pair scan is bitset-based and
/// parallelized over row ranges with a union merge.
pub fn dispersion(perm: &Permutation) -> f64 {
    let n = perm.len();
    if n < 2 {
        return 0.0;
    }
    let map = perm.targets();
    let span = 2 * n - 1; // π(j) − π(i) ranges over ±(n−1)
    let words = (n - 1) * span / 64 + 1;
    let chunk = n.div_ceil(rayon::current_num_threads().max(1));
    let merged = (0..n)
        .into_par_iter()
        .chunks(chunk.max(1))
        .map(|rows| {
            let mut bits = vec![0u64; words];
            for i in rows {
                for j in i + 1..n {
                    let d = j - i - 1;
                    let v = (map[j] as i64 - map[i] as i64 + n as i64 - 1) as usize;
                    let idx = d * span + v;
                    bits[idx / 64] |= 1 << (idx % 64);
                }
            }
            bits
        })
        .reduce(
            || vec![0u64; words],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x |= y;
                }
                a
            },
        );
    let distinct: u64 = merged.iter().map(|w| w.count_ones() as u64).sum();
    distinct as f64 / (n as f64 * (n as f64 - 1.0) / 2.0)
}
