//! Binary symplectic representation of n-fold Pauli operators.
//!
//! An n-qubit Pauli operator is stored as a pair of n-bit vectors in the
//! `(z|x)` layout: qubit `i` carries `I`, `X`, `Y` or `Z` according to the
//! bit pair `(z_i, x_i)` being `(0,0)`, `(0,1)`, `(1,1)` or `(1,0)`.
//! Overall phases are dropped throughout (the effective Pauli group), so
//! the group product is a plain XOR and commutation is captured by the
//! symplectic product.

use crate::error::{Error, Result};
use rand::Rng;
use std::fmt;

/// Single-qubit Pauli operator, phaseless.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    /// Bit pair `(z, x)` under the symplectic map.
    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (false, true),
            Pauli::Y => (true, true),
            Pauli::Z => (true, false),
        }
    }

    pub fn from_bits(z: bool, x: bool) -> Self {
        match (z, x) {
            (false, false) => Pauli::I,
            (false, true) => Pauli::X,
            (true, true) => Pauli::Y,
            (true, false) => Pauli::Z,
        }
    }

    pub fn label(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_label(c: char) -> Result<Self> {
        match c {
            'I' | 'i' => Ok(Pauli::I),
            'X' | 'x' => Ok(Pauli::X),
            'Y' | 'y' => Ok(Pauli::Y),
            'Z' | 'z' => Ok(Pauli::Z),
            other => Err(Error::UnknownLabel(other)),
        }
    }
}

/// An n-qubit Pauli operator as a length-2n bit vector `(z̄|x̄)`.
///
/// Bits are packed into machine words; `n` is limited only by memory.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    z: Vec<u64>,
    x: Vec<u64>,
}

fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

impl PauliString {
    /// The identity operator on `n` qubits.
    pub fn identity(n: usize) -> Self {
        let w = words_for(n);
        PauliString {
            n,
            z: vec![0; w],
            x: vec![0; w],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn z_bit(&self, i: usize) -> bool {
        assert!(i < self.n);
        self.z[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn x_bit(&self, i: usize) -> bool {
        assert!(i < self.n);
        self.x[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn qubit(&self, i: usize) -> Pauli {
        Pauli::from_bits(self.z_bit(i), self.x_bit(i))
    }

    pub fn set_qubit(&mut self, i: usize, p: Pauli) {
        assert!(i < self.n);
        let (z, x) = p.bits();
        let (w, b) = (i / 64, i % 64);
        self.z[w] = self.z[w] & !(1 << b) | (z as u64) << b;
        self.x[w] = self.x[w] & !(1 << b) | (x as u64) << b;
    }

    /// Flip the Z part on qubit `i` (multiply by Z).
    pub fn flip_z(&mut self, i: usize) {
        assert!(i < self.n);
        self.z[i / 64] ^= 1 << (i % 64);
    }

    /// Flip the X part on qubit `i` (multiply by X).
    pub fn flip_x(&mut self, i: usize) {
        assert!(i < self.n);
        self.x[i / 64] ^= 1 << (i % 64);
    }

    /// Build from a label sequence such as `[Z, X, Y, I, Z]`.
    pub fn from_paulis(labels: &[Pauli]) -> Self {
        let mut s = PauliString::identity(labels.len());
        for (i, &p) in labels.iter().enumerate() {
            s.set_qubit(i, p);
        }
        s
    }

    /// Parse the text form, e.g. `"IIXII"`.
    pub fn from_labels(text: &str) -> Result<Self> {
        let labels: Vec<Pauli> = text.chars().map(Pauli::from_label).collect::<Result<_>>()?;
        Ok(PauliString::from_paulis(&labels))
    }

    /// Text form, e.g. `"IIXII"`. Exact inverse of [`PauliString::from_labels`].
    pub fn to_labels(&self) -> String {
        (0..self.n).map(|i| self.qubit(i).label()).collect()
    }

    /// Parse the binary form, e.g. `"00000|00100"` for `(z̄|x̄)`.
    pub fn from_binary(text: &str) -> Result<Self> {
        let (zs, xs) = text
            .split_once('|')
            .ok_or_else(|| Error::Parse(format!("missing '|' separator in {text:?}")))?;
        if zs.len() != xs.len() {
            return Err(Error::Parse(format!(
                "z and x halves differ in length: {} vs {}",
                zs.len(),
                xs.len()
            )));
        }
        let mut s = PauliString::identity(zs.len());
        for (i, (zc, xc)) in zs.chars().zip(xs.chars()).enumerate() {
            let z = match zc {
                '0' => false,
                '1' => true,
                other => return Err(Error::Parse(format!("invalid bit '{other}'"))),
            };
            let x = match xc {
                '0' => false,
                '1' => true,
                other => return Err(Error::Parse(format!("invalid bit '{other}'"))),
            };
            s.set_qubit(i, Pauli::from_bits(z, x));
        }
        Ok(s)
    }

    /// Binary form `"z̄|x̄"`. Exact inverse of [`PauliString::from_binary`].
    pub fn to_binary(&self) -> String {
        let mut out = String::with_capacity(2 * self.n + 1);
        for i in 0..self.n {
            out.push(if self.z_bit(i) { '1' } else { '0' });
        }
        out.push('|');
        for i in 0..self.n {
            out.push(if self.x_bit(i) { '1' } else { '0' });
        }
        out
    }

    /// Number of non-identity tensor factors.
    pub fn weight(&self) -> usize {
        self.z
            .iter()
            .zip(&self.x)
            .map(|(z, x)| (z | x).count_ones() as usize)
            .sum()
    }

    pub fn is_identity(&self) -> bool {
        self.z.iter().all(|&w| w == 0) && self.x.iter().all(|&w| w == 0)
    }

    fn check_len(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::LengthMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }

    /// Symplectic product `(z̄·x̄'ᵀ + z̄'·x̄ᵀ) mod 2`; 0 iff the operators commute.
    pub fn symplectic_product(&self, other: &Self) -> Result<u8> {
        self.check_len(other)?;
        let mut acc = 0u32;
        for i in 0..self.z.len() {
            acc ^= (self.z[i] & other.x[i]).count_ones() ^ (other.z[i] & self.x[i]).count_ones();
        }
        Ok((acc & 1) as u8)
    }

    pub fn commutes_with(&self, other: &Self) -> Result<bool> {
        Ok(self.symplectic_product(other)? == 0)
    }

    /// Effective (phaseless) group product: componentwise XOR of `(z|x)`.
    pub fn multiply(&self, other: &Self) -> Result<PauliString> {
        self.check_len(other)?;
        let z = self.z.iter().zip(&other.z).map(|(a, b)| a ^ b).collect();
        let x = self.x.iter().zip(&other.x).map(|(a, b)| a ^ b).collect();
        Ok(PauliString { n: self.n, z, x })
    }

    /// In-place XOR with `other`.
    pub fn multiply_assign(&mut self, other: &Self) {
        assert_eq!(self.n, other.n);
        for i in 0..self.z.len() {
            self.z[i] ^= other.z[i];
            self.x[i] ^= other.x[i];
        }
    }

    /// Uniformly random string over all 4^n operators.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut s = PauliString::identity(n);
        for i in 0..n {
            let p = match rng.random_range(0..4u8) {
                0 => Pauli::I,
                1 => Pauli::X,
                2 => Pauli::Y,
                _ => Pauli::Z,
            };
            s.set_qubit(i, p);
        }
        s
    }

    /// Qubit-order lexicographic comparison of the `(z̄|x̄)` bit pattern,
    /// z half first. Used for deterministic tie-breaking.
    pub fn lex_cmp(&self, other: &Self) -> std::cmp::Ordering {
        debug_assert_eq!(self.n, other.n);
        for i in 0..self.n {
            match self.z_bit(i).cmp(&other.z_bit(i)) {
                std::cmp::Ordering::Equal => {}
                ord => return ord,
            }
        }
        for i in 0..self.n {
            match self.x_bit(i).cmp(&other.x_bit(i)) {
                std::cmp::Ordering::Equal => {}
                ord => return ord,
            }
        }
        std::cmp::Ordering::Equal
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({})", self.to_labels())
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_labels())
    }
}

/// Parity check matrix of a stabilizer code: one `(z|x)` row per generator.
#[derive(Clone, Debug)]
pub struct ParityCheckMatrix {
    rows: Vec<PauliString>,
    n: usize,
}

impl ParityCheckMatrix {
    /// Build from stabilizer generators, enforcing abelianity.
    pub fn new(rows: Vec<PauliString>) -> Result<Self> {
        let n = rows
            .first()
            .ok_or_else(|| Error::Construction("parity check matrix needs at least one row".into()))?
            .n();
        for row in &rows {
            if row.n() != n {
                return Err(Error::LengthMismatch {
                    left: n,
                    right: row.n(),
                });
            }
        }
        for i in 0..rows.len() {
            for j in i + 1..rows.len() {
                if rows[i].symplectic_product(&rows[j])? == 1 {
                    return Err(Error::Construction(format!(
                        "stabilizer generators {i} and {j} anticommute"
                    )));
                }
            }
        }
        Ok(ParityCheckMatrix { rows, n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of logical qubits, `n - (number of generators)`.
    pub fn k(&self) -> usize {
        self.n - self.rows.len()
    }

    pub fn rows(&self) -> &[PauliString] {
        &self.rows
    }

    /// Row-wise symplectic product with `e`, one syndrome bit per generator.
    pub fn syndrome(&self, e: &PauliString) -> Result<Vec<u8>> {
        self.rows.iter().map(|row| row.symplectic_product(e)).collect()
    }
}
