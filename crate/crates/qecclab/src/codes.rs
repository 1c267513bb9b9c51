//! Small stabilizer codes with exact, enumerable decoders.
//!
//! The `[[5,1,3]]` code is the workhorse: its 1024 errors and 16 syndromes
//! allow lookup decoding, exact per-qubit posteriors (the stand-in for a
//! SISO decoder's conditional error probabilities) and degeneracy-aware
//! maximum-likelihood decoding, all by brute-force enumeration.

use crate::channels::PauliChannelParams;
use crate::error::{Error, Result};
use crate::pauli::{ParityCheckMatrix, Pauli, PauliString};

/// Logical coset label relative to the code's chosen representatives.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LogicalClass {
    Identity,
    X,
    Y,
    Z,
}

impl LogicalClass {
    pub const ALL: [LogicalClass; 4] = [
        LogicalClass::Identity,
        LogicalClass::X,
        LogicalClass::Y,
        LogicalClass::Z,
    ];
}

/// GF(2) span of `(z|x)` bit patterns for codes with `2n <= 64` bits,
/// built by incremental Gaussian elimination.
#[derive(Clone, Debug)]
struct Gf2Span {
    rows: Vec<u64>,
}

impl Gf2Span {
    fn new() -> Self {
        Gf2Span { rows: vec![] }
    }

    fn reduce(&self, mut v: u64) -> u64 {
        for &r in &self.rows {
            let pivot = 1u64 << (63 - r.leading_zeros());
            if v & pivot != 0 {
                v ^= r;
            }
        }
        v
    }

    fn insert(&mut self, v: u64) -> bool {
        let v = self.reduce(v);
        if v == 0 {
            return false;
        }
        self.rows.push(v);
        self.rows.sort_unstable_by(|a, b| b.cmp(a));
        true
    }

    fn contains(&self, v: u64) -> bool {
        self.reduce(v) == 0
    }
}

fn pack(e: &PauliString) -> u64 {
    let n = e.n();
    debug_assert!(n <= 32);
    let mut v = 0u64;
    for i in 0..n {
        if e.z_bit(i) {
            v |= 1 << (2 * n - 1 - i);
        }
        if e.x_bit(i) {
            v |= 1 << (n - 1 - i);
        }
    }
    v
}

/// A small stabilizer code with a syndrome lookup table and logical
/// representatives found by exhaustive search.
#[derive(Clone, Debug)]
pub struct StabilizerCode {
    pcm: ParityCheckMatrix,
    stabilizer_span: Gf2Span,
    logical_x: PauliString,
    logical_z: PauliString,
    lookup: Vec<PauliString>,
}

/// Enumerate all 4^n Pauli strings on n qubits in a fixed order.
fn enumerate_errors(n: usize) -> impl Iterator<Item = PauliString> {
    let count = 4usize.pow(n as u32);
    (0..count).map(move |code| {
        let mut e = PauliString::identity(n);
        let mut c = code;
        for i in 0..n {
            let p = match c & 3 {
                0 => Pauli::I,
                1 => Pauli::X,
                2 => Pauli::Y,
                _ => Pauli::Z,
            };
            e.set_qubit(i, p);
            c >>= 2;
        }
        e
    })
}

fn syndrome_index(bits: &[u8]) -> usize {
    bits.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize)
}

impl StabilizerCode {
    /// Build a code from stabilizer generators (`k = n − rows`, `n <= 10`).
    ///
    /// The lookup table stores, for every syndrome, the minimum-weight
    /// error with that syndrome, ties broken by the lexicographically
    /// smallest `(z|x)` bit pattern. Logical representatives are the
    /// smallest zero-syndrome non-stabilizer element and the smallest one
    /// anticommuting with it.
    pub fn new(generators: Vec<PauliString>) -> Result<Self> {
        let pcm = ParityCheckMatrix::new(generators)?;
        let n = pcm.n();
        if n > 10 {
            return Err(Error::Construction(format!(
                "exhaustive decoder tables are limited to n <= 10, got {n}"
            )));
        }
        let mut stabilizer_span = Gf2Span::new();
        for row in pcm.rows() {
            stabilizer_span.insert(pack(row));
        }

        let n_syndromes = 1usize << pcm.rows().len();
        let mut lookup: Vec<Option<PauliString>> = vec![None; n_syndromes];
        let mut logical_x: Option<PauliString> = None;
        let mut logical_z: Option<PauliString> = None;
        let mut candidates: Vec<PauliString> = enumerate_errors(n).collect();
        candidates.sort_by(|a, b| a.weight().cmp(&b.weight()).then(a.lex_cmp(b)));
        for e in candidates {
            let idx = syndrome_index(&pcm.syndrome(&e)?);
            if lookup[idx].is_none() {
                lookup[idx] = Some(e.clone());
            }
            if idx == 0 && !stabilizer_span.contains(pack(&e)) {
                match &logical_x {
                    None => logical_x = Some(e),
                    Some(lx) => {
                        if logical_z.is_none() && lx.symplectic_product(&e)? == 1 {
                            logical_z = Some(e);
                        }
                    }
                }
            }
        }
        let lookup: Vec<PauliString> = lookup
            .into_iter()
            .collect::<Option<_>>()
            .ok_or_else(|| Error::Construction("some syndrome has no representative".into()))?;
        Ok(StabilizerCode {
            pcm,
            stabilizer_span,
            logical_x: logical_x.ok_or_else(|| Error::Construction("no logical X found".into()))?,
            logical_z: logical_z.ok_or_else(|| Error::Construction("no logical Z found".into()))?,
            lookup,
        })
    }

    pub fn n(&self) -> usize {
        self.pcm.n()
    }

    pub fn k(&self) -> usize {
        self.pcm.k()
    }

    pub fn pcm(&self) -> &ParityCheckMatrix {
        &self.pcm
    }

    pub fn logical_x(&self) -> &PauliString {
        &self.logical_x
    }

    pub fn logical_z(&self) -> &PauliString {
        &self.logical_z
    }

    pub fn syndrome(&self, e: &PauliString) -> Result<Vec<u8>> {
        self.pcm.syndrome(e)
    }

    /// Minimum-weight representative for a syndrome.
    pub fn decode_lookup(&self, syndrome: &[u8]) -> Result<&PauliString> {
        if syndrome.len() != self.pcm.rows().len() {
            return Err(Error::LengthMismatch {
                left: self.pcm.rows().len(),
                right: syndrome.len(),
            });
        }
        Ok(&self.lookup[syndrome_index(syndrome)])
    }

    /// True iff `e` lies in the stabilizer group.
    pub fn is_stabilizer(&self, e: &PauliString) -> bool {
        self.stabilizer_span.contains(pack(e))
    }

    /// Degeneracy-aware success: the residual `true_error · correction`
    /// lies in the stabilizer group.
    pub fn is_degenerate_success(&self, true_error: &PauliString, correction: &PauliString) -> Result<bool> {
        Ok(self.is_stabilizer(&true_error.multiply(correction)?))
    }

    /// Logical coset of a zero-syndrome-relative error: which class
    /// representative maps `e · lookup(s(e))` into the stabilizer group.
    pub fn logical_class(&self, e: &PauliString) -> Result<LogicalClass> {
        let rep = self.decode_lookup(&self.syndrome(e)?)?;
        let residual = e.multiply(rep)?;
        for class in LogicalClass::ALL {
            let shifted = residual.multiply(&self.class_representative(class))?;
            if self.is_stabilizer(&shifted) {
                return Ok(class);
            }
        }
        unreachable!("the four logical classes partition the zero-syndrome coset");
    }

    /// Representative operator of a logical class.
    pub fn class_representative(&self, class: LogicalClass) -> PauliString {
        match class {
            LogicalClass::Identity => PauliString::identity(self.n()),
            LogicalClass::X => self.logical_x.clone(),
            LogicalClass::Z => self.logical_z.clone(),
            LogicalClass::Y => self.logical_x.multiply(&self.logical_z).expect("same n"),
        }
    }

    /// Channel probability of one error under iid per-qubit params.
    fn error_probability(&self, e: &PauliString, params: &PauliChannelParams) -> f64 {
        let mut p = 1.0;
        for i in 0..self.n() {
            p *= match e.qubit(i) {
                Pauli::I => params.pi,
                Pauli::X => params.px,
                Pauli::Y => params.py,
                Pauli::Z => params.pz,
            };
        }
        p
    }

    /// Exact per-qubit posteriors `P(E_i = g | s)` by enumerating all 4^n
    /// errors consistent with the syndrome. Each row sums to 1.
    pub fn posterior_marginals(&self, syndrome: &[u8], params: &PauliChannelParams) -> Result<Vec<[f64; 4]>> {
        if syndrome.len() != self.pcm.rows().len() {
            return Err(Error::LengthMismatch {
                left: self.pcm.rows().len(),
                right: syndrome.len(),
            });
        }
        let n = self.n();
        let mut marginals = vec![[0.0f64; 4]; n];
        let mut total = 0.0f64;
        for e in enumerate_errors(n) {
            if self.pcm.syndrome(&e)? != syndrome {
                continue;
            }
            let p = self.error_probability(&e, params);
            total += p;
            for i in 0..n {
                let g = match e.qubit(i) {
                    Pauli::I => 0,
                    Pauli::X => 1,
                    Pauli::Y => 2,
                    Pauli::Z => 3,
                };
                marginals[i][g] += p;
            }
        }
        if total <= 0.0 {
            return Err(Error::domain(
                "syndrome has zero probability under these channel parameters".to_string(),
            ));
        }
        for row in &mut marginals {
            for v in row.iter_mut() {
                *v /= total;
            }
        }
        Ok(marginals)
    }

    /// Degenerate quantum maximum-likelihood decoding: argmax over the
    /// 4^k logical classes of the summed probability of the stabilizer
    /// coset consistent with the syndrome.
    pub fn decode_dqmld(&self, syndrome: &[u8], params: &PauliChannelParams) -> Result<LogicalClass> {
        let rep = self.decode_lookup(syndrome)?.clone();
        let mut best = (LogicalClass::Identity, f64::NEG_INFINITY);
        for class in LogicalClass::ALL {
            let leader = rep.multiply(&self.class_representative(class))?;
            let total = self.coset_probability(&leader, params);
            if total > best.1 {
                best = (class, total);
            }
        }
        Ok(best.0)
    }

    /// Summed channel probability of `leader · S` over the stabilizer group.
    fn coset_probability(&self, leader: &PauliString, params: &PauliChannelParams) -> f64 {
        let gens = self.pcm.rows();
        let mut total = 0.0;
        for mask in 0u32..(1 << gens.len()) {
            let mut e = leader.clone();
            for (g, row) in gens.iter().enumerate() {
                if mask >> g & 1 == 1 {
                    e.multiply_assign(row);
                }
            }
            total += self.error_probability(&e, params);
        }
        total
    }

    /// Non-degenerate maximum-likelihood decoding: logical class of the
    /// single most probable error consistent with the syndrome.
    pub fn decode_qmld(&self, syndrome: &[u8], params: &PauliChannelParams) -> Result<LogicalClass> {
        let mut best: Option<(f64, PauliString)> = None;
        for e in enumerate_errors(self.n()) {
            if syndrome_index(&self.pcm.syndrome(&e)?) != syndrome_index(syndrome) {
                continue;
            }
            let p = self.error_probability(&e, params);
            if best.as_ref().map_or(true, |(bp, _)| p > *bp) {
                best = Some((p, e));
            }
        }
        let (_, e) = best.expect("every syndrome has errors");
        self.logical_class(&e)
    }
}

/// The `[[5,1,3]]` code generated by ZZZZI, ZXYIZ, XXXXI, XYZIX.
pub fn five_qubit_code() -> StabilizerCode {
    let gens = ["ZZZZI", "ZXYIZ", "XXXXI", "XYZIX"]
        .iter()
        .map(|s| PauliString::from_labels(s).expect("valid labels"))
        .collect();
    StabilizerCode::new(gens).expect("the [[5,1,3]] code is well formed")
}
