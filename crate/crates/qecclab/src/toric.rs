//! The d×d Kitaev toric code with exact MWPM decoding.
//!
//! Qubits sit on lattice edges with periodic boundaries: `h(r, c)` joins
//! vertex `(r, c)` to `(r, c+1)` and `v(r, c)` joins `(r, c)` to
//! `(r+1, c)`, all mod d, giving `n = 2d²` qubits. Vertex stabilizers are
//! X-type, plaquette stabilizers Z-type (standard Kitaev convention).
//! The Z parts of an error flip vertex checks and the X parts flip
//! plaquette checks; each side is decoded independently by exact
//! minimum-weight perfect matching with toroidal Manhattan distances.

use crate::error::{Error, Result};
use crate::matching::min_weight_pairing;
use crate::pauli::{Pauli, PauliString};

/// Edge orientation on the lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Horizontal,
    Vertical,
}

/// Which stabilizer family a defect set belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StabKind {
    /// X-type checks on vertices, flipped by Z error components.
    Vertex,
    /// Z-type checks on plaquettes, flipped by X error components.
    Plaquette,
}

/// Lattice coordinates of flipped checks, one set per stabilizer type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DefectSet {
    pub kind: StabKind,
    pub coords: Vec<(usize, usize)>,
}

/// A `[[2d², 2, d]]` toric code.
#[derive(Clone, Debug)]
pub struct ToricCode {
    d: usize,
    vertex_stabs: Vec<PauliString>,
    plaquette_stabs: Vec<PauliString>,
    logical_x: [PauliString; 2],
    logical_z: [PauliString; 2],
}

/// Decoding outcome of one error-correction round.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecodeOutcome {
    /// Residual lies in the stabilizer group.
    Success,
    /// Residual acts as a logical X on at least one encoded qubit.
    XFailure,
    /// Residual acts as a logical Z on at least one encoded qubit.
    ZFailure,
    /// Residual has both logical X and logical Z action.
    YFailure,
}

pub fn build_toric(d: usize) -> Result<ToricCode> {
    if d < 2 {
        return Err(Error::domain(format!("toric code needs d >= 2, got {d}")));
    }
    Ok(ToricCode::new(d))
}

impl ToricCode {
    fn new(d: usize) -> Self {
        let n = 2 * d * d;
        let h = |r: usize, c: usize| (r % d) * d + (c % d);
        let v = |r: usize, c: usize| d * d + (r % d) * d + (c % d);

        let mut vertex_stabs = Vec::with_capacity(d * d);
        let mut plaquette_stabs = Vec::with_capacity(d * d);
        for r in 0..d {
            for c in 0..d {
                // star at vertex (r, c): X on the four incident edges
                let mut star = PauliString::identity(n);
                for q in [h(r, c), h(r, c + d - 1), v(r, c), v(r + d - 1, c)] {
                    star.set_qubit(q, Pauli::X);
                }
                vertex_stabs.push(star);
                // plaquette with top-left corner (r, c): Z on its boundary
                let mut plaq = PauliString::identity(n);
                for q in [h(r, c), h(r + 1, c), v(r, c), v(r, c + 1)] {
                    plaq.set_qubit(q, Pauli::Z);
                }
                plaquette_stabs.push(plaq);
            }
        }

        // non-contractible loops: logical Z on primal loops, logical X on
        // the edge sets crossed by dual loops
        let mut z1 = PauliString::identity(n);
        let mut z2 = PauliString::identity(n);
        let mut x1 = PauliString::identity(n);
        let mut x2 = PauliString::identity(n);
        for i in 0..d {
            z1.set_qubit(h(0, i), Pauli::Z); // horizontal primal loop
            z2.set_qubit(v(i, 0), Pauli::Z); // vertical primal loop
            x1.set_qubit(h(i, 0), Pauli::X); // vertical dual loop
            x2.set_qubit(v(0, i), Pauli::X); // horizontal dual loop
        }
        ToricCode {
            d,
            vertex_stabs,
            plaquette_stabs,
            logical_x: [x1, x2],
            logical_z: [z1, z2],
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Number of physical qubits, `2d²`.
    pub fn n(&self) -> usize {
        2 * self.d * self.d
    }

    /// Number of encoded qubits.
    pub fn k(&self) -> usize {
        2
    }

    pub fn vertex_stabs(&self) -> &[PauliString] {
        &self.vertex_stabs
    }

    pub fn plaquette_stabs(&self) -> &[PauliString] {
        &self.plaquette_stabs
    }

    /// Logical X representatives; `logical_x()[i]` anticommutes with
    /// `logical_z()[i]` only.
    pub fn logical_x(&self) -> &[PauliString; 2] {
        &self.logical_x
    }

    pub fn logical_z(&self) -> &[PauliString; 2] {
        &self.logical_z
    }

    /// Flat index of the edge at `(row, col, orientation)`.
    pub fn qubit_index(&self, row: usize, col: usize, o: Orientation) -> usize {
        let d = self.d;
        match o {
            Orientation::Horizontal => (row % d) * d + (col % d),
            Orientation::Vertical => d * d + (row % d) * d + (col % d),
        }
    }

    /// Syndrome as flipped-check coordinate sets, `(vertex, plaquette)`.
    pub fn syndrome(&self, e: &PauliString) -> Result<(DefectSet, DefectSet)> {
        if e.n() != self.n() {
            return Err(Error::LengthMismatch {
                left: self.n(),
                right: e.n(),
            });
        }
        let d = self.d;
        let mut vertex = vec![];
        let mut plaquette = vec![];
        for r in 0..d {
            for c in 0..d {
                if self.vertex_stabs[r * d + c].symplectic_product(e)? == 1 {
                    vertex.push((r, c));
                }
                if self.plaquette_stabs[r * d + c].symplectic_product(e)? == 1 {
                    plaquette.push((r, c));
                }
            }
        }
        Ok((
            DefectSet {
                kind: StabKind::Vertex,
                coords: vertex,
            },
            DefectSet {
                kind: StabKind::Plaquette,
                coords: plaquette,
            },
        ))
    }

    fn toroidal_distance(&self, a: (usize, usize), b: (usize, usize)) -> i64 {
        let d = self.d as i64;
        let dr = (a.0 as i64 - b.0 as i64).abs();
        let dc = (a.1 as i64 - b.1 as i64).abs();
        dr.min(d - dr) + dc.min(d - dc)
    }

    /// Geodesic path between two defects, rows first then columns,
    /// preferring the non-wrapping direction on ties. For vertex defects
    /// the path runs on the primal lattice and carries Z; for plaquette
    /// defects it runs on the dual lattice and carries X.
    fn apply_path(&self, correction: &mut PauliString, from: (usize, usize), to: (usize, usize), kind: StabKind) {
        let d = self.d;
        let (mut r, c0) = from;
        let (r2, c2) = to;
        let down_steps = (r2 + d - r) % d;
        let up_steps = (r + d - r2) % d;
        // tie between the two directions picks the non-wrapping walk
        let go_down = down_steps < up_steps || (down_steps == up_steps && r2 >= r);
        let row_steps = down_steps.min(up_steps);
        for _ in 0..row_steps {
            match kind {
                StabKind::Vertex => {
                    // vertex (r, c0) <-> (r±1, c0) via a vertical edge
                    let edge = if go_down {
                        self.qubit_index(r, c0, Orientation::Vertical)
                    } else {
                        self.qubit_index((r + d - 1) % d, c0, Orientation::Vertical)
                    };
                    correction.flip_z(edge);
                }
                StabKind::Plaquette => {
                    // plaquette (r, c0) <-> (r±1, c0) crosses a horizontal edge
                    let edge = if go_down {
                        self.qubit_index((r + 1) % d, c0, Orientation::Horizontal)
                    } else {
                        self.qubit_index(r, c0, Orientation::Horizontal)
                    };
                    correction.flip_x(edge);
                }
            }
            r = if go_down { (r + 1) % d } else { (r + d - 1) % d };
        }
        let mut c = c0;
        let right_steps = (c2 + d - c) % d;
        let left_steps = (c + d - c2) % d;
        let go_right = right_steps < left_steps || (right_steps == left_steps && c2 >= c);
        let col_steps = right_steps.min(left_steps);
        for _ in 0..col_steps {
            match kind {
                StabKind::Vertex => {
                    // vertex (r2, c) <-> (r2, c±1) via a horizontal edge
                    let edge = if go_right {
                        self.qubit_index(r2, c, Orientation::Horizontal)
                    } else {
                        self.qubit_index(r2, (c + d - 1) % d, Orientation::Horizontal)
                    };
                    correction.flip_z(edge);
                }
                StabKind::Plaquette => {
                    // plaquette (r2, c) <-> (r2, c±1) crosses a vertical edge
                    let edge = if go_right {
                        self.qubit_index(r2, (c + 1) % d, Orientation::Vertical)
                    } else {
                        self.qubit_index(r2, c, Orientation::Vertical)
                    };
                    correction.flip_x(edge);
                }
            }
            c = if go_right { (c + 1) % d } else { (c + d - 1) % d };
        }
        debug_assert_eq!((r, c), (r2, c2));
    }

    /// Exact MWPM correction for one defect set: match defects on the
    /// complete graph with toroidal Manhattan weights, then join matched
    /// pairs by geodesic paths.
    pub fn mwpm_correction(&self, defects: &DefectSet) -> Result<PauliString> {
        let mut correction = PauliString::identity(self.n());
        let m = defects.coords.len();
        if m == 0 {
            return Ok(correction);
        }
        if m % 2 != 0 {
            return Err(Error::Construction(format!("odd defect count {m} cannot arise on a torus")));
        }
        let weights: Vec<Vec<i64>> = defects
            .coords
            .iter()
            .map(|&a| defects.coords.iter().map(|&b| self.toroidal_distance(a, b)).collect())
            .collect();
        let (_, pairs) = min_weight_pairing(&weights)?;
        for (i, j) in pairs {
            self.apply_path(&mut correction, defects.coords[i], defects.coords[j], defects.kind);
        }
        Ok(correction)
    }

    /// Full decode of an error: syndrome extraction plus MWPM on both
    /// stabilizer types.
    pub fn decode(&self, e: &PauliString) -> Result<PauliString> {
        let (vertex, plaquette) = self.syndrome(e)?;
        let mut correction = self.mwpm_correction(&vertex)?;
        correction.multiply_assign(&self.mwpm_correction(&plaquette)?);
        Ok(correction)
    }

    /// Classify the residual `true_error · correction`: success iff it
    /// commutes with all four logical representatives (residual in the
    /// stabilizer group), otherwise the failure type names which logical
    /// actions it carries.
    pub fn logical_failure(&self, true_error: &PauliString, correction: &PauliString) -> Result<DecodeOutcome> {
        let residual = true_error.multiply(correction)?;
        debug_assert!({
            let (v, p) = self.syndrome(&residual)?;
            v.coords.is_empty() && p.coords.is_empty()
        });
        // anticommuting with a logical Z representative means the residual
        // carries the paired logical X action, and vice versa
        let x_action = self.logical_z.iter().any(|l| residual.symplectic_product(l).unwrap() == 1);
        let z_action = self.logical_x.iter().any(|l| residual.symplectic_product(l).unwrap() == 1);
        Ok(match (x_action, z_action) {
            (false, false) => DecodeOutcome::Success,
            (true, false) => DecodeOutcome::XFailure,
            (false, true) => DecodeOutcome::ZFailure,
            (true, true) => DecodeOutcome::YFailure,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::min_weight_pairing_bruteforce;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn construction_invariants() {
        for d in [2usize, 3, 5] {
            let code = build_toric(d).unwrap();
            assert_eq!(code.n(), 2 * d * d);
            assert_eq!(code.k(), 2);
            assert_eq!(code.vertex_stabs().len(), d * d);
            assert_eq!(code.plaquette_stabs().len(), d * d);
            let all: Vec<&PauliString> = code
                .vertex_stabs()
                .iter()
                .chain(code.plaquette_stabs())
                .collect();
            for s in &all {
                assert_eq!(s.weight(), 4);
            }
            // full commutation matrix of generators is zero
            for a in &all {
                for b in &all {
                    assert_eq!(a.symplectic_product(b).unwrap(), 0);
                }
            }
            // one dependency per type: the product of all vertex (plaquette)
            // operators is the identity
            let mut prod_v = PauliString::identity(code.n());
            let mut prod_p = PauliString::identity(code.n());
            for s in code.vertex_stabs() {
                prod_v.multiply_assign(s);
            }
            for s in code.plaquette_stabs() {
                prod_p.multiply_assign(s);
            }
            assert!(prod_v.is_identity());
            assert!(prod_p.is_identity());
            // every stabilizer commutes with every logical
            for s in &all {
                for l in code.logical_x().iter().chain(code.logical_z()) {
                    assert_eq!(s.symplectic_product(l).unwrap(), 0);
                }
            }
            // logical pairing: X_i anticommutes with Z_i only
            for i in 0..2 {
                for j in 0..2 {
                    let expect = u8::from(i == j);
                    assert_eq!(
                        code.logical_x()[i].symplectic_product(&code.logical_z()[j]).unwrap(),
                        expect
                    );
                }
                assert_eq!(code.logical_x()[i].weight(), d);
                assert_eq!(code.logical_z()[i].weight(), d);
            }
        }
        assert!(build_toric(1).is_err());
    }

    #[test]
    fn single_error_syndromes() {
        let code = build_toric(3).unwrap();
        let id = PauliString::identity(code.n());
        let (v, p) = code.syndrome(&id).unwrap();
        assert!(v.coords.is_empty() && p.coords.is_empty());
        // single X flips exactly the two adjacent plaquettes
        let mut x = PauliString::identity(code.n());
        x.set_qubit(code.qubit_index(1, 2, Orientation::Horizontal), Pauli::X);
        let (v, p) = code.syndrome(&x).unwrap();
        assert!(v.coords.is_empty());
        assert_eq!(p.coords.len(), 2);
        // single Y triggers both stabilizer types
        let mut y = PauliString::identity(code.n());
        y.set_qubit(code.qubit_index(0, 0, Orientation::Vertical), Pauli::Y);
        let (v, p) = code.syndrome(&y).unwrap();
        assert_eq!(v.coords.len(), 2);
        assert_eq!(p.coords.len(), 2);
    }

    #[test]
    fn two_defect_geodesic_and_empty_case() {
        let code = build_toric(5).unwrap();
        let empty = DefectSet {
            kind: StabKind::Vertex,
            coords: vec![],
        };
        assert!(code.mwpm_correction(&empty).unwrap().is_identity());
        // a two-qubit Z string produces two vertex defects joined by a
        // geodesic of the same length
        let mut e = PauliString::identity(code.n());
        e.set_qubit(code.qubit_index(1, 1, Orientation::Vertical), Pauli::Z);
        e.set_qubit(code.qubit_index(2, 1, Orientation::Vertical), Pauli::Z);
        let (v, _) = code.syndrome(&e).unwrap();
        assert_eq!(v.coords.len(), 2);
        let corr = code.mwpm_correction(&v).unwrap();
        assert_eq!(corr.weight(), 2);
        assert_eq!(code.logical_failure(&e, &corr).unwrap(), DecodeOutcome::Success);
    }

    #[test]
    fn decoder_clears_syndrome_every_time() {
        let code = build_toric(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let params = crate::channels::PauliChannelParams::depolarizing(0.12).unwrap();
        for _ in 0..500 {
            let e = crate::channels::sample_error(&params, code.n(), &mut rng);
            let corr = code.decode(&e).unwrap();
            let residual = e.multiply(&corr).unwrap();
            let (v, p) = code.syndrome(&residual).unwrap();
            assert!(v.coords.is_empty());
            assert!(p.coords.is_empty());
            // classification must not panic on any residual
            let _ = code.logical_failure(&e, &corr).unwrap();
        }
    }

    #[test]
    fn matching_weight_equals_bruteforce_on_random_defect_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..200 {
            let d = 3 + rng.random_range(0..7usize); // up to d = 9
            let code = build_toric(d).unwrap();
            let m = 2 * (1 + rng.random_range(0..4usize)); // 2..=8 defects
            let mut coords = vec![];
            while coords.len() < m {
                let cand = (rng.random_range(0..d), rng.random_range(0..d));
                if !coords.contains(&cand) {
                    coords.push(cand);
                }
            }
            let weights: Vec<Vec<i64>> = coords
                .iter()
                .map(|&a| coords.iter().map(|&b| code.toroidal_distance(a, b)).collect())
                .collect();
            let (exact, _) = min_weight_pairing_bruteforce(&weights).unwrap();
            let (got, _) = min_weight_pairing(&weights).unwrap();
            assert_eq!(got, exact);
        }
    }

    #[test]
    fn all_single_type_weight_one_errors_corrected_d3() {
        let code = build_toric(3).unwrap();
        for q in 0..code.n() {
            for pauli in [Pauli::X, Pauli::Z] {
                let mut e = PauliString::identity(code.n());
                e.set_qubit(q, pauli);
                let corr = code.decode(&e).unwrap();
                assert_eq!(
                    code.logical_failure(&e, &corr).unwrap(),
                    DecodeOutcome::Success,
                    "failed on weight-1 {pauli:?} at qubit {q}"
                );
            }
        }
    }

    #[test]
    fn sampled_weight_two_single_type_errors_corrected_d5() {
        // weight <= floor((d-1)/2) = 2 of a single type is always corrected
        let code = build_toric(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..300 {
            let q1 = rng.random_range(0..code.n());
            let mut q2 = rng.random_range(0..code.n());
            while q2 == q1 {
                q2 = rng.random_range(0..code.n());
            }
            let pauli = if rng.random::<bool>() { Pauli::X } else { Pauli::Z };
            let mut e = PauliString::identity(code.n());
            e.set_qubit(q1, pauli);
            e.set_qubit(q2, pauli);
            let corr = code.decode(&e).unwrap();
            assert_eq!(
                code.logical_failure(&e, &corr).unwrap(),
                DecodeOutcome::Success,
                "failed on {pauli:?} pair ({q1}, {q2})"
            );
        }
    }

    #[test]
    fn residual_classification() {
        let code = build_toric(3).unwrap();
        let id = PauliString::identity(code.n());
        // correction == error
        let e = code.logical_x()[0].clone();
        assert_eq!(code.logical_failure(&e, &e).unwrap(), DecodeOutcome::Success);
        // residual equal to a stabilizer generator is a degenerate success
        let s = code.vertex_stabs()[4].clone();
        assert_eq!(code.logical_failure(&s, &id).unwrap(), DecodeOutcome::Success);
        // residual equal to a logical X loop
        assert_eq!(
            code.logical_failure(&code.logical_x()[0], &id).unwrap(),
            DecodeOutcome::XFailure
        );
        assert_eq!(
            code.logical_failure(&code.logical_z()[1], &id).unwrap(),
            DecodeOutcome::ZFailure
        );
        let xy = code.logical_x()[0].multiply(&code.logical_z()[0]).unwrap();
        assert_eq!(code.logical_failure(&xy, &id).unwrap(), DecodeOutcome::YFailure);
    }
}
