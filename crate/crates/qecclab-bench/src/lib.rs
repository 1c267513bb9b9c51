//! Shared helpers for the criterion benchmarks.

use qecclab::channels::{sample_error, PauliChannelParams};
use qecclab::pauli::PauliString;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Pre-sampled depolarizing errors so benchmarks measure decoding alone.
pub fn error_batch(n_qubits: usize, p: f64, count: usize, seed: u64) -> Vec<PauliString> {
    let params = PauliChannelParams::depolarizing(p).expect("valid p");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| sample_error(&params, n_qubits, &mut rng)).collect()
}
