//! Simulation and analysis workbench for decoherence in quantum devices.
//!
//! The library covers four layers that build on each other:
//!
//! - **Channel models**: Kraus-operator amplitude/phase damping, their
//!   Pauli/Clifford twirl approximations, and Pauli error sampling
//!   ([`channels`]), driven by stochastic relaxation-time models
//!   ([`stochastic`]).
//! - **Information limits**: quantum capacities, hashing bounds, noise
//!   limits and the quantum outage probability of slowly time-varying
//!   channels ([`info`]), plus diamond-norm distances and skew-adjusted
//!   boxplot statistics ([`distances`]).
//! - **Codes**: binary symplectic Pauli algebra ([`pauli`]), the
//!   `[[5,1,3]]` stabilizer code with exact decoders ([`codes`]), the
//!   Kitaev toric code with an exact minimum-weight perfect-matching
//!   decoder ([`toric`], [`matching`]), and turbo-code interleaver
//!   constructions with spread/dispersion metrics ([`interleaver`]).
//! - **Experiments**: channel identification via Fisher information and
//!   the online decoder-coupled estimator ([`estimation`]), and a
//!   deterministic Monte Carlo word-error-rate engine ([`harness`]).
//!
//! Everything is deterministic given a seed: samplers take explicit RNG
//! handles and the Monte Carlo engine derives per-trial substreams from a
//! master seed, so results are independent of worker count.

pub mod channels;
pub mod codes;
pub mod distances;
pub mod error;
pub mod estimation;
pub mod harness;
pub mod info;
pub mod interleaver;
pub mod matching;
pub mod pauli;
pub mod stochastic;
pub mod toric;

pub use channels::{DensityMatrix2, KrausChannel, PauliChannelParams};
pub use error::{Error, Result};
pub use pauli::{ParityCheckMatrix, Pauli, PauliString};
pub use stochastic::{TruncGauss, TvPreset};
