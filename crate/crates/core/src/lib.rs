//! Generation and verification of elements in the intersection of normal
//! closures `R_0 ∩ R_1 ∩ … ∩ R_n` of a free group of rank `n`, where
//! `R_i = ⟨x_i⟩^F` for `i ≥ 1` and `R_0 = ⟨x_1 x_2 … x_n⟩^F`.
//!
//! The crate is organised bottom-up:
//!
//! * [`words`]: reduced words and the free-group operations on them.
//! * [`commexpr`]: commutator expressions and their text syntax.
//! * [`closures`]: normal-closure membership, algebraic distance,
//!   multi-labels and the Sanov matrix cross-check.
//! * [`sampling`]: naive and bracket-style samplers, commutator trees.
//! * [`stats`]: Dyck paths, valleys, the two-sample KS test.
//! * [`baselines`]: random search, (1+1)-evolutionary search, greedy.
//! * [`datasets`]: training / negative / evaluation record streams and
//!   their JSONL and token serializations.
//! * [`metrics`]: completion ratio, reduction ratio, evaluation harness.
//! * [`cli`]: the `freegroup` command line.

pub mod baselines;
pub mod cli;
pub mod closures;
pub mod commexpr;
pub mod datasets;
mod error;
pub mod metrics;
pub mod sampling;
pub mod stats;
pub mod words;

pub use error::{Error, Result};
pub use words::{Rank, Word};

use rand::SeedableRng;

/// The random generator used throughout the crate. ChaCha keeps streams
/// stable across platforms and `rand` releases.
pub type Rng = rand_chacha::ChaCha8Rng;

/// Builds the crate's generator from a 64-bit seed.
pub fn seeded_rng(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}
