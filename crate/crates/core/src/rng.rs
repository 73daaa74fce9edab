//! Reproducible per-path random streams.
//!
//! ChaCha is a counter-based generator: the key is derived from the master
//! seed and a purpose tag, and the 64-bit stream id is the path index, so
//! path `i` draws the same numbers regardless of which worker runs it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a stream feeds. Different purposes never share numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum StreamPurpose {
    Bridge = 1,
    Free = 2,
    Bessel = 3,
    Refinement = 4,
    Sampling = 5,
}

pub type PathRng = ChaCha8Rng;

/// Stream for `(seed, purpose, index)`.
pub fn path_stream(seed: u64, purpose: StreamPurpose, index: u64) -> PathRng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(purpose as u64).to_le_bytes());
    key[16..24].copy_from_slice(b"polebrdg");
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}
