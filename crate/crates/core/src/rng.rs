//! Seeded randomness.
//!
//! Every stream is a ChaCha8 generator whose 256-bit key is produced by
//! running SplitMix64 over the tuple `(seed, epoch, iteration, role)`.
//! Streams for different tuples are therefore independent keys rather than
//! offsets into one sequence, which lets an optimizer hand each epoch, step,
//! and purpose its own generator without threading state through the run.
//! Outputs are identical on every platform for identical call sequences.

use rand::{Rng as _, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Purpose tag mixed into stream derivation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Role {
    /// Directions for the full-batch anchor estimate of an epoch.
    Anchor = 1,
    /// Mini-batch index draw for an inner step.
    MiniBatch = 2,
    /// Directions for the estimates of an inner step.
    Directions = 3,
    /// Selection of the returned iterate.
    Output = 4,
    /// Problem and dataset generation.
    Data = 5,
    /// Anything else a caller wants kept separate.
    Aux = 6,
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(GOLDEN);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seeded generator. Not `Clone`: workers derive their own sub-streams.
#[derive(Debug)]
pub struct Rng {
    inner: ChaCha8Rng,
}

impl Rng {
    pub fn seed_from(seed: u64) -> Self {
        Self::from_words(&[seed])
    }

    /// Sub-stream keyed by `(seed, epoch, iteration, role)`.
    pub fn for_stream(seed: u64, epoch: u64, iteration: u64, role: Role) -> Self {
        Self::from_words(&[seed, epoch, iteration, role as u64])
    }

    /// Derives a child stream from this generator's next output and `tag`.
    pub fn split(&mut self, tag: u64) -> Self {
        let base = self.inner.next_u64();
        Self::from_words(&[base, tag, Role::Aux as u64])
    }

    fn from_words(words: &[u64]) -> Self {
        let mut state = 0u64;
        for &w in words {
            state ^= w;
            state = splitmix64(&mut state);
        }
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        Rng { inner: ChaCha8Rng::from_seed(key) }
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Uniform integer in `[0, n)`.
    pub fn below(&mut self, n: usize) -> usize {
        self.inner.random_range(0..n)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    pub(crate) fn inner_mut(&mut self) -> &mut ChaCha8Rng {
        &mut self.inner
    }
}
