//! Seeded random streams.
//!
//! Every random decision in a run draws from a stream derived from the run
//! seed and a fixed path (purpose, agent, day, session). Streams are
//! independent of evaluation order, so agent policies may be evaluated in
//! parallel without changing any outcome.

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Stream purposes used as the first element of a derivation path.
pub mod purpose {
    pub const INIT_AGENTS: u64 = 1;
    pub const SEQUENCE: u64 = 2;
    pub const TRADE: u64 = 3;
    pub const LOAN: u64 = 4;
    pub const ESTIMATE: u64 = 5;
    pub const POST: u64 = 6;
}

/// Single-owner deterministic random stream.
#[derive(Clone, Debug)]
pub struct RngStream(ChaCha8Rng);

pub fn seeded_rng(seed: u64) -> RngStream {
    RngStream(ChaCha8Rng::seed_from_u64(seed))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngStream {
    /// Substream for `path` under `seed`.
    pub fn derive(seed: u64, path: &[u64]) -> Self {
        let mixed = path
            .iter()
            .fold(splitmix64(seed), |acc, &p| splitmix64(acc ^ splitmix64(p)));
        seeded_rng(mixed)
    }

    /// Uniform integer in `0..n`. `n` must be positive.
    pub fn below(&mut self, n: u64) -> u64 {
        self.0.random_range(0..n)
    }

    /// Uniform integer in `lo..=hi`.
    pub fn between(&mut self, lo: i64, hi: i64) -> i64 {
        self.0.random_range(lo..=hi)
    }

    pub fn coin(&mut self) -> bool {
        self.0.random_bool(0.5)
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        items.shuffle(&mut self.0);
    }

    /// Uniform permutation of `0..n`.
    pub fn permutation(&mut self, n: usize) -> Vec<usize> {
        let mut v: Vec<usize> = (0..n).collect();
        self.shuffle(&mut v);
        v
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.0.fill_bytes(dst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_seeds_equal_streams() {
        let mut a = seeded_rng(42);
        let mut b = seeded_rng(42);
        let ta: Vec<u64> = (0..3).map(|_| a.next_u64()).collect();
        let tb: Vec<u64> = (0..3).map(|_| b.next_u64()).collect();
        assert_eq!(ta, tb);
    }

    #[test]
    fn adjacent_seeds_differ() {
        assert_ne!(seeded_rng(42).next_u64(), seeded_rng(43).next_u64());
    }

    #[test]
    fn first_draw_is_pinned() {
        // Golden values from ChaCha8 seeded via seed_from_u64.
        assert_eq!(seeded_rng(42).next_u64(), GOLDEN_SEED_42);
        assert_eq!(seeded_rng(43).next_u64(), GOLDEN_SEED_43);
    }

    const GOLDEN_SEED_42: u64 = 12578764544318200737;
    const GOLDEN_SEED_43: u64 = 1473335034287276021;

    #[test]
    fn permutation_is_bijection() {
        let mut p = seeded_rng(0).permutation(10);
        p.sort_unstable();
        assert_eq!(p, (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn derived_streams_depend_on_path() {
        let a = RngStream::derive(7, &[1, 2, 3]).next_u64();
        let b = RngStream::derive(7, &[1, 2, 4]).next_u64();
        let c = RngStream::derive(7, &[1, 2, 3]).next_u64();
        assert_ne!(a, b);
        assert_eq!(a, c);
    }
}
