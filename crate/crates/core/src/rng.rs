//! Reproducible random streams.
//!
//! Every random draw in the crate goes through a [`SeedStream`]. A stream is
//! identified by a 64-bit master seed and a stream index; the pair fully
//! determines the draw sequence. Parallel work units each own a distinct
//! stream index so results do not depend on scheduling.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

#[derive(Debug, Clone)]
pub struct SeedStream {
    master_seed: u64,
    stream_index: u64,
    rng: ChaCha20Rng,
}

impl SeedStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(master_seed);
        rng.set_stream(stream_index);
        Self {
            master_seed,
            stream_index,
            rng,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    /// A fresh stream sharing this stream's master seed.
    pub fn sibling(&self, stream_index: u64) -> Self {
        Self::new(self.master_seed, stream_index)
    }
}

impl RngCore for SeedStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Mixes `(master, index)` into a new 64-bit seed (SplitMix64 finalizer).
///
/// Used to hand every replicate of an experiment its own master seed.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master
        .wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn equal_ids_give_equal_sequences() {
        let mut a = SeedStream::new(7, 3);
        let mut b = SeedStream::new(7, 3);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn distinct_streams_differ() {
        let mut a = SeedStream::new(7, 0);
        let mut b = SeedStream::new(7, 1);
        let xa: Vec<u64> = (0..8).map(|_| a.next_u64()).collect();
        let xb: Vec<u64> = (0..8).map(|_| b.next_u64()).collect();
        assert_ne!(xa, xb);
    }

    #[test]
    fn distinct_streams_are_uncorrelated() {
        let mut a = SeedStream::new(11, 0);
        let mut b = SeedStream::new(11, 1);
        let n = 20_000;
        let xs: Vec<(f64, f64)> = (0..n)
            .map(|_| (a.random::<f64>() - 0.5, b.random::<f64>() - 0.5))
            .collect();
        let cov: f64 = xs.iter().map(|(x, y)| x * y).sum::<f64>() / n as f64;
        // var of a uniform(-1/2, 1/2) is 1/12; standard error of the covariance ~ (1/12)/sqrt(n)
        assert!(cov.abs() < 4.0 * (1.0 / 12.0) / (n as f64).sqrt(), "cov = {cov}");
    }

    #[test]
    fn derived_seeds_are_distinct() {
        let seeds: std::collections::HashSet<u64> = (0..1000).map(|i| derive_seed(42, i)).collect();
        assert_eq!(seeds.len(), 1000);
    }
}
