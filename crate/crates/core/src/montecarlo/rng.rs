//! Keyed counter-based randomness.
//!
//! Every random quantity of a replication is a pure function of
//! `(seed, replication, attempt)` and of what it belongs to (a tile of the
//! lattice, an ordered pair of APs), so results do not depend on evaluation
//! order or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer.
pub fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Purpose tags so that different uses of the same ids never collide.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Salt {
    Tile = 1,
    Mark = 2,
    Sense = 3,
    Interference = 4,
    Signal = 5,
    Uplink = 6,
    PointId = 7,
}

/// Identity of one realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RepKey {
    pub seed: u64,
    pub replication: u64,
    pub attempt: u64,
}

impl RepKey {
    pub fn new(seed: u64, replication: u64) -> Self {
        Self {
            seed,
            replication,
            attempt: 0,
        }
    }

    pub fn with_attempt(self, attempt: u64) -> Self {
        Self { attempt, ..self }
    }

    pub fn hash(&self, salt: Salt, parts: &[u64]) -> u64 {
        let mut h = mix(self.seed ^ GOLDEN);
        for p in [self.replication, self.attempt, salt as u64]
            .into_iter()
            .chain(parts.iter().copied())
        {
            h = mix(h.wrapping_add(GOLDEN) ^ mix(p.wrapping_add(GOLDEN)));
        }
        h
    }

    /// Uniform in the open interval (0, 1).
    pub fn uniform(&self, salt: Salt, parts: &[u64]) -> f64 {
        to_open_unit(self.hash(salt, parts))
    }

    /// Generator for one lattice tile.
    pub fn tile_rng(&self, tx: i64, ty: i64) -> ChaCha8Rng {
        let mut seed = [0u8; 32];
        for (k, chunk) in seed.chunks_exact_mut(8).enumerate() {
            let word = self.hash(Salt::Tile, &[tx as u64, ty as u64, k as u64]);
            chunk.copy_from_slice(&word.to_le_bytes());
        }
        ChaCha8Rng::from_seed(seed)
    }
}

fn to_open_unit(bits: u64) -> f64 {
    ((bits >> 12) as f64 + 0.5) * (1.0 / (1u64 << 52) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn uniforms_are_open_and_keyed() {
        let k = RepKey::new(7, 3);
        let u = k.uniform(Salt::Sense, &[1, 2]);
        assert!(u > 0.0 && u < 1.0);
        assert_eq!(u, k.uniform(Salt::Sense, &[1, 2]));
        assert_ne!(u, k.uniform(Salt::Sense, &[2, 1]));
        assert_ne!(u, k.uniform(Salt::Interference, &[1, 2]));
        assert_ne!(u, k.with_attempt(1).uniform(Salt::Sense, &[1, 2]));
        assert!(to_open_unit(0) > 0.0 && to_open_unit(u64::MAX) < 1.0);
    }

    #[test]
    fn uniform_mean() {
        let k = RepKey::new(1, 0);
        let n = 200_000;
        let mean: f64 = (0..n).map(|i| k.uniform(Salt::Mark, &[i])).sum::<f64>() / n as f64;
        assert!((mean - 0.5).abs() < 3.0 * (1.0 / 12f64).sqrt() / (n as f64).sqrt() * 1.5);
    }

    #[test]
    fn tile_streams_are_reproducible() {
        let k = RepKey::new(42, 9);
        let a: Vec<u64> = k.tile_rng(-3, 5).random_iter().take(4).collect();
        let b: Vec<u64> = k.tile_rng(-3, 5).random_iter().take(4).collect();
        let c: Vec<u64> = k.tile_rng(5, -3).random_iter().take(4).collect();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
