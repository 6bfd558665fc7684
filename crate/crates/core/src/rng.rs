//! Seeded random number generation.
//!
//! Every operation that draws randomness takes an explicit generator, so a
//! run is fully determined by its configured seed. `ChaCha8` keeps streams
//! identical across platforms, unlike `StdRng` whose algorithm may change
//! between `rand` releases.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SeededRng = ChaCha8Rng;

/// Builds a generator from a bare `u64` seed.
pub fn seeded(seed: u64) -> SeededRng {
    SeededRng::seed_from_u64(seed)
}

/// Mixes a seed with lane/step/worker style coordinates into a fresh seed.
///
/// Training derives one independent stream per (step, purpose, worker)
/// coordinate from the single configured seed, so single-worker and
/// multi-worker runs can consume identical noise where the contract
/// requires it. SplitMix64 finalization keeps the map well spread.
pub fn derive_seed(seed: u64, coords: &[u64]) -> u64 {
    let mut z = seed;
    for &c in coords {
        z = splitmix64(z ^ splitmix64(c.wrapping_add(0x9e37_79b9_7f4a_7c15)));
    }
    splitmix64(z)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    #[test]
    fn same_seed_same_stream() {
        let mut a = seeded(42);
        let mut b = seeded(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn derived_seeds_differ_across_coordinates() {
        let s = 7;
        let a = derive_seed(s, &[0, 0]);
        let b = derive_seed(s, &[0, 1]);
        let c = derive_seed(s, &[1, 0]);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_ne!(b, c);
        // and stable
        assert_eq!(a, derive_seed(s, &[0, 0]));
    }
}
