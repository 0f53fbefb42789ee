//! Seed derivation and the portable PRNG used across every pipeline stage.
//!
//! All randomness flows from a single run seed. Child seeds are derived by
//! mixing the parent with labels through SplitMix64, so each record gets an
//! independent stream and records can be produced in any order (or in
//! parallel) without changing the result.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator behind every seeded operation.
pub type StdRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> StdRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// 64-bit FNV-1a, used to turn string labels into seed material.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// Derive a child seed from `parent` and a sequence of numeric labels.
pub fn derive(parent: u64, labels: &[u64]) -> u64 {
    labels
        .iter()
        .fold(splitmix64(parent), |acc, l| splitmix64(acc ^ splitmix64(*l)))
}

/// Derive a child seed from `parent`, a string label and numeric labels.
pub fn derive_named(parent: u64, name: &str, labels: &[u64]) -> u64 {
    derive(derive(parent, &[fnv1a(name.as_bytes())]), labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn derivation_is_stable_and_label_sensitive() {
        assert_eq!(derive(7, &[1, 2]), derive(7, &[1, 2]));
        assert_ne!(derive(7, &[1, 2]), derive(7, &[2, 1]));
        assert_ne!(derive_named(7, "a", &[]), derive_named(7, "b", &[]));
    }

    #[test]
    fn seeded_streams_replay() {
        let a: Vec<u32> = (0..8).map(|_| 0).scan(seeded(3), |r, _: u32| Some(r.random())).collect();
        let b: Vec<u32> = (0..8).map(|_| 0).scan(seeded(3), |r, _: u32| Some(r.random())).collect();
        assert_eq!(a, b);
    }
}
