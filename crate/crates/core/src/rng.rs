//! Seed derivation for reproducible, schedule-independent random streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finaliser.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from a parent seed and a path of indices.
pub fn derive(seed: u64, path: &[u64]) -> u64 {
    path.iter().fold(mix64(seed), |acc, &p| mix64(acc ^ mix64(p.wrapping_add(0x5851_F42D_4C95_7F2D))))
}

/// A generator for the stream identified by `(seed, path)`.
pub fn stream(seed: u64, path: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(seed, path))
}

/// Order-sensitive hash of a symbol sequence.
pub fn hash_seq(seq: &[u8]) -> u64 {
    seq.iter()
        .fold(0xCBF2_9CE4_8422_2325_u64, |acc, &s| mix64(acc ^ u64::from(s)))
        ^ seq.len() as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: u64 = stream(7, &[1, 2]).random();
        let b: u64 = stream(7, &[1, 2]).random();
        let c: u64 = stream(7, &[2, 1]).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn sequence_hash_depends_on_order_and_length() {
        assert_ne!(hash_seq(&[0, 1]), hash_seq(&[1, 0]));
        assert_ne!(hash_seq(&[0]), hash_seq(&[0, 0]));
    }
}
