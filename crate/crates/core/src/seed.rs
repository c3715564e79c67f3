//! Deterministic seed derivation.
//!
//! Seeds are folded with the SplitMix64 finalizer:
//! `h = mix(h ^ part)` for each part, starting from `h = mix(master)`.
//! Every random stream in the crate is `ChaCha8Rng::seed_from_u64` of a
//! derived seed, so results do not depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(master: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(mix(master), |h, &p| mix(h ^ p))
}

/// Seed of one sweep row.
pub fn row_seed(master: u64, n: usize, d: usize, r: usize) -> u64 {
    derive_seed(master, &[n as u64, d as u64, r as u64])
}

/// Random stream of one trial.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, &[trial as u64]))
}

/// Stable 64-bit digest of a residue sequence.
pub fn digest(values: impl IntoIterator<Item = u32>) -> u64 {
    values.into_iter().fold(mix(0), |h, v| mix(h ^ v as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    #[test]
    fn stable_values() {
        // frozen so that reports stay reproducible across releases
        assert_eq!(derive_seed(0, &[]), mix(0));
        assert_eq!(mix(0), 0xE220_A839_7B1D_CDAF);
        assert_ne!(row_seed(0, 2, 6, 2), row_seed(0, 2, 6, 3));
        assert_ne!(row_seed(0, 2, 6, 2), row_seed(1, 2, 6, 2));
    }

    #[test]
    fn trial_streams_are_reproducible_and_distinct() {
        let a = trial_rng(7, 0).next_u64();
        assert_eq!(a, trial_rng(7, 0).next_u64());
        assert_ne!(a, trial_rng(7, 1).next_u64());
    }
}
