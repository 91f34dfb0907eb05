//! Deterministic seed derivation.
//!
//! Every random quantity in a trial comes from one of three independent
//! streams (waveform, channel, noise) derived from a single trial seed, so an
//! experiment can hold one factor fixed while varying the others.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn combine(acc: u64, value: u64) -> u64 {
    splitmix64(acc ^ splitmix64(value))
}

/// Seed for Monte Carlo trial `index` at `snr_db`.
pub fn trial_seed(base_seed: u64, index: usize, snr_db: f64) -> u64 {
    let acc = combine(splitmix64(base_seed), index as u64);
    combine(acc, snr_db.to_bits())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedStreams {
    pub waveform: u64,
    pub channel: u64,
    pub noise: u64,
}

impl SeedStreams {
    pub fn from_seed(seed: u64) -> Self {
        Self {
            waveform: combine(seed, 1),
            channel: combine(seed, 2),
            noise: combine(seed, 3),
        }
    }

    pub fn waveform_rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.waveform)
    }

    pub fn channel_rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.channel)
    }

    pub fn noise_rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.noise)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_distinct() {
        let s = SeedStreams::from_seed(7);
        assert_ne!(s.waveform, s.channel);
        assert_ne!(s.channel, s.noise);
        assert_eq!(s, SeedStreams::from_seed(7));
    }

    #[test]
    fn trial_seeds_vary_with_every_input() {
        let a = trial_seed(1, 0, -10.0);
        assert_ne!(a, trial_seed(2, 0, -10.0));
        assert_ne!(a, trial_seed(1, 1, -10.0));
        assert_ne!(a, trial_seed(1, 0, 0.0));
        assert_eq!(a, trial_seed(1, 0, -10.0));
    }
}
