//! SplitMix64, used for all level sampling so that levels are reproducible
//! across platforms and implementations.

/// Weyl increment of SplitMix64; also the per-level seed multiplier.
pub const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Multiplier that separates resampling streams of one level.
pub const STREAM_MULTIPLIER: u64 = 0xBF58_476D_1CE4_E5B9;

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform integer in `0..bound` by rejection, so no modulo bias.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        let zone = u64::MAX - (u64::MAX % bound);
        loop {
            let x = self.next_u64();
            if x < zone {
                return x % bound;
            }
        }
    }
}

/// Seed for level `level_number` under `master_seed`.
pub fn level_seed(master_seed: u64, level_number: u32) -> u64 {
    master_seed ^ (level_number as u64).wrapping_mul(GOLDEN_GAMMA)
}

/// Seed of resampling stream `stream`; stream 0 is the level seed itself.
pub fn stream_seed(level_seed: u64, stream: u32) -> u64 {
    level_seed ^ (stream as u64).wrapping_mul(STREAM_MULTIPLIER)
}
