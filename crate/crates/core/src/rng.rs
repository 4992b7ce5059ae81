//! Portable deterministic random source.
//!
//! The generator is SplitMix64 (Steele, Lea & Flood's 64-bit mixer): state
//! advances by the golden-gamma constant `0x9E3779B97F4A7C15` and each output
//! is finalized with two xor-shift-multiply rounds. Bounded draws take the
//! high 64 bits of a 128-bit product, so every output is identical across
//! platforms and languages given the same seed.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 generator. Identical seeds produce identical streams, always.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    /// Seed for an independent stream, e.g. one per page of a corpus.
    pub fn stream_seed(base: u64, index: u64) -> u64 {
        base.wrapping_add(index.wrapping_mul(GOLDEN_GAMMA))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw in `[0, bound)` via 128-bit multiply-high. `bound` 0 maps to 0.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        if bound == 0 {
            return 0;
        }
        ((u128::from(self.next_u64()) * u128::from(bound)) >> 64) as u64
    }

    /// Uniform draw in the inclusive range `[lo, hi]`.
    pub fn next_range(&mut self, lo: u64, hi: u64) -> u64 {
        debug_assert!(lo <= hi);
        lo + self.next_below(hi - lo + 1)
    }

    /// Uniform signed draw in `[-magnitude, +magnitude]`.
    pub fn next_signed(&mut self, magnitude: u64) -> i64 {
        self.next_below(2 * magnitude + 1) as i64 - magnitude as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stream_is_reproducible() {
        let mut a = SplitMix64::new(42);
        let mut b = SplitMix64::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    // Reference outputs for seed 1234567, from the published SplitMix64
    // reference implementation. Pins the exact bit stream.
    #[test]
    fn matches_reference_stream() {
        let mut rng = SplitMix64::new(1234567);
        let expected: [u64; 5] = [
            6457827717110365317,
            3203168211198807973,
            9817491932198370423,
            4593380528125082431,
            16408922859458223821,
        ];
        for want in expected {
            assert_eq!(rng.next_u64(), want);
        }
    }

    #[test]
    fn bounded_draws_stay_in_range() {
        let mut rng = SplitMix64::new(9);
        for _ in 0..1000 {
            let v = rng.next_range(5, 17);
            assert!((5..=17).contains(&v));
            let s = rng.next_signed(6);
            assert!((-6..=6).contains(&s));
        }
    }
}
