//! Deterministic 64-bit linear congruential generator.
//!
//! Instance generation must be bit-reproducible across platforms and library
//! versions, so the generator is pinned here instead of depending on an
//! external RNG whose stream may change. The recurrence is the MMIX LCG
//!
//! ```text
//! state <- state * 6364136223846793005 + 1442695040888963407   (mod 2^64)
//! ```
//!
//! Outputs are taken from the high bits of the state, which are the
//! well-mixed ones for an LCG.

const MUL: u64 = 6364136223846793005;
const INC: u64 = 1442695040888963407;

#[derive(Debug, Clone)]
pub struct Lcg64 {
    state: u64,
}

impl Lcg64 {
    pub fn new(seed: u64) -> Self {
        // Burn a few steps so small seeds decorrelate.
        let mut rng = Lcg64 {
            state: seed ^ 0x9e3779b97f4a7c15,
        };
        for _ in 0..4 {
            rng.step();
        }
        rng
    }

    fn step(&mut self) -> u64 {
        self.state = self.state.wrapping_mul(MUL).wrapping_add(INC);
        self.state
    }

    pub fn next_u64(&mut self) -> u64 {
        self.step()
    }

    /// Uniform in [0, 1) with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.step() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in [lo, hi], inclusive. Uses the high state bits.
    pub fn int_in(&mut self, lo: i64, hi: i64) -> i64 {
        assert!(lo <= hi);
        let span = (hi - lo) as u64 + 1;
        lo + ((self.step() >> 32) % span) as i64
    }

    /// Uniform in [lo, hi).
    pub fn f64_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + self.next_f64() * (hi - lo)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible_stream() {
        let mut a = Lcg64::new(42);
        let mut b = Lcg64::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn int_in_covers_range() {
        let mut rng = Lcg64::new(7);
        let mut seen = [false; 5];
        for _ in 0..1000 {
            let v = rng.int_in(2, 6);
            assert!((2..=6).contains(&v));
            seen[(v - 2) as usize] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn f64_in_unit_interval() {
        let mut rng = Lcg64::new(1);
        for _ in 0..1000 {
            let v = rng.next_f64();
            assert!((0.0..1.0).contains(&v));
        }
    }
}
