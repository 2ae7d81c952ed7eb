//! Seeded 64-bit linear congruential generator for the random test suites.
//!
//! `state ← state · 6364136223846793005 + 1442695040888963407 (mod 2⁶⁴)`,
//! starting from `state = seed`; a uniform draw on `[0, 1)` is the top 53 bits
//! of the new state times `2⁻⁵³`.

pub const MULTIPLIER: u64 = 6364136223846793005;
pub const INCREMENT: u64 = 1442695040888963407;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lcg64 {
    state: u64,
}

impl Lcg64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_mul(MULTIPLIER).wrapping_add(INCREMENT);
        self.state
    }

    /// Uniform on `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform integer in `lo..=hi`.
    pub fn int(&mut self, lo: i32, hi: i32) -> i32 {
        let span = (hi - lo + 1) as u64;
        lo + ((self.next_u64() >> 32) % span) as i32
    }
}
