//! Deterministic counter-based RNG for reproducible simulation.
//!
//! Every (seed, stream, counter) triple opens an independent splitmix64
//! sequence, so trial outcomes do not depend on scheduling order and runs
//! are bit-identical across platforms. Not cryptographic.

const GAMMA: u64 = 0x9E3779B97F4A7C15;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// splitmix64 stream keyed by a (seed, stream, counter) triple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialRng {
    state: u64,
}

impl TrialRng {
    pub fn new(seed: u64) -> Self {
        Self::from_parts(seed, 0, 0)
    }

    /// Stream for one trial: `stream` identifies the sweep point and
    /// `counter` the trial within it.
    pub fn from_parts(seed: u64, stream: u64, counter: u64) -> Self {
        let state = mix(seed.wrapping_add(GAMMA))
            ^ mix(stream.wrapping_add(GAMMA.rotate_left(17)))
            ^ mix(counter.wrapping_add(GAMMA.rotate_left(43)));
        Self { state: mix(state) }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        mix(self.state)
    }

    /// Uniform in [0, 1) with 53-bit resolution.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform index in [0, n). The modulo bias is negligible for the
    /// signal-set sizes used here (and zero for powers of two).
    #[inline]
    pub fn next_index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        (self.next_u64() % n as u64) as usize
    }

    /// Pair of independent standard normal samples via Box-Muller.
    pub fn next_gaussian_pair(&mut self) -> (f64, f64) {
        let u1 = 1.0 - self.next_f64(); // (0, 1]
        let u2 = self.next_f64();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = 2.0 * std::f64::consts::PI * u2;
        (radius * angle.cos(), radius * angle.sin())
    }
}
