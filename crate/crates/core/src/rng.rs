//! Seeded random streams.
//!
//! Every randomized object is a pure function of a 64-bit seed. The
//! generator is ChaCha20: the 256-bit key is four successive SplitMix64
//! outputs of the seed, and the 64-bit ChaCha stream id is a SplitMix64 hash
//! of a list of coordinates (a purpose tag, or the cell/trial coordinates of
//! an experiment). Distinct coordinates therefore give independent streams
//! under the same seed, and results never depend on scheduling order.
//!
//! Normal deviates use the Box-Muller transform, consuming two 64-bit words
//! per pair: `u1 = (w1 >> 11 + 1) 2^-53` in `(0, 1]`,
//! `u2 = (w2 >> 11) 2^-53` in `[0, 1)`, then
//! `z0 = sqrt(-2 ln u1) cos(2 pi u2)` is emitted first and
//! `z1 = sqrt(-2 ln u1) sin(2 pi u2)` second.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Purpose tags for the constructors' streams.
pub mod purpose {
    pub const FACTORS: u64 = 1;
    pub const GAUSSIAN_MAP: u64 = 2;
    pub const MASK: u64 = 3;
    pub const TRIAL: u64 = 4;
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// One SplitMix64 finalization step.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Order-sensitive hash of a coordinate list.
pub fn hash_coords(coords: &[u64]) -> u64 {
    coords
        .iter()
        .fold(mix64(coords.len() as u64 ^ GOLDEN), |h, &c| {
            mix64(h.wrapping_add(GOLDEN) ^ mix64(c))
        })
}

/// Derives a child seed, e.g. for one trial of one phase-grid cell.
pub fn derive_seed(seed: u64, coords: &[u64]) -> u64 {
    mix64(seed ^ hash_coords(coords))
}

/// ChaCha20 stream for `seed`, sub-stream selected by `coords`.
pub fn stream(seed: u64, coords: &[u64]) -> ChaCha20Rng {
    let mut key = [0u8; 32];
    let mut state = seed;
    for chunk in key.chunks_exact_mut(8) {
        state = state.wrapping_add(GOLDEN);
        chunk.copy_from_slice(&mix64(state).to_le_bytes());
    }
    let mut rng = ChaCha20Rng::from_seed(key);
    rng.set_stream(hash_coords(coords));
    rng
}

const INV_2_53: f64 = 1.0 / (1u64 << 53) as f64;

/// Uniform in `[0, 1)`.
#[inline]
pub fn uniform(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * INV_2_53
}

/// Standard normal deviates via Box-Muller; see the module docs for the
/// exact word consumption order.
pub struct Normals<R> {
    rng: R,
    spare: Option<f64>,
}

impl<R: RngCore> Normals<R> {
    pub fn new(rng: R) -> Self {
        Normals { rng, spare: None }
    }

    pub fn next(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = ((self.rng.next_u64() >> 11) + 1) as f64 * INV_2_53;
        let u2 = (self.rng.next_u64() >> 11) as f64 * INV_2_53;
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = std::f64::consts::TAU * u2;
        self.spare = Some(radius * angle.sin());
        radius * angle.cos()
    }

    pub fn fill(&mut self, out: &mut [f64], scale: f64) {
        for v in out {
            *v = scale * self.next();
        }
    }
}
