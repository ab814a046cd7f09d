use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// 64-bit seed. Identical seeds replay identical streams bit for bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RngSeed(pub u64);

impl From<u64> for RngSeed {
    fn from(v: u64) -> Self {
        Self(v)
    }
}

/// ChaCha20 stream keyed by `seed_from_u64(seed)`.
///
/// Independent substreams for parallel work use the ChaCha stream id, so
/// chunk `i` of a run with seed `s` always sees the same numbers no matter
/// how chunks are scheduled.
pub struct RngStream {
    rng: ChaCha20Rng,
}

impl RngStream {
    pub fn new(seed: RngSeed) -> Self {
        Self::substream(seed, 0)
    }

    pub fn substream(seed: RngSeed, index: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed.0);
        rng.set_stream(index);
        Self { rng }
    }

    /// Uniform on the open interval (0, 1).
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        self.rng.sample(Open01)
    }

    #[inline]
    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// +1 or -1 with equal probability.
    #[inline]
    pub fn sign(&mut self) -> f64 {
        if self.rng.gen::<bool>() {
            1.0
        } else {
            -1.0
        }
    }
}
