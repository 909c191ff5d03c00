//! Reproducible random streams.
//!
//! A stream is a ChaCha8 generator keyed by a 64-bit seed (expanded with
//! `rand_core`'s PCG32 seeding routine) and positioned on a 64-bit ChaCha
//! stream id. Both steps are fully specified, so identical `(seed, stream)`
//! pairs give identical sequences on every platform.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Purpose of a derived stream within one replication.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StreamRole {
    Contexts,
    Noise,
    Coins,
    Theta,
    Covariance,
}

impl StreamRole {
    fn tag(self) -> u64 {
        match self {
            StreamRole::Contexts => 1,
            StreamRole::Noise => 2,
            StreamRole::Coins => 3,
            StreamRole::Theta => 4,
            StreamRole::Covariance => 5,
        }
    }
}

/// SplitMix64 finalizer (Steele, Lea & Flood constants).
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stream id for `(base_seed, rep, role)`. Adding replications never
/// changes the ids of existing ones.
pub fn derive_stream_id(base_seed: u64, rep: u64, role: StreamRole) -> u64 {
    splitmix64(splitmix64(splitmix64(base_seed) ^ rep) ^ role.tag())
}

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self {
            seed,
            stream,
            inner,
        }
    }

    pub fn for_role(base_seed: u64, rep: u64, role: StreamRole) -> Self {
        Self::new(base_seed, derive_stream_id(base_seed, rep, role))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// A draw from N(0, 1).
    pub fn std_normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    pub fn fair_coin(&mut self) -> bool {
        self.inner.random::<bool>()
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Module-level form of [`RngStream::std_normal`].
pub fn std_normal(rng: &mut RngStream) -> f64 {
    rng.std_normal()
}
