//! Deterministic, splittable random source.
//!
//! Every stochastic run starts from one recorded 64-bit seed. Shards and grid
//! points get child generators through [`SeededRng::split`], which selects a
//! distinct ChaCha stream, so results never depend on thread scheduling.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::pmf::Pmf;

#[derive(Debug, Clone)]
pub struct SeededRng {
    seed: u64,
    stream: u64,
    inner: ChaCha8Rng,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    fn with_stream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self {
            seed,
            stream,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Independent child generator number `index`.
    pub fn split(&self, index: u64) -> Self {
        let stream = splitmix64(self.stream ^ splitmix64(index.wrapping_add(1)));
        Self::with_stream(self.seed, stream)
    }

    /// Uniform draw on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Draw from `Ge(p)` on `{1, 2, ...}` by inversion.
    pub fn geometric_pos(&mut self, p: f64) -> u64 {
        if p >= 1.0 {
            return 1;
        }
        let u = 1.0 - self.uniform(); // (0, 1]
        (u.ln() / (1.0 - p).ln()).floor() as u64 + 1
    }
}

impl RngCore for SeededRng {
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

/// Sampler over the stored window of a [`Pmf`]. The tail mass is not
/// sampled; callers account for it through the law's truncation slack.
#[derive(Debug, Clone)]
pub struct PmfSampler {
    offset: i64,
    index: WeightedIndex<f64>,
}

impl PmfSampler {
    pub fn new(p: &Pmf) -> Result<Self> {
        let index = WeightedIndex::new(p.probs().iter().copied())
            .map_err(|e| Error::InvalidParameter(format!("cannot sample pmf: {e}")))?;
        Ok(Self {
            offset: p.offset(),
            index,
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        self.offset + self.index.sample(rng) as i64
    }
}

/// Random law on `offset..offset+len` with `len` uniform on `1..=max_len`,
/// positive end points and roughly a fifth of interior points set to zero.
pub fn random_pmf(rng: &mut SeededRng, offset: i64, max_len: usize) -> Pmf {
    let len = rng.random_range(1..=max_len.max(1));
    let raw: Vec<f64> = (0..len)
        .map(|k| {
            if k != 0 && k + 1 != len && rng.random_bool(0.2) {
                0.0
            } else {
                rng.random_range(0.05..1.0)
            }
        })
        .collect();
    Pmf::normalize(&raw, offset).expect("end points carry mass")
}
