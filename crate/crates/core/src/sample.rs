//! Seeded rational sampling shared by the verifiers.

use crate::exact::{rat, Rat, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Small rational p/q with |p| <= bound and q in 1..=max_den.
    pub fn rat(&mut self, bound: i64, max_den: i64) -> Rat {
        let p = self.rng.gen_range(-bound..=bound);
        let q = self.rng.gen_range(1..=max_den);
        rat(p, q)
    }

    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..=hi)
    }

    pub fn scalar(&mut self) -> Scalar {
        Scalar::from_rat(self.rat(3, 3))
    }

    pub fn nonzero_scalar(&mut self) -> Scalar {
        loop {
            let s = self.scalar();
            if !s.is_zero() {
                return s;
            }
        }
    }

    pub fn coin(&mut self) -> bool {
        self.rng.gen_bool(0.5)
    }

    pub fn index(&mut self, len: usize) -> usize {
        self.rng.gen_range(0..len)
    }

    pub fn vector(&mut self, len: usize) -> Vec<Scalar> {
        (0..len).map(|_| self.scalar()).collect()
    }
}
