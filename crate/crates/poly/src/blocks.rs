//! How many of `k` blocks of `n` bits hold at least `t` ones when the ones of
//! a `kn`-bit input are placed uniformly at random.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use statrs::distribution::{DiscreteCDF, Hypergeometric};

use crate::error::{Error, Result};

/// Normal quantile for a two-sided 95% interval.
pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BlockCell {
    pub k: usize,
    pub t: usize,
    pub n: usize,
    /// Number of ones placed; the default is `4kt`.
    pub ones: usize,
}

impl BlockCell {
    pub fn new(k: usize, t: usize, n: usize) -> Result<Self> {
        if k == 0 || t == 0 || 20 * t > n {
            return Err(Error::InvalidParameter(format!("need k >= 1 and 1 <= t <= n/20, got k={k} t={t} n={n}")));
        }
        Ok(BlockCell { k, t, n, ones: 4 * k * t })
    }

    pub fn with_ones(self, ones: usize) -> Result<Self> {
        if ones > self.k * self.n {
            return Err(Error::InvalidParameter(format!("{ones} ones do not fit in {} positions", self.k * self.n)));
        }
        Ok(BlockCell { ones, ..self })
    }

    /// Exact `Pr[B ≥ t]` for one block.
    pub fn exact_block_full(&self) -> f64 {
        if self.t == 0 {
            return 1.0;
        }
        let population = (self.k * self.n) as u64;
        let h = Hypergeometric::new(population, self.n as u64, self.ones as u64)
            .expect("block and draw counts fit in the population");
        1.0 - h.cdf(self.t as u64 - 1)
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct BlockEstimate {
    pub cell: BlockCell,
    pub samples: usize,
    /// Empirical `Pr[F ≥ k/2]`.
    pub majority_full: f64,
    pub majority_half_width: f64,
    /// Empirical `Pr[B ≥ t]` pooled over blocks.
    pub block_full: f64,
    pub block_half_width: f64,
    pub exact_block_full: f64,
}

fn half_width(p: f64, n: usize) -> f64 {
    Z95 * (p * (1.0 - p) / n as f64).sqrt()
}

pub fn full_blocks_mc(cell: BlockCell, samples: usize, seed: u64) -> BlockEstimate {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total = cell.k * cell.n;
    let mut counts = vec![0usize; cell.k];
    let (mut majority, mut full_blocks) = (0usize, 0usize);
    for _ in 0..samples {
        counts.fill(0);
        for pos in sample(&mut rng, total, cell.ones) {
            counts[pos / cell.n] += 1;
        }
        let f = counts.iter().filter(|&&c| c >= cell.t).count();
        full_blocks += f;
        if 2 * f >= cell.k {
            majority += 1;
        }
    }
    let majority_full = majority as f64 / samples as f64;
    let block_full = full_blocks as f64 / (samples * cell.k) as f64;
    BlockEstimate {
        cell,
        samples,
        majority_full,
        majority_half_width: half_width(majority_full, samples),
        block_full,
        // Blocks within one sample are dependent, so the width uses samples, not samples·k.
        block_half_width: half_width(block_full, samples),
        exact_block_full: cell.exact_block_full(),
    }
}
