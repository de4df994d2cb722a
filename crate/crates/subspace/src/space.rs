//! The single-instance input space: bit strings of weight `t-1` or `t`.

use std::collections::HashMap;

use itertools::Itertools;
use nalgebra::DVector;

use crate::error::{Error, Result};

/// Largest `C(n, t)` the explicit constructions accept.
pub const BINOMIAL_CAP: u128 = 10_000;

/// Smallest `t` such that `values` is constant on weights `t..=n-t`.
///
/// `values[w]` is the function value on inputs of Hamming weight `w`.
pub fn implicit_threshold(values: &[bool]) -> usize {
    let n = values.len().saturating_sub(1);
    (0..=n.div_ceil(2))
        .find(|&t| t > n - t || values[t..=n - t].iter().all(|&v| v == values[t]))
        .unwrap_or(n.div_ceil(2))
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// `x (x-1) ... (x-j+1)`, computed in floating point.
pub fn falling(x: f64, j: usize) -> f64 {
    (0..j).map(|i| x - i as f64).product()
}

#[derive(Clone, Debug)]
pub struct InputSpace {
    n: usize,
    t: usize,
    /// Basis strings in lexicographic order; bit `n-1-p` holds position `p`.
    strings: Vec<u64>,
    index: HashMap<u64, usize>,
}

impl InputSpace {
    pub fn new(n: usize, t: usize) -> Result<Self> {
        if t == 0 || 2 * t > n || n > 63 {
            return Err(Error::InvalidSize { n, t });
        }
        let c = binomial(n, t);
        if c > BINOMIAL_CAP {
            return Err(Error::TooLarge { size: c as usize, cap: BINOMIAL_CAP as usize });
        }
        let mut strings: Vec<u64> = [t - 1, t]
            .iter()
            .flat_map(|&w| {
                (0..n).combinations(w).map(move |ones| {
                    ones.iter().fold(0u64, |m, &p| m | 1 << (n - 1 - p))
                })
            })
            .collect();
        strings.sort_unstable();
        let index = strings.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        Ok(InputSpace { n, t, strings, index })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn dim(&self) -> usize {
        self.strings.len()
    }

    pub fn string(&self, i: usize) -> u64 {
        self.strings[i]
    }

    pub fn index_of(&self, s: u64) -> Option<usize> {
        self.index.get(&s).copied()
    }

    pub fn bit(&self, s: u64, p: usize) -> bool {
        s >> (self.n - 1 - p) & 1 == 1
    }

    /// `a = 1` for weight `t`, `a = 0` for weight `t-1`.
    pub fn class_of(&self, i: usize) -> usize {
        self.strings[i].count_ones() as usize + 1 - self.t
    }

    fn uniform(&self, keep: impl Fn(u64) -> bool) -> Option<DVector<f64>> {
        let hits: Vec<usize> = (0..self.dim()).filter(|&i| keep(self.strings[i])).collect();
        if hits.is_empty() {
            return None;
        }
        let amp = 1.0 / (hits.len() as f64).sqrt();
        let mut v = DVector::zeros(self.dim());
        for i in hits {
            v[i] = amp;
        }
        Some(v)
    }

    fn ones_mask(&self, ones: &[usize]) -> u64 {
        ones.iter().fold(0, |m, &p| m | 1 << (self.n - 1 - p))
    }

    /// Uniform superposition over weight `t-1+a` with the given positions set.
    pub fn psi(&self, a: usize, ones: &[usize]) -> Option<DVector<f64>> {
        let w = (self.t - 1 + a) as u32;
        let m = self.ones_mask(ones);
        self.uniform(|s| s.count_ones() == w && s & m == m)
    }

    /// As [`psi`](Self::psi), restricted to strings whose first position equals `b`.
    /// The fixed positions must avoid position 0.
    pub fn psi_split(&self, a: usize, b: usize, ones: &[usize]) -> Option<DVector<f64>> {
        debug_assert!(!ones.contains(&0));
        let w = (self.t - 1 + a) as u32;
        let m = self.ones_mask(ones);
        self.uniform(|s| s.count_ones() == w && s & m == m && self.bit(s, 0) == (b == 1))
    }

    /// Equal squared mass on the two weight classes, uniform within each.
    pub fn psi_one(&self) -> DVector<f64> {
        let p0 = self.psi(0, &[]).expect("weight t-1 class is nonempty");
        let p1 = self.psi(1, &[]).expect("weight t class is nonempty");
        (p0 + p1) / std::f64::consts::SQRT_2
    }

    /// Indicator of the weight class `t-1+a`, as a diagonal.
    pub fn class_indicator(&self, a: usize) -> Vec<bool> {
        (0..self.dim()).map(|i| self.class_of(i) == a).collect()
    }
}
