//! Monte Carlo probe of Chebyshev extremality outside `[-1, 1]`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cheb::{chebyshev_eval, chebyshev_row, clenshaw};

pub const TEST_POINTS: [f64; 4] = [1.01, 1.1, 1.5, 2.0];
/// Interior boundedness tolerance on the dense sample.
pub const INTERIOR_TOL: f64 = 1e-6;
const DENSE: usize = 4000;
const ATTEMPTS_PER_SAMPLE: usize = 2000;

/// Chebyshev nodes of the first kind, `cos((2i+1)π / (2(d+1)))`.
pub fn nodes(d: usize) -> Vec<f64> {
    let n = (d + 1) as f64;
    (0..=d).map(|i| ((2 * i + 1) as f64 * std::f64::consts::PI / (2.0 * n)).cos()).collect()
}

/// Chebyshev coefficients of the degree-`d` interpolant of `values` at [`nodes`].
pub fn interpolate(values: &[f64]) -> Vec<f64> {
    let d = values.len() - 1;
    let xs = nodes(d);
    let scale = 2.0 / (d + 1) as f64;
    let mut c = vec![0.0; d + 1];
    for (x, v) in xs.iter().zip(values) {
        for (ck, tk) in c.iter_mut().zip(chebyshev_row(d, *x)) {
            *ck += scale * v * tk;
        }
    }
    c[0] /= 2.0;
    c
}

/// `max |q|` over a uniform grid on `[-1, 1]` including both ends.
pub fn interior_max(coeffs: &[f64]) -> f64 {
    (0..=DENSE)
        .map(|i| clenshaw(coeffs, -1.0 + 2.0 * i as f64 / DENSE as f64).abs())
        .fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ExtremalRow {
    pub d: usize,
    pub accepted: usize,
    pub discarded: usize,
    pub violations: usize,
    /// Largest `|q(x)| / |T_d(x)|` over accepted samples and test points.
    pub max_ratio: f64,
}

/// Compares `|q|` with `|T_d|` at [`TEST_POINTS`]; returns the worst ratio.
pub fn dominance_ratio(coeffs: &[f64]) -> f64 {
    let d = coeffs.len() - 1;
    TEST_POINTS
        .iter()
        .map(|&x| clenshaw(coeffs, x).abs() / chebyshev_eval(d, x).abs())
        .fold(0.0, f64::max)
}

/// Draws interpolants of uniform values in `[-1, 1]` until `samples` of them
/// are bounded by 1 on `[-1, 1]`, then checks dominance by `T_d` beyond 1.
pub fn cheb_extremal_check(samples: usize, degrees: &[usize], seed: u64) -> Vec<ExtremalRow> {
    degrees
        .iter()
        .map(|&d| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(d as u64);
            let mut row = ExtremalRow { d, accepted: 0, discarded: 0, violations: 0, max_ratio: 0.0 };
            while row.accepted < samples && row.accepted + row.discarded < samples * ATTEMPTS_PER_SAMPLE {
                let values: Vec<f64> = (0..=d).map(|_| rng.random_range(-1.0..=1.0)).collect();
                let c = interpolate(&values);
                if interior_max(&c) > 1.0 + INTERIOR_TOL {
                    row.discarded += 1;
                    continue;
                }
                row.accepted += 1;
                let r = dominance_ratio(&c);
                row.max_ratio = row.max_ratio.max(r);
                if r > 1.0 + 1e-12 {
                    row.violations += 1;
                }
            }
            row
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolation_reproduces_chebyshev() {
        for d in 0..8 {
            let values: Vec<f64> = nodes(d).iter().map(|&x| chebyshev_eval(d, x)).collect();
            let c = interpolate(&values);
            for (k, ck) in c.iter().enumerate() {
                assert!((ck - if k == d { 1.0 } else { 0.0 }).abs() < 1e-12, "d={d} k={k}");
            }
            assert!((dominance_ratio(&c) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_is_dominated() {
        assert!((dominance_ratio(&[1.0]) - 1.0).abs() < 1e-15);
    }
}
