//! Numeric probe of the constants `a, b` in `max_{[0,n]} |p| ≤ a·e^{b d²/n}`
//! for degree-`d` polynomials bounded by 1 at the integers of `[0, n]`.

use nalgebra::{DMatrix, DVector};
use num_rational::BigRational;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cheb::{chebyshev_eval, chebyshev_row, clenshaw};
use crate::error::{Error, Result};
use crate::simplex::{maximize, LpScalar};

const DENSE_PER_UNIT: usize = 40;
const MAX_PIVOTS: usize = 20_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SampleKind {
    Constant,
    Chebyshev,
    Random,
    Extremal,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CrSample {
    pub n: usize,
    pub d: usize,
    pub kind: SampleKind,
    /// `max |p|` on a dense grid of `[0, n]`.
    pub growth: f64,
}

impl CrSample {
    pub fn z(&self) -> f64 {
        (self.d * self.d) as f64 / self.n as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CrFit {
    pub a: f64,
    pub b: f64,
}

impl CrFit {
    pub fn bound(&self, d: usize, n: usize) -> f64 {
        self.a * (self.b * (d * d) as f64 / n as f64).exp()
    }
}

fn to_unit(x: f64, n: usize) -> f64 {
    2.0 * x / n as f64 - 1.0
}

/// `max |p|` on `[0, n]`, sampled with spacing `1/40`.
pub fn interior_growth(coeffs: &[f64], n: usize) -> f64 {
    let steps = DENSE_PER_UNIT * n;
    (0..=steps)
        .map(|i| clenshaw(coeffs, to_unit(n as f64 * i as f64 / steps as f64, n)).abs())
        .fold(0.0, f64::max)
}

/// Interpolates uniform values at `d+1` distinct random integers, then rescales
/// so the largest value over all integers of `[0, n]` is 1.
pub fn random_bounded<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Vec<f64> {
    let nodes = sample(rng, n + 1, d + 1).into_vec();
    let v = DMatrix::from_fn(d + 1, d + 1, |r, c| chebyshev_row(d, to_unit(nodes[r] as f64, n))[c]);
    let rhs = DVector::from_fn(d + 1, |_, _| rng.random_range(-1.0..=1.0));
    let coeffs = v.lu().solve(&rhs).expect("distinct nodes give a nonsingular system");
    let peak = (0..=n).map(|i| clenshaw(coeffs.as_slice(), to_unit(i as f64, n)).abs()).fold(0.0, f64::max);
    coeffs.iter().map(|c| c / peak).collect()
}

/// `max p(1/2)` over degree-`d` `p` with `|p(i)| ≤ 1` at every integer of
/// `[0, n]`, solved exactly; returns the `f64` coefficients.
pub fn extremal_bounded(n: usize, d: usize) -> Result<Vec<f64>> {
    if d > n {
        return Err(Error::InvalidParameter(format!("need d <= n, got d={d} n={n}")));
    }
    let row = |num: i64, den: i64| -> Vec<BigRational> {
        let nn = n as i64;
        let y = BigRational::from_ratio(2 * num - nn * den, nn * den);
        let two_y = y.add(&y);
        let mut r = vec![BigRational::from_ratio(1, 1)];
        if d >= 1 {
            r.push(y);
        }
        for k in 2..=d {
            r.push(two_y.mul(&r[k - 1]).sub(&r[k - 2]));
        }
        let neg: Vec<BigRational> = r.iter().map(|v| BigRational::zero().sub(v)).collect();
        r.extend(neg);
        r
    };
    let mut a = Vec::new();
    for i in 0..=n as i64 {
        let r = row(i, 1);
        let neg = r.iter().map(|v| BigRational::zero().sub(v)).collect();
        a.push(r);
        a.push(neg);
    }
    let b = vec![BigRational::from_ratio(1, 1); a.len()];
    let sol = maximize(&a, &b, &row(1, 2), MAX_PIVOTS)?;
    Ok((0..=d).map(|k| sol.x[k].sub(&sol.x[k + d + 1]).to_f64()).collect())
}

/// Smallest envelope `ln a + b z` with `a ≥ 1`, `b ≥ 0` lying above every
/// `(z, ln growth)`, chosen to minimize its mean height over the sample.
pub fn fit_envelope(samples: &[CrSample]) -> CrFit {
    let pts: Vec<(f64, f64)> = samples.iter().map(|s| (s.z(), s.growth.max(1e-300).ln())).collect();
    let zbar = pts.iter().map(|p| p.0).sum::<f64>() / pts.len().max(1) as f64;
    let feasible = |la: f64, b: f64| la >= 0.0 && b >= 0.0 && pts.iter().all(|&(z, y)| y <= la + b * z + 1e-12);
    let mut cands: Vec<(f64, f64)> = Vec::new();
    let ymax = pts.iter().map(|p| p.1).fold(0.0, f64::max);
    cands.push((ymax, 0.0));
    for (i, &(zi, yi)) in pts.iter().enumerate() {
        if zi > 0.0 {
            cands.push((0.0, yi / zi));
        }
        for &(zj, yj) in &pts[i + 1..] {
            if (zj - zi).abs() > 1e-12 {
                let b = (yj - yi) / (zj - zi);
                cands.push((yi - b * zi, b));
            }
        }
    }
    let (la, b) = cands
        .into_iter()
        .filter(|&(la, b)| feasible(la, b))
        .min_by(|x, y| (x.0 + x.1 * zbar).total_cmp(&(y.0 + y.1 * zbar)))
        .unwrap_or((ymax, 0.0));
    CrFit { a: la.exp(), b }
}

/// `d²/n` levels probed at every `n`, so fits at different `n` see the same
/// abscissae.
pub const Z_LEVELS: [f64; 4] = [0.25, 1.0, 2.25, 4.0];

/// Degrees probed at `n`: 1 to 4, `⌊√n⌋`, and the nearest degree to each
/// level in [`Z_LEVELS`].
pub fn default_degrees(n: usize) -> Vec<usize> {
    let r = (n as f64).sqrt().floor() as usize;
    let mut d = vec![1, 2, 3, 4, r];
    d.extend(Z_LEVELS.iter().map(|z| (z * n as f64).sqrt().round() as usize));
    d.retain(|&x| x <= n);
    d.sort_unstable();
    d.dedup();
    d
}

#[derive(Clone, Debug, Serialize)]
pub struct CrReport {
    pub samples: Vec<CrSample>,
    pub per_n: Vec<(usize, CrFit)>,
    pub pooled: CrFit,
    /// Largest relative spread of `a` or `b` across `n`, `(max - min)/max`.
    pub spread: f64,
}

impl CrReport {
    pub fn stable_within(&self, rel: f64) -> bool {
        self.spread <= rel
    }
}

pub fn cr_probe(sample_count: usize, n_values: &[usize], seed: u64) -> Result<CrReport> {
    let mut samples = Vec::new();
    let mut per_n = Vec::new();
    for &n in n_values {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(n as u64);
        let mut here = vec![CrSample { n, d: 0, kind: SampleKind::Constant, growth: 1.0 }];
        for d in default_degrees(n) {
            let mut cheb = vec![0.0; d + 1];
            cheb[d] = 1.0;
            here.push(CrSample { n, d, kind: SampleKind::Chebyshev, growth: interior_growth(&cheb, n) });
            for _ in 0..sample_count {
                let c = random_bounded(n, d, &mut rng);
                here.push(CrSample { n, d, kind: SampleKind::Random, growth: interior_growth(&c, n) });
            }
            let c = extremal_bounded(n, d)?;
            here.push(CrSample { n, d, kind: SampleKind::Extremal, growth: interior_growth(&c, n) });
        }
        per_n.push((n, fit_envelope(&here)));
        samples.extend(here);
    }
    let rel = |f: fn(&CrFit) -> f64| {
        let v: Vec<f64> = per_n.iter().map(|(_, fit)| f(fit)).collect();
        let hi = v.iter().copied().fold(f64::MIN, f64::max);
        let lo = v.iter().copied().fold(f64::MAX, f64::min);
        if hi > 0.0 { (hi - lo) / hi } else { 0.0 }
    };
    let spread = rel(|f| f.a).max(rel(|f| f.b));
    Ok(CrReport { pooled: fit_envelope(&samples), samples, per_n, spread })
}

/// Growth of `T_d(2x/n - 1)` beyond 1 cannot happen on `[0, n]`; this is the
/// trivial case of the probe.
pub fn rescaled_chebyshev_growth(n: usize, d: usize) -> f64 {
    let steps = DENSE_PER_UNIT * n;
    (0..=steps).map(|i| chebyshev_eval(d, to_unit(n as f64 * i as f64 / steps as f64, n)).abs()).fold(0.0, f64::max)
}
