//! Chebyshev polynomials of the first kind.

use num_complex::Complex64;
use serde::Serialize;

/// `T_d(x)` by the three-term recurrence.
pub fn chebyshev_eval(d: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, x);
    if d == 0 {
        return prev;
    }
    for _ in 1..d {
        (prev, cur) = (cur, 2.0 * x * cur - prev);
    }
    cur
}

/// `T_d(x) = ((x+√(x²-1))^d + (x-√(x²-1))^d) / 2`, with a complex square
/// root inside `(-1, 1)`.
pub fn chebyshev_closed(d: usize, x: f64) -> f64 {
    let r = Complex64::new(x * x - 1.0, 0.0).sqrt();
    let z = Complex64::new(x, 0.0);
    let d = d as u32;
    (0.5 * ((z + r).powu(d) + (z - r).powu(d))).re
}

/// `cos(d·acos x)`, defined on `[-1, 1]` only.
pub fn chebyshev_cos(d: usize, x: f64) -> Option<f64> {
    (-1.0..=1.0).contains(&x).then(|| (d as f64 * x.acos()).cos())
}

/// Values `T_0(y), ..., T_d(y)`.
pub fn chebyshev_row(d: usize, y: f64) -> Vec<f64> {
    let mut row = Vec::with_capacity(d + 1);
    row.push(1.0);
    if d >= 1 {
        row.push(y);
    }
    for k in 2..=d {
        row.push(2.0 * y * row[k - 1] - row[k - 2]);
    }
    row
}

/// `Σ c_k T_k(y)` by Clenshaw's recurrence.
pub fn clenshaw(coeffs: &[f64], y: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &c in coeffs.iter().skip(1).rev() {
        (b1, b2) = (2.0 * y * b1 - b2 + c, b1);
    }
    coeffs.first().copied().unwrap_or(0.0) + y * b1 - b2
}

/// `|a - b| ≤ tol · max(1, |a|, |b|)`.
pub fn agrees(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * 1f64.max(a.abs()).max(b.abs())
}

/// Right-hand side `e^{2d√(2μ+μ²)}` of the growth bound.
pub fn growth_bound(d: usize, mu: f64) -> f64 {
    (2.0 * d as f64 * (2.0 * mu + mu * mu).sqrt()).exp()
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct GrowthRow {
    pub d: usize,
    pub mu: f64,
    pub value: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Evaluates `T_d(1+μ) ≤ e^{2d√(2μ+μ²)}`.
pub fn cheb_growth_check(d: usize, mu: f64) -> GrowthRow {
    let value = chebyshev_eval(d, 1.0 + mu);
    let bound = growth_bound(d, mu);
    GrowthRow { d, mu, value, bound, holds: value <= bound * (1.0 + 1e-12) }
}

/// `μ ∈ {0, 0.01, ..., 2}`.
pub fn mu_grid() -> Vec<f64> {
    (0..=200).map(|i| i as f64 / 100.0).collect()
}

pub fn growth_grid(d_max: usize) -> Vec<GrowthRow> {
    let mus = mu_grid();
    (0..=d_max).flat_map(|d| mus.iter().map(move |&mu| cheb_growth_check(d, mu))).collect()
}

#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct IdentityCheck {
    pub points: usize,
    /// Largest scaled disagreement between recurrence and closed form, `|x| ≤ 10`.
    pub closed_form: f64,
    /// Same between recurrence and cosine form, `|x| ≤ 1`.
    pub cosine_form: f64,
    /// Largest `|T_d(x)|` seen on `[-1, 1]`.
    pub interior_max: f64,
}

/// Compares the three forms for `d ≤ d_max` on a uniform grid in `[-10, 10]`.
pub fn identity_check(d_max: usize, samples: usize) -> IdentityCheck {
    let mut out = IdentityCheck::default();
    let scaled = |a: f64, b: f64| (a - b).abs() / 1f64.max(a.abs()).max(b.abs());
    for d in 0..=d_max {
        for i in 0..=samples {
            let x = -10.0 + 20.0 * i as f64 / samples as f64;
            let r = chebyshev_eval(d, x);
            out.points += 1;
            out.closed_form = out.closed_form.max(scaled(r, chebyshev_closed(d, x)));
            if let Some(c) = chebyshev_cos(d, x) {
                out.cosine_form = out.cosine_form.max(scaled(r, c));
                out.interior_max = out.interior_max.max(r.abs());
            }
        }
    }
    out
}
