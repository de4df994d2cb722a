//! Replays the jump-bound argument step by step on an LP witness.

use serde::Serialize;

use crate::cheb::{chebyshev_eval, growth_bound};
use crate::cr::CrFit;
use crate::lp::LpOutcome;

/// Slack allowed on every inequality of the chain, relative where noted.
pub const CHAIN_TOL: f64 = 1e-6;
const DENSE: usize = 4000;

#[derive(Clone, Debug, Serialize)]
pub struct ChainReport {
    pub d: usize,
    pub n: usize,
    pub m: usize,
    pub e: usize,
    pub sigma: f64,
    /// `σ ≤ |q(8m)|·(8m)^m`.
    pub division_lower: bool,
    /// `|q(i)|·((E-1)m)^m ≤ 1` for integers `i ∈ [Em, N]`.
    pub integer_upper: bool,
    /// `max_{[Em,N]} |q|·((E-1)m)^m ≤ a·e^{b d²/(N-Em)}` with fitted `a, b`.
    pub cr_step: bool,
    /// `μ = 2(E-8)m/(N-Em)`.
    pub mu: f64,
    /// `t(1+μ) = q(8m)/B` with `B` the sampled maximum of `|q|` on `[Em, N]`.
    pub normalized_jump: f64,
    pub chebyshev_value: f64,
    /// `t(1+μ) ≤ T_d(1+μ)`.
    pub chebyshev_step: bool,
    /// `T_d(1+μ) ≤ e^{2d√(2μ+μ²)}`.
    pub growth_step: bool,
    /// `σ ≤ (8m)^m/((E-1)m)^m · a e^{b d²/(N-Em)} · e^{2d√(2μ+μ²)}`.
    pub combined: bool,
}

impl ChainReport {
    pub fn holds(&self) -> bool {
        self.division_lower
            && self.integer_upper
            && self.cr_step
            && self.chebyshev_step
            && self.growth_step
            && self.combined
    }

    /// Every step that does not use the fitted `a, b` holds.
    pub fn holds_without_fit(&self) -> bool {
        self.division_lower && self.integer_upper && self.chebyshev_step && self.growth_step
    }
}

/// Whether the chain applies to a cell: `m ≥ 1`, `σ > 0`, `2Em ≤ N`, and the
/// quotient degree `D - m` at most `N - Em`.
pub fn applicable(out: &LpOutcome, e: usize) -> bool {
    let p = out.problem;
    p.m >= 1 && p.d >= p.m && 2 * e * p.m <= p.n && p.d - p.m <= p.n - e * p.m && out.sigma > 0.0
}

pub fn replay(out: &LpOutcome, e: usize, cr: CrFit) -> Option<ChainReport> {
    if !applicable(out, e) {
        return None;
    }
    let p = out.problem;
    let (m, n) = (p.m, p.n);
    let d = p.d - m;
    let mf = m as f64;
    let prefix = |x: f64| (0..m).map(|j| x - j as f64).product::<f64>();
    let q = |x: f64| p.eval(&out.coeffs, x) / prefix(x);

    let target = p.target() as f64;
    let q_target = q(target);
    let division_lower = out.sigma <= q_target.abs() * target.powi(m as i32) * (1.0 + CHAIN_TOL);

    let floor = ((e - 1) as f64 * mf).powi(m as i32);
    let start = e * m;
    let integer_upper = (start..=n).all(|i| q(i as f64).abs() * floor <= 1.0 + CHAIN_TOL);

    let span = (n - start) as f64;
    let sup = (0..=DENSE)
        .map(|i| q(start as f64 + span * i as f64 / DENSE as f64).abs())
        .fold(0.0, f64::max);
    let cr_bound = cr.bound(d, n - start);
    let cr_step = sup * floor <= cr_bound * (1.0 + CHAIN_TOL);

    let mu = 2.0 * (e as f64 - 8.0) * mf / span;
    let normalized_jump = q_target / sup;
    let chebyshev_value = chebyshev_eval(d, 1.0 + mu);
    let chebyshev_step = normalized_jump <= chebyshev_value * (1.0 + CHAIN_TOL);
    let growth = growth_bound(d, mu);
    let growth_step = chebyshev_value <= growth * (1.0 + 1e-12);
    let implied = (target / ((e - 1) as f64 * mf)).powi(m as i32) * cr_bound * growth;
    let combined = out.sigma <= implied * (1.0 + CHAIN_TOL);

    Some(ChainReport {
        d: p.d,
        n,
        m,
        e,
        sigma: out.sigma,
        division_lower,
        integer_upper,
        cr_step,
        mu,
        normalized_jump,
        chebyshev_value,
        chebyshev_step,
        growth_step,
        combined,
    })
}
