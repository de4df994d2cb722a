//! The four verification suites behind `poly verify`.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::blocks::{full_blocks_mc, BlockCell, BlockEstimate};
use crate::cheb::{growth_grid, identity_check};
use crate::cr::{cr_probe, rescaled_chebyshev_growth, CrFit, CrReport};
use crate::error::{Error, Result};
use crate::extremal::{cheb_extremal_check, dominance_ratio};
use crate::lp::{LpOutcome, PolyLp};
use crate::witness::{replay, ChainReport};

pub const IDENTITY_TOL: f64 = 1e-10;
pub const WITNESS_TOL: f64 = 1e-7;
pub const SIGMA_SLACK: f64 = 1e-9;
/// Tolerance on `σ` comparisons between cells; `σ` is exact up to the final
/// conversion to `f64`.
pub const MONOTONE_TOL: f64 = 1e-12;
pub const CR_STABILITY: f64 = 0.2;
pub const EXTREMAL_SAMPLES: usize = 100;
pub const CR_SAMPLES: usize = 50;
pub const CR_SIZES: [usize; 3] = [16, 32, 64];
pub const BLOCK_SAMPLES: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Cheb,
    Lp,
    Cr,
    Blocks,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Cheb, Suite::Lp, Suite::Cr, Suite::Blocks];
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Cheb => "cheb",
            Suite::Lp => "lp",
            Suite::Cr => "cr",
            Suite::Blocks => "blocks",
        })
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.to_string() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown suite {s:?}; expected cheb, lp, cr or blocks")))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub cases: usize,
    pub worst: f64,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, cases: usize, worst: f64, detail: impl Into<String>) -> Self {
        Check { name: name.into(), passed, cases, worst, detail: detail.into() }
    }
}

/// A grid table with a fixed header, written as CSV.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.header)?;
        for r in &self.rows {
            out.write_record(r)?;
        }
        out.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub checks: Vec<Check>,
    /// Fitted or measured constants, reported only.
    pub constants: Vec<(String, f64)>,
    #[serde(skip)]
    pub table: Table,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub fn run_suite(suite: Suite, seed: u64) -> Result<SuiteReport> {
    match suite {
        Suite::Cheb => Ok(cheb_suite(seed)),
        Suite::Lp => lp_suite(seed),
        Suite::Cr => cr_suite(seed),
        Suite::Blocks => blocks_suite(seed),
    }
}

pub fn cheb_suite(seed: u64) -> SuiteReport {
    let mut checks = Vec::new();
    let id = identity_check(100, 2000);
    checks.push(Check::new(
        "identities",
        id.closed_form <= IDENTITY_TOL && id.cosine_form <= IDENTITY_TOL,
        id.points,
        id.closed_form.max(id.cosine_form),
        format!("recurrence vs closed form {:.2e}, vs cosine form {:.2e}; d <= 100, |x| <= 10", id.closed_form, id.cosine_form),
    ));
    checks.push(Check::new(
        "interior-bound",
        id.interior_max <= 1.0 + 1e-12,
        id.points,
        id.interior_max,
        "max |T_d| on [-1, 1]",
    ));

    let grid = growth_grid(50);
    let failures = grid.iter().filter(|r| !r.holds).count();
    let worst = grid.iter().map(|r| r.value / r.bound).fold(0.0, f64::max);
    checks.push(Check::new(
        "growth",
        failures == 0,
        grid.len(),
        worst,
        format!("T_d(1+mu) <= exp(2d sqrt(2mu+mu^2)), d <= 50, mu in 0..=2 step 0.01; {failures} failures; worst ratio shown"),
    ));

    let degrees: Vec<usize> = (2..=12).collect();
    let rows = cheb_extremal_check(EXTREMAL_SAMPLES, &degrees, seed);
    let accepted: usize = rows.iter().map(|r| r.accepted).sum();
    let discarded: usize = rows.iter().map(|r| r.discarded).sum();
    let violations: usize = rows.iter().map(|r| r.violations).sum();
    let full = rows.iter().all(|r| r.accepted == EXTREMAL_SAMPLES);
    let worst = rows.iter().map(|r| r.max_ratio).fold(0.0, f64::max);
    checks.push(Check::new(
        "extremality",
        violations == 0 && full,
        accepted,
        worst,
        format!("|q| <= |T_d| at 1.01, 1.1, 1.5, 2 for {EXTREMAL_SAMPLES} q per d in 2..=12; {violations} violations, {discarded} discarded; worst |q|/|T_d| shown"),
    ));
    let self_ratio = (0..=12)
        .map(|d| {
            let mut c = vec![0.0; d + 1];
            c[d] = 1.0;
            (dominance_ratio(&c) - 1.0).abs()
        })
        .fold(0.0, f64::max);
    checks.push(Check::new("extremality-equality", self_ratio <= 1e-12, 13, self_ratio, "q = T_d gives ratio 1"));

    let mut table = Table::new(&["d", "mu", "value", "bound", "holds"]);
    for r in &grid {
        table.push(vec![r.d.to_string(), r.mu.to_string(), r.value.to_string(), r.bound.to_string(), r.holds.to_string()]);
    }
    SuiteReport {
        suite: Suite::Cheb,
        seed,
        checks,
        constants: vec![("extremality_worst_ratio".into(), worst)],
        table,
    }
}

/// Cells of the LP grid: `N ∈ {16, 32, 48, 64}`, `D ∈ {1, 2, 4, ..., 24}` with
/// `D ≤ N`, and every `m` with `8m ≤ N`.
pub fn lp_grid() -> Vec<PolyLp> {
    let mut cells = Vec::new();
    for n in [16, 32, 48, 64] {
        for d in std::iter::once(1).chain((2..=24).step_by(2)).filter(|&d| d <= n) {
            for m in 0..=n / 8 {
                cells.push(PolyLp::new(d, n, m).expect("grid respects the caps"));
            }
        }
    }
    cells
}

/// `D²/N + D√(Em/N)`.
pub fn shape_scale(p: &PolyLp, e: usize) -> f64 {
    let (d, n, m) = (p.d as f64, p.n as f64, p.m as f64);
    d * d / n + d * (e as f64 * m / n).sqrt()
}

/// Smallest `c` with `log₂σ ≤ c·scale − m log₂E` at this cell, or `None` when
/// the cell puts no constraint on `c`.
pub fn shape_ratio(o: &LpOutcome, e: usize) -> Option<f64> {
    let p = &o.problem;
    if p.m == 0 || o.sigma <= 0.0 {
        return None;
    }
    Some((o.sigma.log2() + p.m as f64 * (e as f64).log2()) / shape_scale(p, e))
}

#[derive(Clone, Debug, Serialize)]
pub struct ShapeFit {
    pub e: usize,
    pub cells: usize,
    pub c: f64,
    /// `c` fitted on `N ≤ 48` only.
    pub c_small: f64,
    /// Cells with `N = 64` that the small-`N` constant fails to bound.
    pub holdout_misses: usize,
}

pub fn shape_fit(outcomes: &[LpOutcome], e: usize) -> ShapeFit {
    let ratios: Vec<(usize, f64)> =
        outcomes.iter().filter_map(|o| shape_ratio(o, e).map(|r| (o.problem.n, r))).collect();
    let c = ratios.iter().map(|r| r.1).fold(0.0, f64::max);
    let c_small = ratios.iter().filter(|r| r.0 <= 48).map(|r| r.1).fold(0.0, f64::max);
    let holdout_misses = ratios.iter().filter(|r| r.0 > 48 && r.1 > c_small).count();
    ShapeFit { e, cells: ratios.len(), c, c_small, holdout_misses }
}

/// Pairs of cells that violate `σ` nonincreasing in `m` or nondecreasing in `D`.
pub fn monotonicity_violations(outcomes: &[LpOutcome]) -> (usize, usize, usize) {
    let find = |d: usize, n: usize, m: usize| outcomes.iter().find(|o| o.problem == PolyLp { d, n, m });
    let (mut pairs, mut in_m, mut in_d) = (0, 0, 0);
    for o in outcomes {
        let p = o.problem;
        if let Some(next) = find(p.d, p.n, p.m + 1) {
            pairs += 1;
            if next.sigma > o.sigma + MONOTONE_TOL {
                in_m += 1;
            }
        }
        let bigger = outcomes
            .iter()
            .filter(|x| x.problem.n == p.n && x.problem.m == p.m && x.problem.d > p.d)
            .min_by_key(|x| x.problem.d);
        if let Some(next) = bigger {
            pairs += 1;
            if next.sigma + MONOTONE_TOL < o.sigma {
                in_d += 1;
            }
        }
    }
    (pairs, in_m, in_d)
}

/// For each grid row `(N, D)` and each `E`, the largest `m` the chain applies to.
pub fn chain_cells(outcomes: &[LpOutcome], cr: CrFit) -> Vec<ChainReport> {
    let mut out = Vec::new();
    let mut rows: Vec<(usize, usize)> = outcomes.iter().map(|o| (o.problem.n, o.problem.d)).collect();
    rows.dedup();
    for (n, d) in rows {
        for e in [8, 10] {
            let best = outcomes
                .iter()
                .filter(|o| o.problem.n == n && o.problem.d == d)
                .filter_map(|o| replay(o, e, cr))
                .max_by_key(|r| r.m);
            out.extend(best);
        }
    }
    out
}

pub fn lp_suite(seed: u64) -> Result<SuiteReport> {
    let cells = lp_grid();
    let outcomes: Vec<LpOutcome> = cells.par_iter().map(|p| p.solve()).collect::<Result<_>>()?;
    let mut checks = Vec::new();

    let out_of_range = outcomes.iter().filter(|o| o.sigma < 0.0 || o.sigma > 1.0 + SIGMA_SLACK).count();
    checks.push(Check::new(
        "sigma-range",
        out_of_range == 0,
        outcomes.len(),
        outcomes.iter().map(|o| o.sigma).fold(0.0, f64::max),
        "sigma in [0, 1 + 1e-9]; largest sigma shown",
    ));
    let witness = outcomes.iter().map(|o| o.witness_violation).fold(0.0, f64::max);
    checks.push(Check::new("witness", witness <= WITNESS_TOL, outcomes.len(), witness, "largest constraint violation of the witness"));

    let no_prefix = outcomes.iter().filter(|o| o.problem.m == 0).map(|o| (o.sigma - 1.0).abs()).fold(0.0, f64::max);
    let forced = outcomes.iter().filter(|o| o.problem.d < o.problem.m).map(|o| o.sigma.abs()).fold(0.0, f64::max);
    checks.push(Check::new(
        "lp-examples",
        no_prefix <= MONOTONE_TOL && forced == 0.0,
        outcomes.iter().filter(|o| o.problem.m == 0 || o.problem.d < o.problem.m).count(),
        no_prefix.max(forced),
        "m = 0 gives sigma = 1; D < m gives sigma = 0",
    ));

    let (pairs, in_m, in_d) = monotonicity_violations(&outcomes);
    checks.push(Check::new(
        "monotonicity",
        in_m == 0 && in_d == 0,
        pairs,
        (in_m + in_d) as f64,
        format!("{in_m} violations in m, {in_d} in D"),
    ));

    let fits: Vec<ShapeFit> = [8, 10].iter().map(|&e| shape_fit(&outcomes, e)).collect();
    let c = fits.iter().map(|f| f.c).fold(0.0, f64::max);
    let bounded = outcomes.iter().all(|o| {
        [8, 10].iter().all(|&e| match shape_ratio(o, e) {
            Some(_) => o.sigma.log2() <= c * shape_scale(&o.problem, e) - o.problem.m as f64 * (e as f64).log2() + 1e-9,
            None => true,
        })
    });
    checks.push(Check::new(
        "lemma5-shape",
        c.is_finite() && bounded,
        fits.iter().map(|f| f.cells).sum(),
        c,
        format!(
            "one c for E in {{8, 10}}: c = {c:.4} (E=8 alone {:.4}, E=10 alone {:.4}); fitted on N <= 48: {:.4}/{:.4}, missing {}/{} N = 64 cells",
            fits[0].c, fits[1].c, fits[0].c_small, fits[1].c_small, fits[0].holdout_misses, fits[1].holdout_misses
        ),
    ));

    let cr = cr_probe(CR_SAMPLES, &CR_SIZES, seed)?;
    let chain = chain_cells(&outcomes, cr.pooled);
    let broken: Vec<&ChainReport> = chain.iter().filter(|r| !r.holds()).collect();
    let cr_only = broken.iter().filter(|r| r.holds_without_fit()).count();
    checks.push(Check::new(
        "witness-chain",
        broken.is_empty(),
        chain.len(),
        broken.len() as f64,
        format!(
            "proof steps replayed on one witness per (N, D, E) row with fitted a = {:.4}, b = {:.4}; {} rows fail ({} only at the fitted-constant step)",
            cr.pooled.a, cr.pooled.b, broken.len(), cr_only
        ),
    ));

    let mut table = Table::new(&["D", "N", "m", "sigma", "log2_sigma", "pivots", "witness_violation", "shape_ratio_e8", "shape_ratio_e10"]);
    let fmt_opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
    for o in &outcomes {
        let p = o.problem;
        table.push(vec![
            p.d.to_string(),
            p.n.to_string(),
            p.m.to_string(),
            o.sigma.to_string(),
            o.sigma.log2().to_string(),
            o.pivots.to_string(),
            o.witness_violation.to_string(),
            fmt_opt(shape_ratio(o, 8)),
            fmt_opt(shape_ratio(o, 10)),
        ]);
    }
    let mut constants = vec![("shape_c".to_string(), c)];
    for f in &fits {
        constants.push((format!("shape_c_e{}", f.e), f.c));
    }
    constants.push(("cr_a".into(), cr.pooled.a));
    constants.push(("cr_b".into(), cr.pooled.b));
    Ok(SuiteReport { suite: Suite::Lp, seed, checks, constants, table })
}

pub fn cr_suite(seed: u64) -> Result<SuiteReport> {
    let r: CrReport = cr_probe(CR_SAMPLES, &CR_SIZES, seed)?;
    let mut checks = Vec::new();
    checks.push(Check::new(
        "constant-polynomial",
        r.pooled.a >= 1.0,
        1,
        r.pooled.a,
        "the constant 1 forces a >= 1",
    ));
    let cheb = CR_SIZES
        .iter()
        .map(|&n| {
            let d = (n as f64).sqrt().floor() as usize;
            rescaled_chebyshev_growth(n, d) / r.pooled.bound(d, n)
        })
        .fold(0.0, f64::max);
    checks.push(Check::new(
        "rescaled-chebyshev",
        cheb <= 1.0 + 1e-12,
        CR_SIZES.len(),
        cheb,
        "T_d(2x/n - 1), d = floor(sqrt n), against a e^{b d^2/n}; ratio shown",
    ));
    let per_n: Vec<String> = r.per_n.iter().map(|(n, f)| format!("n={n}: a={:.4} b={:.4}", f.a, f.b)).collect();
    checks.push(Check::new(
        "fit-stability",
        r.stable_within(CR_STABILITY),
        r.per_n.len(),
        r.spread,
        format!("relative spread of (a, b) across n <= {CR_STABILITY}; {}", per_n.join(", ")),
    ));
    let mut table = Table::new(&["n", "d", "kind", "growth", "d2_over_n"]);
    for s in &r.samples {
        table.push(vec![s.n.to_string(), s.d.to_string(), format!("{:?}", s.kind).to_lowercase(), s.growth.to_string(), s.z().to_string()]);
    }
    let mut constants = vec![("a".to_string(), r.pooled.a), ("b".to_string(), r.pooled.b)];
    for (n, f) in &r.per_n {
        constants.push((format!("a_n{n}"), f.a));
        constants.push((format!("b_n{n}"), f.b));
    }
    Ok(SuiteReport { suite: Suite::Cr, seed, checks, constants, table })
}

/// Cells of the block-fullness run; the first is the headline cell.
pub fn block_cells() -> Vec<BlockCell> {
    [(50, 2, 64), (20, 1, 20), (10, 3, 64), (100, 1, 32)]
        .iter()
        .map(|&(k, t, n)| BlockCell::new(k, t, n).expect("cells satisfy t <= n/20"))
        .collect()
}

pub fn blocks_suite(seed: u64) -> Result<SuiteReport> {
    let estimates: Vec<BlockEstimate> = block_cells()
        .into_iter()
        .enumerate()
        .map(|(i, c)| full_blocks_mc(c, BLOCK_SAMPLES, seed.wrapping_add(i as u64)))
        .collect();
    let mut checks = Vec::new();
    let majority = estimates.iter().map(|e| e.majority_full).fold(1.0, f64::min);
    checks.push(Check::new(
        "majority-full",
        estimates.iter().all(|e| e.majority_full >= 1.0 / 9.0),
        estimates.len(),
        majority,
        "Pr[F >= k/2] >= 1/9; smallest estimate shown",
    ));
    let block = estimates.iter().map(|e| e.block_full + e.block_half_width - 5.0 / 9.0).fold(f64::INFINITY, f64::min);
    checks.push(Check::new(
        "block-full",
        block >= 0.0,
        estimates.len(),
        block,
        "Pr[B >= t] >= 5/9 - half-width; smallest margin shown",
    ));
    let agree = estimates
        .iter()
        .map(|e| (e.block_full - e.exact_block_full).abs() / e.block_half_width.max(1e-12))
        .fold(0.0, f64::max);
    checks.push(Check::new(
        "hypergeometric",
        agree <= 2.0,
        estimates.len(),
        agree,
        "|empirical - exact| in units of the 95% half-width",
    ));
    let cell = BlockCell::new(8, 1, 20)?.with_ones(160)?;
    let sat = full_blocks_mc(cell, 100, seed);
    checks.push(Check::new(
        "saturation",
        sat.majority_full == 1.0 && sat.block_full == 1.0,
        1,
        sat.block_full,
        "every position one fills every block",
    ));

    let mut table = Table::new(&[
        "k", "t", "n", "ones", "samples", "pr_majority_full", "majority_half_width", "pr_block_full", "block_half_width", "exact_block_full",
    ]);
    for e in &estimates {
        let c = e.cell;
        table.push(vec![
            c.k.to_string(),
            c.t.to_string(),
            c.n.to_string(),
            c.ones.to_string(),
            e.samples.to_string(),
            e.majority_full.to_string(),
            e.majority_half_width.to_string(),
            e.block_full.to_string(),
            e.block_half_width.to_string(),
            e.exact_block_full.to_string(),
        ]);
    }
    let head = &estimates[0];
    let constants = vec![
        ("pr_majority_full".to_string(), head.majority_full),
        ("pr_block_full".to_string(), head.block_full),
        ("exact_block_full".to_string(), head.exact_block_full),
    ];
    Ok(SuiteReport { suite: Suite::Blocks, seed, checks, constants, table })
}
