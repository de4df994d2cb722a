//! Grover search and quantum counting.
//!
//! Every subroutine runs in one of three modes that charge the ledger the
//! same way but differ in how outcomes are produced:
//!
//! * `CostModel` samples outcomes from the closed-form distributions.
//! * `Statevector` simulates the actual iterates (small ranges only).
//! * `Exact` forces the correct outcome, for deterministic algorithm tests.
//!
//! Oracles are evaluated freely by the simulator to obtain ground truth; only
//! the queries the quantum algorithm would make are charged.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{QueryLedger, Subroutine, Target};

/// Largest search range the statevector Grover simulation accepts.
pub const SV_GROVER_CAP: usize = 1 << 14;
/// Largest `n * M` the statevector counting simulation accepts.
pub const SV_COUNTING_CAP: usize = 1 << 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    CostModel,
    Statevector,
    Exact,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::CostModel => "cost-model",
            Mode::Statevector => "statevector",
            Mode::Exact => "exact",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cost-model" => Ok(Mode::CostModel),
            "statevector" => Ok(Mode::Statevector),
            "exact" => Ok(Mode::Exact),
            other => Err(Error::InvalidParameter(format!("unknown mode {other:?}"))),
        }
    }
}

/// Read access to an `n`-bit string.
pub trait BitOracle {
    fn len(&self) -> usize;
    fn bit(&self, i: usize) -> bool;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn ones(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.bit(i)).collect()
    }

    fn weight(&self) -> usize {
        (0..self.len()).filter(|&i| self.bit(i)).count()
    }
}

impl BitOracle for [bool] {
    fn len(&self) -> usize {
        <[bool]>::len(self)
    }

    fn bit(&self, i: usize) -> bool {
        self[i]
    }
}

impl BitOracle for Vec<bool> {
    fn len(&self) -> usize {
        Vec::len(self)
    }

    fn bit(&self, i: usize) -> bool {
        self[i]
    }
}

/// Oracle backed by a closure over `0..len`.
pub struct FnOracle<F> {
    len: usize,
    f: F,
}

impl<F: Fn(usize) -> bool> FnOracle<F> {
    pub fn new(len: usize, f: F) -> Self {
        FnOracle { len, f }
    }
}

impl<F: Fn(usize) -> bool> BitOracle for FnOracle<F> {
    fn len(&self) -> usize {
        self.len
    }

    fn bit(&self, i: usize) -> bool {
        (self.f)(i)
    }
}

/// An oracle with some positions forced to zero.
struct Masked<'a, O: ?Sized> {
    inner: &'a O,
    masked: &'a [bool],
}

impl<O: BitOracle + ?Sized> BitOracle for Masked<'_, O> {
    fn len(&self) -> usize {
        self.inner.len()
    }

    fn bit(&self, i: usize) -> bool {
        !self.masked[i] && self.inner.bit(i)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroverSchedule {
    pub iterations: u64,
    pub success_probability: f64,
}

impl GroverSchedule {
    /// Queries charged per attempt: the iterations plus one classical
    /// verification of the measured index.
    pub fn queries_per_attempt(&self) -> u64 {
        self.iterations + 1
    }
}

fn rotation_angle(n: usize, w: usize) -> f64 {
    (w as f64 / n as f64).sqrt().asin()
}

/// Optimal known-weight schedule: `k = ⌊π / 4θ⌋` with `θ = arcsin √(w/n)`.
pub fn grover_schedule(n: usize, w: usize) -> Result<GroverSchedule> {
    if w == 0 {
        return Err(Error::WeightZero);
    }
    if w > n {
        return Err(Error::WeightTooLarge { weight: w, n });
    }
    let theta = rotation_angle(n, w);
    let k = (PI / (4.0 * theta)).floor();
    Ok(GroverSchedule {
        iterations: k as u64,
        success_probability: ((2.0 * k + 1.0) * theta).sin().powi(2),
    })
}

/// Probability that `k` Grover iterations followed by a measurement land on
/// a marked index, for `w` marked out of `n`.
pub fn grover_success_probability(n: usize, w: usize, k: u64) -> f64 {
    if w == 0 {
        return 0.0;
    }
    ((2.0 * k as f64 + 1.0) * rotation_angle(n, w)).sin().powi(2)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Give up after `budget_factor * ⌈√n⌉` charged queries.
    pub budget_factor: u64,
    /// Growth rate of the iteration cap in the unknown-weight schedule.
    pub growth: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { budget_factor: 3, growth: 6.0 / 5.0 }
    }
}

impl SearchConfig {
    pub fn budget(&self, n: usize) -> u64 {
        self.budget_factor * ceil_sqrt(n as u64)
    }
}

pub(crate) fn ceil_sqrt(v: u64) -> u64 {
    let mut r = (v as f64).sqrt() as u64;
    while r * r > v {
        r -= 1;
    }
    while r * r < v {
        r += 1;
    }
    r
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub found: Option<usize>,
    pub queries_charged: u64,
    pub mode: Mode,
}

/// Find one index `i` with `oracle.bit(i)`, or report that none was found
/// within the retry budget.
///
/// With a weight hint the optimal schedule for that weight is repeated; without
/// one, iteration counts are drawn from an exponentially growing cap. Exact
/// mode charges the optimal schedule for the true weight and always succeeds
/// when a marked index exists.
pub fn grover_search<O, R>(
    oracle: &O,
    weight_hint: Option<usize>,
    mode: Mode,
    cfg: &SearchConfig,
    ledger: &mut QueryLedger,
    rng: &mut R,
) -> Result<SearchOutcome>
where
    O: BitOracle + ?Sized,
    R: Rng + ?Sized,
{
    let n = oracle.len();
    if n == 0 {
        return Err(Error::EmptyRange);
    }
    if mode == Mode::Statevector && n > SV_GROVER_CAP {
        return Err(Error::SimulationTooLarge { size: n, cap: SV_GROVER_CAP });
    }
    let marked = oracle.ones();
    let w = marked.len();
    let budget = cfg.budget(n);
    let known = match weight_hint {
        Some(h) => Some(grover_schedule(n, h.min(n))?),
        None => None,
    };

    let mut spent = 0u64;
    let charge = |q: u64, spent: &mut u64, ledger: &mut QueryLedger| {
        ledger.charge(Target::X, Subroutine::Grover, q);
        *spent += q;
        *spent
    };

    if mode == Mode::Exact {
        if w == 0 {
            charge(budget, &mut spent, ledger);
            return Ok(SearchOutcome { found: None, queries_charged: budget, mode });
        }
        let sched = match known {
            Some(s) => s,
            None => grover_schedule(n, w)?,
        };
        let q = charge(sched.queries_per_attempt(), &mut spent, ledger);
        let found = marked[rng.random_range(0..w)];
        return Ok(SearchOutcome { found: Some(found), queries_charged: q, mode });
    }

    let mut cap = 1.0f64;
    let sqrt_n = (n as f64).sqrt();
    while spent < budget {
        let room = budget - spent;
        let iterations = match known {
            Some(s) => s.iterations.min(room - 1),
            None => {
                let j = rng.random_range(0..cap.ceil() as u64);
                cap = (cap * cfg.growth).min(sqrt_n.max(1.0));
                j.min(room - 1)
            }
        };
        let total = charge(iterations + 1, &mut spent, ledger);
        let candidate = match mode {
            Mode::CostModel => {
                let p = grover_success_probability(n, w, iterations);
                if rng.random_bool(p.clamp(0.0, 1.0)) {
                    Some(marked[rng.random_range(0..w)])
                } else {
                    None
                }
            }
            Mode::Statevector => {
                let bits: Vec<bool> = (0..n).map(|i| oracle.bit(i)).collect();
                let pmf = sv_run_grover(&bits, iterations)?;
                let i = sample_index(&pmf, rng);
                oracle.bit(i).then_some(i)
            }
            Mode::Exact => unreachable!(),
        };
        if candidate.is_some() {
            return Ok(SearchOutcome { found: candidate, queries_charged: total, mode });
        }
    }
    Ok(SearchOutcome { found: None, queries_charged: spent, mode })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollectOutcome {
    /// Found positions, sorted.
    pub found: Vec<usize>,
    pub searches: usize,
    pub queries_charged: u64,
}

/// Repeatedly search, masking out what was already found, until a search
/// comes back empty or `cap` positions are collected.
pub fn collect_ones<O, R>(
    oracle: &O,
    cap: Option<usize>,
    mode: Mode,
    cfg: &SearchConfig,
    ledger: &mut QueryLedger,
    rng: &mut R,
) -> Result<CollectOutcome>
where
    O: BitOracle + ?Sized,
    R: Rng + ?Sized,
{
    let n = oracle.len();
    if n == 0 {
        return Err(Error::EmptyRange);
    }
    let mut masked = vec![false; n];
    let mut found = Vec::new();
    let mut searches = 0;
    let mut charged = 0;
    while cap.is_none_or(|c| found.len() < c) {
        let view = Masked { inner: oracle, masked: &masked };
        let out = grover_search(&view, None, mode, cfg, ledger, rng)?;
        searches += 1;
        charged += out.queries_charged;
        match out.found {
            Some(i) => {
                masked[i] = true;
                found.push(i);
            }
            None => break,
        }
    }
    found.sort_unstable();
    Ok(CollectOutcome { found, searches, queries_charged: charged })
}

/// Exact-mode charge of [`collect_ones`] on a range of size `n` holding `w`
/// ones: one optimal-schedule search per one, then an empty probe.
pub fn collect_schedule_sum(n: usize, w: usize, cfg: &SearchConfig) -> u64 {
    let finds: u64 = (1..=w)
        .map(|v| grover_schedule(n, v).map(|s| s.queries_per_attempt()).unwrap_or(0))
        .sum();
    finds + cfg.budget(n)
}

/// Complex amplitude vector of unit norm.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn uniform(dim: usize) -> Self {
        let a = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        StateVector { amplitudes: vec![a; dim] }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(Complex64::norm_sqr).sum()
    }

    /// `|i⟩ ↦ -|i⟩` on marked indices.
    pub fn apply_phase_oracle(&mut self, marked: &[bool]) {
        for (a, &m) in self.amplitudes.iter_mut().zip(marked) {
            if m {
                *a = -*a;
            }
        }
    }

    /// Reflection about the uniform state, `2|s⟩⟨s| - I`.
    pub fn apply_diffusion(&mut self) {
        let mean = self.amplitudes.iter().sum::<Complex64>() / self.dim() as f64;
        for a in &mut self.amplitudes {
            *a = 2.0 * mean - *a;
        }
    }

    pub fn grover_iterate(&mut self, marked: &[bool]) {
        self.apply_phase_oracle(marked);
        self.apply_diffusion();
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(Complex64::norm_sqr).collect()
    }
}

/// Measurement distribution after `k` Grover iterates from the uniform state.
pub fn sv_run_grover(x: &[bool], k: u64) -> Result<Vec<f64>> {
    let n = x.len();
    if n == 0 {
        return Err(Error::EmptyRange);
    }
    if n > SV_GROVER_CAP {
        return Err(Error::SimulationTooLarge { size: n, cap: SV_GROVER_CAP });
    }
    let mut state = StateVector::uniform(n);
    for _ in 0..k {
        state.grover_iterate(x);
    }
    Ok(state.probabilities())
}

fn sample_index<R: Rng + ?Sized>(pmf: &[f64], rng: &mut R) -> usize {
    let total: f64 = pmf.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (i, &p) in pmf.iter().enumerate() {
        if u < p {
            return i;
        }
        u -= p;
    }
    // Rounding left a sliver of mass past the end.
    pmf.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

/// `|(1/M) Σ_{j<M} e^{2πi jδ/M}|²`, the phase-estimation kernel.
fn fejer(delta: f64, m: usize) -> f64 {
    let mf = m as f64;
    let s = (PI * delta / mf).sin();
    if s.abs() > 1e-6 {
        return ((PI * delta).sin() / (mf * s)).powi(2);
    }
    let (mut re, mut im) = (0.0, 0.0);
    for j in 0..m {
        let ang = 2.0 * PI * j as f64 * delta / mf;
        re += ang.cos();
        im += ang.sin();
    }
    (re * re + im * im) / (mf * mf)
}

/// Distribution of the phase-register outcome `y ∈ 0..M` of amplitude
/// estimation on true amplitude-squared `a`. Outcome `y` maps to the
/// estimate `sin²(πy/M)`.
pub fn ae_phase_pmf(a: f64, m: usize) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::InvalidParameter(format!("amplitude {a} not in [0, 1]")));
    }
    if m == 0 {
        return Err(Error::InvalidParameter("M must be at least 1".into()));
    }
    let phi = a.sqrt().asin() / PI;
    let mf = m as f64;
    Ok((0..m)
        .map(|y| {
            let y = y as f64;
            0.5 * fejer(y - mf * phi, m) + 0.5 * fejer(y - mf * (1.0 - phi), m)
        })
        .collect())
}

fn ae_estimate(y: usize, m: usize) -> f64 {
    (PI * y as f64 / m as f64).sin().powi(2)
}

/// One point of an estimate distribution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PmfPoint {
    pub estimate: f64,
    pub probability: f64,
}

/// Distribution of the amplitude estimate `ã = sin²(πy/M)`. Outcomes `y` and
/// `M - y` give the same estimate and are merged, so the support has
/// `⌊M/2⌋ + 1` points, sorted by estimate.
pub fn ae_outcome_pmf(a: f64, m: usize) -> Result<Vec<PmfPoint>> {
    let phase = ae_phase_pmf(a, m)?;
    let mut out: Vec<PmfPoint> = (0..=m / 2)
        .map(|y| PmfPoint { estimate: ae_estimate(y, m), probability: 0.0 })
        .collect();
    for (y, p) in phase.into_iter().enumerate() {
        out[y.min(m - y)].probability += p;
    }
    Ok(out)
}

/// Error radius `2π√(w(n-w))/M + π²n/M²` within which a counting estimate of
/// weight `w` lands with probability at least 8/π².
pub fn counting_window(n: usize, w: f64, m: usize) -> f64 {
    let (n, m) = (n as f64, m as f64);
    2.0 * PI * (w * (n - w)).max(0.0).sqrt() / m + PI * PI * n / (m * m)
}

/// Probability mass the estimate distribution puts inside the counting window.
pub fn window_mass(a: f64, m: usize) -> Result<f64> {
    let radius = counting_window(1, a, m);
    Ok(ae_outcome_pmf(a, m)?
        .iter()
        .filter(|pt| (pt.estimate - a).abs() <= radius + 1e-12)
        .map(|pt| pt.probability)
        .sum())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountOutcome {
    /// Estimate of the Hamming weight, in `[0, n]`.
    pub estimate: f64,
    /// Queries per counting call.
    pub m: u64,
    pub reps: u32,
}

/// Phase-estimation pmf of the Grover iterate, simulated on the full
/// `M × n` register.
pub fn sv_counting_pmf(x: &[bool], m: usize) -> Result<Vec<f64>> {
    let n = x.len();
    if n == 0 {
        return Err(Error::EmptyRange);
    }
    if m == 0 {
        return Err(Error::InvalidParameter("M must be at least 1".into()));
    }
    if n * m > SV_COUNTING_CAP {
        return Err(Error::SimulationTooLarge { size: n * m, cap: SV_COUNTING_CAP });
    }
    // Row j holds G^j |s⟩.
    let mut powers = Vec::with_capacity(m);
    let mut state = StateVector::uniform(n);
    for _ in 0..m {
        powers.push(state.amplitudes().to_vec());
        state.grover_iterate(x);
    }
    let mf = m as f64;
    let pmf = (0..m)
        .map(|y| {
            (0..n)
                .map(|i| {
                    let amp: Complex64 = powers
                        .iter()
                        .enumerate()
                        .map(|(j, row)| {
                            row[i] * Complex64::from_polar(1.0, -2.0 * PI * (j * y) as f64 / mf)
                        })
                        .sum();
                    amp.norm_sqr() / (mf * mf)
                })
                .sum::<f64>()
        })
        .collect();
    Ok(pmf)
}

fn validate_counting(n: usize, m: usize, reps: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::EmptyRange);
    }
    if m == 0 {
        return Err(Error::InvalidParameter("M must be at least 1".into()));
    }
    if reps == 0 || reps % 2 == 0 {
        return Err(Error::InvalidParameter(format!("reps must be odd and positive, got {reps}")));
    }
    Ok(())
}

/// Estimate the Hamming weight of `oracle` with `m` queries.
pub fn count_estimate<O, R>(
    oracle: &O,
    m: usize,
    mode: Mode,
    ledger: &mut QueryLedger,
    rng: &mut R,
) -> Result<CountOutcome>
where
    O: BitOracle + ?Sized,
    R: Rng + ?Sized,
{
    count_median(oracle, m, 1, mode, ledger, rng)
}

/// Median of `reps` independent [`count_estimate`] calls.
pub fn count_median<O, R>(
    oracle: &O,
    m: usize,
    reps: u32,
    mode: Mode,
    ledger: &mut QueryLedger,
    rng: &mut R,
) -> Result<CountOutcome>
where
    O: BitOracle + ?Sized,
    R: Rng + ?Sized,
{
    let n = oracle.len();
    validate_counting(n, m, reps)?;
    let w = oracle.weight();
    ledger.charge(Target::X, Subroutine::Counting, m as u64 * u64::from(reps));
    let estimate = match mode {
        Mode::Exact => w as f64,
        Mode::CostModel | Mode::Statevector => {
            let pmf = if mode == Mode::CostModel {
                ae_phase_pmf(w as f64 / n as f64, m)?
            } else {
                let bits: Vec<bool> = (0..n).map(|i| oracle.bit(i)).collect();
                sv_counting_pmf(&bits, m)?
            };
            let mut draws: Vec<f64> = (0..reps)
                .map(|_| n as f64 * ae_estimate(sample_index(&pmf, rng), m))
                .collect();
            draws.sort_by(f64::total_cmp);
            draws[draws.len() / 2]
        }
    };
    Ok(CountOutcome { estimate, m: m as u64, reps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SeededRng;
    use approx::assert_abs_diff_eq;

    fn bits(s: &str) -> Vec<bool> {
        s.chars().map(|c| c == '1').collect()
    }

    #[test]
    fn schedule_examples() {
        let s = grover_schedule(4, 1).unwrap();
        assert_eq!(s.iterations, 1);
        assert_abs_diff_eq!(s.success_probability, 1.0, epsilon = 1e-12);

        let s = grover_schedule(4, 4).unwrap();
        assert_eq!(s.iterations, 0);
        assert_abs_diff_eq!(s.success_probability, 1.0, epsilon = 1e-12);

        let s = grover_schedule(1024, 1).unwrap();
        assert_eq!(s.iterations, 25);
        let expected = (51.0 * (1.0f64 / 32.0).asin()).sin().powi(2);
        assert_abs_diff_eq!(s.success_probability, expected, epsilon = 1e-15);
        assert!(s.success_probability > 0.999);

        assert!(matches!(grover_schedule(4, 0), Err(Error::WeightZero)));
        assert!(matches!(grover_schedule(4, 5), Err(Error::WeightTooLarge { .. })));
    }

    #[test]
    fn statevector_examples() {
        let pmf = sv_run_grover(&bits("0001"), 1).unwrap();
        assert_abs_diff_eq!(pmf[3], 1.0, epsilon = 1e-12);

        let pmf = sv_run_grover(&bits("01100000"), 0).unwrap();
        for p in pmf {
            assert_abs_diff_eq!(p, 1.0 / 8.0, epsilon = 1e-15);
        }

        for k in 0..5 {
            let pmf = sv_run_grover(&bits("1111"), k).unwrap();
            assert_abs_diff_eq!(pmf.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn norm_preserved_by_iterates() {
        let x = bits("0100110000000001");
        let mut s = StateVector::uniform(x.len());
        for _ in 0..40 {
            s.apply_phase_oracle(&x);
            assert_abs_diff_eq!(s.norm_sqr(), 1.0, epsilon = 1e-12);
            s.apply_diffusion();
            assert_abs_diff_eq!(s.norm_sqr(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn search_known_weight_trace() {
        let mut ledger = QueryLedger::new();
        let mut rng = SeededRng::new(1);
        for mode in [Mode::CostModel, Mode::Statevector, Mode::Exact] {
            let before = ledger.total();
            let out = grover_search(&bits("0001"), Some(1), mode, &SearchConfig::default(), &mut ledger, &mut rng)
                .unwrap();
            assert_eq!(out.found, Some(3));
            assert_eq!(out.queries_charged, 2);
            assert_eq!(ledger.total() - before, 2);
        }
    }

    #[test]
    fn search_on_zero_range_halts() {
        let cfg = SearchConfig::default();
        for mode in [Mode::CostModel, Mode::Statevector, Mode::Exact] {
            let mut ledger = QueryLedger::new();
            let mut rng = SeededRng::new(9);
            let out = grover_search(&vec![false; 64], None, mode, &cfg, &mut ledger, &mut rng).unwrap();
            assert_eq!(out.found, None);
            assert_eq!(out.queries_charged, cfg.budget(64));
            assert_eq!(ledger.by_subroutine(Subroutine::Grover), 24);
        }
        let mut rng = SeededRng::new(0);
        let err = grover_search(&Vec::<bool>::new(), None, Mode::Exact, &cfg, &mut QueryLedger::new(), &mut rng);
        assert!(matches!(err, Err(Error::EmptyRange)));
    }

    #[test]
    fn exact_search_always_returns_a_one() {
        let mut rng = SeededRng::new(5);
        let x = bits("0010000001000000");
        for _ in 0..50 {
            let out = grover_search(&x, None, Mode::Exact, &SearchConfig::default(), &mut QueryLedger::new(), &mut rng)
                .unwrap();
            assert!(x[out.found.unwrap()]);
        }
    }

    #[test]
    fn collect_examples() {
        let cfg = SearchConfig::default();
        let mut rng = SeededRng::new(3);
        let mut ledger = QueryLedger::new();
        let all = collect_ones(&bits("1111"), None, Mode::Exact, &cfg, &mut ledger, &mut rng).unwrap();
        assert_eq!(all.found, vec![0, 1, 2, 3]);
        assert_eq!(ledger.total(), collect_schedule_sum(4, 4, &cfg));

        let mut ledger = QueryLedger::new();
        let none = collect_ones(&vec![false; 16], None, Mode::Exact, &cfg, &mut ledger, &mut rng).unwrap();
        assert!(none.found.is_empty());
        assert_eq!(none.searches, 1);
        assert_eq!(ledger.total(), cfg.budget(16));

        let capped = collect_ones(&bits("1111"), Some(2), Mode::Exact, &cfg, &mut QueryLedger::new(), &mut rng).unwrap();
        assert_eq!(capped.found.len(), 2);
    }

    #[test]
    fn ae_pmf_edge_cases() {
        let pmf = ae_outcome_pmf(0.0, 7).unwrap();
        assert_abs_diff_eq!(pmf[0].probability, 1.0, epsilon = 1e-12);
        assert_eq!(pmf[0].estimate, 0.0);

        for m in [2, 4, 10, 64] {
            let pmf = ae_outcome_pmf(1.0, m).unwrap();
            let top = pmf.last().unwrap();
            assert_abs_diff_eq!(top.estimate, 1.0, epsilon = 1e-15);
            assert_abs_diff_eq!(top.probability, 1.0, epsilon = 1e-12);
        }

        let pmf = ae_outcome_pmf(0.5, 4).unwrap();
        assert_abs_diff_eq!(pmf.iter().map(|p| p.probability).sum::<f64>(), 1.0, epsilon = 1e-12);
        assert!(window_mass(0.5, 4).unwrap() >= 8.0 / (PI * PI));

        assert!(ae_outcome_pmf(1.5, 4).is_err());
        assert!(ae_outcome_pmf(0.5, 0).is_err());
    }

    /// Brute force: enumerate the phase register directly.
    fn brute_phase_pmf(a: f64, m: usize) -> Vec<f64> {
        let theta = a.sqrt().asin();
        let phases = [theta / PI, 1.0 - theta / PI];
        (0..m)
            .map(|y| {
                phases
                    .iter()
                    .map(|ph| {
                        let amp: Complex64 = (0..m)
                            .map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 * (ph - y as f64 / m as f64)))
                            .sum();
                        0.5 * amp.norm_sqr() / (m * m) as f64
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn closed_form_pmf_matches_enumeration() {
        for &m in &[1, 2, 3, 5, 8, 13] {
            for &a in &[0.0, 0.1, 0.25, 0.5, 0.9, 1.0] {
                let fast = ae_phase_pmf(a, m).unwrap();
                let slow = brute_phase_pmf(a, m);
                for (f, s) in fast.iter().zip(&slow) {
                    assert_abs_diff_eq!(f, s, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn statevector_counting_matches_closed_form() {
        for (x, m) in [(bits("0001"), 8), (bits("01101000"), 16), (bits("1111111100000000"), 32), (vec![false; 8], 4)] {
            let a = x.weight() as f64 / x.len() as f64;
            let sim = sv_counting_pmf(&x, m).unwrap();
            let closed = ae_phase_pmf(a, m).unwrap();
            for (s, c) in sim.iter().zip(&closed) {
                assert_abs_diff_eq!(s, c, epsilon = 1e-9);
            }
        }
        assert!(sv_counting_pmf(&vec![false; 1024], 8).is_err());
    }

    #[test]
    fn counting_modes() {
        let mut rng = SeededRng::new(11);
        let mut ledger = QueryLedger::new();
        let zero = vec![false; 16];
        for mode in [Mode::CostModel, Mode::Statevector, Mode::Exact] {
            assert_eq!(count_estimate(&zero, 8, mode, &mut ledger, &mut rng).unwrap().estimate, 0.0);
            assert_eq!(count_median(&zero, 8, 5, mode, &mut ledger, &mut rng).unwrap().estimate, 0.0);
        }
        let mut ledger = QueryLedger::new();
        let x = bits("1010000010000010");
        let out = count_estimate(&x, 8, Mode::Exact, &mut ledger, &mut rng).unwrap();
        assert_eq!(out.estimate, 4.0);
        assert_eq!(ledger.by_subroutine(Subroutine::Counting), 8);
        assert!(count_median(&x, 8, 4, Mode::Exact, &mut ledger, &mut rng).is_err());
    }

    #[test]
    fn theorem_window_example() {
        let radius = counting_window(16, 4.0, 8);
        assert_abs_diff_eq!(radius, 2.0 * PI * 48f64.sqrt() / 8.0 + PI * PI * 16.0 / 64.0, epsilon = 1e-12);
        assert_abs_diff_eq!(radius, 7.91, epsilon = 5e-3);
        let mut rng = SeededRng::new(2024);
        let x: Vec<bool> = (0..16).map(|i| i % 4 == 0).collect();
        let trials = 10_000;
        let inside = (0..trials)
            .filter(|_| {
                let e = count_estimate(&x, 8, Mode::CostModel, &mut QueryLedger::new(), &mut rng).unwrap();
                (e.estimate - 4.0).abs() <= radius
            })
            .count();
        assert!(inside as f64 / trials as f64 >= 8.0 / (PI * PI));
    }

    #[test]
    fn ceil_sqrt_is_exact() {
        for v in 0..2000u64 {
            let r = ceil_sqrt(v);
            assert!(r * r >= v);
            assert!(r == 0 || (r - 1) * (r - 1) < v);
        }
    }
}
