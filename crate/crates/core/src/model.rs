//! Problem instances, oracle access with query accounting, and the exact
//! classical reference answers.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A fixed nonnegative integer matrix `A` (N×N) with input vectors `x`, `b`
/// bounded by `t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    n: usize,
    t: u64,
    /// Row-major, `n * n` entries.
    a: Vec<u64>,
    x: Vec<u64>,
    b: Vec<u64>,
}

impl Instance {
    pub fn new(rows: Vec<Vec<u64>>, x: Vec<u64>, b: Vec<u64>, t: u64) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidInstance("N must be at least 1".into()));
        }
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::InvalidInstance(format!(
                "row {i} has {} entries, expected {n}",
                r.len()
            )));
        }
        let a = rows.into_iter().flatten().collect();
        Self::from_flat(n, a, x, b, t)
    }

    pub fn from_flat(n: usize, a: Vec<u64>, x: Vec<u64>, b: Vec<u64>, t: u64) -> Result<Self> {
        let inst = Instance { n, t, a, x, b };
        inst.validate()?;
        Ok(inst)
    }

    fn validate(&self) -> Result<()> {
        let n = self.n;
        if n == 0 {
            return Err(Error::InvalidInstance("N must be at least 1".into()));
        }
        if self.t == 0 {
            return Err(Error::InvalidInstance("t must be positive".into()));
        }
        if self.a.len() != n * n {
            return Err(Error::InvalidInstance(format!(
                "A has {} entries, expected {}",
                self.a.len(),
                n * n
            )));
        }
        if self.x.len() != n || self.b.len() != n {
            return Err(Error::InvalidInstance(format!(
                "x and b must have length {n} (got {} and {})",
                self.x.len(),
                self.b.len()
            )));
        }
        if let Some(i) = self.x.iter().position(|&v| v > self.t) {
            return Err(Error::InvalidInstance(format!("x[{i}] = {} exceeds t = {}", self.x[i], self.t)));
        }
        if let Some(i) = self.b.iter().position(|&v| v > self.t) {
            return Err(Error::InvalidInstance(format!("b[{i}] = {} exceeds t = {}", self.b[i], self.t)));
        }
        for i in 0..n {
            let mut acc: u64 = 0;
            for j in 0..n {
                acc = self.a[i * n + j]
                    .checked_mul(self.x[j])
                    .and_then(|v| acc.checked_add(v))
                    .ok_or_else(|| Error::InvalidInstance(format!("(Ax)[{i}] overflows 64 bits")))?;
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    #[inline]
    pub fn a(&self, i: usize, j: usize) -> u64 {
        self.a[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.a[i * self.n..(i + 1) * self.n]
    }

    /// Ground-truth view of `x`. Algorithms must go through [`oracle_query`];
    /// this is for reference computations and simulators.
    pub fn x(&self) -> &[u64] {
        &self.x
    }

    pub fn b(&self) -> &[u64] {
        &self.b
    }

    /// Uniformly random instance: Boolean `A` with entry density `density`,
    /// `x` and `b` uniform on `0..=t`.
    pub fn random<R: Rng + ?Sized>(n: usize, t: u64, density: f64, rng: &mut R) -> Result<Self> {
        if !(0.0..=1.0).contains(&density) {
            return Err(Error::InvalidParameter(format!("density {density} not in [0, 1]")));
        }
        let a = (0..n * n).map(|_| u64::from(rng.random_bool(density))).collect();
        let x = (0..n).map(|_| rng.random_range(0..=t)).collect();
        let b = (0..n).map(|_| rng.random_range(0..=t)).collect();
        Self::from_flat(n, a, x, b, t)
    }

    pub fn parse(text: &str) -> Result<Self> {
        text.parse()
    }
}

impl FromStr for Instance {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());

        fn ints(line: usize, s: &str) -> Result<Vec<u64>> {
            s.split_whitespace()
                .map(|tok| {
                    tok.parse::<u64>().map_err(|e| Error::Parse {
                        line,
                        msg: format!("bad integer {tok:?}: {e}"),
                    })
                })
                .collect()
        }
        let mut next = |what: &str| {
            lines.next().ok_or_else(|| Error::Parse {
                line: 0,
                msg: format!("unexpected end of input, expected {what}"),
            })
        };

        let (ln, header) = next("header \"N t\"")?;
        let head = ints(ln, header)?;
        let [n, t] = head[..] else {
            return Err(Error::Parse { line: ln, msg: "header must be \"N t\"".into() });
        };
        let n = usize::try_from(n).map_err(|_| Error::Parse { line: ln, msg: "N too large".into() })?;

        let mut read_row = |what: &str| -> Result<Vec<u64>> {
            let (ln, l) = next(what)?;
            let row = ints(ln, l)?;
            if row.len() != n {
                return Err(Error::Parse {
                    line: ln,
                    msg: format!("{what} has {} entries, expected {n}", row.len()),
                });
            }
            Ok(row)
        };
        let mut a = Vec::with_capacity(n * n);
        for i in 0..n {
            a.extend(read_row(&format!("row {i} of A"))?);
        }
        let x = read_row("x")?;
        let b = read_row("b")?;
        Instance::from_flat(n, a, x, b, t)
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn join(v: &[u64]) -> String {
            v.iter().map(u64::to_string).collect::<Vec<_>>().join(" ")
        }
        writeln!(f, "{} {}", self.n, self.t)?;
        for i in 0..self.n {
            writeln!(f, "{}", join(self.row(i)))?;
        }
        writeln!(f, "{}", join(&self.x))?;
        writeln!(f, "{}", join(&self.b))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    X,
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Subroutine {
    Grover,
    Counting,
    ClassicalRead,
}

/// Oracle-call accounting for one run.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryLedger {
    queries_x: u64,
    queries_b: u64,
    by_subroutine: BTreeMap<Subroutine, u64>,
    space_high_water: u64,
}

impl QueryLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn charge(&mut self, target: Target, subroutine: Subroutine, count: u64) {
        if count == 0 {
            return;
        }
        match target {
            Target::X => self.queries_x += count,
            Target::B => self.queries_b += count,
        }
        *self.by_subroutine.entry(subroutine).or_default() += count;
    }

    /// Record that `bits` of working storage are live right now.
    pub fn note_space(&mut self, bits: u64) {
        self.space_high_water = self.space_high_water.max(bits);
    }

    pub fn queries_x(&self) -> u64 {
        self.queries_x
    }

    pub fn queries_b(&self) -> u64 {
        self.queries_b
    }

    pub fn total(&self) -> u64 {
        self.queries_x + self.queries_b
    }

    pub fn space_high_water(&self) -> u64 {
        self.space_high_water
    }

    pub fn by_subroutine(&self, s: Subroutine) -> u64 {
        self.by_subroutine.get(&s).copied().unwrap_or(0)
    }

    /// Fold a sub-ledger into this one. Counts add; the space high-water mark
    /// is the larger of the two since the runs are sequential.
    pub fn merge(&mut self, other: &QueryLedger) {
        self.queries_x += other.queries_x;
        self.queries_b += other.queries_b;
        for (&k, &v) in &other.by_subroutine {
            *self.by_subroutine.entry(k).or_default() += v;
        }
        self.space_high_water = self.space_high_water.max(other.space_high_water);
    }

    pub fn report(&self) -> LedgerReport {
        LedgerReport {
            total: self.total(),
            queries_x: self.queries_x,
            queries_b: self.queries_b,
            per_subroutine: self.by_subroutine.clone(),
            space_high_water: self.space_high_water,
        }
    }
}

/// Immutable snapshot of a [`QueryLedger`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerReport {
    pub total: u64,
    pub queries_x: u64,
    pub queries_b: u64,
    pub per_subroutine: BTreeMap<Subroutine, u64>,
    pub space_high_water: u64,
}

/// Read `x[i]` or `b[i]`, charging one classical query.
pub fn oracle_query(inst: &Instance, target: Target, i: usize, ledger: &mut QueryLedger) -> Result<u64> {
    let v = match target {
        Target::X => inst.x.get(i),
        Target::B => inst.b.get(i),
    }
    .copied()
    .ok_or(Error::IndexOutOfRange { index: i, len: inst.n })?;
    ledger.charge(target, Subroutine::ClassicalRead, 1);
    Ok(v)
}

/// Exact reference answer `y_i = min((Ax)[i], b_i)`. Oracle-free.
pub fn matvec_min(inst: &Instance) -> Vec<u64> {
    (0..inst.n)
        .map(|i| {
            let ax: u64 = inst.row(i).iter().zip(&inst.x).map(|(&a, &x)| a * x).sum();
            ax.min(inst.b[i])
        })
        .collect()
}

/// Truth values of `(Ax)[i] >= b_i`.
pub fn inequality_eval(inst: &Instance) -> Vec<bool> {
    matvec_min(inst).iter().zip(&inst.b).map(|(y, b)| y == b).collect()
}

/// Bits needed to hold any value in `0..=max_value` (at least 1).
pub fn value_bits(max_value: u64) -> u64 {
    u64::from(64 - max_value.leading_zeros()).max(1)
}

/// ⌈log₂ n⌉ bits for an index into a range of size `n` (at least 1).
pub fn index_bits(n: usize) -> u64 {
    if n <= 2 {
        1
    } else {
        u64::from(usize::BITS - (n - 1).leading_zeros())
    }
}

/// Deterministic random stream keyed by a 64-bit seed.
#[derive(Clone, Debug)]
pub struct SeededRng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        SeededRng { seed, inner: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent stream derived from this seed; does not advance `self`.
    pub fn fork(&self, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(self.seed);
        inner.set_stream(stream);
        SeededRng { seed: self.seed, inner }
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
