//! Parameter sweeps over `(N, t, S)` and log-log scaling fits.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linsys::{
    bounded_matrix_product, classical_bounded_product, classical_rows_per_block, quantum_rows_per_block,
    LinsysConfig,
};
use crate::model::{matvec_min, Instance, QueryLedger, SeededRng};
use crate::qsim::Mode;

/// Which algorithm a run exercises, and in which simulation mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunMode {
    Exact,
    CostModel,
    Statevector,
    Classical,
}

impl RunMode {
    pub fn quantum_mode(self) -> Option<Mode> {
        match self {
            RunMode::Exact => Some(Mode::Exact),
            RunMode::CostModel => Some(Mode::CostModel),
            RunMode::Statevector => Some(Mode::Statevector),
            RunMode::Classical => None,
        }
    }
}

impl fmt::Display for RunMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.quantum_mode() {
            Some(m) => m.fmt(f),
            None => f.write_str("classical"),
        }
    }
}

impl FromStr for RunMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classical" => Ok(RunMode::Classical),
            other => Ok(match other.parse::<Mode>()? {
                Mode::Exact => RunMode::Exact,
                Mode::CostModel => RunMode::CostModel,
                Mode::Statevector => RunMode::Statevector,
            }),
        }
    }
}

/// Instance distribution for a sweep.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InstanceFamily {
    /// `b = (t, ..., t)`, uniform Boolean `A`, and a Boolean `x` with `t`
    /// ones. Rows rarely saturate, so the whole input is scanned.
    #[default]
    Hard,
    /// Uniform Boolean `A` at density 1/2, `x` and `b` uniform on `0..=t`.
    Random,
}

impl InstanceFamily {
    pub fn generate<R: Rng + ?Sized>(self, n: usize, t: u64, rng: &mut R) -> Result<Instance> {
        match self {
            InstanceFamily::Random => Instance::random(n, t, 0.5, rng),
            InstanceFamily::Hard => {
                let a = (0..n * n).map(|_| u64::from(rng.random_bool(0.5))).collect();
                let mut x = vec![0; n];
                for i in sample(rng, n, (t as usize).min(n)) {
                    x[i] = 1;
                }
                Instance::from_flat(n, a, x, vec![t; n], t)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SpaceRule {
    /// The listed budgets, in bits.
    Absolute { values: Vec<u64> },
    /// `max(1, ⌊f·N/t⌋)` for each listed fraction `f`.
    FractionOfNOverT { fractions: Vec<f64> },
}

impl SpaceRule {
    pub fn budgets(&self, n: usize, t: u64) -> Vec<u64> {
        let mut out: Vec<u64> = match self {
            SpaceRule::Absolute { values } => values.clone(),
            SpaceRule::FractionOfNOverT { fractions } => fractions
                .iter()
                .map(|f| ((f * n as f64 / t as f64).floor() as u64).max(1))
                .collect(),
        };
        out.sort_unstable();
        out.dedup();
        out
    }
}

fn default_family() -> InstanceFamily {
    InstanceFamily::Hard
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    #[serde(rename = "N")]
    pub n: Vec<usize>,
    pub t: Vec<u64>,
    pub space: SpaceRule,
    pub modes: Vec<RunMode>,
    /// Seeds `0..seeds` are run in every cell.
    pub seeds: u64,
    #[serde(default = "default_family")]
    pub family: InstanceFamily,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    #[serde(rename = "N")]
    pub n: usize,
    pub t: u64,
    #[serde(rename = "S")]
    pub s: u64,
    pub mode: RunMode,
}

impl SweepConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let cfg: SweepConfig = serde_json::from_str(&fs::read_to_string(path)?)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn cells(&self) -> Vec<Cell> {
        let mut cells = Vec::new();
        for &n in &self.n {
            for &t in &self.t {
                for s in self.space.budgets(n, t) {
                    for &mode in &self.modes {
                        cells.push(Cell { n, t, s, mode });
                    }
                }
            }
        }
        cells.sort();
        cells.dedup();
        cells
    }

    /// Every cell must meet the precondition of the algorithm it runs.
    pub fn validate(&self) -> Result<()> {
        for c in self.cells() {
            if c.n == 0 || c.t == 0 {
                return Err(Error::InvalidParameter(format!("cell {c:?}: N and t must be positive")));
            }
            match c.mode {
                RunMode::Classical => classical_rows_per_block(c.n, c.t, c.s).map(drop)?,
                _ => quantum_rows_per_block(c.n, c.s).map(drop)?,
            }
        }
        Ok(())
    }
}

/// `S > N/t` puts a cell past the tradeoff curve, where `TS = N²` is optimal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Tradeoff,
    ClassicalRegime,
}

impl Regime {
    pub fn of(n: usize, t: u64, s: u64) -> Self {
        if s as u128 * t as u128 > n as u128 {
            Regime::ClassicalRegime
        } else {
            Regime::Tradeoff
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub t: u64,
    #[serde(rename = "S")]
    pub s: u64,
    pub mode: RunMode,
    pub seed: u64,
    #[serde(rename = "T")]
    pub total: u64,
    pub queries_x: u64,
    pub queries_b: u64,
    pub space: u64,
    pub correct: bool,
    pub regime: Regime,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl SweepRow {
    fn sort_key(&self) -> (usize, u64, u64, RunMode, u64) {
        (self.n, self.t, self.s, self.mode, self.seed)
    }

    pub fn cell(&self) -> Cell {
        Cell { n: self.n, t: self.t, s: self.s, mode: self.mode }
    }
}

/// Run one seed of one cell. The instance depends on the seed only, so every
/// mode sees the same inputs.
pub fn run_cell(cell: Cell, seed: u64, family: InstanceFamily) -> SweepRow {
    let base = SeededRng::new(seed);
    let mut ledger = QueryLedger::new();
    let outcome = family.generate(cell.n, cell.t, &mut base.fork(0)).and_then(|inst| {
        let y = match cell.mode.quantum_mode() {
            Some(mode) => {
                let cfg = LinsysConfig::for_size(cell.n, mode);
                bounded_matrix_product(&inst, cell.s, &cfg, &mut ledger, &mut base.fork(1))?.y
            }
            None => classical_bounded_product(&inst, cell.s, &mut ledger)?,
        };
        Ok(y == matvec_min(&inst))
    });
    let (correct, error) = match outcome {
        Ok(c) => (c, None),
        Err(e) => (false, Some(e.to_string())),
    };
    SweepRow {
        n: cell.n,
        t: cell.t,
        s: cell.s,
        mode: cell.mode,
        seed,
        total: ledger.total(),
        queries_x: ledger.queries_x(),
        queries_b: ledger.queries_b(),
        space: ledger.space_high_water(),
        correct,
        regime: Regime::of(cell.n, cell.t, cell.s),
        error,
    }
}

/// Execute every cell and seed; rows come back sorted by `(N, t, S, mode, seed)`.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let jobs: Vec<(Cell, u64)> =
        cfg.cells().into_iter().flat_map(|c| (0..cfg.seeds).map(move |s| (c, s))).collect();
    let mut rows: Vec<SweepRow> = jobs.into_par_iter().map(|(c, s)| run_cell(c, s, cfg.family)).collect();
    rows.sort_by_key(SweepRow::sort_key);
    Ok(rows)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    #[serde(rename = "N")]
    N,
    #[serde(rename = "S")]
    S,
    #[serde(rename = "t")]
    T,
}

impl Axis {
    fn value(self, row: &SweepRow) -> f64 {
        match self {
            Axis::N => row.n as f64,
            Axis::S => row.s as f64,
            Axis::T => row.t as f64,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub exponent: f64,
    /// 1.96 standard errors of the slope.
    pub half_width: f64,
    pub points: usize,
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let m = values.len() / 2;
    if values.len() % 2 == 1 {
        values[m]
    } else {
        0.5 * (values[m - 1] + values[m])
    }
}

/// Median `T` per cell, over rows that completed without error.
pub fn cell_medians(rows: &[SweepRow]) -> BTreeMap<Cell, f64> {
    let mut groups: BTreeMap<Cell, Vec<f64>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.error.is_none()) {
        groups.entry(r.cell()).or_default().push(r.total as f64);
    }
    groups.into_iter().map(|(c, mut v)| (c, median(&mut v))).collect()
}

/// Least-squares slope of `log₂ T` against `log₂ axis` over per-cell medians.
pub fn fit_scaling(rows: &[SweepRow], axis: Axis) -> Result<ScalingFit> {
    let mut groups: BTreeMap<Cell, (f64, Vec<f64>)> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.error.is_none()) {
        groups.entry(r.cell()).or_insert_with(|| (axis.value(r), Vec::new())).1.push(r.total as f64);
    }
    let points: Vec<(f64, f64)> =
        groups.into_values().map(|(a, mut ts)| (a.log2(), median(&mut ts).max(1.0).log2())).collect();
    let mut distinct: Vec<f64> = points.iter().map(|p| p.0).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::InsufficientPoints { needed: 3, got: distinct.len() });
    }
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let ssr: f64 = points.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum();
    let se = (ssr / (k - 2.0) / sxx).sqrt();
    Ok(ScalingFit { exponent: slope, half_width: 1.96 * se, points: points.len() })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::InvalidParameter(format!("unknown format {other:?}"))),
        }
    }
}

impl Format {
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Format::Json,
            _ => Format::Csv,
        }
    }
}

pub const CSV_COLUMNS: [&str; 10] = ["N", "t", "S", "mode", "seed", "T", "queries_x", "queries_b", "space", "correct"];

pub fn write_rows<W: Write>(rows: &[SweepRow], format: Format, out: W) -> Result<()> {
    match format {
        Format::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, rows)?;
            out.write_all(b"\n")?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(CSV_COLUMNS)?;
            for r in rows {
                w.write_record([
                    r.n.to_string(),
                    r.t.to_string(),
                    r.s.to_string(),
                    r.mode.to_string(),
                    r.seed.to_string(),
                    r.total.to_string(),
                    r.queries_x.to_string(),
                    r.queries_b.to_string(),
                    r.space.to_string(),
                    r.correct.to_string(),
                ])?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

pub fn emit_report(rows: &[SweepRow], format: Format, path: &Path) -> Result<()> {
    let file = fs::File::create(path)?;
    write_rows(rows, format, std::io::BufWriter::new(file))
}

pub fn read_rows(path: &Path) -> Result<Vec<SweepRow>> {
    match Format::from_path(path) {
        Format::Json => Ok(serde_json::from_str(&fs::read_to_string(path)?)?),
        Format::Csv => {
            let mut rdr = csv::Reader::from_path(path)?;
            let headers = rdr.headers()?.clone();
            if headers.iter().ne(CSV_COLUMNS) {
                return Err(Error::Parse { line: 1, msg: format!("unexpected header {headers:?}") });
            }
            rdr.records()
                .enumerate()
                .map(|(i, rec)| {
                    let rec = rec?;
                    let field = |k: usize| -> Result<&str> {
                        rec.get(k).ok_or(Error::Parse { line: i + 2, msg: format!("missing column {k}") })
                    };
                    let num = |k: usize| -> Result<u64> {
                        field(k)?
                            .parse()
                            .map_err(|e| Error::Parse { line: i + 2, msg: format!("column {}: {e}", CSV_COLUMNS[k]) })
                    };
                    let (n, t, s) = (num(0)? as usize, num(1)?, num(2)?);
                    Ok(SweepRow {
                        n,
                        t,
                        s,
                        mode: field(3)?.parse()?,
                        seed: num(4)?,
                        total: num(5)?,
                        queries_x: num(6)?,
                        queries_b: num(7)?,
                        space: num(8)?,
                        correct: field(9)? == "true",
                        regime: Regime::of(n, t, s),
                        error: None,
                    })
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(exponent: f64) -> Vec<SweepRow> {
        [64usize, 128, 256, 512, 1024]
            .iter()
            .flat_map(|&n| {
                (0..3).map(move |seed| SweepRow {
                    n,
                    t: 2,
                    s: 16,
                    mode: RunMode::Exact,
                    seed,
                    total: (n as f64).powf(exponent).round() as u64,
                    queries_x: 0,
                    queries_b: 0,
                    space: 0,
                    correct: true,
                    regime: Regime::Tradeoff,
                    error: None,
                })
            })
            .collect()
    }

    #[test]
    fn planted_laws() {
        let fit = fit_scaling(&synthetic(2.0), Axis::N).unwrap();
        assert!((fit.exponent - 2.0).abs() < 0.01);
        let fit = fit_scaling(&synthetic(1.5), Axis::N).unwrap();
        assert!((fit.exponent - 1.5).abs() < 0.01);
        assert!(fit.half_width < 0.01);
    }

    #[test]
    fn too_few_points() {
        let rows: Vec<SweepRow> = synthetic(2.0).into_iter().filter(|r| r.n <= 128).collect();
        assert!(matches!(fit_scaling(&rows, Axis::N), Err(Error::InsufficientPoints { needed: 3, got: 2 })));
    }

    #[test]
    fn empty_and_single_cell() {
        let mut cfg = SweepConfig {
            n: vec![],
            t: vec![2],
            space: SpaceRule::Absolute { values: vec![16] },
            modes: vec![RunMode::Exact],
            seeds: 3,
            family: InstanceFamily::Hard,
            out: None,
        };
        assert!(run_sweep(&cfg).unwrap().is_empty());
        cfg.n = vec![32];
        let rows = run_sweep(&cfg).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| r.correct));
    }

    #[test]
    fn header_only_csv() {
        let mut buf = Vec::new();
        write_rows(&[], Format::Csv, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "N,t,S,mode,seed,T,queries_x,queries_b,space,correct\n");
    }

    #[test]
    fn regime_labels() {
        assert_eq!(Regime::of(64, 2, 16), Regime::Tradeoff);
        assert_eq!(Regime::of(64, 2, 32), Regime::Tradeoff);
        assert_eq!(Regime::of(64, 2, 33), Regime::ClassicalRegime);
    }

    #[test]
    fn space_rules() {
        let r = SpaceRule::FractionOfNOverT { fractions: vec![0.25, 0.5, 0.5] };
        assert_eq!(r.budgets(128, 2), vec![16, 32]);
    }

    #[test]
    fn config_rejects_small_space() {
        let cfg = SweepConfig {
            n: vec![1024],
            t: vec![2],
            space: SpaceRule::Absolute { values: vec![4] },
            modes: vec![RunMode::Exact],
            seeds: 1,
            family: InstanceFamily::Hard,
            out: None,
        };
        assert!(matches!(cfg.validate(), Err(Error::SpaceTooSmall { .. })));
    }

    #[test]
    fn mode_names_round_trip() {
        for m in [RunMode::Exact, RunMode::CostModel, RunMode::Statevector, RunMode::Classical] {
            assert_eq!(m.to_string().parse::<RunMode>().unwrap(), m);
            assert_eq!(serde_json::to_string(&m).unwrap(), format!("\"{m}\""));
        }
    }
}
