//! Per-series exponent fits over a sweep table.

use std::collections::BTreeMap;

use serde::Serialize;

use qtradeoff_core::sweep::{fit_scaling, Axis, RunMode, ScalingFit, SweepRow};

#[derive(Debug, Serialize)]
pub struct SeriesFit {
    pub mode: RunMode,
    /// The two coordinates held fixed.
    pub fixed: BTreeMap<&'static str, u64>,
    #[serde(flatten)]
    pub fit: ScalingFit,
}

#[derive(Debug, Serialize)]
pub struct Summary {
    pub axis: Axis,
    pub rows: usize,
    pub incorrect: usize,
    pub errors: usize,
    pub classical_regime_rows: usize,
    pub fits: Vec<SeriesFit>,
    /// Series with fewer than three axis values.
    pub skipped: usize,
}

fn fixed(axis: Axis, r: &SweepRow) -> [(&'static str, u64); 2] {
    match axis {
        Axis::N => [("t", r.t), ("S", r.s)],
        Axis::S => [("N", r.n as u64), ("t", r.t)],
        Axis::T => [("N", r.n as u64), ("S", r.s)],
    }
}

pub fn summarize(rows: &[SweepRow], axis: Axis) -> Summary {
    let mut series: BTreeMap<(RunMode, [(&'static str, u64); 2]), Vec<SweepRow>> = BTreeMap::new();
    for r in rows {
        series.entry((r.mode, fixed(axis, r))).or_default().push(r.clone());
    }
    let mut fits = Vec::new();
    let mut skipped = 0;
    for ((mode, fixed), group) in series {
        match fit_scaling(&group, axis) {
            Ok(fit) => fits.push(SeriesFit { mode, fixed: fixed.into_iter().collect(), fit }),
            Err(_) => skipped += 1,
        }
    }
    Summary {
        axis,
        rows: rows.len(),
        incorrect: rows.iter().filter(|r| !r.correct).count(),
        errors: rows.iter().filter(|r| r.error.is_some()).count(),
        classical_regime_rows: rows
            .iter()
            .filter(|r| matches!(r.regime, qtradeoff_core::sweep::Regime::ClassicalRegime))
            .count(),
        fits,
        skipped,
    }
}
