//! Chains `T_0 ⊆ T_1 ⊆ ...` spanned by fixed-ones states and their layers
//! `S_j = T_j ∩ T_{j-1}^⊥`.

use itertools::Itertools;
use nalgebra::DVector;
use serde::Serialize;

use crate::error::Result;
use crate::linalg::Basis;
use crate::space::{falling, InputSpace};

/// Which spanning states a chain is built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Family {
    /// `ψ^a_I`: weight `t-1+a`, positions `I` set, `I ⊆ {0..n}`.
    Weight { a: usize },
    /// `ψ^{a,b}_I`: as above with position 0 fixed to `b` and `I ⊆ {1..n}`.
    Split { a: usize, b: usize },
}

impl Family {
    fn positions(self, n: usize) -> std::ops::Range<usize> {
        match self {
            Family::Weight { .. } => 0..n,
            Family::Split { .. } => 1..n,
        }
    }

    /// Largest `j` for which `ψ_I` with `|I| = j` is nonzero.
    pub fn top(self, t: usize) -> Option<usize> {
        match self {
            Family::Weight { a } => Some(t - 1 + a),
            Family::Split { a, b } => (t - 1 + a).checked_sub(b),
        }
    }

    fn state(self, space: &InputSpace, ones: &[usize]) -> Option<DVector<f64>> {
        match self {
            Family::Weight { a } => space.psi(a, ones),
            Family::Split { a, b } => space.psi_split(a, b, ones),
        }
    }
}

/// A projected state `ψ̃_I = P_{T_{j-1}^⊥} ψ_I`.
#[derive(Clone, Debug)]
pub struct Tilde {
    pub ones: Vec<usize>,
    pub vector: DVector<f64>,
    pub norm: f64,
}

impl Tilde {
    pub fn unit(&self) -> DVector<f64> {
        &self.vector / self.norm
    }
}

#[derive(Clone, Debug)]
pub struct Level {
    pub j: usize,
    /// Basis of `T_j`.
    pub t_span: Basis,
    /// Basis of `S_j`.
    pub s_span: Basis,
    /// One entry per index tuple, in lexicographic order.
    pub tilde: Vec<Tilde>,
}

#[derive(Clone, Debug)]
pub struct Chain {
    pub family: Family,
    pub levels: Vec<Level>,
}

impl Chain {
    pub fn level(&self, j: usize) -> Option<&Level> {
        self.levels.get(j)
    }

    pub fn tilde(&self, j: usize, ones: &[usize]) -> Option<&Tilde> {
        self.levels.get(j)?.tilde.iter().find(|t| t.ones == ones)
    }
}

/// Builds every level of the chain for `family`.
pub fn build_chain(space: &InputSpace, family: Family) -> Result<Chain> {
    let dim = space.dim();
    let mut levels: Vec<Level> = Vec::new();
    let Some(top) = family.top(space.t()) else {
        return Ok(Chain { family, levels });
    };
    let mut below = Basis::empty(dim);
    for j in 0..=top {
        let mut tilde = Vec::new();
        for ones in family.positions(space.n()).combinations(j) {
            let Some(psi) = family.state(space, &ones) else { continue };
            let once = below.reject(&psi);
            let vector = below.reject(&once);
            let norm = vector.norm();
            tilde.push(Tilde { ones, vector, norm });
        }
        if tilde.is_empty() {
            break;
        }
        let label = format!("S_{j} of {family:?}");
        let vectors: Vec<DVector<f64>> = tilde.iter().map(|t| t.vector.clone()).collect();
        let s_span = Basis::span(&vectors, dim, &label)?;
        let t_span = Basis::direct_sum(dim, &[&below, &s_span]);
        below = t_span.clone();
        levels.push(Level { j, t_span, s_span, tilde });
    }
    Ok(Chain { family, levels })
}

/// Closed form for `‖ψ̃^{a,b}_I‖` with `|I| = j`.
pub fn split_norm_closed_form(n: usize, t: usize, a: usize, b: usize, j: usize) -> f64 {
    let top = n as f64 - t as f64 - a as f64 + b as f64;
    (falling(top, j) / falling((n - j) as f64, j)).sqrt()
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct NormCheck {
    pub states: usize,
    pub max_residual: f64,
}

/// Compares every computed `‖ψ̃^{a,b}_I‖`, `j < t/2`, with the closed form.
pub fn check_split_norms(space: &InputSpace) -> Result<NormCheck> {
    let (n, t) = (space.n(), space.t());
    let mut out = NormCheck::default();
    for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        let chain = build_chain(space, Family::Split { a, b })?;
        for level in chain.levels.iter().filter(|l| 2 * l.j < t) {
            let want = split_norm_closed_form(n, t, a, b, level.j);
            for tl in &level.tilde {
                out.states += 1;
                out.max_residual = out.max_residual.max((tl.norm - want).abs());
            }
        }
    }
    Ok(out)
}
