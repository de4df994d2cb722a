//! Phase-signed layers `S_{j,±}`, the good/bad split `R_j`, and their k-fold
//! aggregates `S_{m-}` and `ℛ_ℓ`.

use itertools::Itertools;
use nalgebra::DVector;
use serde::Serialize;

use crate::chain::{build_chain, Chain, Family};
use crate::error::{Error, Result};
use crate::linalg::{max_cross_gram, Basis};
use crate::space::InputSpace;

/// Largest single-instance dimension for which k-fold products are built.
pub const PRODUCT_DIM_CAP: usize = 32;
/// Largest number of instances for which products are built.
pub const PRODUCT_K_CAP: usize = 2;

/// Index of the aggregated good space: `⌈t/2⌉`.
///
/// For even `t` this is `t/2`; for odd `t` the layers `j < t/2` are exactly
/// `j < ⌈t/2⌉`, so the aggregate starts at `⌈t/2⌉`.
pub fn terminal_index(t: usize) -> usize {
    t.div_ceil(2)
}

#[derive(Clone, Debug)]
pub struct Signed {
    pub n: usize,
    pub t: usize,
    pub dim: usize,
    /// `S_{j,+}` for `j < t`.
    pub plus: Vec<Basis>,
    /// `S_{j,-}` for `j < t`, then `S_{t,-} = S_{t,1}`.
    pub minus: Vec<Basis>,
    /// `R_0, ..., R_{⌈t/2⌉}`.
    pub good: Vec<Basis>,
    /// Weight chains for `a = 0` and `a = 1`.
    pub chains: [Chain; 2],
    psi_one: DVector<f64>,
}

impl Signed {
    pub fn r_star(&self) -> usize {
        terminal_index(self.t)
    }

    /// `S_{l,a}`, the layer of the weight-`(t-1+a)` chain.
    pub fn layer(&self, a: usize, l: usize) -> Option<&Basis> {
        self.chains[a].level(l).map(|lv| &lv.s_span)
    }

    /// `S_{j,r}` with `r` either `'+'` or `'-'`.
    pub fn signed(&self, j: usize, minus: bool) -> Option<&Basis> {
        if minus {
            self.minus.get(j)
        } else {
            self.plus.get(j)
        }
    }

    pub fn all_plus(&self) -> Basis {
        Basis::direct_sum(self.dim, &self.plus.iter().collect::<Vec<_>>())
    }

    pub fn all_minus(&self) -> Basis {
        Basis::direct_sum(self.dim, &self.minus.iter().collect::<Vec<_>>())
    }

    pub fn psi_one(&self) -> &DVector<f64> {
        &self.psi_one
    }
}

pub fn build_signed(space: &InputSpace) -> Result<Signed> {
    let (n, t, dim) = (space.n(), space.t(), space.dim());
    let c0 = build_chain(space, Family::Weight { a: 0 })?;
    let c1 = build_chain(space, Family::Weight { a: 1 })?;
    let mut plus = Vec::with_capacity(t);
    let mut minus = Vec::with_capacity(t + 1);
    for j in 0..t {
        let (l0, l1) = (&c0.levels[j], &c1.levels[j]);
        let mut p = Vec::new();
        let mut m = Vec::new();
        for (u, v) in l0.tilde.iter().zip(&l1.tilde) {
            debug_assert_eq!(u.ones, v.ones);
            let (u, v) = (u.unit(), v.unit());
            p.push(&u + &v);
            m.push(&u - &v);
        }
        plus.push(Basis::span(&p, dim, &format!("S_{j},+"))?);
        minus.push(Basis::span(&m, dim, &format!("S_{j},-"))?);
    }
    minus.push(c1.levels[t].s_span.clone());

    let r_star = terminal_index(t);
    let mut good: Vec<Basis> = plus[..r_star].to_vec();
    let mut tail: Vec<&Basis> = plus[r_star..].iter().collect();
    tail.extend(minus.iter());
    good.push(Basis::direct_sum(dim, &tail));

    Ok(Signed { n, t, dim, plus, minus, good, chains: [c0, c1], psi_one: space.psi_one() })
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionCheck {
    pub dim: usize,
    pub signed_dims: usize,
    pub good_dims: usize,
    pub max_cross_gram: f64,
    pub max_orthonormality: f64,
    /// `‖P_{S_{0,+}} ψ_one‖`.
    pub psi_one_in_s0_plus: f64,
}

impl DecompositionCheck {
    pub fn residual(&self) -> f64 {
        self.max_cross_gram
            .max(self.max_orthonormality)
            .max((self.psi_one_in_s0_plus - 1.0).abs())
    }

    pub fn complete(&self) -> bool {
        self.signed_dims == self.dim && self.good_dims == self.dim
    }
}

pub fn check_decomposition(s: &Signed) -> DecompositionCheck {
    let labeled: Vec<&Basis> = s.plus.iter().chain(s.minus.iter()).collect();
    let mut cross: f64 = 0.0;
    for (a, b) in labeled.iter().tuple_combinations() {
        cross = cross.max(max_cross_gram(a, b));
    }
    for (a, b) in s.good.iter().tuple_combinations() {
        cross = cross.max(max_cross_gram(a, b));
    }
    let ortho = labeled
        .iter()
        .chain(s.good.iter().collect::<Vec<_>>().iter())
        .map(|b| b.orthonormality_residual())
        .fold(0.0, f64::max);
    DecompositionCheck {
        dim: s.dim,
        signed_dims: labeled.iter().map(|b| b.rank()).sum(),
        good_dims: s.good.iter().map(|b| b.rank()).sum(),
        max_cross_gram: cross,
        max_orthonormality: ortho,
        psi_one_in_s0_plus: s.plus[0].project(&s.psi_one).norm(),
    }
}

/// k-fold aggregates on `H_one^{⊗k}`.
#[derive(Clone, Debug)]
pub struct Products {
    pub k: usize,
    pub dim: usize,
    /// `S_{m-}` for `m = 0..=k`.
    pub minus_count: Vec<Basis>,
    /// `ℛ_ℓ` for `ℓ = 0..=k⌈t/2⌉`.
    pub good_level: Vec<Basis>,
}

fn tensor_all(parts: &[&Basis]) -> Basis {
    let mut it = parts.iter();
    let first = (*it.next().expect("at least one factor")).clone();
    it.fold(first, |acc, b| acc.tensor(b))
}

pub fn build_products(s: &Signed, k: usize) -> Result<Products> {
    if k == 0 || k > PRODUCT_K_CAP || (k > 1 && s.dim > PRODUCT_DIM_CAP) {
        return Err(Error::TooLarge { size: s.dim.pow(k as u32), cap: PRODUCT_DIM_CAP.pow(2) });
    }
    let dim = s.dim.pow(k as u32);
    let sides = [s.all_plus(), s.all_minus()];
    let mut minus_count: Vec<Vec<Basis>> = vec![Vec::new(); k + 1];
    for signs in (0..k).map(|_| 0..2usize).multi_cartesian_product() {
        let m = signs.iter().sum::<usize>();
        let factors: Vec<&Basis> = signs.iter().map(|&r| &sides[r]).collect();
        minus_count[m].push(tensor_all(&factors));
    }
    let r_star = s.r_star();
    let mut good_level: Vec<Vec<Basis>> = vec![Vec::new(); k * r_star + 1];
    for js in (0..k).map(|_| 0..=r_star).multi_cartesian_product() {
        let l = js.iter().sum::<usize>();
        let factors: Vec<&Basis> = js.iter().map(|&j| &s.good[j]).collect();
        good_level[l].push(tensor_all(&factors));
    }
    let collapse = |groups: Vec<Vec<Basis>>| -> Vec<Basis> {
        groups.iter().map(|g| Basis::direct_sum(dim, &g.iter().collect::<Vec<_>>())).collect()
    };
    Ok(Products { k, dim, minus_count: collapse(minus_count), good_level: collapse(good_level) })
}

impl Products {
    /// `S_{0-} ⊕ ... ⊕ S_{m-}`.
    pub fn minus_at_most(&self, m: usize) -> Basis {
        let parts: Vec<&Basis> = self.minus_count.iter().take(m + 1).collect();
        Basis::direct_sum(self.dim, &parts)
    }

    /// `ℛ'_L = ⊕_{ℓ ≥ L} ℛ_ℓ`.
    pub fn good_at_least(&self, l: usize) -> Basis {
        let parts: Vec<&Basis> = self.good_level.iter().skip(l).collect();
        Basis::direct_sum(self.dim, &parts)
    }

    pub fn k_fold_state(&self, one: &DVector<f64>) -> DVector<f64> {
        let mut v = one.clone();
        for _ in 1..self.k {
            v = v.kronecker(one);
        }
        v
    }
}
