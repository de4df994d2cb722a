//! The one-query structure around a split coordinate: the maps between the
//! `S_{j,a,b}` layers and the mixing coefficients `α_a`, `β_a`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::chain::{build_chain, split_norm_closed_form, Chain, Family};
use crate::signed::{build_signed, Signed};
use crate::error::Result;
use crate::space::InputSpace;

#[derive(Clone, Debug, Serialize)]
pub struct MapReport {
    pub a: usize,
    pub b: usize,
    pub rank_in: usize,
    pub rank_out: usize,
    /// Largest minus smallest singular value.
    pub spread: f64,
    /// Mean singular value, the multiple `c_ab`.
    pub constant: f64,
    /// `max |M C_in - C_out|`: the map is well defined on the spanning set.
    pub consistency: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct UnitaryCheck {
    pub j: usize,
    pub maps: Vec<MapReport>,
}

impl UnitaryCheck {
    pub fn max_spread(&self) -> f64 {
        self.maps.iter().map(|m| m.spread.max(m.consistency)).fold(0.0, f64::max)
    }

    pub fn c11(&self) -> Option<f64> {
        self.maps.iter().find(|m| (m.a, m.b) == (1, 1)).map(|m| m.constant)
    }
}

/// Chains for `(a, b) = (0,0), (0,1), (1,0), (1,1)`, in that order.
pub fn split_chains(space: &InputSpace) -> Result<Vec<Chain>> {
    [(0, 0), (0, 1), (1, 0), (1, 1)]
        .into_iter()
        .map(|(a, b)| build_chain(space, Family::Split { a, b }))
        .collect()
}

/// Coordinates of every `ψ̃_I` at level `j` in that level's layer basis.
fn layer_coords(chain: &Chain, j: usize) -> Option<DMatrix<f64>> {
    let level = chain.level(j)?;
    let cols: Vec<_> = level.tilde.iter().map(|t| level.s_span.coords(&t.vector)).collect();
    Some(DMatrix::from_columns(&cols))
}

/// Assembles `U_ab: ψ̃^{0,0}_I ↦ ψ̃^{a,b}_I` in the computed bases and
/// reports its singular values.
pub fn check_unitary_maps(space: &InputSpace, j: usize) -> Result<UnitaryCheck> {
    Ok(unitary_maps_from(&split_chains(space)?, j))
}

/// As [`check_unitary_maps`], reusing chains from [`split_chains`].
pub fn unitary_maps_from(chains: &[Chain], j: usize) -> UnitaryCheck {
    let mut maps = Vec::new();
    let Some(c_in) = layer_coords(&chains[0], j) else {
        return UnitaryCheck { j, maps };
    };
    let pinv = c_in.clone().pseudo_inverse(1e-10).expect("non-negative tolerance");
    for (idx, (a, b)) in [(0, 1), (1, 0), (1, 1)].into_iter().enumerate() {
        let Some(c_out) = layer_coords(&chains[idx + 1], j) else { continue };
        let m = &c_out * &pinv;
        let consistency = (&m * &c_in - &c_out).amax();
        let sv = m.singular_values();
        let (lo, hi) = sv.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &s| (l.min(s), h.max(s)));
        maps.push(MapReport {
            a,
            b,
            rank_in: c_in.nrows(),
            rank_out: c_out.nrows(),
            spread: if sv.is_empty() { 0.0 } else { hi - lo },
            constant: if sv.is_empty() { 0.0 } else { sv.mean() },
            consistency,
        });
    }
    UnitaryCheck { j, maps }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct AlphaBeta {
    pub n: usize,
    pub t: usize,
    pub j: usize,
    pub alpha: [f64; 2],
    pub beta: [f64; 2],
    /// `√(2t/n)`.
    pub beta_bound: f64,
    /// `|α₀β₁ − α₁β₀| · √(tn)`.
    pub cross_scaled: f64,
}

impl AlphaBeta {
    pub fn beta_bound_holds(&self) -> bool {
        self.beta.iter().all(|&b| b <= self.beta_bound + 1e-12)
    }
}

/// Closed-form `α_a`, `β_a` for layer `j`.
pub fn alpha_beta(n: usize, t: usize, j: usize) -> AlphaBeta {
    let mut alpha = [0.0; 2];
    let mut beta = [0.0; 2];
    for a in 0..2 {
        let ta = (t - 1 + a) as f64;
        let nj = (n - j) as f64;
        let ap = ((n as f64 - ta) / nj).sqrt() * split_norm_closed_form(n, t, a, 0, j);
        let bp = ((ta - j as f64).max(0.0) / nj).sqrt() * split_norm_closed_form(n, t, a, 1, j);
        let r = ap.hypot(bp);
        alpha[a] = ap / r;
        beta[a] = bp / r;
    }
    AlphaBeta {
        n,
        t,
        j,
        alpha,
        beta,
        beta_bound: (2.0 * t as f64 / n as f64).sqrt(),
        cross_scaled: (alpha[0] * beta[1] - alpha[1] * beta[0]).abs() * ((t * n) as f64).sqrt(),
    }
}

/// The four vectors built from one spanning tuple `I` and its images
/// `u^{ab}_I = ψ̃^{a,b}_I/‖ψ̃^{a,b}_I‖`, checked for membership in
/// `S_{j,+}`, `S_{j+1,+}`, `S_{j,-}`, `S_{j+1,-}`; plus the identity
/// `ψ̃^a_{0∪I}/‖·‖ = α_a u^{a,1}_I − β_a u^{a,0}_I`.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct Claim5Check {
    pub tuples: usize,
    /// Relative rejection norms of `φ_1..φ_4` from their target subspaces.
    pub membership: [f64; 4],
    pub shifted_identity: f64,
}

impl Claim5Check {
    pub fn max(&self) -> f64 {
        self.membership.iter().fold(self.shifted_identity, |a, &b| a.max(b))
    }
}

pub fn check_claim5(space: &InputSpace, j: usize) -> Result<Claim5Check> {
    let signed = build_signed(space)?;
    Ok(claim5_from(space, &signed, &split_chains(space)?, j))
}

/// As [`check_claim5`], reusing the signed decomposition and split chains.
///
/// The overall sign of the shifted identity follows from
/// `ψ^a_{0∪I} = ψ^{a,1}_I`, which has positive overlap with `u^{a,1}_I`.
pub fn claim5_from(space: &InputSpace, signed: &Signed, split: &[Chain], j: usize) -> Claim5Check {
    let mut out = Claim5Check::default();
    let levels: Option<Vec<_>> = split.iter().map(|c| c.level(j)).collect();
    let targets = [signed.signed(j, false), signed.signed(j + 1, false), signed.signed(j, true), signed.signed(j + 1, true)];
    let (Some(levels), [Some(p0), Some(p1), Some(m0), Some(m1)]) = (levels, targets) else {
        return out;
    };
    let ab = alpha_beta(space.n(), space.t(), j);
    let ([a0, a1], [b0, b1]) = (ab.alpha, ab.beta);
    for i in 0..levels[0].tilde.len() {
        let u: Vec<DVector<f64>> = levels.iter().map(|l| l.tilde[i].unit()).collect();
        let phis = [
            &u[0] * a0 + &u[1] * b0 + &u[2] * a1 + &u[3] * b1,
            &u[0] * b0 - &u[1] * a0 + &u[2] * b1 - &u[3] * a1,
            &u[0] * a0 + &u[1] * b0 - &u[2] * a1 - &u[3] * b1,
            &u[0] * b0 - &u[1] * a0 - &u[2] * b1 + &u[3] * a1,
        ];
        for (slot, (phi, target)) in phis.iter().zip([p0, p1, m0, m1]).enumerate() {
            let r = target.reject(phi).norm() / phi.norm();
            out.membership[slot] = out.membership[slot].max(r);
        }
        let mut up = vec![0];
        up.extend(&levels[0].tilde[i].ones);
        for a in 0..2 {
            if let Some(w) = signed.chains[a].tilde(j + 1, &up) {
                let want = &u[2 * a + 1] * ab.alpha[a] - &u[2 * a] * ab.beta[a];
                out.shifted_identity = out.shifted_identity.max((w.unit() - want).amax());
            }
        }
        out.tuples += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_at_level_zero() {
        let ab = alpha_beta(4, 2, 0);
        assert!((ab.beta[0] - 0.5).abs() < 1e-15);
        assert!((ab.beta_bound - 1.0).abs() < 1e-15);
        for a in 0..2 {
            assert!((ab.alpha[a].powi(2) + ab.beta[a].powi(2) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn maps_are_unitary_multiples() {
        let s = InputSpace::new(6, 2).unwrap();
        for j in 0..1 {
            let u = check_unitary_maps(&s, j).unwrap();
            assert_eq!(u.maps.len(), 3);
            assert!(u.max_spread() < 1e-9, "{u:?}");
            assert!((u.c11().unwrap() - 1.0).abs() < 1e-9);
        }
        let s = InputSpace::new(8, 4).unwrap();
        let u = check_unitary_maps(&s, 1).unwrap();
        assert!(u.max_spread() < 1e-9, "{u:?}");
        assert!((u.c11().unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn claim5_vectors_land_in_their_subspaces() {
        for (n, t, j) in [(4, 2, 0), (6, 3, 1), (8, 4, 1), (7, 3, 0)] {
            let s = InputSpace::new(n, t).unwrap();
            let r = check_claim5(&s, j).unwrap();
            assert!(r.tuples > 0);
            assert!(r.max() < 1e-9, "n={n} t={t} j={j}: {r:?}");
        }
    }

    #[test]
    fn unshifted_tuple_identity_is_span_level_only() {
        // ψ̃^a_I is not itself α u^{a,0}_I + β u^{a,1}_I once j ≥ 1,
        // although both lie in S_{j,a}.
        let s = InputSpace::new(6, 3).unwrap();
        let whole = build_chain(&s, Family::Weight { a: 0 }).unwrap();
        let split = split_chains(&s).unwrap();
        let ab = alpha_beta(6, 3, 1);
        let (u0, u1) = (&split[0].levels[1].tilde[0], &split[1].levels[1].tilde[0]);
        let w = whole.tilde(1, &u0.ones).unwrap();
        let combo = u0.unit() * ab.alpha[0] + u1.unit() * ab.beta[0];
        assert!((w.unit() - &combo).amax() > 1e-2);
        let layer = &whole.levels[1].s_span;
        assert!(layer.reject(&combo).norm() < 1e-12);
    }
}
