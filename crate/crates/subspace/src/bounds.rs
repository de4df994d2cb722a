//! The potential function and the success-probability bounds, evaluated on
//! explicit states.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::Serialize;

use crate::linalg::{lambda_max, Basis};
use crate::recast::{answer_of, instance_indices, random_state, C64};
use crate::signed::{Products, Signed};
use crate::space::{binomial, InputSpace};

/// `Tr(P_B ρ)` for a real subspace `B`.
pub fn mass(rho: &DMatrix<C64>, basis: &Basis) -> f64 {
    if basis.is_empty() {
        return 0.0;
    }
    let q = basis.matrix().map(|v| C64::new(v, 0.0));
    let rq = rho * &q;
    q.iter().zip(rq.iter()).map(|(a, b)| (a.conj() * b).re).sum()
}

#[derive(Clone, Debug, Serialize)]
pub struct PotentialReport {
    /// `Tr P_{ℛ_ℓ} ρ` for `ℓ = 0..=k⌈t/2⌉`.
    pub masses: Vec<f64>,
    pub q: f64,
    pub value: f64,
    /// Smallest `P q^{-⌈t/2⌉m} - Tr P_{ℛ'_{⌈t/2⌉m}} ρ` over `m = 0..=k`.
    pub tail_margin: f64,
}

/// `q = 1 + 1/t`, held as the exact pair `(t+1, t)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PotentialParams {
    pub numer: usize,
    pub denom: usize,
}

impl PotentialParams {
    pub fn new(t: usize) -> Self {
        PotentialParams { numer: t + 1, denom: t }
    }

    pub fn q(&self) -> f64 {
        self.numer as f64 / self.denom as f64
    }
}

pub fn potential(rho: &DMatrix<C64>, prod: &Products, t: usize) -> PotentialReport {
    let q = PotentialParams::new(t).q();
    let masses: Vec<f64> = prod.good_level.iter().map(|b| mass(rho, b)).collect();
    let value = masses.iter().enumerate().map(|(l, m)| q.powi(l as i32) * m).sum::<f64>();
    let r_star = (masses.len() - 1) / prod.k;
    let tail_margin = (0..=prod.k)
        .map(|m| {
            let l = r_star * m;
            let tail: f64 = masses[l..].iter().sum();
            value * q.powi(-(l as i32)) - tail
        })
        .fold(f64::INFINITY, f64::min);
    PotentialReport { masses, q, value, tail_margin }
}

/// `Σ_{m' ≤ m} C(k, m') / 2^k`.
pub fn lemma2_bound(k: usize, m: usize) -> f64 {
    let s: u128 = (0..=m.min(k)).map(|i| binomial(k, i)).sum();
    s as f64 / 2f64.powi(k as i32)
}

/// Diagonal indicator on `H_I` of inputs whose weight classes equal `answer`.
pub fn answer_indicator(space: &InputSpace, k: usize, answer: &[usize]) -> Vec<bool> {
    let dim_one = space.dim();
    (0..dim_one.pow(k as u32))
        .map(|x| {
            instance_indices(x, dim_one, k)
                .into_iter()
                .zip(answer)
                .all(|(i, &a)| space.class_of(i) == a)
        })
        .collect()
}

/// `λ_max(Q^T D Q)` for a diagonal 0/1 `D`: the largest squared norm of `D v`
/// over unit `v` in the span of `Q`.
fn worst_diagonal(q: &Basis, keep: &[bool]) -> (f64, DVector<f64>) {
    let m = q.matrix();
    let mut rows = m.clone();
    for (i, &k) in keep.iter().enumerate() {
        if !k {
            rows.row_mut(i).fill(0.0);
        }
    }
    let g = rows.tr_mul(&rows);
    if g.nrows() == 0 {
        return (0.0, DVector::zeros(m.nrows()));
    }
    let eig = g.symmetric_eigen();
    let i = eig.eigenvalues.imax();
    (eig.eigenvalues[i], m * eig.eigenvectors.column(i))
}

#[derive(Clone, Debug, Serialize)]
pub struct Lemma2Report {
    pub k: usize,
    pub m: usize,
    pub bound: f64,
    /// Largest probability of a correct answer over states supported in
    /// `S_{0-} ⊕ ... ⊕ S_{m-}`.
    pub worst: f64,
}

impl Lemma2Report {
    pub fn holds(&self, slack: f64) -> bool {
        self.worst <= self.bound + slack
    }
}

/// Exact worst case of Lemma 2: for projective answer measurements the optimum
/// is `max_a λ_max(P_B D_a P_B)`.
pub fn lemma2_worst(space: &InputSpace, prod: &Products, m: usize) -> Lemma2Report {
    let k = prod.k;
    let b = prod.minus_at_most(m);
    let worst = (0..k)
        .map(|_| 0..2usize)
        .multi_cartesian_product()
        .map(|a| worst_diagonal(&b, &answer_indicator(space, k, &a)).0)
        .fold(0.0, f64::max);
    Lemma2Report { k, m, bound: lemma2_bound(k, m), worst }
}

#[derive(Clone, Debug, Serialize)]
pub struct Claim1Report {
    pub k: usize,
    pub sectors: usize,
    /// Largest squared projection over sectors with every `l_j < t`.
    pub interior_max: f64,
    /// Same with some `l_j = t`, where `S_{t,-} = S_{t,1}` and no `S_{t,0}` exists.
    pub boundary_max: f64,
}

/// Squared norm of the projection onto `⊗ S_{l_j,a_j}` of unit vectors in
/// `⊗ S_{l_j,r_j}`, maximized over each sector and over `a`.
pub fn claim1_check(s: &Signed, k: usize) -> Claim1Report {
    let t = s.t;
    let mut interior: f64 = 0.0;
    let mut boundary: f64 = 0.0;
    let mut sectors = 0;
    for ls in (0..k).map(|_| 0..=t).multi_cartesian_product() {
        for rs in (0..k).map(|_| 0..2usize).multi_cartesian_product() {
            let from: Option<Vec<&Basis>> = ls.iter().zip(&rs).map(|(&l, &r)| s.signed(l, r == 1)).collect();
            let Some(from) = from else { continue };
            sectors += 1;
            for a in (0..k).map(|_| 0..2usize).multi_cartesian_product() {
                // Per-copy overlap blocks; the product's norm is their Kronecker norm.
                let mut g = DMatrix::<f64>::from_element(1, 1, 1.0);
                for ((&l, &aj), f) in ls.iter().zip(&a).zip(&from) {
                    let block = match s.layer(aj, l) {
                        Some(to) if !to.is_empty() => to.matrix().tr_mul(f.matrix()),
                        _ => DMatrix::zeros(0, f.rank()),
                    };
                    g = g.kronecker(&block);
                }
                let v = if g.nrows() == 0 { 0.0 } else { lambda_max(g.tr_mul(&g)) };
                if ls.contains(&t) {
                    boundary = boundary.max(v);
                } else {
                    interior = interior.max(v);
                }
            }
        }
    }
    Claim1Report { k, sectors, interior_max: interior, boundary_max: boundary }
}

#[derive(Clone, Debug, Serialize)]
pub struct CorollaryReport {
    pub success: f64,
    /// `(m, bound)` pairs: Lemma 2 bound plus `4√δ_m`.
    pub bounds: Vec<(usize, f64)>,
}

impl CorollaryReport {
    pub fn margin(&self) -> f64 {
        self.bounds.iter().map(|&(_, b)| b - self.success).fold(f64::INFINITY, f64::min)
    }
}

pub fn corollary1(
    phi: &DMatrix<C64>,
    rho: &DMatrix<C64>,
    space: &InputSpace,
    prod: &Products,
) -> CorollaryReport {
    let success = crate::recast::success_probability(phi, space, prod.k);
    let bounds = (0..=prod.k)
        .map(|m| {
            let inside = mass(rho, &prod.minus_at_most(m));
            let delta = (1.0 - inside).max(0.0);
            (m, lemma2_bound(prod.k, m) + 4.0 * delta.sqrt())
        })
        .collect();
    CorollaryReport { success, bounds }
}

/// A state on `H_A ⊗ H_I` built to nearly saturate Lemma 2 at level `m`: each
/// answer row carries the worst-case vector for that answer, then a fraction
/// `noise` of the norm is moved onto a random direction.
pub fn adversarial_state<R: Rng + ?Sized>(
    space: &InputSpace,
    prod: &Products,
    m: usize,
    dim_a: usize,
    noise: f64,
    rng: &mut R,
) -> DMatrix<C64> {
    let k = prod.k;
    let b = prod.minus_at_most(m);
    let rows = 1usize << k;
    assert!(dim_a >= rows, "H_A must hold every answer");
    let mut phi = DMatrix::<C64>::zeros(dim_a, prod.dim);
    for s in 0..rows {
        let (_, v) = worst_diagonal(&b, &answer_indicator(space, k, &answer_of(s, k)));
        for x in 0..prod.dim {
            phi[(s, x)] = C64::new(v[x] / (rows as f64).sqrt(), 0.0);
        }
    }
    let r = random_state(dim_a * prod.dim, rng);
    let r = DMatrix::from_row_slice(dim_a, prod.dim, r.as_slice());
    let mix = phi * C64::new((1.0 - noise).sqrt(), 0.0) + r * C64::new(noise.sqrt(), 0.0);
    let norm = mix.norm();
    mix / C64::new(norm, 0.0)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct VariationalCheck {
    /// `Σ_g |p_g - p'_g|`.
    pub distance: f64,
    /// `2‖ψ - ψ'‖`.
    pub bound: f64,
}

impl VariationalCheck {
    pub fn holds(&self) -> bool {
        self.distance <= self.bound + 1e-12
    }
}

/// Outcome distributions of measuring in the columns of `basis`, with column
/// `c` reported as outcome `groups[c]`.
pub fn variational_distance_check(
    psi: &DVector<C64>,
    psi2: &DVector<C64>,
    basis: &DMatrix<C64>,
    groups: &[usize],
) -> VariationalCheck {
    let outcomes = groups.iter().max().map_or(0, |g| g + 1);
    let mut p = vec![0.0; outcomes];
    let mut p2 = vec![0.0; outcomes];
    for (c, &g) in groups.iter().enumerate() {
        let col = basis.column(c);
        p[g] += col.dotc(psi).norm_sqr();
        p2[g] += col.dotc(psi2).norm_sqr();
    }
    VariationalCheck {
        distance: p.iter().zip(&p2).map(|(a, b)| (a - b).abs()).sum(),
        bound: 2.0 * (psi - psi2).norm(),
    }
}
