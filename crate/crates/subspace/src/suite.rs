//! Grid-wide verification runs that aggregate the individual checks.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::{
    adversarial_state, claim1_check, corollary1, lemma2_worst, potential, variational_distance_check,
    PotentialParams,
};
use crate::chain::check_split_norms;
use crate::error::Result;
use crate::linalg::dominance_gap;
use crate::maps::{alpha_beta, claim5_from, split_chains, unitary_maps_from};
use crate::recast::{check_density, random_state, random_unitary, recast_run, Program};
use crate::signed::{build_products, build_signed, check_decomposition, Products, Signed};
use crate::space::InputSpace;

/// Tolerance for every residual reported against zero.
pub const RESIDUAL_TOL: f64 = 1e-9;
/// Eigenvalue floor for density matrices.
pub const PSD_FLOOR: f64 = -1e-10;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub cases: usize,
    /// Worst observed value of the checked quantity (see `detail`).
    pub worst: f64,
    pub detail: String,
}

impl Check {
    fn residual(name: &str, cases: usize, worst: f64, detail: &str) -> Self {
        Check { name: name.into(), passed: worst <= RESIDUAL_TOL, cases, worst, detail: detail.into() }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct GridReport {
    pub n_max: usize,
    pub spaces: usize,
    pub norm_states: usize,
    pub norm_residual: f64,
    pub unitary_layers: usize,
    pub unitary_spread: f64,
    pub c11_residual: f64,
    pub claim5_residual: f64,
    pub beta_cells: usize,
    pub beta_violations: usize,
    /// Largest `|α₀β₁ − α₁β₀|·√(tn)`; reported only.
    pub cross_scaled_max: f64,
    pub incomplete_decompositions: usize,
    pub decomposition_residual: f64,
}

impl GridReport {
    pub fn checks(&self) -> Vec<Check> {
        let mut out = vec![
            Check::residual("claim4-norms", self.norm_states, self.norm_residual, "max |computed - closed form|"),
            Check::residual(
                "claim3-unitary",
                self.unitary_layers,
                self.unitary_spread.max(self.c11_residual),
                "max singular-value spread, and |c11 - 1|",
            ),
            Check::residual("claim5-split", self.unitary_layers, self.claim5_residual, "max membership / identity residual"),
        ];
        out.push(Check {
            name: "claim6-beta".into(),
            passed: self.beta_violations == 0,
            cases: self.beta_cells,
            worst: self.beta_violations as f64,
            detail: format!("violations of beta <= sqrt(2t/n); claim-7 scaled max {:.4}", self.cross_scaled_max),
        });
        out.push(Check {
            name: "decomposition".into(),
            passed: self.incomplete_decompositions == 0 && self.decomposition_residual <= RESIDUAL_TOL,
            cases: self.spaces,
            worst: self.decomposition_residual,
            detail: format!("{} incomplete; max orthogonality residual", self.incomplete_decompositions),
        });
        out
    }
}

/// Claims 3-7 and the single-instance decomposition over every
/// `n ≤ n_max`, `t ≤ n/2`, `j < t/2`.
pub fn appendix_grid(n_max: usize) -> Result<GridReport> {
    let mut r = GridReport { n_max, ..Default::default() };
    for n in 2..=n_max {
        for t in 1..=n / 2 {
            let space = InputSpace::new(n, t)?;
            r.spaces += 1;
            let norms = check_split_norms(&space)?;
            r.norm_states += norms.states;
            r.norm_residual = r.norm_residual.max(norms.max_residual);

            let split = split_chains(&space)?;
            let signed = build_signed(&space)?;
            for j in (0..t).filter(|j| 2 * j < t) {
                let u = unitary_maps_from(&split, j);
                r.unitary_layers += 1;
                r.unitary_spread = r.unitary_spread.max(u.max_spread());
                if let Some(c) = u.c11() {
                    r.c11_residual = r.c11_residual.max((c - 1.0).abs());
                }
                r.claim5_residual = r.claim5_residual.max(claim5_from(&space, &signed, &split, j).max());
                let ab = alpha_beta(n, t, j);
                r.beta_cells += 1;
                if !ab.beta_bound_holds() {
                    r.beta_violations += 1;
                }
                r.cross_scaled_max = r.cross_scaled_max.max(ab.cross_scaled);
            }

            let d = check_decomposition(&signed);
            if !d.complete() {
                r.incomplete_decompositions += 1;
            }
            r.decomposition_residual = r.decomposition_residual.max(d.residual());
        }
    }
    Ok(r)
}

/// Products, their containment gaps and the Lemma 2 / Claim 1 worst cases for one `(n, t, k)`.
#[derive(Clone, Debug, Serialize)]
pub struct ProductReport {
    pub n: usize,
    pub t: usize,
    pub k: usize,
    pub dim: usize,
    pub minus_dims: usize,
    pub good_dims: usize,
    /// Largest `λ_max(P_{S_{m-}} - P_{ℛ'_{⌈t/2⌉m}})` over `m`.
    pub containment_gap: f64,
    /// Largest `worst - bound` over `m`.
    pub lemma2_excess: f64,
    pub claim1_interior: f64,
    pub claim1_boundary: f64,
}

struct Cell {
    space: InputSpace,
    products: Products,
}

fn product_report(space: &InputSpace, s: &Signed, p: &Products) -> ProductReport {
    let r_star = s.r_star();
    let containment_gap = (0..=p.k)
        .map(|m| dominance_gap(&p.minus_count[m], &p.good_at_least(r_star * m)))
        .fold(f64::NEG_INFINITY, f64::max);
    let lemma2_excess = (0..=p.k)
        .map(|m| {
            let l = lemma2_worst(space, p, m);
            l.worst - l.bound
        })
        .fold(f64::NEG_INFINITY, f64::max);
    let c1 = claim1_check(s, p.k);
    ProductReport {
        n: space.n(),
        t: space.t(),
        k: p.k,
        dim: p.dim,
        minus_dims: p.minus_count.iter().map(|b| b.rank()).sum(),
        good_dims: p.good_level.iter().map(|b| b.rank()).sum(),
        containment_gap,
        lemma2_excess,
        claim1_interior: c1.interior_max,
        claim1_boundary: c1.boundary_max,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RecastReport {
    pub runs: usize,
    pub seed: u64,
    pub products: Vec<ProductReport>,
    pub max_trace_error: f64,
    pub min_eigenvalue: f64,
    /// Smallest `P q^{-⌈t/2⌉m} - Tr P_{ℛ'} ρ` over runs, depths and `m`.
    pub tail_margin: f64,
    pub mass_sum_error: f64,
    /// Smallest Corollary 1 margin over runs and adversarial states.
    pub corollary_margin: f64,
    /// `max (P_{d+1}/P_d - 1)·√(tn)`; reported only.
    pub growth_fit: f64,
    /// Same ratio fitted to the two-term form with `q^{t/2}-1` and `q-1`; reported only.
    pub growth_fit_two_term: f64,
}

impl RecastReport {
    pub fn checks(&self) -> Vec<Check> {
        let dims_ok = self.products.iter().all(|p| p.minus_dims == p.dim && p.good_dims == p.dim);
        let gap = self.products.iter().map(|p| p.containment_gap).fold(f64::NEG_INFINITY, f64::max);
        let l2 = self.products.iter().map(|p| p.lemma2_excess).fold(f64::NEG_INFINITY, f64::max);
        let c1 = self.products.iter().map(|p| p.claim1_interior - 0.5f64.powi(p.k as i32)).fold(f64::NEG_INFINITY, f64::max);
        let c1_boundary = self.products.iter().map(|p| p.claim1_boundary).fold(0.0, f64::max);
        vec![
            Check {
                name: "product-completeness".into(),
                passed: dims_ok,
                cases: self.products.len(),
                worst: 0.0,
                detail: "S_{m-} and R_l families each fill H_I".into(),
            },
            Check::residual("density", self.runs, self.max_trace_error.max(-self.min_eigenvalue.min(0.0) - 1e-10).max(0.0), "max trace error / negative eigenvalue below floor"),
            Check::residual("potential-masses", self.runs, self.mass_sum_error, "max |sum of masses - 1|"),
            Check::residual("potential-tail", self.runs, (-self.tail_margin).max(0.0), "max violation of the tail bound"),
            Check::residual("containment", self.products.len(), gap.max(0.0), "max lambda_max(P_S - P_R')"),
            Check::residual("lemma2", self.products.len(), l2.max(0.0), "max worst-case excess over the bound"),
            Check {
                name: "claim1".into(),
                passed: c1 <= RESIDUAL_TOL,
                cases: self.products.len(),
                worst: c1.max(0.0),
                detail: format!("max excess over 2^-k with all l_j < t; with some l_j = t the value reaches {c1_boundary:.3}"),
            },
            Check::residual("corollary1", self.runs, (-self.corollary_margin).max(0.0), "max violation of the corollary bound"),
            Check {
                name: "lemma3-growth".into(),
                passed: self.growth_fit.is_finite(),
                cases: self.runs,
                worst: self.growth_fit,
                detail: format!(
                    "fitted c in P'/P <= 1 + c/sqrt(tn) (reported only); two-term fit {:.4}",
                    self.growth_fit_two_term
                ),
            },
        ]
    }
}

/// Random recast runs at `n ∈ {4,5,6}`, `t = 2`, `k ∈ {1,2}`.
pub fn recast_suite(runs: usize, seed: u64) -> Result<RecastReport> {
    let t = 2;
    let mut cells: BTreeMap<(usize, usize), Cell> = BTreeMap::new();
    let mut products = Vec::new();
    for n in 4..=6 {
        let space = InputSpace::new(n, t)?;
        let s = build_signed(&space)?;
        for k in 1..=2 {
            let p = build_products(&s, k)?;
            products.push(product_report(&space, &s, &p));
            cells.insert((n, k), Cell { space: space.clone(), products: p });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = PotentialParams::new(t).q();
    let mut rep = RecastReport {
        runs,
        seed,
        products,
        max_trace_error: 0.0,
        min_eigenvalue: f64::INFINITY,
        tail_margin: f64::INFINITY,
        mass_sum_error: 0.0,
        corollary_margin: f64::INFINITY,
        growth_fit: 0.0,
        growth_fit_two_term: 0.0,
    };
    for _ in 0..runs {
        let n = rng.random_range(4..=6);
        let k = rng.random_range(1..=2);
        let queries = rng.random_range(1..=3);
        let cell = &cells[&(n, k)];
        let prog = Program::random(n, k, queries, 2, &mut rng);
        let run = recast_run(&prog, &cell.space)?;
        let scale = ((t * n) as f64).sqrt();
        let two_term = (q.powi(t as i32 / 2) - 1.0) / scale + (t as f64).sqrt() * (q - 1.0) / (n as f64).sqrt();
        let mut prev: Option<f64> = None;
        for rho in &run.rhos {
            let d = check_density(rho);
            rep.max_trace_error = rep.max_trace_error.max(d.trace_error).max(d.hermitian_error);
            rep.min_eigenvalue = rep.min_eigenvalue.min(d.min_eigenvalue);
            let pr = potential(rho, &cell.products, t);
            rep.mass_sum_error = rep.mass_sum_error.max((pr.masses.iter().sum::<f64>() - 1.0).abs());
            rep.tail_margin = rep.tail_margin.min(pr.tail_margin);
            if let Some(p0) = prev {
                let growth = pr.value / p0 - 1.0;
                rep.growth_fit = rep.growth_fit.max(growth * scale);
                rep.growth_fit_two_term = rep.growth_fit_two_term.max(growth / two_term);
            }
            prev = Some(pr.value);
        }
        let c = corollary1(&run.output, run.rhos.last().expect("at least rho_0"), &cell.space, &cell.products);
        rep.corollary_margin = rep.corollary_margin.min(c.margin());
    }

    // Adversarial states: exact saturation with no residual mass, then with noise.
    for ((_, k), cell) in &cells {
        for m in 0..=*k {
            for noise in [0.0, 0.01, 0.1] {
                let phi = adversarial_state(&cell.space, &cell.products, m, 1 << k, noise, &mut rng);
                let rho = crate::recast::partial_trace(&phi);
                let c = corollary1(&phi, &rho, &cell.space, &cell.products);
                rep.corollary_margin = rep.corollary_margin.min(c.margin());
            }
        }
    }
    Ok(rep)
}

#[derive(Clone, Debug, Serialize)]
pub struct VariationalReport {
    pub cases: usize,
    pub seed: u64,
    pub violations: usize,
    /// Largest `distance / bound` over cases with a nonzero bound.
    pub max_ratio: f64,
}

/// Random pairs and random projective measurements in dimension up to 64.
pub fn variational_suite(cases: usize, seed: u64) -> VariationalReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = VariationalReport { cases, seed, violations: 0, max_ratio: 0.0 };
    for _ in 0..cases {
        let dim = rng.random_range(2..=64);
        let psi = random_state(dim, &mut rng);
        // Mix toward psi so that close pairs are exercised too.
        let eps: f64 = rng.random_range(0.0..1.0f64).powi(3);
        let other = random_state(dim, &mut rng);
        let mixed = &psi * nalgebra::Complex::new((1.0 - eps).sqrt(), 0.0) + other * nalgebra::Complex::new(eps.sqrt(), 0.0);
        let norm = mixed.norm();
        let psi2 = mixed / nalgebra::Complex::new(norm, 0.0);
        let basis = random_unitary(dim, &mut rng);
        let outcomes = rng.random_range(1..=dim);
        let groups: Vec<usize> = (0..dim).map(|c| if c < outcomes { c } else { rng.random_range(0..outcomes) }).collect();
        let v = variational_distance_check(&psi, &psi2, &basis, &groups);
        if !v.holds() {
            rep.violations += 1;
        }
        if v.bound > 0.0 {
            rep.max_ratio = rep.max_ratio.max(v.distance / v.bound);
        }
    }
    rep
}

impl VariationalReport {
    pub fn check(&self) -> Check {
        Check {
            name: "lemma6-variational".into(),
            passed: self.violations == 0,
            cases: self.cases,
            worst: self.max_ratio,
            detail: format!("{} violations; max distance/bound", self.violations),
        }
    }
}

/// Full report for `subspace verify`.
#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub n: usize,
    pub t: usize,
    pub k: usize,
    pub terminal_index: usize,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Every check that applies to a single `(n, t, k)`, with `runs` random
/// programs of 1 to 3 queries.
pub fn verify(n: usize, t: usize, k: usize, runs: usize, seed: u64) -> Result<VerifyReport> {
    let space = InputSpace::new(n, t)?;
    let mut checks = Vec::new();

    let norms = check_split_norms(&space)?;
    checks.push(Check::residual("claim4-norms", norms.states, norms.max_residual, "max |computed - closed form|"));
    let split = split_chains(&space)?;
    let s = build_signed(&space)?;
    let mut spread: f64 = 0.0;
    let mut split_res: f64 = 0.0;
    let mut beta_bad = 0;
    let layers: Vec<usize> = (0..t).filter(|j| 2 * j < t).collect();
    for &j in &layers {
        let u = unitary_maps_from(&split, j);
        spread = spread.max(u.max_spread());
        if let Some(c) = u.c11() {
            spread = spread.max((c - 1.0).abs());
        }
        split_res = split_res.max(claim5_from(&space, &s, &split, j).max());
        if !alpha_beta(n, t, j).beta_bound_holds() {
            beta_bad += 1;
        }
    }
    checks.push(Check::residual("claim3-unitary", layers.len(), spread, "max singular-value spread, and |c11 - 1|"));
    checks.push(Check::residual("claim5-split", layers.len(), split_res, "max membership / identity residual"));
    checks.push(Check {
        name: "claim6-beta".into(),
        passed: beta_bad == 0,
        cases: layers.len(),
        worst: beta_bad as f64,
        detail: "violations of beta <= sqrt(2t/n)".into(),
    });

    let d = check_decomposition(&s);
    checks.push(Check {
        name: "decomposition".into(),
        passed: d.complete() && d.residual() <= RESIDUAL_TOL,
        cases: 1,
        worst: d.residual(),
        detail: format!("dims {}+{} of {}", d.signed_dims, d.good_dims, d.dim),
    });

    let p = build_products(&s, k)?;
    let pr = product_report(&space, &s, &p);
    checks.push(Check::residual("containment", 1, pr.containment_gap.max(0.0), "max lambda_max(P_S - P_R')"));
    checks.push(Check::residual("lemma2", 1, pr.lemma2_excess.max(0.0), "max worst-case excess over the bound"));
    checks.push(Check {
        name: "claim1".into(),
        passed: pr.claim1_interior <= 0.5f64.powi(k as i32) + RESIDUAL_TOL,
        cases: 1,
        worst: pr.claim1_interior,
        detail: format!("max over l_j < t; boundary sectors reach {:.3}", pr.claim1_boundary),
    });

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tail: f64 = f64::INFINITY;
    let mut density: f64 = 0.0;
    let mut cor: f64 = f64::INFINITY;
    let mut growth: f64 = 0.0;
    let scale = ((t * n) as f64).sqrt();
    for _ in 0..runs {
        let prog = Program::random(n, k, rng.random_range(1..=3), 2, &mut rng);
        let run = recast_run(&prog, &space)?;
        let mut prev: Option<f64> = None;
        for rho in &run.rhos {
            let c = check_density(rho);
            density = density.max(c.trace_error).max(c.hermitian_error).max((PSD_FLOOR - c.min_eigenvalue).max(0.0));
            let r = potential(rho, &p, t);
            tail = tail.min(r.tail_margin);
            if let Some(p0) = prev {
                growth = growth.max((r.value / p0 - 1.0) * scale);
            }
            prev = Some(r.value);
        }
        let c = corollary1(&run.output, run.rhos.last().expect("at least rho_0"), &space, &p);
        cor = cor.min(c.margin());
    }
    checks.push(Check::residual("density", runs, density, "max trace/hermiticity error or eigenvalue below floor"));
    checks.push(Check::residual("potential-tail", runs, (-tail).max(0.0), "max violation of the tail bound"));
    checks.push(Check::residual("corollary1", runs, (-cor).max(0.0), "max violation of the corollary bound"));
    checks.push(Check {
        name: "lemma3-growth".into(),
        passed: true,
        cases: runs,
        worst: growth,
        detail: "fitted c in P'/P <= 1 + c/sqrt(tn); reported only".into(),
    });
    checks.push(variational_suite(1000, seed).check());

    Ok(VerifyReport { n, t, k, terminal_index: s.r_star(), checks })
}
