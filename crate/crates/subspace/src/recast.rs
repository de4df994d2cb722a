//! Query algorithms run with the input held in a register: states on
//! `H_A ⊗ H_I` and their reduced density matrices on `H_I`.
//!
//! `H_A` is a query register with values `0..=k·n` (0 means "no query") times a
//! workspace. A query multiplies `|i, w⟩|x¹..xᵏ⟩` by `(-1)^{x^c_p}` where
//! `i - 1 = c·n + p`.

use nalgebra::{Complex, DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::space::InputSpace;

pub type C64 = Complex<f64>;

/// Largest `dim(H_A) · dim(H_I)` simulated.
pub const RECAST_CAP: usize = 1 << 14;

/// Haar-random unitary from the QR factorization of a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<C64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for (c, mut col) in q.column_iter_mut().enumerate() {
        let d = r[(c, c)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        col *= phase;
    }
    q
}

/// Random unit vector in `C^dim`.
pub fn random_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DVector<C64> {
    let v = DVector::from_fn(dim, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let norm = v.norm();
    v / C64::new(norm, 0.0)
}

/// Non-query unitaries `U_0, ..., U_T` on `H_A`, separated by `T` queries.
#[derive(Clone, Debug)]
pub struct Program {
    pub n: usize,
    pub k: usize,
    pub workspace: usize,
    pub unitaries: Vec<DMatrix<C64>>,
}

impl Program {
    pub fn dim_a(n: usize, k: usize, workspace: usize) -> usize {
        (k * n + 1) * workspace
    }

    pub fn random<R: Rng + ?Sized>(n: usize, k: usize, queries: usize, workspace: usize, rng: &mut R) -> Self {
        let d = Self::dim_a(n, k, workspace);
        let unitaries = (0..=queries).map(|_| random_unitary(d, rng)).collect();
        Program { n, k, workspace, unitaries }
    }

    pub fn queries(&self) -> usize {
        self.unitaries.len() - 1
    }

    pub fn dim(&self) -> usize {
        Self::dim_a(self.n, self.k, self.workspace)
    }
}

/// Basis index of `H_I = H_one^{⊗k}` split into per-instance indices.
pub fn instance_indices(x: usize, dim_one: usize, k: usize) -> Vec<usize> {
    let mut out = vec![0; k];
    let mut rest = x;
    for c in (0..k).rev() {
        out[c] = rest % dim_one;
        rest /= dim_one;
    }
    out
}

#[derive(Clone, Debug)]
pub struct RecastRun {
    pub k: usize,
    pub dim_a: usize,
    pub dim_i: usize,
    /// `φ_d` as a `dim_a × dim_i` amplitude matrix, for `d = 0..=T`:
    /// `φ_0` is the start state and `φ_d` the state right after query `d`.
    pub states: Vec<DMatrix<C64>>,
    /// State after the final non-query unitary, the one that is measured.
    pub output: DMatrix<C64>,
    pub rhos: Vec<DMatrix<C64>>,
}

/// `ρ = Tr_A |φ⟩⟨φ|`, i.e. `ρ[x,y] = Σ_s φ[s,x] conj(φ[s,y])`.
pub fn partial_trace(phi: &DMatrix<C64>) -> DMatrix<C64> {
    phi.transpose() * phi.conjugate()
}

pub fn recast_run(program: &Program, space: &InputSpace) -> Result<RecastRun> {
    let k = program.k;
    let dim_one = space.dim();
    let dim_i = dim_one.pow(k as u32);
    let dim_a = program.dim();
    if dim_a * dim_i > RECAST_CAP {
        return Err(Error::TooLarge { size: dim_a * dim_i, cap: RECAST_CAP });
    }
    if program.n != space.n() {
        return Err(Error::InvalidParameter(format!("program n={} but space n={}", program.n, space.n())));
    }

    // sign[c·n + p][x] is true when instance c of basis input x has bit p set.
    let n = space.n();
    let mut flips = vec![vec![false; dim_i]; k * n];
    for x in 0..dim_i {
        for (c, xi) in instance_indices(x, dim_one, k).into_iter().enumerate() {
            let s = space.string(xi);
            for p in 0..n {
                flips[c * n + p][x] = space.bit(s, p);
            }
        }
    }

    let one = space.psi_one();
    let mut psi0 = one.clone();
    for _ in 1..k {
        psi0 = psi0.kronecker(&one);
    }
    let mut phi = DMatrix::<C64>::zeros(dim_a, dim_i);
    for x in 0..dim_i {
        phi[(0, x)] = C64::new(psi0[x], 0.0);
    }

    let mut states = vec![phi.clone()];
    let mut rhos = vec![partial_trace(&phi)];
    for (d, u) in program.unitaries.iter().enumerate() {
        phi = u * &phi;
        if d == program.queries() {
            break;
        }
        for s in 0..dim_a {
            let i = s / program.workspace;
            if i == 0 {
                continue;
            }
            let f = &flips[i - 1];
            for x in 0..dim_i {
                if f[x] {
                    phi[(s, x)] = -phi[(s, x)];
                }
            }
        }
        rhos.push(partial_trace(&phi));
        states.push(phi.clone());
    }
    Ok(RecastRun { k, dim_a, dim_i, states, output: phi, rhos })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct DensityCheck {
    pub trace_error: f64,
    pub hermitian_error: f64,
    pub min_eigenvalue: f64,
}

pub fn check_density(rho: &DMatrix<C64>) -> DensityCheck {
    let trace_error = (rho.trace() - C64::new(1.0, 0.0)).norm();
    let hermitian_error = (rho - rho.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let min_eigenvalue = rho.clone().symmetric_eigenvalues().min();
    DensityCheck { trace_error, hermitian_error, min_eigenvalue }
}

/// Answer bits read from an `H_A` basis index: bit `c` of `s mod 2^k`.
pub fn answer_of(s: usize, k: usize) -> Vec<usize> {
    (0..k).map(|c| (s >> c) & 1).collect()
}

/// Probability that measuring `H_A` in its basis yields the weight classes of
/// all `k` inputs.
pub fn success_probability(phi: &DMatrix<C64>, space: &InputSpace, k: usize) -> f64 {
    let dim_one = space.dim();
    let truth: Vec<Vec<usize>> = (0..phi.ncols())
        .map(|x| instance_indices(x, dim_one, k).into_iter().map(|i| space.class_of(i)).collect())
        .collect();
    let mut p = 0.0;
    for s in 0..phi.nrows() {
        let ans = answer_of(s, k);
        for (x, tr) in truth.iter().enumerate() {
            if *tr == ans {
                p += phi[(s, x)].norm_sqr();
            }
        }
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_unitaries_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = random_unitary(7, &mut rng);
        let e = (u.adjoint() * &u - DMatrix::<C64>::identity(7, 7)).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(e < 1e-12);
    }

    #[test]
    fn zero_query_program_keeps_the_start_state() {
        let space = InputSpace::new(4, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let prog = Program::random(4, 1, 0, 2, &mut rng);
        let run = recast_run(&prog, &space).unwrap();
        assert_eq!(run.rhos.len(), 1);
        let one = space.psi_one();
        let want = &one * one.transpose();
        let err = run.rhos[0].iter().zip(want.iter()).map(|(a, b)| (a - C64::new(*b, 0.0)).norm()).fold(0.0, f64::max);
        assert!(err < 1e-15);
    }

    #[test]
    fn reduced_states_are_densities() {
        let space = InputSpace::new(4, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let prog = Program::random(4, 1, 2, 2, &mut rng);
        let run = recast_run(&prog, &space).unwrap();
        assert_eq!(run.rhos.len(), 3);
        for rho in &run.rhos {
            let c = check_density(rho);
            assert!(c.trace_error < 1e-9 && c.hermitian_error < 1e-12 && c.min_eigenvalue > -1e-10, "{c:?}");
        }
    }

    #[test]
    fn register_zero_is_not_a_query() {
        // With a workspace-only unitary the query register stays at 0.
        let space = InputSpace::new(4, 2).unwrap();
        let d = Program::dim_a(4, 1, 2);
        let mut u = DMatrix::<C64>::identity(d, d);
        u[(0, 0)] = C64::new(0.0, 0.0);
        u[(1, 1)] = C64::new(0.0, 0.0);
        u[(0, 1)] = C64::new(1.0, 0.0);
        u[(1, 0)] = C64::new(1.0, 0.0);
        let prog = Program { n: 4, k: 1, workspace: 2, unitaries: vec![u.clone(), u.clone(), u] };
        let run = recast_run(&prog, &space).unwrap();
        let diff = (&run.rhos[2] - &run.rhos[0]).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(diff < 1e-15);
    }

    #[test]
    fn cap_is_enforced() {
        let space = InputSpace::new(6, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let prog = Program::random(6, 2, 1, 2, &mut rng);
        assert!(matches!(recast_run(&prog, &space), Err(Error::TooLarge { .. })));
    }
}
