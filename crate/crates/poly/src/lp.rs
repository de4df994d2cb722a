//! Extremal jump of a polynomial that vanishes on a prefix of the integers and
//! stays in `[0, 1]` on `{0, ..., N}`.

use num_rational::BigRational;
use serde::Serialize;

use crate::cheb::clenshaw;
use crate::error::{Error, Result};
use crate::simplex::{maximize, LpScalar};

pub const DEGREE_CAP: usize = 24;
pub const DOMAIN_CAP: usize = 64;
const MAX_PIVOTS: usize = 20_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PolyLp {
    /// Degree `D`.
    pub d: usize,
    /// Domain endpoint `N`.
    pub n: usize,
    /// Zero-prefix length `m`; the objective point is `8m`.
    pub m: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct LpOutcome {
    pub problem: PolyLp,
    pub sigma: f64,
    /// Solved in rational arithmetic rather than `f64`.
    pub exact: bool,
    /// Coefficients in the basis `T_k(2x/N - 1)`.
    pub coeffs: Vec<f64>,
    pub pivots: usize,
    /// Largest constraint violation of the witness, evaluated in `f64`.
    pub witness_violation: f64,
}

impl PolyLp {
    pub fn new(d: usize, n: usize, m: usize) -> Result<Self> {
        if 8 * m > n || d > DEGREE_CAP || n > DOMAIN_CAP || n == 0 {
            return Err(Error::InvalidParameter(format!(
                "need 8m <= N, D <= {DEGREE_CAP}, 1 <= N <= {DOMAIN_CAP}; got D={d} N={n} m={m}"
            )));
        }
        Ok(PolyLp { d, n, m })
    }

    pub fn target(&self) -> usize {
        8 * self.m
    }

    /// `x ↦ 2x/N - 1`.
    pub fn to_unit(&self, x: f64) -> f64 {
        2.0 * x / self.n as f64 - 1.0
    }

    /// Evaluates the witness polynomial at real `x`.
    pub fn eval(&self, coeffs: &[f64], x: f64) -> f64 {
        clenshaw(coeffs, self.to_unit(x))
    }

    /// `T_k((2i - N)/N)` for `k = 0..=D`, exactly in `T`.
    fn basis_row<T: LpScalar>(&self, i: usize) -> Vec<T> {
        let y = T::from_ratio(2 * i as i64 - self.n as i64, self.n as i64);
        let two_y = y.add(&y);
        let mut row = vec![T::from_ratio(1, 1)];
        if self.d >= 1 {
            row.push(y);
        }
        for k in 2..=self.d {
            row.push(two_y.mul(&row[k - 1]).sub(&row[k - 2]));
        }
        row
    }

    fn solve_in<T: LpScalar>(&self) -> Result<(Vec<f64>, f64, usize)> {
        let neg = |row: &[T]| -> Vec<T> { row.iter().map(|v| T::zero().sub(v)).collect() };
        let split = |row: &[T]| -> Vec<T> {
            let mut r = row.to_vec();
            r.extend(neg(row));
            r
        };
        let (zero, one) = (T::zero(), T::from_ratio(1, 1));
        let mut a = Vec::with_capacity(2 * (self.n + 1));
        let mut b = Vec::with_capacity(2 * (self.n + 1));
        for i in 0..=self.n {
            let row = self.basis_row::<T>(i);
            a.push(split(&row));
            b.push(if i < self.m { zero.clone() } else { one.clone() });
            a.push(split(&neg(&row)));
            b.push(zero.clone());
        }
        let c = split(&self.basis_row::<T>(self.target()));
        let sol = maximize(&a, &b, &c, MAX_PIVOTS)?;
        let k = self.d + 1;
        let coeffs = (0..k).map(|j| sol.x[j].sub(&sol.x[j + k]).to_f64()).collect();
        Ok((coeffs, sol.value.to_f64(), sol.pivots))
    }

    /// `σ_max` and a witness, solved in exact rational arithmetic.
    pub fn solve(&self) -> Result<LpOutcome> {
        self.outcome(true, self.solve_in::<BigRational>()?)
    }

    /// As [`PolyLp::solve`] in `f64`. Past degree about 20 the tableau loses
    /// feasibility, which shows up in `witness_violation`.
    pub fn solve_float(&self) -> Result<LpOutcome> {
        self.outcome(false, self.solve_in::<f64>()?)
    }

    fn outcome(&self, exact: bool, (coeffs, sigma, pivots): (Vec<f64>, f64, usize)) -> Result<LpOutcome> {
        let witness_violation = self.violation(&coeffs, sigma);
        Ok(LpOutcome { problem: *self, sigma, exact, coeffs, pivots, witness_violation })
    }

    /// Largest violation of the constraints and of `p(8m) = σ`.
    pub fn violation(&self, coeffs: &[f64], sigma: f64) -> f64 {
        let mut worst = (self.eval(coeffs, self.target() as f64) - sigma).abs();
        for i in 0..=self.n {
            let v = self.eval(coeffs, i as f64);
            let miss = if i < self.m { v.abs() } else { (-v).max(v - 1.0).max(0.0) };
            worst = worst.max(miss);
        }
        worst
    }
}

pub fn extremal_sigma_lp(d: usize, n: usize, m: usize) -> Result<LpOutcome> {
    PolyLp::new(d, n, m)?.solve()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_prefix_gives_one() {
        let r = extremal_sigma_lp(4, 16, 0).unwrap();
        assert!((r.sigma - 1.0).abs() < 1e-12);
        assert!(r.exact);
    }

    #[test]
    fn too_many_roots_force_zero() {
        let r = extremal_sigma_lp(1, 16, 2).unwrap();
        assert_eq!(r.sigma, 0.0);
    }

    #[test]
    fn linear_jump() {
        // p(x) = x/N is optimal for D = 1, m = 1.
        let r = extremal_sigma_lp(1, 16, 1).unwrap();
        assert!((r.sigma - 0.5).abs() < 1e-12);
        assert!(r.witness_violation < 1e-12);
    }

    #[test]
    fn float_path_agrees_with_rational() {
        let p = PolyLp::new(6, 24, 2).unwrap();
        let exact = p.solve().unwrap().sigma;
        let float = p.solve_float().unwrap();
        assert!(!float.exact);
        assert!((exact - float.sigma).abs() < 1e-9, "{exact} vs {}", float.sigma);
    }

    #[test]
    fn preconditions() {
        assert!(PolyLp::new(4, 16, 3).is_err());
        assert!(PolyLp::new(25, 64, 1).is_err());
    }
}
