//! Dense tableau simplex with Bland's rule, generic over exact rationals and
//! `f64`.
//!
//! Solves `max cᵀx` subject to `Ax ≤ b`, `x ≥ 0`, with `b ≥ 0` so that the
//! slack basis is feasible from the start.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arithmetic needed by the tableau.
pub trait LpScalar: Clone + std::fmt::Debug + Send + Sync {
    fn zero() -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Self;
    /// Sign, with values within the scalar's tolerance of zero counted as zero.
    fn sign(&self) -> Ordering;
    fn to_f64(&self) -> f64;

    fn is_zero_ish(&self) -> bool {
        self.sign() == Ordering::Equal
    }

    fn compare(&self, other: &Self) -> Ordering {
        self.sub(other).sign()
    }
}

/// Pivot and ratio tolerance for floating-point tableaux.
pub const F64_EPS: f64 = 1e-11;

impl LpScalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn sign(&self) -> Ordering {
        if *self > F64_EPS {
            Ordering::Greater
        } else if *self < -F64_EPS {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl LpScalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn sign(&self) -> Ordering {
        if self.is_positive() {
            Ordering::Greater
        } else if self.is_negative() {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

#[derive(Clone, Debug)]
pub struct LpSolution<T> {
    pub x: Vec<T>,
    pub value: T,
    pub pivots: usize,
}

/// Maximizes `cᵀx` over `{x ≥ 0 : Ax ≤ b}`; requires `b ≥ 0`.
pub fn maximize<T: LpScalar>(a: &[Vec<T>], b: &[T], c: &[T], max_pivots: usize) -> Result<LpSolution<T>> {
    let rows = a.len();
    let vars = c.len();
    if b.len() != rows || a.iter().any(|r| r.len() != vars) {
        return Err(Error::InvalidParameter("constraint shapes disagree".into()));
    }
    if b.iter().any(|v| v.sign() == Ordering::Less) {
        return Err(Error::InvalidParameter("right-hand side must be nonnegative".into()));
    }
    let cols = vars + rows;
    let rhs = cols;
    let mut tab: Vec<Vec<T>> = a
        .iter()
        .zip(b)
        .enumerate()
        .map(|(i, (row, bi))| {
            let mut r = row.clone();
            r.extend((0..rows).map(|k| if k == i { T::from_ratio(1, 1) } else { T::zero() }));
            r.push(bi.clone());
            r
        })
        .collect();
    let mut obj: Vec<T> = c.iter().map(|v| T::zero().sub(v)).collect();
    obj.extend((0..=rows).map(|_| T::zero()));
    let mut basis: Vec<usize> = (vars..cols).collect();

    let mut pivots = 0;
    loop {
        let Some(enter) = (0..cols).find(|&j| obj[j].sign() == Ordering::Less) else { break };
        let mut leave: Option<(usize, T)> = None;
        for (i, row) in tab.iter().enumerate() {
            if row[enter].sign() != Ordering::Greater {
                continue;
            }
            let ratio = row[rhs].div(&row[enter]);
            let better = match &leave {
                None => true,
                Some((l, best)) => match ratio.compare(best) {
                    Ordering::Less => true,
                    Ordering::Equal => basis[i] < basis[*l],
                    Ordering::Greater => false,
                },
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        let Some((r, _)) = leave else { return Err(Error::Unbounded) };
        if pivots == max_pivots {
            return Err(Error::Nonconvergence(max_pivots));
        }
        pivot(&mut tab, &mut obj, r, enter);
        basis[r] = enter;
        pivots += 1;
    }

    let mut x = vec![T::zero(); vars];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < vars {
            x[bv] = tab[i][rhs].clone();
        }
    }
    Ok(LpSolution { x, value: obj[rhs].clone(), pivots })
}

fn pivot<T: LpScalar>(tab: &mut [Vec<T>], obj: &mut [T], r: usize, enter: usize) {
    let p = tab[r][enter].clone();
    for v in tab[r].iter_mut() {
        *v = if v.is_zero_ish() { T::zero() } else { v.div(&p) };
    }
    let support: Vec<usize> = (0..tab[r].len()).filter(|&j| !tab[r][j].is_zero_ish()).collect();
    let pivot_row = tab[r].clone();
    let eliminate = |row: &mut [T]| {
        let f = row[enter].clone();
        if f.is_zero_ish() {
            return;
        }
        for &j in &support {
            row[j] = row[j].sub(&f.mul(&pivot_row[j]));
        }
        row[enter] = T::zero();
    };
    for (i, row) in tab.iter_mut().enumerate() {
        if i != r {
            eliminate(row);
        }
    }
    eliminate(obj);
}
