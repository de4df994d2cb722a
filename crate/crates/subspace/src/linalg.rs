//! Orthonormal bases of real subspaces and the few operations the checks need.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative residual below which a spanning vector counts as dependent.
pub const DEPENDENCE_TOL: f64 = 1e-8;

/// Residuals between `DEPENDENCE_TOL` and this are reported as ambiguous.
const AMBIGUOUS_BELOW: f64 = 1e-5;

/// Orthonormal columns spanning a subspace of `R^dim`.
#[derive(Clone, Debug)]
pub struct Basis {
    cols: DMatrix<f64>,
}

impl Basis {
    pub fn empty(dim: usize) -> Self {
        Basis { cols: DMatrix::zeros(dim, 0) }
    }

    /// Wraps columns the caller knows to be orthonormal.
    pub fn from_orthonormal(cols: DMatrix<f64>) -> Self {
        Basis { cols }
    }

    /// Modified Gram-Schmidt with one re-orthogonalization pass.
    pub fn span(vectors: &[DVector<f64>], dim: usize, label: &str) -> Result<Self> {
        let mut q: Vec<DVector<f64>> = Vec::new();
        for v in vectors {
            debug_assert_eq!(v.len(), dim);
            let scale = v.norm();
            if scale == 0.0 {
                continue;
            }
            let mut w = v / scale;
            for _ in 0..2 {
                for u in &q {
                    let c = u.dot(&w);
                    w.axpy(-c, u, 1.0);
                }
            }
            let r = w.norm();
            if r < DEPENDENCE_TOL {
                continue;
            }
            if r < AMBIGUOUS_BELOW {
                return Err(Error::AmbiguousRank { label: label.to_string(), residual: r });
            }
            q.push(w / r);
        }
        if q.is_empty() {
            return Ok(Basis::empty(dim));
        }
        Ok(Basis { cols: DMatrix::from_columns(&q) })
    }

    /// Concatenates bases of mutually orthogonal subspaces.
    pub fn direct_sum(dim: usize, parts: &[&Basis]) -> Self {
        let cols: Vec<DVector<f64>> = parts
            .iter()
            .flat_map(|b| b.cols.column_iter().map(|c| c.into_owned()))
            .collect();
        if cols.is_empty() {
            return Basis::empty(dim);
        }
        Basis { cols: DMatrix::from_columns(&cols) }
    }

    pub fn tensor(&self, other: &Basis) -> Basis {
        Basis { cols: self.cols.kronecker(&other.cols) }
    }

    /// Ambient dimension.
    pub fn dim(&self) -> usize {
        self.cols.nrows()
    }

    pub fn rank(&self) -> usize {
        self.cols.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.rank() == 0
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.cols
    }

    pub fn coords(&self, v: &DVector<f64>) -> DVector<f64> {
        self.cols.tr_mul(v)
    }

    pub fn project(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.cols * self.coords(v)
    }

    /// `v` minus its projection onto the span.
    pub fn reject(&self, v: &DVector<f64>) -> DVector<f64> {
        v - self.project(v)
    }

    pub fn projector(&self) -> DMatrix<f64> {
        &self.cols * self.cols.transpose()
    }

    /// Largest entry of `|Q^T Q - I|`.
    pub fn orthonormality_residual(&self) -> f64 {
        let g = self.cols.tr_mul(&self.cols) - DMatrix::identity(self.rank(), self.rank());
        g.amax()
    }
}

/// Largest entry of the cross-Gram block between two bases.
pub fn max_cross_gram(a: &Basis, b: &Basis) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    a.matrix().tr_mul(b.matrix()).amax()
}

/// Largest eigenvalue of a real symmetric matrix (0 for an empty one).
pub fn lambda_max(m: DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    m.symmetric_eigenvalues().max()
}

/// Largest eigenvalue of `P_A - P_B`; at most 0 exactly when `A` lies inside `B`.
pub fn dominance_gap(inner: &Basis, outer: &Basis) -> f64 {
    lambda_max(inner.projector() - outer.projector())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn span_drops_dependent_vectors() {
        let v = [
            DVector::from_vec(vec![1.0, 0.0, 0.0]),
            DVector::from_vec(vec![1.0, 1.0, 0.0]),
            DVector::from_vec(vec![2.0, 1.0, 0.0]),
        ];
        let b = Basis::span(&v, 3, "test").unwrap();
        assert_eq!(b.rank(), 2);
        assert!(b.orthonormality_residual() < 1e-12);
        let r = b.reject(&DVector::from_vec(vec![3.0, -1.0, 2.0]));
        assert!((r - DVector::from_vec(vec![0.0, 0.0, 2.0])).norm() < 1e-12);
    }

    #[test]
    fn near_dependence_is_reported() {
        let v = [
            DVector::from_vec(vec![1.0, 0.0]),
            DVector::from_vec(vec![1.0, 1e-6]),
        ];
        assert!(matches!(Basis::span(&v, 2, "x"), Err(Error::AmbiguousRank { .. })));
    }

    #[test]
    fn dominance_detects_containment() {
        let line = Basis::span(&[DVector::from_vec(vec![1.0, 1.0, 0.0])], 3, "l").unwrap();
        let plane = Basis::span(
            &[DVector::from_vec(vec![1.0, 0.0, 0.0]), DVector::from_vec(vec![0.0, 1.0, 0.0])],
            3,
            "p",
        )
        .unwrap();
        assert!(dominance_gap(&line, &plane) < 1e-12);
        assert!(dominance_gap(&plane, &line) > 0.5);
    }
}
