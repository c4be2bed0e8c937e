//! Complex matrices, tolerances and subspace membership.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::report::{CheckResult, Scan};
use crate::Id;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Relative threshold with an absolute floor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tol {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tol {
    fn default() -> Self {
        Tol { rel: 1e-9, abs: 1e-12 }
    }
}

impl Tol {
    /// `‖a-b‖ / max(‖a‖,‖b‖)`, or 0 when `‖a-b‖` is below the floor.
    /// Shape mismatch is an infinite residual.
    pub fn residual(&self, a: &CMat, b: &CMat) -> f64 {
        if a.shape() != b.shape() {
            return f64::INFINITY;
        }
        let d = (a - b).norm();
        if d <= self.abs {
            return 0.0;
        }
        d / a.norm().max(b.norm())
    }

    pub fn residual_vec(&self, a: &CVec, b: &CVec) -> f64 {
        if a.len() != b.len() {
            return f64::INFINITY;
        }
        let d = (a - b).norm();
        if d <= self.abs {
            return 0.0;
        }
        d / a.norm().max(b.norm())
    }

    pub fn ok(&self, r: f64) -> bool {
        r <= self.rel
    }
}

/// A [`Scan`] that also tracks the largest residual seen.
#[derive(Debug, Clone, Default)]
pub struct NumScan {
    pub scan: Scan,
    pub max: f64,
}

impl NumScan {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn check(&mut self, tol: &Tol, r: f64, ids: impl FnOnce() -> Vec<Id>, note: &str) {
        if r > self.max || r.is_nan() {
            self.max = if r.is_nan() { f64::INFINITY } else { r };
        }
        self.scan.check(tol.ok(r), ids, note);
    }

    pub fn fail(&mut self, ids: Vec<Id>, note: &str) {
        self.scan.count += 1;
        self.scan.fail(ids, note);
    }

    pub fn merge(mut self, later: NumScan) -> NumScan {
        self.scan = self.scan.merge(later.scan);
        self.max = self.max.max(later.max);
        self
    }

    pub fn result(self, name: &str) -> CheckResult {
        let max = self.max;
        CheckResult::from_scan(name, self.scan).with_residual(max)
    }
}

/// Parallel over the outer index, merged in index order.
pub fn par_num_scan<F>(n: usize, f: F) -> NumScan
where
    F: Fn(usize) -> NumScan + Sync + Send,
{
    use rayon::prelude::*;
    let parts: Vec<NumScan> = (0..n).into_par_iter().map(f).collect();
    parts.into_iter().fold(NumScan::new(), NumScan::merge)
}

pub fn par_num_scan_many<const K: usize, F>(n: usize, f: F) -> [NumScan; K]
where
    F: Fn(usize) -> [NumScan; K] + Sync + Send,
{
    use rayon::prelude::*;
    let parts: Vec<[NumScan; K]> = (0..n).into_par_iter().map(f).collect();
    let mut acc: [NumScan; K] = std::array::from_fn(|_| NumScan::new());
    for p in parts {
        for (a, s) in acc.iter_mut().zip(p) {
            *a = std::mem::take(a).merge(s);
        }
    }
    acc
}

/// Largest singular value.
pub fn op_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.max()
}

/// Numerical rank of the columns of `m`.
pub fn rank(m: &CMat, tol: &Tol) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.max();
    sv.iter().filter(|&&s| s > (tol.rel * top).max(tol.abs)).count()
}

/// Columns are the given vectors.
pub fn stack(vs: &[CVec], len: usize) -> CMat {
    CMat::from_fn(len, vs.len(), |i, j| vs[j][i])
}

pub fn vec_of(m: &CMat) -> CVec {
    CVec::from_column_slice(m.as_slice())
}

pub fn unit_vec(n: usize, i: usize) -> CVec {
    let mut v = CVec::zeros(n);
    v[i] = c(1.0, 0.0);
    v
}

pub fn as_col(v: &CVec) -> CMat {
    CMat::from_column_slice(v.len(), 1, v.as_slice())
}

/// `Σ coeffs[l] · mats[l]`.
pub fn combine(coeffs: &CVec, mats: &[CMat], rows: usize, cols: usize) -> CMat {
    let mut out = CMat::zeros(rows, cols);
    for (a, m) in coeffs.iter().zip(mats) {
        if *a != C64::new(0.0, 0.0) {
            out += m * *a;
        }
    }
    out
}

/// Smallest eigenvalue of the Hermitian part of `m`.
pub fn min_hermitian_eigenvalue(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let h = (m + m.adjoint()) * c(0.5, 0.0);
    h.symmetric_eigen().eigenvalues.min()
}

/// A fiber: the span of a list of equally shaped matrices.
#[derive(Debug, Clone)]
pub struct Subspace {
    pub rows: usize,
    pub cols: usize,
    pub basis: Vec<CMat>,
    /// Columns are the vectorized basis matrices.
    mat: CMat,
    pinv: CMat,
}

impl Subspace {
    pub fn new(rows: usize, cols: usize, basis: Vec<CMat>) -> Self {
        let vs: Vec<CVec> = basis.iter().map(vec_of).collect();
        let mat = stack(&vs, rows * cols);
        let pinv = if basis.is_empty() {
            CMat::zeros(0, rows * cols)
        } else {
            mat.clone().pseudo_inverse(1e-13).expect("non-negative epsilon")
        };
        Subspace { rows, cols, basis, mat, pinv }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Least-squares coordinates of `m` and the relative residual of the fit.
    pub fn coords(&self, m: &CMat, tol: &Tol) -> (CVec, f64) {
        if m.shape() != (self.rows, self.cols) {
            return (CVec::zeros(self.dim()), f64::INFINITY);
        }
        let v = vec_of(m);
        let x = &self.pinv * &v;
        let fit = &self.mat * &x;
        (x, tol.residual_vec(&fit, &v))
    }

    pub fn element(&self, coords: &CVec) -> CMat {
        combine(coords, &self.basis, self.rows, self.cols)
    }

    pub fn independent(&self, tol: &Tol) -> bool {
        rank(&self.mat, tol) == self.dim()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordinates_recover_combinations() {
        let e = |i: usize, j: usize| {
            let mut m = CMat::zeros(2, 2);
            m[(i, j)] = c(1.0, 0.0);
            m
        };
        let s = Subspace::new(2, 2, vec![e(0, 0) + e(1, 1), e(0, 1)]);
        let tol = Tol::default();
        let m = (e(0, 0) + e(1, 1)) * c(2.0, -1.0) + e(0, 1) * c(0.0, 3.0);
        let (x, r) = s.coords(&m, &tol);
        assert!(tol.ok(r));
        assert!((x[0] - c(2.0, -1.0)).norm() < 1e-12);
        assert!((x[1] - c(0.0, 3.0)).norm() < 1e-12);
        let (_, r) = s.coords(&e(1, 0), &tol);
        assert!(!tol.ok(r));
    }

    #[test]
    fn operator_norm_of_a_rank_one_matrix() {
        let v = CVec::from_vec(vec![c(3.0, 0.0), c(0.0, 4.0)]);
        let m = as_col(&v) * as_col(&v).adjoint();
        assert!((op_norm(&m) - 25.0).abs() < 1e-9);
        assert!(min_hermitian_eigenvalue(&m) > -1e-9);
    }
}
