//! Convolution algebra of a finite groupoid and its matrix-block shape.

use std::collections::BTreeMap;

use num_traits::Num;
use serde::Serialize;

use crate::groupoid::FiniteGroupoid;
use crate::report::{CheckResult, Scan, ValidationReport};
use crate::Id;

#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    /// Joins the two classes, keeping the smaller root.
    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupoidAlgebraSummary {
    pub elements: usize,
    pub units: usize,
    pub principal: bool,
    /// Unit-orbit sizes, ordered by least unit.
    pub components: Vec<usize>,
    /// One matrix block per component; absent when some isotropy is nontrivial.
    pub block_dims: Option<Vec<usize>>,
    /// A non-unit arrow with equal source and range.
    pub isotropy_witness: Option<Id>,
}

pub fn algebra_summary(g: &FiniteGroupoid) -> GroupoidAlgebraSummary {
    let isotropy_witness = g.elements().find(|&a| !g.is_unit(a) && g.src(a) == g.rng(a));
    let principal = isotropy_witness.is_none();
    let components: Vec<usize> = g.unit_orbits().iter().map(Vec::len).collect();
    GroupoidAlgebraSummary {
        elements: g.len(),
        units: g.units().len(),
        principal,
        block_dims: principal.then(|| components.clone()),
        components,
        isotropy_witness,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("groupoid is not principal (isotropy at arrow {0})")]
pub struct NotPrincipal(pub Id);

/// Direct sums of full matrix algebras are Morita equivalent iff they have
/// the same number of blocks.
pub fn morita_compatible(a: &GroupoidAlgebraSummary, b: &GroupoidAlgebraSummary) -> Result<bool, NotPrincipal> {
    for s in [a, b] {
        if let Some(w) = s.isotropy_witness {
            return Err(NotPrincipal(w));
        }
    }
    Ok(a.components.len() == b.components.len())
}

/// `(f₁∗f₂)(x) = Σ_{x=yz} f₁(y) f₂(z)` on dense coefficient vectors.
pub fn convolution_product<T: Num + Copy>(g: &FiniteGroupoid, f1: &[T], f2: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); g.len()];
    for (&(y, z), &x) in g.mul_table() {
        out[x] = out[x] + f1[y] * f2[z];
    }
    out
}

/// Sparse form of [`convolution_product`]; zero coefficients are dropped.
pub fn convolve_sparse<T: Num + Copy>(g: &FiniteGroupoid, f1: &BTreeMap<Id, T>, f2: &BTreeMap<Id, T>) -> BTreeMap<Id, T> {
    let mut out: BTreeMap<Id, T> = BTreeMap::new();
    for (&y, &a) in f1 {
        for &z in g.arrows_to(g.src(y)) {
            if let Some(&b) = f2.get(&z) {
                let x = g.mul(y, z).expect("composable");
                let e = out.entry(x).or_insert_with(T::zero);
                *e = *e + a * b;
            }
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// For a principal groupoid, checks that the indicators `e_uv` of the
/// arrows `v → u` are matrix units: `e_uv ∗ e_vw = e_uw`, `e_uv ∗ e_v'w = 0`
/// for `v ≠ v'`, `e_uv* = e_vu`, and `Σ e_uu` is the identity.
pub fn verify_matrix_units(g: &FiniteGroupoid) -> ValidationReport {
    let mut rep = ValidationReport::new();
    if let Some(w) = algebra_summary(g).isotropy_witness {
        rep.push(CheckResult::fail(
            "matrix-units",
            0,
            crate::report::Witness::new(vec![w], "not principal"),
        ));
        return rep;
    }
    let e = |a: Id| BTreeMap::from([(a, 1i64)]);
    let mut s = Scan::new();
    for a in g.elements() {
        for b in g.elements() {
            let got = convolve_sparse(g, &e(a), &e(b));
            let want = g.mul(a, b).map(e).unwrap_or_default();
            s.check(got == want, || vec![a, b], "e_uv * e_v'w disagrees with the matrix-unit rule");
        }
        s.check(g.rng(g.inv(a)) == g.src(a), || vec![a], "e_uv* != e_vu");
    }
    let one: BTreeMap<Id, i64> = g.units().iter().map(|&u| (u, 1)).collect();
    for a in g.elements() {
        let ok = convolve_sparse(g, &one, &e(a)) == e(a) && convolve_sparse(g, &e(a), &one) == e(a);
        s.check(ok, || vec![a], "sum of diagonal units is not the identity");
    }
    rep.push(CheckResult::from_scan("matrix-units", s));
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_groupoid_is_one_block() {
        let s = algebra_summary(&FiniteGroupoid::pair(2));
        assert!(s.principal);
        assert_eq!(s.block_dims, Some(vec![2]));
        assert!(verify_matrix_units(&FiniteGroupoid::pair(2)).is_ok());
    }

    #[test]
    fn pair_groupoid_units_multiply_like_m2() {
        // oracle: 2x2 matrix units multiplied as integer matrices
        let g = FiniteGroupoid::pair(2);
        let unit = |i: usize, j: usize| {
            let mut m = [[0i64; 2]; 2];
            m[i][j] = 1;
            m
        };
        for a in g.elements() {
            for b in g.elements() {
                let (ma, mb) = (unit(a / 2, a % 2), unit(b / 2, b % 2));
                let mut prod = [[0i64; 2]; 2];
                for i in 0..2 {
                    for j in 0..2 {
                        prod[i][j] = (0..2).map(|k| ma[i][k] * mb[k][j]).sum();
                    }
                }
                let mut fa = vec![0i64; 4];
                fa[a] = 1;
                let mut fb = vec![0i64; 4];
                fb[b] = 1;
                let c = convolution_product(&g, &fa, &fb);
                for x in 0..4 {
                    assert_eq!(c[x], prod[x / 2][x % 2]);
                }
            }
        }
    }

    #[test]
    fn trivial_groupoid_convolution_is_pointwise() {
        let g = FiniteGroupoid::space(3);
        let c = convolution_product(&g, &[1, 2, 3], &[4, 5, 6]);
        assert_eq!(c, vec![4, 10, 18]);
    }

    #[test]
    fn group_has_isotropy() {
        let s = algebra_summary(&FiniteGroupoid::cyclic(2));
        assert!(!s.principal);
        assert_eq!(s.isotropy_witness, Some(1));
        assert_eq!(s.block_dims, None);
        assert!(morita_compatible(&s, &s).is_err());
    }

    #[test]
    fn block_counts_decide_morita() {
        let one = algebra_summary(&FiniteGroupoid::pair(2));
        let two = algebra_summary(&FiniteGroupoid::space(2));
        assert_eq!(two.block_dims, Some(vec![1, 1]));
        assert_eq!(morita_compatible(&one, &two), Ok(false));
        assert_eq!(morita_compatible(&one, &algebra_summary(&FiniteGroupoid::pair(3))), Ok(true));
    }
}
