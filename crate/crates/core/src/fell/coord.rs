//! Fell bundles given by structure constants in fixed fiber bases.
//!
//! Product and quotient bundles are not closed under plain matrix
//! multiplication, so they are built here and mapped back into the matrix
//! model through the left regular representation.

use std::collections::{BTreeMap, HashMap};

use nalgebra::Cholesky;

use super::linalg::{combine, op_norm, par_num_scan, rank, stack, unit_vec, CMat, CVec, NumScan, Tol};
use super::matrix::{validate_fell, FellBundle};
use super::FellError;
use crate::groupoid::FiniteGroupoid;
use crate::report::{CheckResult, ValidationReport, Witness};
use crate::Id;

#[derive(Debug, Clone)]
pub struct CoordBundle {
    pub base: FiniteGroupoid,
    /// Fiber dimension per arrow.
    pub fdim: Vec<usize>,
    /// For composable `(x,y)`, `mul[&(x,y)][i]` is left multiplication by the
    /// `i`-th basis element over `x`, from coordinates over `y` to
    /// coordinates over `xy`.
    pub mul: HashMap<(Id, Id), Vec<CMat>>,
    /// Coordinates of `b*` are `star[x] · conj(coords of b)`.
    pub star: Vec<CMat>,
    /// A faithful representation of each unit fiber, one matrix per basis element.
    pub unit_rep: BTreeMap<Id, Vec<CMat>>,
    pub tol: Tol,
}

impl CoordBundle {
    /// Coordinates of `b·c` for `b` over `x`, `c` over `y`.
    pub fn product(&self, x: Id, y: Id, b: &CVec, cc: &CVec) -> Option<CVec> {
        let xy = self.base.mul(x, y)?;
        let ms = self.mul.get(&(x, y))?;
        Some(combine(b, ms, self.fdim[xy], self.fdim[y]) * cc)
    }

    /// The product as a matrix acting on coordinates over `y`.
    pub fn left_mult(&self, x: Id, y: Id, b: &CVec) -> Option<CMat> {
        let xy = self.base.mul(x, y)?;
        let ms = self.mul.get(&(x, y))?;
        Some(combine(b, ms, self.fdim[xy], self.fdim[y]))
    }

    pub fn adjoint(&self, x: Id, b: &CVec) -> CVec {
        &self.star[x] * b.conjugate()
    }

    /// `π(a)` for `a` over a unit.
    pub fn rep(&self, u: Id, a: &CVec) -> CMat {
        let ms = &self.unit_rep[&u];
        let d = ms.first().map_or(0, |m| m.nrows());
        combine(a, ms, d, d)
    }

    /// `‖b‖ = ‖π(b*b)‖^{1/2}`.
    pub fn norm(&self, x: Id, b: &CVec) -> f64 {
        let xi = self.base.inv(x);
        let bs = self.adjoint(x, b);
        let bb = self.product(xi, x, &bs, b).expect("x⁻¹x is defined");
        op_norm(&self.rep(self.base.src(x), &bb)).sqrt()
    }

    pub fn from_matrix(b: &FellBundle) -> Result<Self, FellError> {
        let tol = b.tol;
        let g = &b.base;
        let fdim: Vec<usize> = g.elements().map(|x| b.fiber(x).dim()).collect();
        let mut mul = HashMap::new();
        for (x, y, xy) in g.products() {
            let mut ms = Vec::with_capacity(fdim[x]);
            for bi in b.basis(x) {
                let mut cols = Vec::with_capacity(fdim[y]);
                for (j, cj) in b.basis(y).iter().enumerate() {
                    let (v, r) = b.fiber(xy).coords(&(bi * cj), &tol);
                    if !tol.ok(r) {
                        return Err(FellError::Closure(Witness::new(vec![x, y, ms.len(), j], "product leaves the fiber over xy")));
                    }
                    cols.push(v);
                }
                ms.push(stack(&cols, fdim[xy]));
            }
            mul.insert((x, y), ms);
        }
        let mut star = Vec::with_capacity(g.len());
        for x in g.elements() {
            let xi = g.inv(x);
            let mut cols = Vec::with_capacity(fdim[x]);
            for (i, bi) in b.basis(x).iter().enumerate() {
                let (v, r) = b.fiber(xi).coords(&bi.adjoint(), &tol);
                if !tol.ok(r) {
                    return Err(FellError::Closure(Witness::new(vec![x, i], "adjoint leaves the fiber over the inverse")));
                }
                cols.push(v);
            }
            star.push(stack(&cols, fdim[xi]));
        }
        let unit_rep = g.units().iter().map(|&u| (u, b.basis(u).to_vec())).collect();
        Ok(CoordBundle { base: g.clone(), fdim, mul, star, unit_rep, tol })
    }

    /// The left regular representation: `V_w = ⊕_{r(e)=w} B_e` with inner
    /// product `tr π(c*b)`, and `b` over `x` acting by left multiplication
    /// `V_{s(x)} → V_{r(x)}`.
    pub fn realize(&self) -> Result<FellBundle, FellError> {
        let g = &self.base;
        let tol = self.tol;
        // Orthonormalizing factors `R_e` with `⟨ξ,η⟩ = (R_e η)^H (R_e ξ)`.
        let mut fac: Vec<CMat> = Vec::with_capacity(g.len());
        let mut fac_inv: Vec<CMat> = Vec::with_capacity(g.len());
        for e in g.elements() {
            let k = self.fdim[e];
            let ei = g.inv(e);
            let gram = CMat::from_fn(k, k, |j, i| {
                let bj_star = self.adjoint(e, &unit_vec(k, j));
                let p = self.product(ei, e, &bj_star, &unit_vec(k, i)).expect("e⁻¹e is defined");
                self.rep(g.src(e), &p).trace()
            });
            let ch = Cholesky::new(gram).ok_or_else(|| FellError::NotPositive(Witness::new(vec![e], "inner product on the fiber is not positive definite")))?;
            let r = ch.l().adjoint();
            let r_inv = r.clone().try_inverse().ok_or_else(|| FellError::NotPositive(Witness::new(vec![e], "degenerate inner product")))?;
            fac.push(r);
            fac_inv.push(r_inv);
        }
        let mut offset = vec![0usize; g.len()];
        let mut dims = BTreeMap::new();
        for &w in g.units() {
            let mut o = 0;
            for &e in g.arrows_to(w) {
                offset[e] = o;
                o += self.fdim[e];
            }
            dims.insert(w, o);
        }
        let mut fibers = Vec::with_capacity(g.len());
        for x in g.elements() {
            let (r, s) = (dims[&g.rng(x)], dims[&g.src(x)]);
            let mut basis = Vec::with_capacity(self.fdim[x]);
            for i in 0..self.fdim[x] {
                let mut m = CMat::zeros(r, s);
                for &e in g.arrows_to(g.src(x)) {
                    let xe = g.mul(x, e).expect("r(e) = s(x)");
                    let blk = &fac[xe] * &self.mul[&(x, e)][i] * &fac_inv[e];
                    m.view_mut((offset[xe], offset[e]), blk.shape()).copy_from(&blk);
                }
                basis.push(m);
            }
            fibers.push(basis);
        }
        FellBundle::new(g.clone(), dims, fibers, tol)
    }
}

/// `π` is a `*`-homomorphism on each unit fiber and injective.
fn check_unit_rep(b: &CoordBundle) -> ValidationReport {
    let tol = b.tol;
    let mut hom = NumScan::new();
    let mut faithful = NumScan::new();
    for &u in b.base.units() {
        let k = b.fdim[u];
        let Some(ms) = b.unit_rep.get(&u) else {
            faithful.fail(vec![u], "unit without a representation");
            continue;
        };
        if ms.len() != k {
            faithful.fail(vec![u], "representation has the wrong number of matrices");
            continue;
        }
        let d = ms.first().map_or(0, |m| m.nrows());
        let vs: Vec<CVec> = ms.iter().map(super::linalg::vec_of).collect();
        let ok = k == 0 || rank(&stack(&vs, d * d), &tol) == k;
        faithful.check(&tol, if ok { 0.0 } else { f64::INFINITY }, || vec![u], "representation is not injective");
        for i in 0..k {
            let ei = unit_vec(k, i);
            let star = b.adjoint(u, &ei);
            hom.check(&tol, tol.residual(&ms[i].adjoint(), &b.rep(u, &star)), || vec![u, i], "pi(b*) != pi(b)*");
            for j in 0..k {
                let p = b.product(u, u, &ei, &unit_vec(k, j)).expect("units compose");
                hom.check(&tol, tol.residual(&(&ms[i] * &ms[j]), &b.rep(u, &p)), || vec![u, i, j], "pi(bc) != pi(b)pi(c)");
            }
        }
    }
    let mut rep = ValidationReport::new();
    rep.push(faithful.result("unit-rep-faithful"));
    rep.push(hom.result("unit-rep-hom"));
    rep
}

/// The regular representation respects the structure constants.
fn check_realization(b: &CoordBundle, real: &FellBundle) -> ValidationReport {
    let tol = b.tol;
    let g = &b.base;
    let pairs = g.products();
    let hom = par_num_scan(pairs.len(), |p| {
        let (x, y, xy) = pairs[p];
        let mut s = NumScan::new();
        for i in 0..b.fdim[x] {
            for j in 0..b.fdim[y] {
                let lhs = &real.basis(x)[i] * &real.basis(y)[j];
                let coords = &b.mul[&(x, y)][i] * unit_vec(b.fdim[y], j);
                let fb = real.fiber(xy);
                s.check(&tol, tol.residual(&lhs, &fb.element(&coords)), || vec![x, y, i, j], "L_b L_c != L_bc");
            }
        }
        s
    });
    let adj = par_num_scan(g.len(), |x| {
        let mut s = NumScan::new();
        let xi = g.inv(x);
        for i in 0..b.fdim[x] {
            let coords = b.adjoint(x, &unit_vec(b.fdim[x], i));
            s.check(&tol, tol.residual(&real.basis(x)[i].adjoint(), &real.fiber(xi).element(&coords)), || vec![x, i], "L_b^* != L_b*");
        }
        s
    });
    let mut rep = ValidationReport::new();
    rep.push(hom.result("realization-hom"));
    rep.push(adj.result("realization-adjoint"));
    rep
}

/// Validates a structure-constant bundle through its regular realization.
pub fn validate_coords(b: &CoordBundle) -> ValidationReport {
    let mut rep = check_unit_rep(b);
    if !rep.is_ok() {
        return rep;
    }
    match b.realize() {
        Err(e) => {
            let w = match e {
                FellError::NotPositive(w) => w,
                other => Witness::new(vec![], other.to_string()),
            };
            rep.push(CheckResult::fail("realization", 1, w));
        }
        Ok(real) => {
            rep.push(CheckResult::pass("realization", b.base.len() as u64));
            rep.extend(check_realization(b, &real));
            rep.extend(validate_fell(&real));
        }
    }
    rep
}

/// `span(B_x B_y) = B_xy` in coordinates.
pub fn saturation_coords(b: &CoordBundle) -> CheckResult {
    let tol = b.tol;
    let pairs = b.base.products();
    let s = par_num_scan(pairs.len(), |p| {
        let (x, y, xy) = pairs[p];
        let mut s = NumScan::new();
        let vs: Vec<CVec> = (0..b.fdim[x])
            .flat_map(|i| (0..b.fdim[y]).map(move |j| (i, j)))
            .map(|(i, j)| &b.mul[&(x, y)][i] * unit_vec(b.fdim[y], j))
            .collect();
        let got = if vs.is_empty() { 0 } else { rank(&stack(&vs, b.fdim[xy]), &tol) };
        let ok = got == b.fdim[xy];
        s.check(&tol, if ok { 0.0 } else { f64::INFINITY }, || vec![x, y], "products do not span the fiber over xy");
        s
    });
    s.result("saturated")
}

/// Cellwise distance between two structure-constant bundles over the same groupoid.
pub fn structure_constant_identity(a: &CoordBundle, b: &CoordBundle, name: &str) -> CheckResult {
    let tol = a.tol;
    let mut s = NumScan::new();
    if a.base != b.base || a.fdim != b.fdim {
        s.fail(vec![], "base groupoids or fiber dimensions differ");
        return s.result(name);
    }
    for (x, y, _) in a.base.products() {
        for (i, (ma, mb)) in a.mul[&(x, y)].iter().zip(&b.mul[&(x, y)]).enumerate() {
            s.check(&tol, tol.residual(ma, mb), || vec![x, y, i], "multiplication constants differ");
        }
    }
    for x in a.base.elements() {
        s.check(&tol, tol.residual(&a.star[x], &b.star[x]), || vec![x], "involution constants differ");
    }
    s.result(name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fell::linalg::c;
    use crate::fell::matrix::line_bundle;

    #[test]
    fn line_bundle_round_trips_through_coordinates() {
        let g = FiniteGroupoid::pair(3);
        let b = line_bundle(&g);
        let cb = CoordBundle::from_matrix(&b).unwrap();
        let rep = validate_coords(&cb);
        assert!(rep.is_ok(), "{rep}");
        assert!(saturation_coords(&cb).is_ok());
        let real = cb.realize().unwrap();
        assert_eq!(real.dim(0), 3);
    }

    #[test]
    fn norm_of_a_scaled_basis_element() {
        let g = FiniteGroupoid::cyclic(2);
        let cb = CoordBundle::from_matrix(&line_bundle(&g)).unwrap();
        let v = CVec::from_vec(vec![c(3.0, 4.0)]);
        assert!((cb.norm(1, &v) - 5.0).abs() < 1e-12);
    }
}
