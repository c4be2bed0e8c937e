//! Fell bundles whose fibers are spaces of complex matrices.

use std::collections::BTreeMap;

use super::linalg::{c, min_hermitian_eigenvalue, op_norm, par_num_scan, par_num_scan_many, rank, vec_of, CMat, CVec, NumScan, Subspace, Tol};
use super::FellError;
use crate::groupoid::FiniteGroupoid;
use crate::report::{CheckResult, ValidationReport, Witness};
use crate::Id;

/// Each arrow `x` carries a subspace of `d(r(x)) × d(s(x))` matrices;
/// product is matrix product and involution is conjugate transpose.
#[derive(Debug, Clone)]
pub struct FellBundle {
    pub base: FiniteGroupoid,
    dims: BTreeMap<Id, usize>,
    fibers: Vec<Subspace>,
    pub tol: Tol,
}

impl FellBundle {
    pub fn new(base: FiniteGroupoid, dims: BTreeMap<Id, usize>, fibers: Vec<Vec<CMat>>, tol: Tol) -> Result<Self, FellError> {
        if fibers.len() != base.len() {
            return Err(FellError::Shape(Witness::new(vec![fibers.len()], "one basis per arrow expected")));
        }
        for &u in base.units() {
            if !dims.contains_key(&u) {
                return Err(FellError::Shape(Witness::new(vec![u], "unit without a dimension")));
            }
        }
        let mut out = Vec::with_capacity(fibers.len());
        for (x, basis) in fibers.into_iter().enumerate() {
            let (r, s) = (dims[&base.rng(x)], dims[&base.src(x)]);
            if let Some(bad) = basis.iter().position(|m| m.shape() != (r, s)) {
                return Err(FellError::Shape(Witness::new(vec![x, bad], "basis matrix has the wrong shape")));
            }
            out.push(Subspace::new(r, s, basis));
        }
        Ok(FellBundle { base, dims, fibers: out, tol })
    }

    pub fn dim(&self, u: Id) -> usize {
        self.dims[&u]
    }

    pub fn dims(&self) -> &BTreeMap<Id, usize> {
        &self.dims
    }

    pub fn fiber(&self, x: Id) -> &Subspace {
        &self.fibers[x]
    }

    pub fn basis(&self, x: Id) -> &[CMat] {
        &self.fibers[x].basis
    }

    pub fn set_fiber(&mut self, x: Id, basis: Vec<CMat>) {
        let (r, s) = (self.dims[&self.base.rng(x)], self.dims[&self.base.src(x)]);
        self.fibers[x] = Subspace::new(r, s, basis);
    }

    /// Composable pairs `(x, y, xy)` in enumeration order.
    fn pairs(&self) -> Vec<(Id, Id, Id)> {
        self.base.products()
    }
}

/// `d ≡ 1` and every fiber is `ℂ`.
pub fn line_bundle(base: &FiniteGroupoid) -> FellBundle {
    let dims = base.units().iter().map(|&u| (u, 1)).collect();
    let one = CMat::from_element(1, 1, c(1.0, 0.0));
    let fibers = vec![vec![one]; base.len()];
    FellBundle::new(base.clone(), dims, fibers, Tol::default()).expect("line bundle shapes agree")
}

/// `B(𝒜,K,α)` realized as `(a,k) ↦ a·U_k`, where `α_k = Ad U_k` and
/// `algebras[u]` spans the unit algebra `A_u`.
///
/// Requires `U` to be a unitary functor that carries `A_{s(k)}` onto `A_{r(k)}`.
pub fn crossed_product_bundle(
    base: &FiniteGroupoid,
    algebras: &BTreeMap<Id, Vec<CMat>>,
    unitaries: &[CMat],
    tol: Tol,
) -> Result<FellBundle, FellError> {
    let mut dims = BTreeMap::new();
    for &u in base.units() {
        let alg = algebras
            .get(&u)
            .ok_or_else(|| FellError::Shape(Witness::new(vec![u], "unit without an algebra")))?;
        let d = alg.first().map_or(0, |m| m.nrows());
        dims.insert(u, d);
    }
    let report = check_dynamical_system(base, algebras, unitaries, &dims, &tol);
    if let Some(f) = report.first_failure() {
        return Err(FellError::Precondition(f.witness.clone().unwrap_or_else(|| Witness::new(vec![], f.check.clone()))));
    }
    let fibers = base
        .elements()
        .map(|k| algebras[&base.rng(k)].iter().map(|a| a * &unitaries[k]).collect())
        .collect();
    FellBundle::new(base.clone(), dims, fibers, tol)
}

/// Unitarity, functoriality and invariance of the unit algebras.
pub fn check_dynamical_system(
    base: &FiniteGroupoid,
    algebras: &BTreeMap<Id, Vec<CMat>>,
    unitaries: &[CMat],
    dims: &BTreeMap<Id, usize>,
    tol: &Tol,
) -> ValidationReport {
    let mut rep = ValidationReport::new();
    let mut shape = NumScan::new();
    let mut unitary = NumScan::new();
    let mut functor = NumScan::new();
    let mut invariant = NumScan::new();
    if unitaries.len() != base.len() {
        shape.fail(vec![unitaries.len()], "one unitary per arrow expected");
        rep.push(shape.result("unitary-shape"));
        return rep;
    }
    for k in base.elements() {
        let (r, s) = (dims[&base.rng(k)], dims[&base.src(k)]);
        let u = &unitaries[k];
        let ok = u.shape() == (r, s) && r == s;
        shape.check(tol, if ok { 0.0 } else { f64::INFINITY }, || vec![k], "unitary has the wrong shape");
        if !ok {
            continue;
        }
        unitary.check(tol, tol.residual(&(u.adjoint() * u), &CMat::identity(s, s)), || vec![k], "not unitary");
        if base.is_unit(k) {
            functor.check(tol, tol.residual(u, &CMat::identity(s, s)), || vec![k], "unit not sent to the identity");
        }
        let target = Subspace::new(r, r, algebras[&base.rng(k)].clone());
        for (i, a) in algebras[&base.src(k)].iter().enumerate() {
            let (_, res) = target.coords(&(u * a * u.adjoint()), tol);
            invariant.check(tol, res, || vec![k, i], "Ad U does not map A_s into A_r");
        }
    }
    for (x, y, xy) in base.products() {
        let (ux, uy, uxy) = (&unitaries[x], &unitaries[y], &unitaries[xy]);
        if ux.ncols() == uy.nrows() {
            functor.check(tol, tol.residual(&(ux * uy), uxy), || vec![x, y], "U_xy != U_x U_y");
        }
    }
    rep.push(shape.result("unitary-shape"));
    rep.push(unitary.result("unitary"));
    rep.push(functor.result("unitary-functor"));
    rep.push(invariant.result("algebra-invariant"));
    rep
}

/// Closure and involution checks on basis tuples, plus numeric spot checks
/// of the norm axioms. Saturation is reported by [`saturation`].
pub fn validate_fell(b: &FellBundle) -> ValidationReport {
    let tol = b.tol;
    let mut rep = ValidationReport::new();
    let n = b.base.len();
    let pairs = b.pairs();

    let shape = par_num_scan(n, |x| {
        let mut s = NumScan::new();
        let ok = b.fibers[x].independent(&tol);
        s.check(&tol, if ok { 0.0 } else { f64::INFINITY }, || vec![x], "basis is linearly dependent");
        s
    });
    rep.push(shape.result("fiber-basis"));

    // F1, F7 on composable basis pairs.
    let [f1, f7] = par_num_scan_many(pairs.len(), |p| {
        let (x, y, xy) = pairs[p];
        let mut s1 = NumScan::new();
        let mut s7 = NumScan::new();
        for (i, bi) in b.basis(x).iter().enumerate() {
            for (j, cj) in b.basis(y).iter().enumerate() {
                let prod = bi * cj;
                let (_, r) = b.fibers[xy].coords(&prod, &tol);
                s1.check(&tol, r, || vec![x, y, i, j], "product leaves the fiber over xy");
                s7.check(&tol, tol.residual(&prod.adjoint(), &(cj.adjoint() * bi.adjoint())), || vec![x, y, i, j], "(bc)* != c*b*");
            }
        }
        [s1, s7]
    });
    rep.push(f1.result("F1"));
    rep.push(CheckResult::auto("F2"));

    // F3 spot check on the first composable triples.
    let mut f3 = NumScan::new();
    'outer: for &(x, y, _) in &pairs {
        for &z in b.base.arrows_to(b.base.src(y)) {
            for bi in b.basis(x) {
                for cj in b.basis(y) {
                    for dk in b.basis(z) {
                        let l = (bi * cj) * dk;
                        let r = bi * (cj * dk);
                        f3.check(&tol, tol.residual(&l, &r), || vec![x, y, z], "(bc)d != b(cd)");
                    }
                }
            }
            if f3.scan.count >= 4096 {
                break 'outer;
            }
        }
    }
    rep.push(f3.result("F3"));

    let f4 = par_num_scan(pairs.len(), |p| {
        let (x, y, _) = pairs[p];
        let mut s = NumScan::new();
        for (i, bi) in b.basis(x).iter().enumerate() {
            let nb = op_norm(bi);
            for (j, cj) in b.basis(y).iter().enumerate() {
                let lhs = op_norm(&(bi * cj));
                let rhs = nb * op_norm(cj);
                let r = if lhs <= rhs + tol.abs { 0.0 } else { (lhs - rhs) / lhs };
                s.check(&tol, r, || vec![x, y, i, j], "|bc| > |b||c|");
            }
        }
        s
    });
    rep.push(f4.result("F4"));

    let [f5, f8, f9, f10] = par_num_scan_many(n, |x| {
        let mut s5 = NumScan::new();
        let mut s8 = NumScan::new();
        let mut s9 = NumScan::new();
        let mut s10 = NumScan::new();
        let xi = b.base.inv(x);
        for (i, bi) in b.basis(x).iter().enumerate() {
            let star = bi.adjoint();
            let (_, r) = b.fibers[xi].coords(&star, &tol);
            s5.check(&tol, r, || vec![x, i], "adjoint leaves the fiber over the inverse");
            s8.check(&tol, tol.residual(&star.adjoint(), bi), || vec![x, i], "b** != b");
            let bb = &star * bi;
            let nb = op_norm(bi);
            let one = |v: f64| CMat::from_element(1, 1, c(v, 0.0));
            s9.check(&tol, tol.residual(&one(op_norm(&bb)), &one(nb * nb)), || vec![x, i], "|b*b| != |b|^2");
            s9.check(&tol, tol.residual(&one(op_norm(&star)), &one(nb)), || vec![x, i], "|b*| != |b|");
            let m = min_hermitian_eigenvalue(&bb);
            let r = if m >= -tol.rel * nb * nb - tol.abs { 0.0 } else { -m / (nb * nb) };
            s10.check(&tol, r, || vec![x, i], "b*b is not positive");
        }
        [s5, s8, s9, s10]
    });
    rep.push(f5.result("F5"));
    rep.push(CheckResult::auto("F6"));
    rep.push(f7.result("F7"));
    rep.push(f8.result("F8"));
    rep.push(f9.result("F9"));
    rep.push(f10.result("F10"));
    rep
}

/// `span(S_x S_y) = S_xy` for every composable pair.
pub fn saturation(b: &FellBundle) -> CheckResult {
    let tol = b.tol;
    let pairs = b.pairs();
    let s = par_num_scan(pairs.len(), |p| {
        let (x, y, xy) = pairs[p];
        let mut s = NumScan::new();
        let vs: Vec<CVec> = b
            .basis(x)
            .iter()
            .flat_map(|bi| b.basis(y).iter().map(move |cj| vec_of(&(bi * cj))))
            .collect();
        let fiber = &b.fibers[xy];
        let len = fiber.rows * fiber.cols;
        let got = if vs.is_empty() { 0 } else { rank(&super::linalg::stack(&vs, len), &tol) };
        let ok = got == fiber.dim();
        s.check(&tol, if ok { 0.0 } else { f64::INFINITY }, || vec![x, y], "products do not span the fiber over xy");
        s
    });
    s.result("saturated")
}
