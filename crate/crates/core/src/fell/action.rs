//! Self-similar actions of groupoids on Fell bundles.

use std::collections::HashMap;

use super::coord::CoordBundle;
use super::linalg::{c, combine, par_num_scan, unit_vec, CMat, CVec, NumScan};
use super::matrix::FellBundle;
use super::FellError;
use crate::report::{ValidationReport, Witness};
use crate::ssa::{LeftAction, RightAction};
use crate::Id;

/// `h ⥅_B -` as one matrix per `(h, x)` in the action domain, from
/// coordinates over `x` to coordinates over `h⥅x`.
#[derive(Debug, Clone)]
pub struct FellLeftAction {
    pub action: LeftAction,
    pub bundle: CoordBundle,
    pub maps: HashMap<(Id, Id), CMat>,
}

/// `- ⋊_B t` per `(x, t)`, from coordinates over `x` to coordinates over `x⋊t`.
#[derive(Debug, Clone)]
pub struct FellRightAction {
    pub action: RightAction,
    pub bundle: CoordBundle,
    pub maps: HashMap<(Id, Id), CMat>,
}

fn same_base(bundle: &CoordBundle, x: &crate::FiniteGroupoid) -> Result<(), FellError> {
    if bundle.base != *x {
        return Err(FellError::Shape(Witness::new(vec![], "bundle and action live over different groupoids")));
    }
    Ok(())
}

/// Coordinates of `f(b_i)` in the target fiber, one column per basis element.
fn project(b: &FellBundle, x: Id, y: Id, f: &dyn Fn(&CMat) -> CMat, ids: Vec<Id>) -> Result<CMat, FellError> {
    let target = b.fiber(y);
    let mut cols = Vec::with_capacity(b.fiber(x).dim());
    for m in b.basis(x) {
        let (v, r) = target.coords(&f(m), &b.tol);
        if !b.tol.ok(r) {
            return Err(FellError::Closure(Witness::new(ids, "image leaves the target fiber")));
        }
        cols.push(v);
    }
    Ok(super::linalg::stack(&cols, target.dim()))
}

impl FellLeftAction {
    pub fn new(action: LeftAction, bundle: CoordBundle, maps: HashMap<(Id, Id), CMat>) -> Result<Self, FellError> {
        same_base(&bundle, &action.x)?;
        Ok(FellLeftAction { action, bundle, maps })
    }

    /// Every `h⥅_B -` is the identity in coordinates; fibers along an orbit
    /// must have equal dimension.
    pub fn identity(action: LeftAction, bundle: CoordBundle) -> Result<Self, FellError> {
        same_base(&bundle, &action.x)?;
        let mut maps = HashMap::new();
        for (h, x) in action.domain() {
            let y = action.act(h, x).expect("in domain");
            if bundle.fdim[y] != bundle.fdim[x] {
                return Err(FellError::Shape(Witness::new(vec![h, x], "fiber dimensions differ along an orbit")));
            }
            maps.insert((h, x), CMat::identity(bundle.fdim[x], bundle.fdim[x]));
        }
        Ok(FellLeftAction { action, bundle, maps })
    }

    /// Maps given on matrices: `f(h, x, b)` must land in the fiber over `h⥅x`.
    pub fn from_matrix(action: LeftAction, b: &FellBundle, f: impl Fn(Id, Id, &CMat) -> CMat) -> Result<Self, FellError> {
        let bundle = CoordBundle::from_matrix(b)?;
        same_base(&bundle, &action.x)?;
        let mut maps = HashMap::new();
        for (h, x) in action.domain() {
            let y = action.act(h, x).expect("in domain");
            maps.insert((h, x), project(b, x, y, &|m| f(h, x, m), vec![h, x])?);
        }
        Ok(FellLeftAction { action, bundle, maps })
    }

    pub fn map(&self, h: Id, x: Id) -> &CMat {
        &self.maps[&(h, x)]
    }

    pub fn apply(&self, h: Id, x: Id, b: &CVec) -> CVec {
        &self.maps[&(h, x)] * b
    }
}

impl FellRightAction {
    pub fn new(action: RightAction, bundle: CoordBundle, maps: HashMap<(Id, Id), CMat>) -> Result<Self, FellError> {
        same_base(&bundle, &action.x)?;
        Ok(FellRightAction { action, bundle, maps })
    }

    pub fn identity(action: RightAction, bundle: CoordBundle) -> Result<Self, FellError> {
        same_base(&bundle, &action.x)?;
        let mut maps = HashMap::new();
        for (x, t) in action.domain() {
            let y = action.act(x, t).expect("in domain");
            if bundle.fdim[y] != bundle.fdim[x] {
                return Err(FellError::Shape(Witness::new(vec![x, t], "fiber dimensions differ along an orbit")));
            }
            maps.insert((x, t), CMat::identity(bundle.fdim[x], bundle.fdim[x]));
        }
        Ok(FellRightAction { action, bundle, maps })
    }

    pub fn from_matrix(action: RightAction, b: &FellBundle, f: impl Fn(Id, Id, &CMat) -> CMat) -> Result<Self, FellError> {
        let bundle = CoordBundle::from_matrix(b)?;
        same_base(&bundle, &action.x)?;
        let mut maps = HashMap::new();
        for (x, t) in action.domain() {
            let y = action.act(x, t).expect("in domain");
            maps.insert((x, t), project(b, x, y, &|m| f(x, t, m), vec![x, t])?);
        }
        Ok(FellRightAction { action, bundle, maps })
    }

    pub fn map(&self, x: Id, t: Id) -> &CMat {
        &self.maps[&(x, t)]
    }

    pub fn apply(&self, x: Id, t: Id, b: &CVec) -> CVec {
        &self.maps[&(x, t)] * b
    }
}

/// Test vectors for the isometry sweep: the basis and two dense combinations.
fn probes(k: usize) -> Vec<CVec> {
    let mut v: Vec<CVec> = (0..k).map(|i| unit_vec(k, i)).collect();
    if k > 1 {
        v.push(CVec::from_fn(k, |i, _| c(1.0, 0.0) * (1.0 + i as f64)));
        v.push(CVec::from_fn(k, |i, _| { let th = 0.7 * i as f64 + 0.3; c(th.cos(), th.sin()) }));
    }
    v
}

fn shape_scan(maps: &HashMap<(Id, Id), CMat>, dom: Vec<(Id, Id, Id, Id)>, b: &CoordBundle) -> NumScan {
    let mut s = NumScan::new();
    let tol = b.tol;
    for (k1, k2, x, y) in dom {
        let ok = maps.get(&(k1, k2)).is_some_and(|m| m.shape() == (b.fdim[y], b.fdim[x]));
        s.check(&tol, if ok { 0.0 } else { f64::INFINITY }, || vec![k1, k2], "map missing or of the wrong shape");
    }
    s
}

/// B1–B5 and isometry on basis elements.
pub fn check_fell_left_action(a: &FellLeftAction) -> ValidationReport {
    let (l, b) = (&a.action, &a.bundle);
    let tol = b.tol;
    let (h, x) = (&l.h, &l.x);
    let mut rep = ValidationReport::new();

    let dom: Vec<(Id, Id, Id, Id)> = l.domain().map(|(hh, xx)| (hh, xx, xx, l.act(hh, xx).unwrap())).collect();
    let b1 = shape_scan(&a.maps, dom, b);
    let b1_ok = !b1.scan.failed();
    rep.push(b1.result("B1"));
    if !b1_ok {
        return rep;
    }
    let t = |hh: Id, xx: Id| &a.maps[&(hh, xx)];

    let hp = h.products();
    let b2 = par_num_scan(hp.len(), |p| {
        let (k, hh, kh) = hp[p];
        let mut s = NumScan::new();
        for xx in x.elements().filter(|&xx| l.in_domain(hh, xx)) {
            let hx = l.act(hh, xx).unwrap();
            if !l.in_domain(k, hx) {
                s.fail(vec![k, hh, xx], "k>(h>x) undefined");
                continue;
            }
            s.check(&tol, tol.residual(&(t(k, hx) * t(hh, xx)), t(kh, xx)), || vec![k, hh, xx], "k>(h>b) != (kh)>b");
        }
        s
    });
    rep.push(b2.result("B2"));

    let mut b3 = NumScan::new();
    for &u in h.units() {
        for xx in x.elements().filter(|&xx| l.in_domain(u, xx)) {
            let id = CMat::identity(b.fdim[xx], b.fdim[xx]);
            b3.check(&tol, tol.residual(t(u, xx), &id), || vec![u, xx], "unit does not act as the identity");
        }
    }
    rep.push(b3.result("B3"));

    let xp = x.products();
    let b4 = par_num_scan(xp.len(), |p| {
        let (x1, y1, xy) = xp[p];
        let mut s = NumScan::new();
        for hh in h.elements().filter(|&hh| l.in_domain(hh, xy)) {
            let (Some(hx), Some(k)) = (l.act(hh, x1), l.restr(hh, x1)) else {
                s.fail(vec![hh, x1, y1], "h>x undefined");
                continue;
            };
            let Some(ky) = l.act(k, y1) else {
                s.fail(vec![hh, x1, y1], "(h<x)>y undefined");
                continue;
            };
            let Some(mul) = b.mul.get(&(hx, ky)) else {
                s.fail(vec![hh, x1, y1], "(h>x)((h<x)>y) undefined");
                continue;
            };
            let hxy = l.act(hh, xy).unwrap();
            for i in 0..b.fdim[x1] {
                let lhs = t(hh, xy) * &b.mul[&(x1, y1)][i];
                let coeffs = t(hh, x1) * unit_vec(b.fdim[x1], i);
                let rhs = combine(&coeffs, mul, b.fdim[hxy], b.fdim[ky]) * t(k, y1);
                s.check(&tol, tol.residual(&lhs, &rhs), || vec![hh, x1, y1, i], "h>(bc) != (h>b)((h<b)>c)");
            }
        }
        s
    });
    rep.push(b4.result("B4"));

    let dom: Vec<(Id, Id)> = l.domain().collect();
    let b5 = par_num_scan(dom.len(), |p| {
        let (hh, xx) = dom[p];
        let mut s = NumScan::new();
        let (hx, k, xi) = (l.act(hh, xx).unwrap(), l.restr(hh, xx).unwrap(), x.inv(xx));
        if !l.in_domain(k, xi) {
            s.fail(vec![hh, xx], "(h<x)>x⁻¹ undefined");
            return s;
        }
        let lhs = &b.star[hx] * t(hh, xx).conjugate();
        let rhs = t(k, xi) * &b.star[xx];
        s.check(&tol, tol.residual(&lhs, &rhs), || vec![hh, xx], "(h>b)* != (h<b)>b*");
        s
    });
    rep.push(b5.result("B5"));

    let iso = par_num_scan(dom.len(), |p| {
        let (hh, xx) = dom[p];
        let mut s = NumScan::new();
        let hx = l.act(hh, xx).unwrap();
        for v in probes(b.fdim[xx]) {
            let one = |z: f64| CMat::from_element(1, 1, c(z, 0.0));
            let r = tol.residual(&one(b.norm(hx, &(t(hh, xx) * &v))), &one(b.norm(xx, &v)));
            s.check(&tol, r, || vec![hh, xx], "h>- is not isometric");
        }
        s
    });
    rep.push(iso.result("isometry"));
    rep
}

/// Right-handed mirror of [`check_fell_left_action`].
pub fn check_fell_right_action(a: &FellRightAction) -> ValidationReport {
    let (r, b) = (&a.action, &a.bundle);
    let tol = b.tol;
    let (g, x) = (&r.g, &r.x);
    let mut rep = ValidationReport::new();

    let dom: Vec<(Id, Id, Id, Id)> = r.domain().map(|(xx, tt)| (xx, tt, xx, r.act(xx, tt).unwrap())).collect();
    let b1 = shape_scan(&a.maps, dom, b);
    let b1_ok = !b1.scan.failed();
    rep.push(b1.result("B1"));
    if !b1_ok {
        return rep;
    }
    let t = |xx: Id, tt: Id| &a.maps[&(xx, tt)];

    let gp = g.products();
    let b2 = par_num_scan(gp.len(), |p| {
        let (s1, t1, st) = gp[p];
        let mut s = NumScan::new();
        for xx in x.elements().filter(|&xx| r.in_domain(xx, s1)) {
            let xs = r.act(xx, s1).unwrap();
            if !r.in_domain(xs, t1) {
                s.fail(vec![xx, s1, t1], "(x<s)<t undefined");
                continue;
            }
            s.check(&tol, tol.residual(&(t(xs, t1) * t(xx, s1)), t(xx, st)), || vec![xx, s1, t1], "(b<s)<t != b<(st)");
        }
        s
    });
    rep.push(b2.result("B2"));

    let mut b3 = NumScan::new();
    for &u in g.units() {
        for xx in x.elements().filter(|&xx| r.in_domain(xx, u)) {
            let id = CMat::identity(b.fdim[xx], b.fdim[xx]);
            b3.check(&tol, tol.residual(t(xx, u), &id), || vec![xx, u], "unit does not act as the identity");
        }
    }
    rep.push(b3.result("B3"));

    let xp = x.products();
    let b4 = par_num_scan(xp.len(), |p| {
        let (x1, y1, xy) = xp[p];
        let mut s = NumScan::new();
        for tt in g.elements().filter(|&tt| r.in_domain(xy, tt)) {
            let (Some(yt), Some(k)) = (r.act(y1, tt), r.restr(y1, tt)) else {
                s.fail(vec![x1, y1, tt], "y<t undefined");
                continue;
            };
            let Some(xk) = r.act(x1, k) else {
                s.fail(vec![x1, y1, tt], "x<(y>t) undefined");
                continue;
            };
            let Some(mul) = b.mul.get(&(xk, yt)) else {
                s.fail(vec![x1, y1, tt], "(x<(y>t))(y<t) undefined");
                continue;
            };
            let xyt = r.act(xy, tt).unwrap();
            for i in 0..b.fdim[x1] {
                let lhs = t(xy, tt) * &b.mul[&(x1, y1)][i];
                let coeffs = t(x1, k) * unit_vec(b.fdim[x1], i);
                let rhs = combine(&coeffs, mul, b.fdim[xyt], b.fdim[yt]) * t(y1, tt);
                s.check(&tol, tol.residual(&lhs, &rhs), || vec![x1, y1, tt, i], "(bc)<t != (b<(c>t))(c<t)");
            }
        }
        s
    });
    rep.push(b4.result("B4"));

    let dom: Vec<(Id, Id)> = r.domain().collect();
    let b5 = par_num_scan(dom.len(), |p| {
        let (xx, tt) = dom[p];
        let mut s = NumScan::new();
        let (xt, k, xi) = (r.act(xx, tt).unwrap(), r.restr(xx, tt).unwrap(), x.inv(xx));
        if !r.in_domain(xi, k) {
            s.fail(vec![xx, tt], "x⁻¹<(x>t) undefined");
            return s;
        }
        let lhs = &b.star[xt] * t(xx, tt).conjugate();
        let rhs = t(xi, k) * &b.star[xx];
        s.check(&tol, tol.residual(&lhs, &rhs), || vec![xx, tt], "(b<t)* != b*<(b>t)");
        s
    });
    rep.push(b5.result("B5"));

    let iso = par_num_scan(dom.len(), |p| {
        let (xx, tt) = dom[p];
        let mut s = NumScan::new();
        let xt = r.act(xx, tt).unwrap();
        for v in probes(b.fdim[xx]) {
            let one = |z: f64| CMat::from_element(1, 1, c(z, 0.0));
            let res = tol.residual(&one(b.norm(xt, &(t(xx, tt) * &v))), &one(b.norm(xx, &v)));
            s.check(&tol, res, || vec![xx, tt], "-<t is not isometric");
        }
        s
    });
    rep.push(iso.result("isometry"));
    rep
}
