//! The bundle `B` as an equivalence between `(B/G)⋈H` and `G⋈(H\B)`.

use std::collections::HashMap;

use super::action::{check_fell_left_action, check_fell_right_action, FellLeftAction, FellRightAction};
use super::coord::{saturation_coords, validate_coords, CoordBundle};
use super::linalg::{c, combine, min_hermitian_eigenvalue, op_norm, par_num_scan, rank, stack, unit_vec, CMat, CVec, NumScan, Tol};
use super::product::{product_bundle_left, product_bundle_right, quotient_bundle_left, quotient_bundle_right, ProductBundle, QuotientBundle};
use super::FellError;
use crate::equiv::EquivalenceWitness;
use crate::report::{CheckResult, ValidationReport, Witness};
use crate::Id;

/// A para-equivalence with compatible actions on a bundle over it.
#[derive(Debug, Clone)]
pub struct FellSetting {
    pub equiv: EquivalenceWitness,
    /// `H` on `B`.
    pub left: FellLeftAction,
    /// `G` on `B`.
    pub right: FellRightAction,
}

impl FellSetting {
    pub fn new(equiv: EquivalenceWitness, left: FellLeftAction, right: FellRightAction) -> Result<Self, FellError> {
        if left.action != equiv.para.left || right.action != equiv.para.right {
            return Err(FellError::Shape(Witness::new(vec![], "bundle actions do not extend the groupoid actions")));
        }
        if left.bundle.base != right.bundle.base {
            return Err(FellError::Shape(Witness::new(vec![], "left and right actions are on different bundles")));
        }
        Ok(FellSetting { equiv, left, right })
    }

    pub fn bundle(&self) -> &CoordBundle {
        &self.left.bundle
    }
}

/// BC1 on basis elements; BC2 and BC3 at the level of arrows.
pub fn check_bc(left: &FellLeftAction, right: &FellRightAction) -> ValidationReport {
    let (l, r) = (&left.action, &right.action);
    let tol = left.bundle.tol;
    let dom: Vec<(Id, Id)> = l.domain().collect();
    let mut scans = [NumScan::new(), NumScan::new(), NumScan::new()];
    for &(h, x) in &dom {
        let hx = l.act(h, x).unwrap();
        for t in r.g.elements().filter(|&t| r.in_domain(hx, t)) {
            let Some(xt) = r.act(x, t) else {
                scans[0].fail(vec![h, x, t], "x<t undefined");
                continue;
            };
            if !l.in_domain(h, xt) {
                scans[0].fail(vec![h, x, t], "h>(x<t) undefined");
                continue;
            }
            let lhs = right.map(hx, t) * left.map(h, x);
            let rhs = left.map(h, xt) * right.map(x, t);
            scans[0].check(&tol, tol.residual(&lhs, &rhs), || vec![h, x, t], "(h>b)<t != h>(b<t)");
            let ok2 = r.restr(hx, t) == r.restr(x, t);
            scans[1].check(&tol, if ok2 { 0.0 } else { f64::INFINITY }, || vec![h, x, t], "(h>b)>t != b>t");
            let ok3 = l.restr(h, xt) == l.restr(h, x);
            scans[2].check(&tol, if ok3 { 0.0 } else { f64::INFINITY }, || vec![h, x, t], "h<(b<t) != h<b");
        }
    }
    let [s1, s2, s3] = scans;
    let mut rep = ValidationReport::new();
    rep.push(s1.result("BC1"));
    rep.push(s2.result("BC2"));
    rep.push(s3.result("BC3"));
    rep
}

/// Every hypothesis of the imprimitivity construction on the bundle side.
pub fn certify_fell_setting(s: &FellSetting) -> ValidationReport {
    let mut rep = ValidationReport::new();
    rep.extend(prefixed("left.", check_fell_left_action(&s.left)));
    rep.extend(prefixed("right.", check_fell_right_action(&s.right)));
    rep.extend(check_bc(&s.left, &s.right));
    rep.push(saturation_coords(s.bundle()));
    rep
}

fn prefixed(p: &str, rep: ValidationReport) -> ValidationReport {
    let mut out = ValidationReport::new();
    for mut cr in rep.checks {
        cr.check = format!("{p}{}", cr.check);
        out.push(cr);
    }
    out
}

/// `H\B` with its right `G`-action and `B/G` with its left `H`-action.
#[derive(Debug, Clone)]
pub struct QuotientActions {
    pub hb: QuotientBundle,
    pub bg: QuotientBundle,
    /// `Ξ ⋊~ s = H⥅[b⋊s]`.
    pub on_hb: FellRightAction,
    /// `h ⥅~ Ξ = [h⥅b]⋊G`.
    pub on_bg: FellLeftAction,
}

pub fn quotient_fell_actions(s: &FellSetting) -> Result<QuotientActions, FellError> {
    let bc = check_bc(&s.left, &s.right);
    if !bc.is_ok() {
        return Err(FellError::Assumption(bc));
    }
    let (l, r) = (&s.left.action, &s.right.action);
    let hb = quotient_bundle_left(&s.left)?;
    let bg = quotient_bundle_right(&s.right)?;

    let qr = &s.equiv.qr.action;
    let mut maps = HashMap::new();
    for (xi, t) in qr.domain() {
        let rep = hb.orbit.rep(xi);
        let y = r.act(rep, t).ok_or_else(|| FellError::Shape(Witness::new(vec![xi, t], "rep<t undefined")))?;
        if Some(hb.class_of(y)) != qr.act(xi, t) {
            return Err(FellError::Shape(Witness::new(vec![xi, t], "bundle and groupoid quotients disagree")));
        }
        maps.insert((xi, t), s.left.map(hb.to_rep[y], y) * s.right.map(rep, t));
    }
    let on_hb = FellRightAction::new(qr.clone(), hb.bundle.clone(), maps)?;

    let ql = &s.equiv.ql.action;
    let mut maps = HashMap::new();
    for (h, xi) in ql.domain() {
        let rep = bg.orbit.rep(xi);
        let y = l.act(h, rep).ok_or_else(|| FellError::Shape(Witness::new(vec![h, xi], "h>rep undefined")))?;
        if Some(bg.class_of(y)) != ql.act(h, xi) {
            return Err(FellError::Shape(Witness::new(vec![h, xi], "bundle and groupoid quotients disagree")));
        }
        maps.insert((h, xi), s.right.map(y, bg.to_rep[y]) * s.left.map(h, rep));
    }
    let on_bg = FellLeftAction::new(ql.clone(), bg.bundle.clone(), maps)?;
    Ok(QuotientActions { hb, bg, on_hb, on_bg })
}

/// Sesquilinear inner product on basis pairs: `(target arrow, V)` with
/// `V[i][j]` the value on the `i`-th and `j`-th basis elements.
pub type InnerTable = HashMap<(Id, Id), (Id, Vec<Vec<CVec>>)>;
/// Module action on basis elements: `(target arrow, L)` with `L[i]` the
/// matrix of the `i`-th basis element of the acting fiber.
pub type ActionTable = HashMap<(Id, Id), (Id, Vec<CMat>)>;

#[derive(Debug, Clone)]
pub struct BimoduleWitness {
    pub setting: FellSetting,
    pub quot: QuotientActions,
    /// `𝒜 = (B/G)⋈H` over `equiv.a_gpd`.
    pub a_bundle: ProductBundle,
    /// `𝒞 = G⋈(H\B)` over `equiv.c_gpd`.
    pub c_bundle: ProductBundle,
    /// `(a, x) ↦ a·b`.
    pub left_mod: ActionTable,
    /// `(x, c) ↦ b·c`.
    pub right_mod: ActionTable,
    /// `⟨·,·⟩_𝒜` on `(x1, x2)` with `𝔰(x1) = 𝔰(x2)`; linear in the first slot.
    pub lip: InnerTable,
    /// `⟨·,·⟩_𝒞` on `(x1, x2)` with `𝔯(x1) = 𝔯(x2)`; linear in the second slot.
    pub rip: InnerTable,
}

impl BimoduleWitness {
    pub fn a(&self) -> &CoordBundle {
        &self.a_bundle.bundle
    }

    pub fn c(&self) -> &CoordBundle {
        &self.c_bundle.bundle
    }

    pub fn b(&self) -> &CoordBundle {
        self.setting.bundle()
    }

    pub fn lip_eval(&self, x1: Id, x2: Id, m1: &CVec, m2: &CVec) -> Option<(Id, CVec)> {
        let (a, v) = self.lip.get(&(x1, x2))?;
        let mut out = CVec::zeros(self.a().fdim[*a]);
        for (i, row) in v.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                out += e * (m1[i] * m2[j].conj());
            }
        }
        Some((*a, out))
    }

    pub fn rip_eval(&self, x1: Id, x2: Id, m1: &CVec, m2: &CVec) -> Option<(Id, CVec)> {
        let (cc, v) = self.rip.get(&(x1, x2))?;
        let mut out = CVec::zeros(self.c().fdim[*cc]);
        for (i, row) in v.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                out += e * (m1[i].conj() * m2[j]);
            }
        }
        Some((*cc, out))
    }

    /// `a·m` as a matrix on coordinates over `y`, for `a` given by coordinates.
    fn left_op(&self, a: Id, y: Id, coeffs: &CVec) -> Option<(Id, CMat)> {
        let (z, ls) = self.left_mod.get(&(a, y))?;
        Some((*z, combine(coeffs, ls, self.b().fdim[*z], self.b().fdim[y])))
    }

    fn right_op(&self, y: Id, cc: Id, coeffs: &CVec) -> Option<(Id, CMat)> {
        let (z, rs) = self.right_mod.get(&(y, cc))?;
        Some((*z, combine(coeffs, rs, self.b().fdim[*z], self.b().fdim[y])))
    }
}

/// Builds the two product bundles, both module actions and both inner
/// products from the closed formulas, after certifying every hypothesis.
pub fn build_bimodule(setting: FellSetting) -> Result<BimoduleWitness, FellError> {
    let cert = certify_fell_setting(&setting);
    if !cert.is_ok() {
        return Err(FellError::Assumption(cert));
    }
    let quot = quotient_fell_actions(&setting)?;
    let a_bundle = product_bundle_left(&quot.on_bg)?;
    let c_bundle = product_bundle_right(&quot.on_hb)?;
    let eq = &setting.equiv;
    if a_bundle.product.pairs != eq.a_gpd.pairs || c_bundle.product.pairs != eq.c_gpd.pairs {
        return Err(FellError::Shape(Witness::new(vec![], "product bundles and product groupoids disagree")));
    }
    let (l, r) = (&setting.left.action, &setting.right.action);
    let (tl, tr) = (&setting.left, &setting.right);
    let b = setting.bundle();
    let x = eq.x();
    let (bg, hb) = (&quot.bg, &quot.hb);

    let mut left_mod = HashMap::new();
    for (&(a, y), &z) in &eq.left_act {
        let (xi, h) = eq.a_gpd.pairs[a];
        let hy = l.act(h, y).expect("in the action domain");
        let xp = *bg.orbit.members[xi]
            .iter()
            .find(|&&m| x.src(m) == x.rng(hy))
            .ok_or_else(|| FellError::Shape(Witness::new(vec![a, y], "no member with s(x) = r(h>y)")))?;
        if x.mul(xp, hy) != Some(z) {
            return Err(FellError::Shape(Witness::new(vec![a, y], "module action disagrees with the groupoid action")));
        }
        let transport = tr.map(bg.orbit.rep(xi), r.g.inv(bg.to_rep[xp]));
        let k = transport.ncols();
        let ls = (0..k)
            .map(|i| combine(&(transport * unit_vec(k, i)), &b.mul[&(xp, hy)], b.fdim[z], b.fdim[hy]) * tl.map(h, y))
            .collect();
        left_mod.insert((a, y), (z, ls));
    }

    let mut right_mod = HashMap::new();
    for (&(y, cc), &z) in &eq.right_act {
        let (t, eta) = eq.c_gpd.pairs[cc];
        let yt = r.act(y, t).expect("in the action domain");
        let zp = *hb.orbit.members[eta]
            .iter()
            .find(|&&m| x.rng(m) == x.src(yt))
            .ok_or_else(|| FellError::Shape(Witness::new(vec![y, cc], "no member with r(z) = s(y<t)")))?;
        if x.mul(yt, zp) != Some(z) {
            return Err(FellError::Shape(Witness::new(vec![y, cc], "module action disagrees with the groupoid action")));
        }
        let transport = tl.map(l.h.inv(hb.to_rep[zp]), hb.orbit.rep(eta));
        let k = transport.ncols();
        let rs = (0..k)
            .map(|i| {
                let gamma = transport * unit_vec(k, i);
                let cols: Vec<CVec> = b.mul[&(yt, zp)].iter().map(|m| m * &gamma).collect();
                stack(&cols, b.fdim[z]) * tr.map(y, t)
            })
            .collect();
        right_mod.insert((y, cc), (z, rs));
    }

    let mut lip = HashMap::new();
    let mut rip = HashMap::new();
    for x1 in x.elements() {
        for x2 in x.elements() {
            if eq.frak_s[x1] == eq.frak_s[x2] {
                let hs: Vec<Id> = l.h.elements().filter(|&h| l.act(h, x.src(x2)) == Some(x.src(x1))).collect();
                if hs.len() != 1 {
                    return Err(FellError::Uniqueness(Witness::new(vec![x1, x2], "h with s(a) = h>s(b) not unique")));
                }
                let h = hs[0];
                let x2i = x.inv(x2);
                let w = l.act(h, x2i).expect("s(h) = rho(x2⁻¹)");
                let k = l.restr(h, x2i).expect("same domain");
                let z = x.mul(x1, w).expect("r(h>x2⁻¹) = s(x1)");
                let a = eq
                    .a_gpd
                    .id_of((bg.class_of(z), k))
                    .ok_or_else(|| FellError::Shape(Witness::new(vec![x1, x2], "inner product leaves the A groupoid")))?;
                let to = tr.map(z, bg.to_rep[z]);
                let right = tl.map(h, x2i) * &b.star[x2];
                let v = (0..b.fdim[x1])
                    .map(|i| {
                        let m = to * &b.mul[&(x1, w)][i] * &right;
                        (0..b.fdim[x2]).map(|j| m.column(j).into_owned()).collect()
                    })
                    .collect();
                lip.insert((x1, x2), (a, v));
            }
            if eq.frak_r[x1] == eq.frak_r[x2] {
                let ts: Vec<Id> = r.g.elements().filter(|&t| r.act(x.rng(x1), t) == Some(x.rng(x2))).collect();
                if ts.len() != 1 {
                    return Err(FellError::Uniqueness(Witness::new(vec![x1, x2], "t with r(a)<t = r(b) not unique")));
                }
                let t = ts[0];
                let x1i = x.inv(x1);
                let p = r.act(x1i, t).expect("sigma(x1⁻¹) = r(t)");
                let g = r.restr(x1i, t).expect("same domain");
                let z = x.mul(p, x2).expect("s(x1⁻¹<t) = r(x2)");
                let cc = eq
                    .c_gpd
                    .id_of((g, hb.class_of(z)))
                    .ok_or_else(|| FellError::Shape(Witness::new(vec![x1, x2], "inner product leaves the C groupoid")))?;
                let to = tl.map(hb.to_rep[z], z);
                let left = tr.map(x1i, t) * &b.star[x1];
                let v = (0..b.fdim[x1])
                    .map(|i| {
                        let coeffs = left.column(i).into_owned();
                        let m = to * combine(&coeffs, &b.mul[&(p, x2)], b.fdim[z], b.fdim[x2]);
                        (0..b.fdim[x2]).map(|j| m.column(j).into_owned()).collect()
                    })
                    .collect();
                rip.insert((x1, x2), (cc, v));
            }
        }
    }
    Ok(BimoduleWitness { setting, quot, a_bundle, c_bundle, left_mod, right_mod, lip, rip })
}

/// Collapses a report into one line: pass, or the first failure.
fn summarize(name: &str, rep: &ValidationReport) -> CheckResult {
    let count = rep.checks.iter().map(|c| c.count).sum();
    let res = rep.max_residual();
    match rep.first_failure() {
        None => CheckResult::pass(name, count).with_residual(res),
        Some(f) => {
            let mut w = f.witness.clone().unwrap_or_else(|| Witness::new(vec![], ""));
            w.note = format!("{}: {}", f.check, w.note);
            CheckResult::fail(name, count, w).with_residual(res)
        }
    }
}

fn scalar(z: f64) -> CMat {
    CMat::from_element(1, 1, c(z, 0.0))
}

fn probe_vectors(k: usize) -> Vec<CVec> {
    let mut v: Vec<CVec> = (0..k).map(|i| unit_vec(k, i)).collect();
    if k > 1 {
        v.push(CVec::from_fn(k, |i, _| c(1.0 + i as f64, 0.5)));
        v.push(CVec::from_fn(k, |i, _| {
            let th = 1.1 * i as f64;
            c(th.cos(), th.sin())
        }));
    }
    v
}

fn vcheck(s: &mut NumScan, tol: &Tol, a: &CVec, b: &CVec, ids: impl FnOnce() -> Vec<Id>, note: &str) {
    s.check(tol, tol.residual_vec(a, b), ids, note);
}

/// FE1–FE3 with FE2.a–d, module associativity and norm bounds, and the
/// Fell axioms and saturation of both product bundles.
pub fn verify_bimodule(w: &BimoduleWitness) -> ValidationReport {
    let (ab, cb, bb) = (w.a(), w.c(), w.b());
    let tol = bb.tol;
    let eq = &w.setting.equiv;
    let x = eq.x();
    let n = x.len();
    let mut rep = ValidationReport::new();

    rep.push(summarize("A-fell", &validate_coords(ab)));
    rep.push(saturation_coords(ab).renamed("A-saturated"));
    rep.push(summarize("C-fell", &validate_coords(cb)));
    rep.push(saturation_coords(cb).renamed("C-saturated"));

    // Module associativity: a1·(a2·m) = (a1a2)·m and (m·c1)·c2 = m·(c1c2).
    let ap = ab.base.products();
    let fa2l = par_num_scan(ap.len(), |p| {
        let (a1, a2, a12) = ap[p];
        let mut s = NumScan::new();
        for y in x.elements() {
            let Some((z1, l2)) = w.left_mod.get(&(a2, y)) else { continue };
            let (Some((z2, l1)), Some((z3, _))) = (w.left_mod.get(&(a1, *z1)), w.left_mod.get(&(a12, y))) else {
                s.fail(vec![a1, a2, y], "a1·(a2·m) or (a1a2)·m undefined");
                continue;
            };
            if z2 != z3 {
                s.fail(vec![a1, a2, y], "a1·(a2·m) and (a1a2)·m lie over different arrows");
                continue;
            }
            for (i, m1) in l1.iter().enumerate() {
                for (j, m2) in l2.iter().enumerate() {
                    let coeffs = &ab.mul[&(a1, a2)][i] * unit_vec(ab.fdim[a2], j);
                    let (_, rhs) = w.left_op(a12, y, &coeffs).unwrap();
                    s.check(&tol, tol.residual(&(m1 * m2), &rhs), || vec![a1, a2, y, i, j], "a1·(a2·m) != (a1a2)·m");
                }
            }
        }
        s
    });
    rep.push(fa2l.result("FA2-left"));

    let cp = cb.base.products();
    let fa2r = par_num_scan(cp.len(), |p| {
        let (c1, c2, c12) = cp[p];
        let mut s = NumScan::new();
        for y in x.elements() {
            let Some((z1, r1)) = w.right_mod.get(&(y, c1)) else { continue };
            let (Some((z2, r2)), Some((z3, _))) = (w.right_mod.get(&(*z1, c2)), w.right_mod.get(&(y, c12))) else {
                s.fail(vec![y, c1, c2], "(m·c1)·c2 or m·(c1c2) undefined");
                continue;
            };
            if z2 != z3 {
                s.fail(vec![y, c1, c2], "(m·c1)·c2 and m·(c1c2) lie over different arrows");
                continue;
            }
            for (i, m1) in r1.iter().enumerate() {
                for (j, m2) in r2.iter().enumerate() {
                    let coeffs = &cb.mul[&(c1, c2)][i] * unit_vec(cb.fdim[c2], j);
                    let (_, rhs) = w.right_op(y, c12, &coeffs).unwrap();
                    s.check(&tol, tol.residual(&(m2 * m1), &rhs), || vec![y, c1, c2, i, j], "(m·c1)·c2 != m·(c1c2)");
                }
            }
        }
        s
    });
    rep.push(fa2r.result("FA2-right"));

    let mut fa3 = NumScan::new();
    let mut keys: Vec<_> = w.left_mod.keys().copied().collect();
    keys.sort_unstable();
    for (a, y) in keys {
        let (z, ls) = &w.left_mod[&(a, y)];
        for (i, li) in ls.iter().enumerate() {
            let na = ab.norm(a, &unit_vec(ab.fdim[a], i));
            for v in probe_vectors(bb.fdim[y]) {
                let lhs = bb.norm(*z, &(li * &v));
                let rhs = na * bb.norm(y, &v);
                let r = if lhs <= rhs * (1.0 + tol.rel) + tol.abs { 0.0 } else { (lhs - rhs) / lhs };
                fa3.check(&tol, r, || vec![a, y, i], "|a·m| > |a||m|");
            }
        }
    }
    let mut keys: Vec<_> = w.right_mod.keys().copied().collect();
    keys.sort_unstable();
    for (y, cc) in keys {
        let (z, rs) = &w.right_mod[&(y, cc)];
        for (i, ri) in rs.iter().enumerate() {
            let nc = cb.norm(cc, &unit_vec(cb.fdim[cc], i));
            for v in probe_vectors(bb.fdim[y]) {
                let lhs = bb.norm(*z, &(ri * &v));
                let rhs = nc * bb.norm(y, &v);
                let r = if lhs <= rhs * (1.0 + tol.rel) + tol.abs { 0.0 } else { (lhs - rhs) / lhs };
                fa3.check(&tol, r, || vec![y, cc, i], "|m·c| > |m||c|");
            }
        }
    }
    rep.push(fa3.result("FA3"));

    // FE1: a·(m·c) = (a·m)·c.
    let fe1 = par_num_scan(n, |y| {
        let mut s = NumScan::new();
        for a in ab.base.elements() {
            let Some((ay, la)) = w.left_mod.get(&(a, y)) else { continue };
            for cc in cb.base.elements() {
                let Some((yc, rc)) = w.right_mod.get(&(y, cc)) else { continue };
                let (Some((ayc1, la2)), Some((ayc2, rc2))) = (w.left_mod.get(&(a, *yc)), w.right_mod.get(&(*ay, cc))) else {
                    s.fail(vec![a, y, cc], "one side of a·(m·c) = (a·m)·c undefined");
                    continue;
                };
                if ayc1 != ayc2 {
                    s.fail(vec![a, y, cc], "a·(m·c) and (a·m)·c lie over different arrows");
                    continue;
                }
                for (i, _) in la.iter().enumerate() {
                    for (k, _) in rc.iter().enumerate() {
                        let lhs = &la2[i] * &rc[k];
                        let rhs = &rc2[k] * &la[i];
                        s.check(&tol, tol.residual(&lhs, &rhs), || vec![a, y, cc, i, k], "a·(m·c) != (a·m)·c");
                    }
                }
            }
        }
        s
    });
    rep.push(fe1.result("FE1"));

    // FE2.a: q(m1) = q(<m1,m2>_A)·q(m2) and q(m1)·q(<m1,m2>_C) = q(m2).
    let mut fe2a = NumScan::new();
    let mut lip_keys: Vec<(Id, Id)> = w.lip.keys().copied().collect();
    lip_keys.sort_unstable();
    let mut rip_keys: Vec<(Id, Id)> = w.rip.keys().copied().collect();
    rip_keys.sort_unstable();
    for &(x1, x2) in &lip_keys {
        let a = w.lip[&(x1, x2)].0;
        let ok = eq.left(a, x2) == Some(x1);
        fe2a.check(&tol, if ok { 0.0 } else { f64::INFINITY }, || vec![x1, x2], "q(m1) != q(<m1,m2>_A)·q(m2)");
    }
    for &(x1, x2) in &rip_keys {
        let cc = w.rip[&(x1, x2)].0;
        let ok = eq.right(x1, cc) == Some(x2);
        fe2a.check(&tol, if ok { 0.0 } else { f64::INFINITY }, || vec![x1, x2], "q(m1)·q(<m1,m2>_C) != q(m2)");
    }
    rep.push(fe2a.result("FE2.a"));

    // FE2.b: <m1,m2>* = <m2,m1>.
    let mut fe2b = NumScan::new();
    for &(x1, x2) in &lip_keys {
        let (a, v) = &w.lip[&(x1, x2)];
        let Some((a2, v2)) = w.lip.get(&(x2, x1)) else {
            fe2b.fail(vec![x1, x2], "<m2,m1>_A undefined");
            continue;
        };
        if *a2 != ab.base.inv(*a) {
            fe2b.fail(vec![x1, x2], "<m2,m1>_A not over the inverse arrow");
            continue;
        }
        for (i, row) in v.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                vcheck(&mut fe2b, &tol, &ab.adjoint(*a, e), &v2[j][i], || vec![x1, x2, i, j], "<m1,m2>_A* != <m2,m1>_A");
            }
        }
    }
    for &(x1, x2) in &rip_keys {
        let (cc, v) = &w.rip[&(x1, x2)];
        let Some((c2, v2)) = w.rip.get(&(x2, x1)) else {
            fe2b.fail(vec![x1, x2], "<m2,m1>_C undefined");
            continue;
        };
        if *c2 != cb.base.inv(*cc) {
            fe2b.fail(vec![x1, x2], "<m2,m1>_C not over the inverse arrow");
            continue;
        }
        for (i, row) in v.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                vcheck(&mut fe2b, &tol, &cb.adjoint(*cc, e), &v2[j][i], || vec![x1, x2, i, j], "<m1,m2>_C* != <m2,m1>_C");
            }
        }
    }
    rep.push(fe2b.result("FE2.b"));

    // FE2.c: <a·m1,m2>_A = a<m1,m2>_A and <m1,m2·c>_C = <m1,m2>_C c.
    let fe2c_left = par_num_scan(n, |x1| {
        let mut s = NumScan::new();
        for a in ab.base.elements() {
            let Some((z, la)) = w.left_mod.get(&(a, x1)) else { continue };
            for x2 in x.elements() {
                let Some((b0, v)) = w.lip.get(&(x1, x2)) else { continue };
                let Some((a1, v1)) = w.lip.get(&(*z, x2)) else {
                    s.fail(vec![a, x1, x2], "<a·m1,m2>_A undefined");
                    continue;
                };
                if ab.base.mul(a, *b0) != Some(*a1) {
                    s.fail(vec![a, x1, x2], "<a·m1,m2>_A and a<m1,m2>_A lie over different arrows");
                    continue;
                }
                for (k, lk) in la.iter().enumerate() {
                    for i in 0..bb.fdim[x1] {
                        let am = lk * unit_vec(bb.fdim[x1], i);
                        for j in 0..bb.fdim[x2] {
                            let mut lhs = CVec::zeros(ab.fdim[*a1]);
                            for (l, coef) in am.iter().enumerate() {
                                lhs += &v1[l][j] * *coef;
                            }
                            let rhs = &ab.mul[&(a, *b0)][k] * &v[i][j];
                            vcheck(&mut s, &tol, &lhs, &rhs, || vec![a, x1, x2, k, i, j], "<a·m1,m2>_A != a<m1,m2>_A");
                        }
                    }
                }
            }
        }
        s
    });
    let fe2c_right = par_num_scan(n, |x2| {
        let mut s = NumScan::new();
        for cc in cb.base.elements() {
            let Some((z, rc)) = w.right_mod.get(&(x2, cc)) else { continue };
            for x1 in x.elements() {
                let Some((c0, v)) = w.rip.get(&(x1, x2)) else { continue };
                let Some((c1, v1)) = w.rip.get(&(x1, *z)) else {
                    s.fail(vec![x1, x2, cc], "<m1,m2·c>_C undefined");
                    continue;
                };
                if cb.base.mul(*c0, cc) != Some(*c1) {
                    s.fail(vec![x1, x2, cc], "<m1,m2·c>_C and <m1,m2>_C c lie over different arrows");
                    continue;
                }
                for (k, rk) in rc.iter().enumerate() {
                    for j in 0..bb.fdim[x2] {
                        let mc = rk * unit_vec(bb.fdim[x2], j);
                        for i in 0..bb.fdim[x1] {
                            let mut lhs = CVec::zeros(cb.fdim[*c1]);
                            for (l, coef) in mc.iter().enumerate() {
                                lhs += &v1[i][l] * *coef;
                            }
                            let rhs = combine(&v[i][j], &cb.mul[&(*c0, cc)], cb.fdim[*c1], cb.fdim[cc]) * unit_vec(cb.fdim[cc], k);
                            vcheck(&mut s, &tol, &lhs, &rhs, || vec![x1, x2, cc, k, i, j], "<m1,m2·c>_C != <m1,m2>_C c");
                        }
                    }
                }
            }
        }
        s
    });
    rep.push(fe2c_left.merge(fe2c_right).result("FE2.c"));

    // FE2.d: <m1,m2>_A·m3 = m1·<m2,m3>_C.
    let fe2d = par_num_scan(lip_keys.len(), |p| {
        let (x1, x2) = lip_keys[p];
        let (a, v) = &w.lip[&(x1, x2)];
        let mut s = NumScan::new();
        for x3 in x.elements() {
            let Some((cc, wv)) = w.rip.get(&(x2, x3)) else { continue };
            let (Some((z1, la)), Some((z2, rc))) = (w.left_mod.get(&(*a, x3)), w.right_mod.get(&(x1, *cc))) else {
                s.fail(vec![x1, x2, x3], "one side of <m1,m2>_A·m3 = m1·<m2,m3>_C undefined");
                continue;
            };
            if z1 != z2 {
                s.fail(vec![x1, x2, x3], "<m1,m2>_A·m3 and m1·<m2,m3>_C lie over different arrows");
                continue;
            }
            for i in 0..bb.fdim[x1] {
                for j in 0..bb.fdim[x2] {
                    let lop = combine(&v[i][j], la, bb.fdim[*z1], bb.fdim[x3]);
                    for k in 0..bb.fdim[x3] {
                        let lhs = &lop * unit_vec(bb.fdim[x3], k);
                        let rhs = combine(&wv[j][k], rc, bb.fdim[*z2], bb.fdim[x1]) * unit_vec(bb.fdim[x1], i);
                        vcheck(&mut s, &tol, &lhs, &rhs, || vec![x1, x2, x3, i, j, k], "<m1,m2>_A·m3 != m1·<m2,m3>_C");
                    }
                }
            }
        }
        s
    });
    rep.push(fe2d.result("FE2.d"));

    // FE3: each fiber is an imprimitivity bimodule between the unit fibers.
    let mut full = NumScan::new();
    let mut pos = NumScan::new();
    let mut norms = NumScan::new();
    for xx in x.elements() {
        let (Some((a, v)), Some((cc, wv))) = (w.lip.get(&(xx, xx)), w.rip.get(&(xx, xx))) else {
            full.fail(vec![xx], "inner products on the fiber undefined");
            continue;
        };
        if !ab.base.is_unit(*a) || !cb.base.is_unit(*cc) {
            full.fail(vec![xx], "inner products on a fiber do not land in unit fibers");
            continue;
        }
        let va: Vec<CVec> = v.iter().flatten().cloned().collect();
        let vc: Vec<CVec> = wv.iter().flatten().cloned().collect();
        let ok = rank(&stack(&va, ab.fdim[*a]), &tol) == ab.fdim[*a] && rank(&stack(&vc, cb.fdim[*cc]), &tol) == cb.fdim[*cc];
        full.check(&tol, if ok { 0.0 } else { f64::INFINITY }, || vec![xx], "inner products are not full on the fiber");
        for m in probe_vectors(bb.fdim[xx]) {
            let (_, ia) = w.lip_eval(xx, xx, &m, &m).unwrap();
            let (_, ic) = w.rip_eval(xx, xx, &m, &m).unwrap();
            let (pa, pc) = (ab.rep(*a, &ia), cb.rep(*cc, &ic));
            for pm in [&pa, &pc] {
                let top = op_norm(pm).max(tol.abs);
                let low = min_hermitian_eigenvalue(pm);
                let herm = tol.residual(pm, &pm.adjoint());
                let r = if low >= -tol.rel * top { herm } else { herm.max(-low / top) };
                pos.check(&tol, r, || vec![xx], "<m,m> is not positive");
            }
            norms.check(&tol, tol.residual(&scalar(op_norm(&pa)), &scalar(op_norm(&pc))), || vec![xx], "|<m,m>_A| != |<m,m>_C|");
        }
    }
    rep.push(full.result("FE3.full"));
    rep.push(pos.result("FE3.positive"));
    rep.push(norms.result("FE3.norm"));
    rep
}

impl CheckResult {
    pub fn renamed(mut self, name: &str) -> Self {
        self.check = name.to_string();
        self
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::fell::examples::{s4_line_setting, semidirect_line_setting, CrossedProductSystem};

    fn assert_all(w: &BimoduleWitness) {
        let rep = verify_bimodule(w);
        assert!(rep.is_ok(), "{rep}");
        assert!(rep.max_residual() <= 1e-9);
    }

    #[test]
    fn semidirect_line_bundle_is_an_equivalence() {
        let w = build_bimodule(semidirect_line_setting().unwrap()).unwrap();
        assert_all(&w);
    }

    #[test]
    fn crossed_product_is_an_equivalence() {
        let w = build_bimodule(CrossedProductSystem::new().unwrap().setting().unwrap()).unwrap();
        assert_all(&w);
    }

    #[test]
    fn s4_line_bundle_is_an_equivalence() {
        let w = build_bimodule(s4_line_setting().unwrap()).unwrap();
        assert_all(&w);
    }

    #[test]
    fn corrupted_inner_product_is_caught() {
        let mut w = build_bimodule(semidirect_line_setting().unwrap()).unwrap();
        let key = *w.lip.keys().min().unwrap();
        w.lip.get_mut(&key).unwrap().1[0][0] *= c(2.0, 0.0);
        let rep = verify_bimodule(&w);
        assert!(!rep.get("FE2.d").unwrap().is_ok());
    }

    #[test]
    fn broken_compatibility_is_caught() {
        let mut s = semidirect_line_setting().unwrap();
        let key = *s.left.maps.keys().min().unwrap();
        s.left.maps.get_mut(&key).unwrap()[(0, 0)] = c(-1.0, 0.0);
        let rep = certify_fell_setting(&s);
        assert!(!rep.is_ok());
        assert!(matches!(build_bimodule(s), Err(FellError::Assumption(_))));
    }
}
