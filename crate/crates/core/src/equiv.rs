//! `X` as an equivalence between `(X/G)⋈H` and `G⋈(H\X)`.

use std::collections::HashMap;

use crate::algebra::UnionFind;
use crate::construct::{
    quotient_left_action, quotient_right_action, zs_product_left, zs_product_right, ProductGroupoid, QuotientError,
    QuotientLeft, QuotientRight,
};
use crate::groupoid::{FiniteGroupoid, StructureError};
use crate::report::{par_scan_many, CheckResult, Scan, ValidationReport, Witness};
use crate::ssa::{certify_para_equivalence, CertifyError, LeftAction, ParaEquivalence, RightAction};
use crate::Id;

#[derive(Debug, Clone)]
pub struct EquivalenceWitness {
    pub para: ParaEquivalence,
    /// `H` on `X/G`.
    pub ql: QuotientLeft,
    /// `G` on `H\X`.
    pub qr: QuotientRight,
    /// `(X/G)⋈H`, pairs `(ξ,h)` with `ξ` a class id of `ql.orbit`.
    pub a_gpd: ProductGroupoid,
    /// `G⋈(H\X)`, pairs `(t,η)` with `η` a class id of `qr.orbit`.
    pub c_gpd: ProductGroupoid,
    /// `𝔯(x) = r(x)⋊G` as a unit of `a_gpd`.
    pub frak_r: Vec<Id>,
    /// `𝔰(x) = H⥅s(x)` as a unit of `c_gpd`.
    pub frak_s: Vec<Id>,
    /// `(ξ,h)·y`, keyed by `(a, y)`.
    pub left_act: HashMap<(Id, Id), Id>,
    /// `y·(t,η)`, keyed by `(y, c)`.
    pub right_act: HashMap<(Id, Id), Id>,
}

#[derive(Debug, thiserror::Error)]
pub enum EquivError {
    #[error(transparent)]
    Certify(#[from] CertifyError),
    #[error(transparent)]
    Quotient(#[from] QuotientError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("representative not unique: {0:?}")]
    Uniqueness(Witness),
    #[error("no representative: {0:?}")]
    Missing(Witness),
}

impl EquivalenceWitness {
    pub fn x(&self) -> &FiniteGroupoid {
        &self.para.left.x
    }

    pub fn left(&self, a: Id, y: Id) -> Option<Id> {
        self.left_act.get(&(a, y)).copied()
    }

    pub fn right(&self, y: Id, c: Id) -> Option<Id> {
        self.right_act.get(&(y, c)).copied()
    }
}

/// `(class, unit) ↦ member` keyed by `key(member)`, refusing collisions.
fn rep_index(members: &[Vec<Id>], key: impl Fn(Id) -> Id) -> Result<HashMap<(Id, Id), Id>, EquivError> {
    let mut idx = HashMap::new();
    for (c, ms) in members.iter().enumerate() {
        for &m in ms {
            if let Some(prev) = idx.insert((c, key(m)), m) {
                return Err(EquivError::Uniqueness(Witness::new(vec![prev, m], "two members of one class share an endpoint")));
            }
        }
    }
    Ok(idx)
}

pub fn build_equivalence(para: ParaEquivalence) -> Result<EquivalenceWitness, EquivError> {
    let ql = quotient_left_action(&para)?;
    let qr = quotient_right_action(&para)?;
    let a_gpd = zs_product_left(&ql.action)?;
    let c_gpd = zs_product_right(&qr.action)?;
    let (l, r) = (&para.left, &para.right);
    let x = &l.x;
    let xg = &ql.orbit;
    let hx = &qr.orbit;

    let frak_r: Vec<Id> = x.elements().map(|y| a_gpd.unit_of[&xg.class_of[x.rng(y)]]).collect();
    let frak_s: Vec<Id> = x.elements().map(|y| c_gpd.unit_of[&hx.class_of[x.src(y)]]).collect();

    let by_src = rep_index(&xg.members, |m| x.src(m))?;
    let by_rng = rep_index(&hx.members, |m| x.rng(m))?;

    let mut left_act = HashMap::new();
    for (a, &(xi, h)) in a_gpd.pairs.iter().enumerate() {
        let sa = a_gpd.base.src(a);
        for y in x.elements().filter(|&y| frak_r[y] == sa) {
            let hy = l
                .act(h, y)
                .ok_or_else(|| EquivError::Missing(Witness::new(vec![a, y], "h>y undefined")))?;
            let xr = *by_src
                .get(&(xi, x.rng(hy)))
                .ok_or_else(|| EquivError::Missing(Witness::new(vec![a, y], "no x in the class with s(x) = r(h>y)")))?;
            left_act.insert((a, y), x.mul(xr, hy).expect("endpoints match"));
        }
    }
    let mut right_act = HashMap::new();
    for (c, &(t, eta)) in c_gpd.pairs.iter().enumerate() {
        let rc = c_gpd.base.rng(c);
        for y in x.elements().filter(|&y| frak_s[y] == rc) {
            let yt = r
                .act(y, t)
                .ok_or_else(|| EquivError::Missing(Witness::new(vec![y, c], "y<t undefined")))?;
            let z = *by_rng
                .get(&(eta, x.src(yt)))
                .ok_or_else(|| EquivError::Missing(Witness::new(vec![y, c], "no z in the class with r(z) = s(y<t)")))?;
            right_act.insert((y, c), x.mul(yt, z).expect("endpoints match"));
        }
    }
    Ok(EquivalenceWitness { para, ql, qr, a_gpd, c_gpd, frak_r, frak_s, left_act, right_act })
}

/// Action laws, freeness, commutation and principality, each by enumeration,
/// plus the range and source formulas of both product groupoids.
pub fn verify_equivalence(w: &EquivalenceWitness) -> ValidationReport {
    let x = w.x();
    let (a, c) = (&w.a_gpd.base, &w.c_gpd.base);
    let mut rep = ValidationReport::new();

    // (i) action laws and momentum compatibility
    let mut s = Scan::new();
    for y in x.elements() {
        s.check(w.left(w.frak_r[y], y) == Some(y), || vec![w.frak_r[y], y], "unit does not act trivially");
        s.check(w.right(y, w.frak_s[y]) == Some(y), || vec![y, w.frak_s[y]], "unit does not act trivially");
    }
    for (&(aa, y), &z) in sorted(&w.left_act) {
        s.check(w.frak_r[z] == a.rng(aa), || vec![aa, y], "r-momentum of a·y is not r(a)");
        s.check(w.frak_s[z] == w.frak_s[y], || vec![aa, y], "s-momentum not invariant under the left action");
    }
    for (&(y, cc), &z) in sorted(&w.right_act) {
        s.check(w.frak_s[z] == c.src(cc), || vec![y, cc], "s-momentum of y·c is not s(c)");
        s.check(w.frak_r[z] == w.frak_r[y], || vec![y, cc], "r-momentum not invariant under the right action");
    }
    let aprods = a.products();
    let [l1] = par_scan_many(aprods.len(), |i| {
        let (p, q, pq) = aprods[i];
        let mut s = Scan::new();
        for y in x.elements().filter(|&y| w.frak_r[y] == a.src(q)) {
            let lhs = w.left(pq, y);
            let rhs = w.left(q, y).and_then(|qy| w.left(p, qy));
            s.check(lhs.is_some() && lhs == rhs, || vec![p, q, y], "(ab)·y != a·(b·y)");
        }
        [s]
    });
    let cprods = c.products();
    let [r1] = par_scan_many(cprods.len(), |i| {
        let (p, q, pq) = cprods[i];
        let mut s = Scan::new();
        for y in x.elements().filter(|&y| w.frak_s[y] == c.rng(p)) {
            let lhs = w.right(y, pq);
            let rhs = w.right(y, p).and_then(|yp| w.right(yp, q));
            s.check(lhs.is_some() && lhs == rhs, || vec![y, p, q], "y·(cd) != (y·c)·d");
        }
        [s]
    });
    rep.push(CheckResult::from_scan("action-laws", s.merge(l1).merge(r1)));

    // (ii) freeness
    let mut s = Scan::new();
    for (&(aa, y), &z) in sorted(&w.left_act) {
        if z == y {
            s.check(a.is_unit(aa), || vec![aa, y], "non-unit of A fixes y");
        }
    }
    for (&(y, cc), &z) in sorted(&w.right_act) {
        if z == y {
            s.check(c.is_unit(cc), || vec![y, cc], "non-unit of C fixes y");
        }
    }
    rep.push(CheckResult::from_scan("free", s));

    // (iii) commutation
    let lefts = sorted(&w.left_act);
    let [s] = par_scan_many(lefts.len(), |i| {
        let (&(aa, y), &ay) = lefts[i];
        let mut s = Scan::new();
        for cc in c.elements().filter(|&cc| c.rng(cc) == w.frak_s[y]) {
            let lhs = w.right(ay, cc);
            let rhs = w.right(y, cc).and_then(|yc| w.left(aa, yc));
            s.check(lhs.is_some() && lhs == rhs, || vec![aa, y, cc], "[a·y]·c != a·[y·c]");
        }
        [s]
    });
    rep.push(CheckResult::from_scan("commute", s));

    // (iv) principality
    let mut s = Scan::new();
    principal(x.len(), &w.frak_r, a.units(), w.right_act.iter().map(|(&(y, _), &z)| (y, z)), &mut s, "r");
    principal(x.len(), &w.frak_s, c.units(), w.left_act.iter().map(|(&(_, y), &z)| (y, z)), &mut s, "s");
    rep.push(CheckResult::from_scan("principal", s));

    rep.push(check_orbit_zs_formulas(w));
    rep
}

fn sorted<K: Ord + Copy, V>(m: &HashMap<K, V>) -> Vec<(&K, &V)> {
    let mut v: Vec<(&K, &V)> = m.iter().collect();
    v.sort_unstable_by_key(|(k, _)| **k);
    v
}

/// The momentum map induces a bijection from the orbits of the other action onto the units.
fn principal(n: usize, m: &[Id], units: &[Id], moves: impl Iterator<Item = (Id, Id)>, s: &mut Scan, which: &str) {
    let mut uf = UnionFind::new(n);
    for (y, z) in moves {
        uf.union(y, z);
    }
    let mut orbit_to_unit: HashMap<Id, Id> = HashMap::new();
    let mut unit_to_orbit: HashMap<Id, Id> = HashMap::new();
    for y in 0..n {
        let o = uf.find(y);
        let u = m[y];
        let pu = *orbit_to_unit.entry(o).or_insert(u);
        s.check(pu == u, || vec![y], &format!("{which}-momentum not constant on an orbit"));
        let po = *unit_to_orbit.entry(u).or_insert(o);
        s.check(po == o, || vec![y], &format!("{which}-momentum identifies two orbits"));
    }
    for &u in units {
        s.check(unit_to_orbit.contains_key(&u), || vec![u], &format!("{which}-momentum misses a unit"));
    }
}

/// `r(ξ,h) = r(x)⋊G`, `s(ξ,h) = (h⁻¹⥅s(x))⋊G`, `r(t,η) = H⥅(r(y)⋊t⁻¹)`,
/// `s(t,η) = H⥅s(y)` for every representative.
pub fn check_orbit_zs_formulas(w: &EquivalenceWitness) -> CheckResult {
    let (l, r) = (&w.para.left, &w.para.right);
    let x = w.x();
    let (xg, hx) = (&w.ql.orbit, &w.qr.orbit);
    let (a, c) = (&w.a_gpd, &w.c_gpd);
    let mut s = Scan::new();
    for (i, &(xi, h)) in a.pairs.iter().enumerate() {
        for &m in &xg.members[xi] {
            let want_r = a.unit_of[&xg.class_of[x.rng(m)]];
            s.check(a.base.rng(i) == want_r, || vec![i, m], "r(ξ,h) != r(x)<G");
            let want_s = l.act(l.h.inv(h), x.src(m)).map(|v| a.unit_of[&xg.class_of[v]]);
            s.check(Some(a.base.src(i)) == want_s, || vec![i, m], "s(ξ,h) != (h^-1>s(x))<G");
        }
    }
    for (i, &(t, eta)) in c.pairs.iter().enumerate() {
        for &m in &hx.members[eta] {
            let want_r = r.act(x.rng(m), r.g.inv(t)).map(|v| c.unit_of[&hx.class_of[v]]);
            s.check(Some(c.base.rng(i)) == want_r, || vec![i, m], "r(t,η) != H>(r(y)<t^-1)");
            let want_s = c.unit_of[&hx.class_of[x.src(m)]];
            s.check(c.base.src(i) == want_s, || vec![i, m], "s(t,η) != H>s(y)");
        }
    }
    CheckResult::from_scan("orbit-zs-formulas", s)
}

/// `X⋈H ~ H\X` for a free left action, taking `G = {e}`.
pub fn one_sided_equivalence(a: LeftAction) -> Result<EquivalenceWitness, EquivError> {
    let r = RightAction::trivial_group(a.x.clone());
    build_equivalence(certify_para_equivalence(a, r)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::semidirect_two_sided;
    use crate::groupoid::iso_check;

    #[test]
    fn trivial_one_sided() {
        let w = one_sided_equivalence(LeftAction::trivial_group(FiniteGroupoid::pair(2))).unwrap();
        let rep = verify_equivalence(&w);
        assert!(rep.is_ok(), "{rep}");
    }

    #[test]
    fn semidirect_two_sided_passes() {
        let (l, r) = semidirect_two_sided();
        let w = build_equivalence(certify_para_equivalence(l, r).unwrap()).unwrap();
        let rep = verify_equivalence(&w);
        assert!(rep.is_ok(), "{rep}");
        // X/G has 36/3 elements, H\X has 36/2
        assert_eq!(w.ql.orbit.base.len(), 12);
        assert_eq!(w.qr.orbit.base.len(), 18);
        assert_eq!(w.a_gpd.base.len(), 24);
        assert_eq!(w.c_gpd.base.len(), 54);
    }

    #[test]
    fn corrupted_right_action_breaks_commutation() {
        let (l, r) = semidirect_two_sided();
        let mut w = build_equivalence(certify_para_equivalence(l, r).unwrap()).unwrap();
        let key = *sorted(&w.right_act).iter().find(|(k, v)| **v != k.0).unwrap().0;
        let y = key.0;
        let wrong = w.x().elements().find(|&z| z != w.right_act[&key] && w.frak_r[z] == w.frak_r[y]).unwrap();
        w.right_act.insert(key, wrong);
        let rep = verify_equivalence(&w);
        assert_eq!(rep.status("commute"), Some(crate::Status::Fail));
    }

    #[test]
    fn skew_one_sided_recovers_g() {
        let (g, h, c) = crate::fixtures::skew_mod_two();
        let a = crate::construct::skew_ss_action(&g, &h, &c).unwrap();
        let w = one_sided_equivalence(a).unwrap();
        assert!(verify_equivalence(&w).is_ok());
        assert!(iso_check(&w.c_gpd.base, &g).is_some());
    }
}
