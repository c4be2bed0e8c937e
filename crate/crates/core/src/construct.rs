//! Self-similar products, orbit groupoids, quotient actions, and the matched-pair lift.

use std::collections::HashMap;

use crate::groupoid::{FiniteGroupoid, GroupoidMorphism, Isomorphism, StructureError};
use crate::report::{CheckResult, Scan, ValidationReport, Witness};
use crate::ssa::{check_left_axioms, is_free, is_free_right, LeftAction, ParaEquivalence, RightAction};
use crate::Id;

/// A groupoid whose elements are pairs of ids from its ingredients.
#[derive(Debug, Clone)]
pub struct ProductGroupoid {
    pub base: FiniteGroupoid,
    /// `(x,h)` for `X⋈H`, `(t,x)` for `G⋈X`.
    pub pairs: Vec<(Id, Id)>,
    index: HashMap<(Id, Id), Id>,
    /// Unit of `X` ↦ unit of the product.
    pub unit_of: HashMap<Id, Id>,
}

impl ProductGroupoid {
    pub fn pair(&self, a: Id) -> (Id, Id) {
        self.pairs[a]
    }

    pub fn id_of(&self, p: (Id, Id)) -> Option<Id> {
        self.index.get(&p).copied()
    }

    fn build(
        pairs: Vec<(Id, Id)>,
        units: Vec<(Id, Id)>,
        src: impl Fn(Id, Id) -> Option<(Id, Id)>,
        rng: impl Fn(Id, Id) -> Option<(Id, Id)>,
        inv: impl Fn(Id, Id) -> Option<(Id, Id)>,
        mul: impl Fn((Id, Id), (Id, Id)) -> Option<(Id, Id)>,
        label: impl Fn(Id, Id) -> String,
        x_unit: impl Fn((Id, Id)) -> Id,
    ) -> Result<Self, StructureError> {
        let index: HashMap<(Id, Id), Id> = pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let look = |p: Option<(Id, Id)>, what: &str, a: (Id, Id)| {
            p.and_then(|p| index.get(&p).copied())
                .ok_or_else(|| StructureError::Other(format!("{what} of pair {a:?} is not a pair of the product")))
        };
        let mut s = Vec::with_capacity(pairs.len());
        let mut r = Vec::with_capacity(pairs.len());
        let mut iv = Vec::with_capacity(pairs.len());
        for &(a, b) in &pairs {
            s.push(look(src(a, b), "source", (a, b))?);
            r.push(look(rng(a, b), "range", (a, b))?);
            iv.push(look(inv(a, b), "inverse", (a, b))?);
        }
        let unit_ids: Vec<Id> = units
            .iter()
            .map(|&p| look(Some(p), "unit", p))
            .collect::<Result<_, _>>()?;
        let mut m = HashMap::new();
        for (i, &p) in pairs.iter().enumerate() {
            for j in 0..pairs.len() {
                if s[i] != r[j] {
                    continue;
                }
                let c = look(mul(p, pairs[j]), "product", p)?;
                m.insert((i, j), c);
            }
        }
        let labels = pairs.iter().map(|&(a, b)| label(a, b)).collect();
        let unit_of = units.iter().zip(&unit_ids).map(|(&p, &u)| (x_unit(p), u)).collect();
        let mut sorted = unit_ids;
        sorted.sort_unstable();
        let base = FiniteGroupoid::new(sorted, s, r, iv, m, Some(labels))?;
        Ok(ProductGroupoid { base, pairs, index, unit_of })
    }
}

/// `X⋈H` on pairs `(x,h)` with `ρ(x⁻¹) = r_H(h)`.
pub fn zs_product_left(a: &LeftAction) -> Result<ProductGroupoid, StructureError> {
    let (x, h) = (&a.x, &a.h);
    let mut pairs = Vec::new();
    for xx in x.elements() {
        for hh in h.elements() {
            if a.rho(x.inv(xx)) == h.rng(hh) {
                pairs.push((xx, hh));
            }
        }
    }
    let units: Vec<(Id, Id)> = x.units().iter().map(|&u| (u, a.rho0(u))).collect();
    ProductGroupoid::build(
        pairs,
        units,
        |xx, hh| Some((a.act(h.inv(hh), x.src(xx))?, h.src(hh))),
        |xx, hh| Some((x.rng(xx), a.restr(h.rng(hh), x.inv(xx))?)),
        |xx, hh| Some((a.act(h.inv(hh), x.inv(xx))?, a.restr(h.inv(hh), x.inv(xx))?)),
        |(xx, hh), (yy, kk)| {
            let hy = a.act(hh, yy)?;
            let h_y = a.restr(hh, yy)?;
            Some((x.mul(xx, hy)?, h.mul(h_y, kk)?))
        },
        |xx, hh| format!("({},{})", x.label(xx), h.label(hh)),
        |(u, _)| u,
    )
}

/// `G⋈X` on pairs `(t,x)` with `s_G(t) = σ(x⁻¹)`.
pub fn zs_product_right(a: &RightAction) -> Result<ProductGroupoid, StructureError> {
    let (x, g) = (&a.x, &a.g);
    let mut pairs = Vec::new();
    for t in g.elements() {
        for xx in x.elements() {
            if g.src(t) == a.sigma(x.inv(xx)) {
                pairs.push((t, xx));
            }
        }
    }
    let units: Vec<(Id, Id)> = x.units().iter().map(|&u| (a.sigma0(u), u)).collect();
    ProductGroupoid::build(
        pairs,
        units,
        |t, xx| Some((a.restr(x.inv(xx), g.src(t))?, x.src(xx))),
        |t, xx| Some((g.rng(t), a.act(x.rng(xx), g.inv(t))?)),
        |t, xx| Some((a.restr(x.inv(xx), g.inv(t))?, a.act(x.inv(xx), g.inv(t))?)),
        |(t, xx), (s, yy)| {
            let xs = a.restr(xx, s)?;
            let x_s = a.act(xx, s)?;
            Some((g.mul(t, xs)?, x.mul(x_s, yy)?))
        },
        |t, xx| format!("({},{})", g.label(t), x.label(xx)),
        |(_, u)| u,
    )
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OrbitError {
    #[error("action is not free: {0:?}")]
    NotFree(Witness),
    #[error("class product depends on representatives: {0:?}")]
    NotWellDefined(Witness),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// `H\X` or `X/G`: classes canonicalized by least member id.
#[derive(Debug, Clone)]
pub struct OrbitGroupoid {
    pub base: FiniteGroupoid,
    /// Element of `X` ↦ class id in `base`.
    pub class_of: Vec<Id>,
    /// Class id ↦ sorted members; the first is the canonical representative.
    pub members: Vec<Vec<Id>>,
    /// Representative-independence of the class product, checked exhaustively.
    pub report: ValidationReport,
}

impl OrbitGroupoid {
    pub fn rep(&self, c: Id) -> Id {
        self.members[c][0]
    }

    fn from_classes(x: &FiniteGroupoid, orbit: impl Fn(Id) -> Vec<Id>, bracket: (&str, &str)) -> Result<Self, OrbitError> {
        let least: Vec<Id> = x.elements().map(|xx| orbit(xx)[0]).collect();
        let mut reps: Vec<Id> = least.clone();
        reps.sort_unstable();
        reps.dedup();
        let pos: HashMap<Id, Id> = reps.iter().enumerate().map(|(i, &r)| (r, i)).collect();
        let class_of: Vec<Id> = least.iter().map(|l| pos[l]).collect();
        let mut members = vec![Vec::new(); reps.len()];
        for xx in x.elements() {
            members[class_of[xx]].push(xx);
        }

        let mut s = Scan::new();
        let mut prod: HashMap<(Id, Id), (Id, Id, Id)> = HashMap::new();
        for (xx, yy, xy) in x.products() {
            let key = (class_of[xx], class_of[yy]);
            let c = class_of[xy];
            match prod.get(&key) {
                Some(&(c0, x0, y0)) => s.check(c0 == c, || vec![x0, y0, xx, yy], "class product depends on representatives"),
                None => {
                    s.check(true, Vec::new, "");
                    prod.insert(key, (c, xx, yy));
                }
            }
        }
        let mut report = ValidationReport::new();
        report.push(CheckResult::from_scan("rep-independence", s.clone()));
        if let Some(w) = s.witness {
            return Err(OrbitError::NotWellDefined(w));
        }

        let cls = |f: &dyn Fn(Id) -> Id| -> Vec<Id> { reps.iter().map(|&r| class_of[f(r)]).collect() };
        let src = cls(&|r| x.src(r));
        let rng = cls(&|r| x.rng(r));
        let inv = cls(&|r| x.inv(r));
        let mut units: Vec<Id> = x.units().iter().map(|&u| class_of[u]).collect();
        units.sort_unstable();
        units.dedup();
        let mul: HashMap<(Id, Id), Id> = prod.into_iter().map(|(k, (c, _, _))| (k, c)).collect();
        let labels = reps.iter().map(|&r| format!("{}{}{}", bracket.0, x.label(r), bracket.1)).collect();
        let base = FiniteGroupoid::new(units, src, rng, inv, mul, Some(labels))?;
        Ok(OrbitGroupoid { base, class_of, members, report })
    }
}

/// `H\X`; refuses a non-free action.
pub fn orbit_groupoid_left(a: &LeftAction) -> Result<OrbitGroupoid, OrbitError> {
    let f = is_free(a);
    if let Some((h, x)) = f.witness {
        return Err(OrbitError::NotFree(Witness::new(vec![h, x], "non-unit fixes an element")));
    }
    OrbitGroupoid::from_classes(&a.x, |xx| a.orbit(xx), ("H[", "]"))
}

/// `X/G`; refuses a non-free action.
pub fn orbit_groupoid_right(a: &RightAction) -> Result<OrbitGroupoid, OrbitError> {
    let f = is_free_right(a);
    if let Some((x, t)) = f.witness {
        return Err(OrbitError::NotFree(Witness::new(vec![x, t], "non-unit fixes an element")));
    }
    OrbitGroupoid::from_classes(&a.x, |xx| a.orbit(xx), ("[", "]G"))
}

/// An action induced on an orbit groupoid, with its well-definedness report.
#[derive(Debug, Clone)]
pub struct QuotientLeft {
    pub orbit: OrbitGroupoid,
    pub action: LeftAction,
    pub report: ValidationReport,
}

#[derive(Debug, Clone)]
pub struct QuotientRight {
    pub orbit: OrbitGroupoid,
    pub action: RightAction,
    pub report: ValidationReport,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuotientError {
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error("induced map depends on the representative: {0:?}")]
    NotWellDefined(Witness),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// `h ⥅~ (x⋊G) = (h⥅x)⋊G`, `h ⥆~ (x⋊G) = h⥆x`, `ρ~(x⋊G) = ρ(x)` on `X/G`.
pub fn quotient_left_action(p: &ParaEquivalence) -> Result<QuotientLeft, QuotientError> {
    let (l, r) = (&p.left, &p.right);
    let orbit = orbit_groupoid_right(r)?;
    let c = &orbit.class_of;
    let mut s = Scan::new();
    let mut rho0: HashMap<Id, Id> = HashMap::new();
    let mut act: HashMap<(Id, Id), Id> = HashMap::new();
    let mut restr: HashMap<(Id, Id), Id> = HashMap::new();
    for &u in l.x.units() {
        let v = l.rho0(u);
        let prev = *rho0.entry(c[u]).or_insert(v);
        s.check(prev == v, || vec![u], "rho not constant on a right orbit");
    }
    for (h, xx) in l.domain() {
        let y = c[l.act(h, xx).unwrap()];
        let k = l.restr(h, xx).unwrap();
        let key = (h, c[xx]);
        let py = *act.entry(key).or_insert(y);
        let pk = *restr.entry(key).or_insert(k);
        s.check(py == y && pk == k, || vec![h, xx], "induced map depends on the representative");
    }
    let mut report = ValidationReport::new();
    report.push(CheckResult::from_scan("quotient-well-defined", s.clone()));
    if let Some(w) = s.witness {
        return Err(QuotientError::NotWellDefined(w));
    }
    let action = LeftAction::new(l.h.clone(), orbit.base.clone(), &rho0, &act, &restr)?;
    Ok(QuotientLeft { orbit, action, report })
}

/// `(H⥅x) ⋊~ t = H⥅(x⋊t)`, `(H⥅x) ⋉~ t = x⋉t`, `σ~(H⥅x) = σ(x)` on `H\X`.
pub fn quotient_right_action(p: &ParaEquivalence) -> Result<QuotientRight, QuotientError> {
    let (l, r) = (&p.left, &p.right);
    let orbit = orbit_groupoid_left(l)?;
    let c = &orbit.class_of;
    let mut s = Scan::new();
    let mut sigma0: HashMap<Id, Id> = HashMap::new();
    let mut act: HashMap<(Id, Id), Id> = HashMap::new();
    let mut restr: HashMap<(Id, Id), Id> = HashMap::new();
    for &u in r.x.units() {
        let v = r.sigma0(u);
        let prev = *sigma0.entry(c[u]).or_insert(v);
        s.check(prev == v, || vec![u], "sigma not constant on a left orbit");
    }
    for (xx, t) in r.domain() {
        let y = c[r.act(xx, t).unwrap()];
        let k = r.restr(xx, t).unwrap();
        let key = (c[xx], t);
        let py = *act.entry(key).or_insert(y);
        let pk = *restr.entry(key).or_insert(k);
        s.check(py == y && pk == k, || vec![xx, t], "induced map depends on the representative");
    }
    let mut report = ValidationReport::new();
    report.push(CheckResult::from_scan("quotient-well-defined", s.clone()));
    if let Some(w) = s.witness {
        return Err(QuotientError::NotWellDefined(w));
    }
    let action = RightAction::new(r.g.clone(), orbit.base.clone(), &sigma0, &act, &restr)?;
    Ok(QuotientRight { orbit, action, report })
}

/// `H̃ = H ⋉ X⁽⁰⁾` acting on `X` with momentum `r`.
#[derive(Debug, Clone)]
pub struct MatchedPairLift {
    pub htilde: FiniteGroupoid,
    /// Element of `H̃` ↦ `(h,u)`.
    pub pairs: Vec<(Id, Id)>,
    pub action: LeftAction,
    pub report: ValidationReport,
}

/// Elements `(h,u)` with `s_H(h) = ρ(u)`, `s(h,u) = u`, `r(h,u) = h⥅u`,
/// `(k, h⥅u)(h,u) = (kh, u)`; `(h,u)⥅x = h⥅x`, `(h,u)⥆x = (h⥆x, s(x))`.
pub fn matched_pair_lift(a: &LeftAction) -> Result<MatchedPairLift, StructureError> {
    let (x, h) = (&a.x, &a.h);
    let mut pairs = Vec::new();
    for hh in h.elements() {
        for &u in x.units() {
            if a.in_domain(hh, u) {
                pairs.push((hh, u));
            }
        }
    }
    let index: HashMap<(Id, Id), Id> = pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let get = |p: (Id, Id)| {
        index.get(&p).copied().ok_or_else(|| StructureError::Other(format!("({}, {}) is not in the lift", p.0, p.1)))
    };
    let unit_of = |u: Id| get((a.rho0(u), u));
    let act_u = |hh: Id, u: Id| a.act(hh, u).ok_or_else(|| StructureError::Other("h>u undefined".into()));
    let mut src = Vec::new();
    let mut rng = Vec::new();
    let mut inv = Vec::new();
    let mut labels = Vec::new();
    for &(hh, u) in &pairs {
        let hu = act_u(hh, u)?;
        src.push(unit_of(u)?);
        rng.push(unit_of(hu)?);
        inv.push(get((h.inv(hh), hu))?);
        labels.push(format!("({},{})", h.label(hh), x.label(u)));
    }
    let mut mul = HashMap::new();
    for (i, &(kk, w)) in pairs.iter().enumerate() {
        for (j, &(hh, u)) in pairs.iter().enumerate() {
            if src[i] == rng[j] {
                debug_assert_eq!(Some(w), a.act(hh, u));
                let kh = h.mul(kk, hh).ok_or_else(|| StructureError::Other("kh undefined".into()))?;
                mul.insert((i, j), get((kh, u))?);
            }
        }
    }
    let mut units: Vec<Id> = x.units().iter().map(|&u| unit_of(u)).collect::<Result<_, _>>()?;
    units.sort_unstable();
    let htilde = FiniteGroupoid::new(units, src, rng, inv, mul, Some(labels))?;

    let rho0: HashMap<Id, Id> = x.units().iter().map(|&u| Ok((u, unit_of(u)?))).collect::<Result<_, StructureError>>()?;
    let mut am = HashMap::new();
    let mut rm = HashMap::new();
    for (i, &(hh, u)) in pairs.iter().enumerate() {
        for &xx in x.arrows_to(u) {
            am.insert((i, xx), a.act(hh, xx).ok_or_else(|| StructureError::Other("h>x undefined".into()))?);
            let k = a.restr(hh, xx).ok_or_else(|| StructureError::Other("h|x undefined".into()))?;
            rm.insert((i, xx), get((k, x.src(xx)))?);
        }
    }
    let action = LeftAction::new(htilde.clone(), x.clone(), &rho0, &am, &rm)?;

    let mut report = check_left_axioms(&action);
    let mut s = Scan::new();
    for &u in x.units() {
        s.check(htilde.src(rho0[&u]) == rho0[&u] && htilde.is_unit(rho0[&u]), || vec![u], "lifted momentum is not a unit");
    }
    let mut img: Vec<Id> = rho0.values().copied().collect();
    img.sort_unstable();
    s.check(img == htilde.units(), Vec::new, "lifted momentum is not a bijection onto the units");
    report.push(CheckResult::from_scan("matched-pair-units", s));
    Ok(MatchedPairLift { htilde, pairs, action, report })
}

/// `φ(x,(h,u)) = (x,h)` from `X⋈H̃` to `X⋈H`.
pub fn matched_lift_iso(a: &LeftAction, lift: &MatchedPairLift) -> Result<(Isomorphism, ProductGroupoid, ProductGroupoid), StructureError> {
    let lifted = zs_product_left(&lift.action)?;
    let plain = zs_product_left(a)?;
    let mut map = Vec::with_capacity(lifted.pairs.len());
    for &(xx, ht) in &lifted.pairs {
        let (hh, _) = lift.pairs[ht];
        map.push(
            plain
                .id_of((xx, hh))
                .ok_or_else(|| StructureError::Other(format!("({xx}, {hh}) missing from X⋈H")))?,
        );
    }
    let iso = Isomorphism::verified(map, &lifted.base, &plain.base)
        .ok_or_else(|| StructureError::Other("φ is not an isomorphism".into()))?;
    Ok((iso, lifted, plain))
}

/// `H` acting on the skew product `G(c)`: `h⥅(g,k) = (g, k h⁻¹)`,
/// `h⥆(g,k) = c(g)⁻¹ h c(g)`, with `G(c)` laid out as in
/// [`crate::groupoid::skew_product_groupoid`].
pub fn skew_ss_action(g: &FiniteGroupoid, h: &FiniteGroupoid, c: &GroupoidMorphism) -> Result<LeftAction, StructureError> {
    let x = crate::groupoid::skew_product_groupoid(g, h, c)?;
    let m = h.len();
    let hm = |a: Id, b: Id| h.mul(a, b).expect("group product is total");
    let e = h.units()[0];
    LeftAction::from_fn(
        h.clone(),
        x,
        |_| e,
        |hh, gk| (gk / m) * m + hm(gk % m, h.inv(hh)),
        |hh, gk| {
            let cg = c.apply(gk / m);
            hm(hm(h.inv(cg), hh), cg)
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::iso_check;
    use crate::ssa::{certify_para_equivalence, check_right_axioms};

    fn swap_pair() -> RightAction {
        let x = FiniteGroupoid::pair(2);
        let sw = |e: Id, t: Id| if t == 0 { e } else { ((e / 2) ^ 1) * 2 + ((e % 2) ^ 1) };
        RightAction::from_fn(FiniteGroupoid::cyclic(2), x, |_| 0, sw, |_, t| t).unwrap()
    }

    #[test]
    fn product_with_unit_space_is_x() {
        let x = FiniteGroupoid::pair(3);
        let p = zs_product_left(&LeftAction::unit_space(x.clone())).unwrap();
        assert!(p.base.is_valid());
        let map: Vec<Id> = p.pairs.iter().map(|&(xx, _)| xx).collect();
        assert!(Isomorphism::verified(map, &p.base, &x).is_some());
        assert_eq!(p.base.units().len(), x.units().len());
    }

    #[test]
    fn product_with_trivial_group_is_x() {
        let x = FiniteGroupoid::cyclic(4);
        let p = zs_product_left(&LeftAction::trivial_group(x.clone())).unwrap();
        assert!(iso_check(&p.base, &x).is_some());
    }

    #[test]
    fn right_product_with_trivial_group_is_x() {
        let x = FiniteGroupoid::pair(2);
        let p = zs_product_right(&RightAction::trivial_group(x.clone())).unwrap();
        assert!(p.base.is_valid());
        let map: Vec<Id> = p.pairs.iter().map(|&(_, xx)| xx).collect();
        assert!(Isomorphism::verified(map, &p.base, &x).is_some());
    }

    #[test]
    fn right_product_of_swap_is_pair_groupoid_on_four() {
        // Z/2 swapping both coordinates of pair(2) from the right:
        // G⋈X has 2·4 = 8 elements over 2 units, so it is pair(2) x Z/2.
        let p = zs_product_right(&swap_pair()).unwrap();
        assert!(p.base.is_valid(), "{}", p.base.validate());
        assert_eq!(p.base.len(), 8);
        assert_eq!(p.base.units().len(), 2);
    }

    #[test]
    fn orbit_of_free_swap_is_z2_like() {
        let r = swap_pair();
        let o = orbit_groupoid_right(&r).unwrap();
        assert!(o.base.is_valid());
        // 4 arrows, free Z/2 action: 2 classes over 1 unit class
        assert_eq!(o.base.len(), 2);
        assert!(iso_check(&o.base, &FiniteGroupoid::cyclic(2)).is_some());
    }

    #[test]
    fn orbit_refuses_non_free_action() {
        let h = FiniteGroupoid::cyclic(2);
        let a = LeftAction::from_fn(h, FiniteGroupoid::space(1), |_| 0, |_, x| x, |hh, _| hh).unwrap();
        assert!(matches!(orbit_groupoid_left(&a), Err(OrbitError::NotFree(_))));
    }

    #[test]
    fn trivial_quotients_are_identities() {
        let x = FiniteGroupoid::pair(2);
        let r = swap_pair();
        let p = certify_para_equivalence(LeftAction::trivial_group(x.clone()), r.clone()).unwrap();
        let qr = quotient_right_action(&p).unwrap();
        assert_eq!(qr.orbit.base.len(), x.len());
        assert!(check_right_axioms(&qr.action).is_ok());
        let ql = quotient_left_action(&p).unwrap();
        assert!(check_left_axioms(&ql.action).is_ok());
    }

    #[test]
    fn lift_of_trivial_group_is_unit_space() {
        let x = FiniteGroupoid::pair(3);
        let a = LeftAction::trivial_group(x.clone());
        let lift = matched_pair_lift(&a).unwrap();
        assert!(lift.report.is_ok(), "{}", lift.report);
        assert_eq!(lift.htilde.len(), 3);
        assert_eq!(lift.htilde.units().len(), 3);
        // standard unit-space action: r(x)>x = x, r(x)|x = s(x)
        for xx in x.elements() {
            assert_eq!(lift.action.act(lift.action.rho(xx), xx), Some(xx));
            let k = lift.action.restr(lift.action.rho(xx), xx).unwrap();
            assert_eq!(lift.pairs[k].1, x.src(xx));
        }
        assert!(matched_lift_iso(&a, &lift).is_ok());
    }

    #[test]
    fn skew_action_mod_two() {
        let g = FiniteGroupoid::cyclic(4);
        let h = FiniteGroupoid::cyclic(2);
        let c = GroupoidMorphism::new((0..4).map(|i| i % 2).collect());
        let a = skew_ss_action(&g, &h, &c).unwrap();
        assert!(check_left_axioms(&a).is_ok(), "{}", check_left_axioms(&a));
        assert!(is_free(&a).free);
        // abelian target: restriction is constant in x
        for (hh, xx) in a.domain() {
            assert_eq!(a.restr(hh, xx), Some(hh));
        }
        let o = orbit_groupoid_left(&a).unwrap();
        assert!(iso_check(&o.base, &g).is_some());
    }
}
