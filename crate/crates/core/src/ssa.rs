//! Self-similar left and right actions and their checkers.

use std::collections::HashMap;

use crate::groupoid::{FiniteGroupoid, StructureError};
use crate::report::{par_scan_many, CheckResult, Scan, ValidationReport, Witness};
use crate::Id;

/// `H` acting on `X` from the left through `⥅` (act) and `⥆` (restr).
///
/// Both maps are defined exactly on pairs `(h,x)` with `s_H(h) = ρ(x)`,
/// where `ρ = ρ⁰ ∘ r_X`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeftAction {
    pub h: FiniteGroupoid,
    pub x: FiniteGroupoid,
    rho0: Vec<Option<Id>>,
    act: Vec<Option<Id>>,
    restr: Vec<Option<Id>>,
}

/// `G` acting on `X` from the right through `⋊` (act) and `⋉` (restr).
///
/// Both maps are defined exactly on pairs `(x,t)` with `σ(x) = r_G(t)`,
/// where `σ = σ⁰ ∘ s_X`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RightAction {
    pub g: FiniteGroupoid,
    pub x: FiniteGroupoid,
    sigma0: Vec<Option<Id>>,
    act: Vec<Option<Id>>,
    restr: Vec<Option<Id>>,
}

fn momentum_table(
    x: &FiniteGroupoid,
    target: &FiniteGroupoid,
    m0: &HashMap<Id, Id>,
    name: &'static str,
) -> Result<Vec<Option<Id>>, StructureError> {
    let mut t = vec![None; x.len()];
    for (&u, &v) in m0 {
        if u >= x.len() || !x.is_unit(u) {
            return Err(StructureError::Other(format!("{name} defined on non-unit {u}")));
        }
        if v >= target.len() {
            return Err(StructureError::OutOfRange { table: name, id: v, n: target.len() });
        }
        t[u] = Some(v);
    }
    if let Some(&u) = x.units().iter().find(|&&u| t[u].is_none()) {
        return Err(StructureError::Other(format!("{name} undefined on unit {u}")));
    }
    Ok(t)
}

impl LeftAction {
    pub fn new(
        h: FiniteGroupoid,
        x: FiniteGroupoid,
        rho0: &HashMap<Id, Id>,
        act: &HashMap<(Id, Id), Id>,
        restr: &HashMap<(Id, Id), Id>,
    ) -> Result<Self, StructureError> {
        let rho0 = momentum_table(&x, &h, rho0, "rho0")?;
        let (nh, nx) = (h.len(), x.len());
        let mut a = LeftAction { act: vec![None; nh * nx], restr: vec![None; nh * nx], h, x, rho0 };
        for (&(hh, xx), &y) in act {
            a.check_pair(hh, xx, "act")?;
            if y >= nx {
                return Err(StructureError::OutOfRange { table: "act", id: y, n: nx });
            }
            a.act[hh * nx + xx] = Some(y);
        }
        for (&(hh, xx), &k) in restr {
            a.check_pair(hh, xx, "restr")?;
            if k >= nh {
                return Err(StructureError::OutOfRange { table: "restr", id: k, n: nh });
            }
            a.restr[hh * nx + xx] = Some(k);
        }
        for (hh, xx) in a.domain() {
            if a.act(hh, xx).is_none() || a.restr(hh, xx).is_none() {
                return Err(StructureError::Other(format!(
                    "act/restr undefined on ({}, {}) although s(h) = rho(x)",
                    a.h.label(hh),
                    a.x.label(xx)
                )));
            }
        }
        Ok(a)
    }

    /// Evaluates `act` and `restr` on exactly the fiber product.
    pub fn from_fn<R, A, S>(h: FiniteGroupoid, x: FiniteGroupoid, rho0: R, act: A, restr: S) -> Result<Self, StructureError>
    where
        R: Fn(Id) -> Id,
        A: Fn(Id, Id) -> Id,
        S: Fn(Id, Id) -> Id,
    {
        let rho: HashMap<Id, Id> = x.units().iter().map(|&u| (u, rho0(u))).collect();
        let mut am = HashMap::new();
        let mut rm = HashMap::new();
        for hh in h.elements() {
            for xx in x.elements() {
                if h.src(hh) == rho[&x.rng(xx)] {
                    am.insert((hh, xx), act(hh, xx));
                    rm.insert((hh, xx), restr(hh, xx));
                }
            }
        }
        Self::new(h, x, &rho, &am, &rm)
    }

    fn check_pair(&self, hh: Id, xx: Id, table: &'static str) -> Result<(), StructureError> {
        if hh >= self.h.len() {
            return Err(StructureError::OutOfRange { table, id: hh, n: self.h.len() });
        }
        if xx >= self.x.len() {
            return Err(StructureError::OutOfRange { table, id: xx, n: self.x.len() });
        }
        if self.h.src(hh) != self.rho(xx) {
            return Err(StructureError::Other(format!(
                "{table} defined on ({}, {}) outside s_H(h) = rho(x)",
                self.h.label(hh),
                self.x.label(xx)
            )));
        }
        Ok(())
    }

    /// `H = {e}` acting trivially.
    pub fn trivial_group(x: FiniteGroupoid) -> Self {
        Self::from_fn(FiniteGroupoid::trivial_group(), x, |_| 0, |_, y| y, |_, _| 0)
            .expect("trivial action is well formed")
    }

    /// `H = X⁰` with `ρ⁰ = id`, `r(x)⥅x = x`, `r(x)⥆x = s(x)`.
    pub fn unit_space(x: FiniteGroupoid) -> Self {
        let (h, emb) = x.unit_space();
        let pos: HashMap<Id, Id> = emb.iter().enumerate().map(|(i, &u)| (u, i)).collect();
        let xs = x.clone();
        let p2 = pos.clone();
        Self::from_fn(h, x, |u| pos[&u], |_, y| y, move |_, y| p2[&xs.src(y)])
            .expect("unit-space action is well formed")
    }

    pub fn rho0(&self, u: Id) -> Id {
        self.rho0[u].expect("rho0 is defined on units")
    }

    pub fn rho(&self, x: Id) -> Id {
        self.rho0(self.x.rng(x))
    }

    pub fn in_domain(&self, h: Id, x: Id) -> bool {
        self.h.src(h) == self.rho(x)
    }

    pub fn act(&self, h: Id, x: Id) -> Option<Id> {
        self.act[h * self.x.len() + x]
    }

    pub fn restr(&self, h: Id, x: Id) -> Option<Id> {
        self.restr[h * self.x.len() + x]
    }

    /// The fiber product `H ×_{s,ρ} X`, lexicographic.
    pub fn domain(&self) -> impl Iterator<Item = (Id, Id)> + '_ {
        self.h
            .elements()
            .flat_map(move |h| self.x.elements().filter(move |&x| self.in_domain(h, x)).map(move |x| (h, x)))
    }

    /// Overwrites one `act` cell. Intended for mutation testing.
    pub fn set_act(&mut self, h: Id, x: Id, y: Id) {
        assert!(self.in_domain(h, x));
        self.act[h * self.x.len() + x] = Some(y);
    }

    /// Overwrites one `restr` cell. Intended for mutation testing.
    pub fn set_restr(&mut self, h: Id, x: Id, k: Id) {
        assert!(self.in_domain(h, x));
        self.restr[h * self.x.len() + x] = Some(k);
    }

    pub fn rho0_map(&self) -> HashMap<Id, Id> {
        self.x.units().iter().map(|&u| (u, self.rho0(u))).collect()
    }

    pub fn act_map(&self) -> HashMap<(Id, Id), Id> {
        self.domain().map(|(h, x)| ((h, x), self.act(h, x).unwrap())).collect()
    }

    pub fn restr_map(&self) -> HashMap<(Id, Id), Id> {
        self.domain().map(|(h, x)| ((h, x), self.restr(h, x).unwrap())).collect()
    }

    /// The orbit `H⥅x`, sorted.
    pub fn orbit(&self, x: Id) -> Vec<Id> {
        let mut o: Vec<Id> = self
            .h
            .elements()
            .filter(|&h| self.in_domain(h, x))
            .filter_map(|h| self.act(h, x))
            .collect();
        o.sort_unstable();
        o.dedup();
        o
    }
}

impl RightAction {
    pub fn new(
        g: FiniteGroupoid,
        x: FiniteGroupoid,
        sigma0: &HashMap<Id, Id>,
        act: &HashMap<(Id, Id), Id>,
        restr: &HashMap<(Id, Id), Id>,
    ) -> Result<Self, StructureError> {
        let sigma0 = momentum_table(&x, &g, sigma0, "sigma0")?;
        let (ng, nx) = (g.len(), x.len());
        let mut a = RightAction { act: vec![None; nx * ng], restr: vec![None; nx * ng], g, x, sigma0 };
        for (&(xx, t), &y) in act {
            a.check_pair(xx, t, "act")?;
            if y >= nx {
                return Err(StructureError::OutOfRange { table: "act", id: y, n: nx });
            }
            a.act[xx * ng + t] = Some(y);
        }
        for (&(xx, t), &k) in restr {
            a.check_pair(xx, t, "restr")?;
            if k >= ng {
                return Err(StructureError::OutOfRange { table: "restr", id: k, n: ng });
            }
            a.restr[xx * ng + t] = Some(k);
        }
        for (xx, t) in a.domain() {
            if a.act(xx, t).is_none() || a.restr(xx, t).is_none() {
                return Err(StructureError::Other(format!(
                    "act/restr undefined on ({}, {}) although sigma(x) = r(t)",
                    a.x.label(xx),
                    a.g.label(t)
                )));
            }
        }
        Ok(a)
    }

    pub fn from_fn<R, A, S>(g: FiniteGroupoid, x: FiniteGroupoid, sigma0: R, act: A, restr: S) -> Result<Self, StructureError>
    where
        R: Fn(Id) -> Id,
        A: Fn(Id, Id) -> Id,
        S: Fn(Id, Id) -> Id,
    {
        let sig: HashMap<Id, Id> = x.units().iter().map(|&u| (u, sigma0(u))).collect();
        let mut am = HashMap::new();
        let mut rm = HashMap::new();
        for xx in x.elements() {
            for t in g.elements() {
                if sig[&x.src(xx)] == g.rng(t) {
                    am.insert((xx, t), act(xx, t));
                    rm.insert((xx, t), restr(xx, t));
                }
            }
        }
        Self::new(g, x, &sig, &am, &rm)
    }

    fn check_pair(&self, xx: Id, t: Id, table: &'static str) -> Result<(), StructureError> {
        if t >= self.g.len() {
            return Err(StructureError::OutOfRange { table, id: t, n: self.g.len() });
        }
        if xx >= self.x.len() {
            return Err(StructureError::OutOfRange { table, id: xx, n: self.x.len() });
        }
        if self.sigma(xx) != self.g.rng(t) {
            return Err(StructureError::Other(format!(
                "{table} defined on ({}, {}) outside sigma(x) = r_G(t)",
                self.x.label(xx),
                self.g.label(t)
            )));
        }
        Ok(())
    }

    /// `G = {e}` acting trivially.
    pub fn trivial_group(x: FiniteGroupoid) -> Self {
        Self::from_fn(FiniteGroupoid::trivial_group(), x, |_| 0, |y, _| y, |_, _| 0)
            .expect("trivial action is well formed")
    }

    /// `G = X⁰` with `σ⁰ = id`, `x⋊s(x) = x`, `x⋉s(x) = r(x)`.
    pub fn unit_space(x: FiniteGroupoid) -> Self {
        let (g, emb) = x.unit_space();
        let pos: HashMap<Id, Id> = emb.iter().enumerate().map(|(i, &u)| (u, i)).collect();
        let xs = x.clone();
        let p2 = pos.clone();
        Self::from_fn(g, x, |u| pos[&u], |y, _| y, move |y, _| p2[&xs.rng(y)])
            .expect("unit-space action is well formed")
    }

    /// The right action obtained from a left one by inversion:
    /// `x⋊t = (t⁻¹⥅x⁻¹)⁻¹`, `x⋉t = (t⁻¹⥆x⁻¹)⁻¹`, `σ⁰ = ρ⁰`.
    pub fn mirror(l: &LeftAction) -> Result<Self, StructureError> {
        let (h, x) = (&l.h, &l.x);
        Self::from_fn(
            h.clone(),
            x.clone(),
            |u| l.rho0(u),
            |y, t| x.inv(l.act(h.inv(t), x.inv(y)).expect("mirrored pair is in the domain")),
            |y, t| h.inv(l.restr(h.inv(t), x.inv(y)).expect("mirrored pair is in the domain")),
        )
    }

    pub fn sigma0(&self, u: Id) -> Id {
        self.sigma0[u].expect("sigma0 is defined on units")
    }

    pub fn sigma(&self, x: Id) -> Id {
        self.sigma0(self.x.src(x))
    }

    pub fn in_domain(&self, x: Id, t: Id) -> bool {
        self.sigma(x) == self.g.rng(t)
    }

    pub fn act(&self, x: Id, t: Id) -> Option<Id> {
        self.act[x * self.g.len() + t]
    }

    pub fn restr(&self, x: Id, t: Id) -> Option<Id> {
        self.restr[x * self.g.len() + t]
    }

    pub fn domain(&self) -> impl Iterator<Item = (Id, Id)> + '_ {
        self.x
            .elements()
            .flat_map(move |x| self.g.elements().filter(move |&t| self.in_domain(x, t)).map(move |t| (x, t)))
    }

    pub fn set_act(&mut self, x: Id, t: Id, y: Id) {
        assert!(self.in_domain(x, t));
        self.act[x * self.g.len() + t] = Some(y);
    }

    pub fn set_restr(&mut self, x: Id, t: Id, s: Id) {
        assert!(self.in_domain(x, t));
        self.restr[x * self.g.len() + t] = Some(s);
    }

    pub fn sigma0_map(&self) -> HashMap<Id, Id> {
        self.x.units().iter().map(|&u| (u, self.sigma0(u))).collect()
    }

    pub fn act_map(&self) -> HashMap<(Id, Id), Id> {
        self.domain().map(|(x, t)| ((x, t), self.act(x, t).unwrap())).collect()
    }

    pub fn restr_map(&self) -> HashMap<(Id, Id), Id> {
        self.domain().map(|(x, t)| ((x, t), self.restr(x, t).unwrap())).collect()
    }

    /// The orbit `x⋊G`, sorted.
    pub fn orbit(&self, x: Id) -> Vec<Id> {
        let mut o: Vec<Id> = self
            .g
            .elements()
            .filter(|&t| self.in_domain(x, t))
            .filter_map(|t| self.act(x, t))
            .collect();
        o.sort_unstable();
        o.dedup();
        o
    }
}

fn surjectivity(name: &str, units: &[Id], m: impl Fn(Id) -> Id, target: &FiniteGroupoid) -> CheckResult {
    let mut s = Scan::new();
    for &u in units {
        s.check(target.is_unit(m(u)), || vec![u], "momentum value is not a unit");
    }
    let hit: std::collections::HashSet<Id> = units.iter().map(|&u| m(u)).collect();
    for &v in target.units() {
        s.check(hit.contains(&v), || vec![v], "unit of the acting groupoid is not in the image");
    }
    CheckResult::from_scan(name, s)
}

/// Checks L1–L6 together with surjectivity of `ρ⁰`.
pub fn check_left_axioms(a: &LeftAction) -> ValidationReport {
    let (h, x) = (&a.h, &a.x);
    let mut rep = ValidationReport::new();
    rep.push(surjectivity("rho0-surjective", x.units(), |u| a.rho0(u), h));
    rep.push(CheckResult::pass("domain-exact", a.domain().count() as u64));

    let xprods = x.products();
    let hprods = h.products();

    let [l1, l2] = par_scan_many(h.len(), |hh| {
        let mut l1 = Scan::new();
        let mut l2 = Scan::new();
        for xx in x.elements().filter(|&xx| a.in_domain(hh, xx)) {
            let (y, k) = (a.act(hh, xx).unwrap(), a.restr(hh, xx).unwrap());
            l1.check(h.rng(hh) == a.rho(y), || vec![hh, xx], "r_H(h) != rho(h>x)");
            l1.check(h.src(k) == a.rho(x.inv(xx)), || vec![hh, xx], "s_H(h|x) != rho(x^-1)");
            l1.check(h.rng(k) == a.rho(x.inv(y)), || vec![hh, xx], "r_H(h|x) != rho((h>x)^-1)");
            if x.is_unit(xx) {
                l2.check(k == hh, || vec![hh, xx], "h|v != h for a unit v");
            }
        }
        [l1, l2]
    });
    let mut l2 = l2;
    for xx in x.elements() {
        l2.check(a.act(a.rho(xx), xx) == Some(xx), || vec![a.rho(xx), xx], "rho(x)>x != x");
    }
    rep.push(CheckResult::from_scan("L1", l1));
    rep.push(CheckResult::from_scan("L2", l2));

    let [l3, l4] = par_scan_many(h.len(), |hh| {
        let mut l3 = Scan::new();
        let mut l4 = Scan::new();
        for &(xx, yy, xy) in &xprods {
            if !a.in_domain(hh, xx) {
                continue;
            }
            let hx = a.act(hh, xx).unwrap();
            let k = a.restr(hh, xx).unwrap();
            let ky = a.act(k, yy);
            let side = ky.map(|ky| x.src(hx) == x.rng(ky)).unwrap_or(false);
            l3.check(side, || vec![hh, xx, yy], "s(h>x) != r((h|x)>y)");
            let lhs = a.restr(hh, xy);
            let rhs = a.restr(k, yy);
            l3.check(lhs.is_some() && lhs == rhs, || vec![hh, xx, yy], "h|(xy) != (h|x)|y");
            let lhs = a.act(hh, xy);
            let rhs = ky.and_then(|ky| x.mul(hx, ky));
            l4.check(lhs.is_some() && lhs == rhs, || vec![hh, xx, yy], "h>(xy) != (h>x)((h|x)>y)");
        }
        [l3, l4]
    });
    rep.push(CheckResult::from_scan("L3", l3));
    rep.push(CheckResult::from_scan("L4", l4));

    let mut by_first: Vec<Vec<(Id, Id)>> = vec![Vec::new(); h.len()];
    for &(hh, kk, hk) in &hprods {
        by_first[hh].push((kk, hk));
    }
    let [l5, l6] = par_scan_many(h.len(), |hh| {
        let mut l5 = Scan::new();
        let mut l6 = Scan::new();
        for &(kk, hk) in &by_first[hh] {
            for xx in x.elements().filter(|&xx| a.in_domain(kk, xx)) {
                let kx = a.act(kk, xx).unwrap();
                let k_x = a.restr(kk, xx).unwrap();
                let lhs = a.act(hk, xx);
                let rhs = a.act(hh, kx);
                l5.check(lhs.is_some() && lhs == rhs, || vec![hh, kk, xx], "(hk)>x != h>(k>x)");
                let lhs = a.restr(hk, xx);
                let rhs = a.restr(hh, kx).and_then(|p| h.mul(p, k_x));
                l6.check(lhs.is_some() && lhs == rhs, || vec![hh, kk, xx], "(hk)|x != (h|(k>x))(k|x)");
            }
        }
        [l5, l6]
    });
    rep.push(CheckResult::from_scan("L5", l5));
    rep.push(CheckResult::from_scan("L6", l6));
    rep
}

/// Checks R1–R6 together with surjectivity of `σ⁰`.
pub fn check_right_axioms(a: &RightAction) -> ValidationReport {
    let (g, x) = (&a.g, &a.x);
    let mut rep = ValidationReport::new();
    rep.push(surjectivity("sigma0-surjective", x.units(), |u| a.sigma0(u), g));
    rep.push(CheckResult::pass("domain-exact", a.domain().count() as u64));

    let xprods = x.products();
    let gprods = g.products();

    let [r1, r2] = par_scan_many(x.len(), |xx| {
        let mut r1 = Scan::new();
        let mut r2 = Scan::new();
        for t in g.elements().filter(|&t| a.in_domain(xx, t)) {
            let (y, s) = (a.act(xx, t).unwrap(), a.restr(xx, t).unwrap());
            r1.check(a.sigma(y) == g.src(t), || vec![xx, t], "sigma(x<t) != s_G(t)");
            r1.check(a.sigma(x.inv(xx)) == g.rng(s), || vec![xx, t], "sigma(x^-1) != r_G(x|t)");
            r1.check(a.sigma(x.inv(y)) == g.src(s), || vec![xx, t], "sigma((x<t)^-1) != s_G(x|t)");
            if x.is_unit(xx) {
                r2.check(s == t, || vec![xx, t], "v|t != t for a unit v");
            }
        }
        r2.check(a.act(xx, a.sigma(xx)) == Some(xx), || vec![xx, a.sigma(xx)], "x<sigma(x) != x");
        [r1, r2]
    });
    rep.push(CheckResult::from_scan("R1", r1));
    rep.push(CheckResult::from_scan("R2", r2));

    let [r3, r4] = par_scan_many(xprods.len(), |i| {
        let (xx, yy, xy) = xprods[i];
        let mut r3 = Scan::new();
        let mut r4 = Scan::new();
        for t in g.elements().filter(|&t| a.in_domain(yy, t)) {
            let yt = a.act(yy, t).unwrap();
            let ys = a.restr(yy, t).unwrap();
            let xs = a.act(xx, ys);
            let side = xs.map(|xs| x.src(xs) == x.rng(yt)).unwrap_or(false);
            r3.check(side, || vec![xx, yy, t], "s(x<(y|t)) != r(y<t)");
            let lhs = a.restr(xy, t);
            let rhs = a.restr(xx, ys);
            r3.check(lhs.is_some() && lhs == rhs, || vec![xx, yy, t], "(xy)|t != x|(y|t)");
            let lhs = a.act(xy, t);
            let rhs = xs.and_then(|xs| x.mul(xs, yt));
            r4.check(lhs.is_some() && lhs == rhs, || vec![xx, yy, t], "(xy)<t != (x<(y|t))(y<t)");
        }
        [r3, r4]
    });
    rep.push(CheckResult::from_scan("R3", r3));
    rep.push(CheckResult::from_scan("R4", r4));

    let [r5, r6] = par_scan_many(x.len(), |xx| {
        let mut r5 = Scan::new();
        let mut r6 = Scan::new();
        for &(s, t, st) in &gprods {
            if !a.in_domain(xx, s) {
                continue;
            }
            let xs = a.act(xx, s).unwrap();
            let x_s = a.restr(xx, s).unwrap();
            let lhs = a.act(xx, st);
            let rhs = a.act(xs, t);
            r5.check(lhs.is_some() && lhs == rhs, || vec![xx, s, t], "x<(st) != (x<s)<t");
            let lhs = a.restr(xx, st);
            let rhs = a.restr(xs, t).and_then(|q| g.mul(x_s, q));
            r6.check(lhs.is_some() && lhs == rhs, || vec![xx, s, t], "x|(st) != (x|s)((x<s)|t)");
        }
        [r5, r6]
    });
    rep.push(CheckResult::from_scan("R5", r5));
    rep.push(CheckResult::from_scan("R6", r6));
    rep
}

/// Verifies L7–L10 and the unit-preimage corollary by enumeration.
pub fn verify_derived_left_laws(a: &LeftAction) -> ValidationReport {
    let (h, x) = (&a.h, &a.x);
    let mut rep = ValidationReport::new();
    let mut l7 = Scan::new();
    for xx in x.elements() {
        l7.check(
            a.restr(a.rho(xx), xx) == Some(a.rho(x.inv(xx))),
            || vec![xx],
            "rho(x)|x != rho(x^-1)",
        );
    }
    rep.push(CheckResult::from_scan("L7", l7));

    let [l8, l9, l10, cor] = par_scan_many(h.len(), |hh| {
        let mut l8 = Scan::new();
        let mut l9 = Scan::new();
        let mut l10 = Scan::new();
        let mut cor = Scan::new();
        for xx in x.elements().filter(|&xx| a.in_domain(hh, xx)) {
            let y = a.act(hh, xx).unwrap();
            let k = a.restr(hh, xx).unwrap();
            if x.is_unit(xx) {
                l8.check(x.is_unit(y), || vec![hh, xx], "h>v is not a unit");
            }
            l9.check(a.act(k, x.inv(xx)) == Some(x.inv(y)), || vec![hh, xx], "(h>x)^-1 != (h|x)>x^-1");
            l9.check(a.restr(h.inv(hh), y) == Some(h.inv(k)), || vec![hh, xx], "(h|x)^-1 != h^-1|(h>x)");
            l10.check(a.act(hh, x.rng(xx)) == Some(x.rng(y)), || vec![hh, xx], "r(h>x) != h>r(x)");
            l10.check(a.act(k, x.src(xx)) == Some(x.src(y)), || vec![hh, xx], "s(h>x) != (h|x)>s(x)");
            if x.is_unit(y) {
                cor.check(x.is_unit(xx), || vec![hh, xx], "h>x is a unit but x is not");
            }
        }
        [l8, l9, l10, cor]
    });
    rep.push(CheckResult::from_scan("L8", l8));
    rep.push(CheckResult::from_scan("L9", l9));
    rep.push(CheckResult::from_scan("L10", l10));
    rep.push(CheckResult::from_scan("unit-preimage", cor));
    rep
}

/// Verifies R7–R10 by enumeration.
pub fn verify_derived_right_laws(a: &RightAction) -> ValidationReport {
    let (g, x) = (&a.g, &a.x);
    let mut rep = ValidationReport::new();
    let mut r7 = Scan::new();
    for xx in x.elements() {
        r7.check(
            a.restr(xx, a.sigma(xx)) == Some(a.sigma(x.inv(xx))),
            || vec![xx],
            "x|sigma(x) != sigma(x^-1)",
        );
    }
    rep.push(CheckResult::from_scan("R7", r7));

    let [r8, r9, r10, cor] = par_scan_many(x.len(), |xx| {
        let mut r8 = Scan::new();
        let mut r9 = Scan::new();
        let mut r10 = Scan::new();
        let mut cor = Scan::new();
        for t in g.elements().filter(|&t| a.in_domain(xx, t)) {
            let y = a.act(xx, t).unwrap();
            let s = a.restr(xx, t).unwrap();
            if x.is_unit(xx) {
                r8.check(x.is_unit(y), || vec![xx, t], "v<t is not a unit");
            }
            r9.check(a.act(x.inv(xx), s) == Some(x.inv(y)), || vec![xx, t], "(x<t)^-1 != x^-1<(x|t)");
            r9.check(a.restr(y, g.inv(t)) == Some(g.inv(s)), || vec![xx, t], "(x|t)^-1 != (x<t)|t^-1");
            r10.check(a.act(x.src(xx), t) == Some(x.src(y)), || vec![xx, t], "s(x<t) != s(x)<t");
            r10.check(a.act(x.rng(xx), s) == Some(x.rng(y)), || vec![xx, t], "r(x<t) != r(x)<(x|t)");
            if x.is_unit(y) {
                cor.check(x.is_unit(xx), || vec![xx, t], "x<t is a unit but x is not");
            }
        }
        [r8, r9, r10, cor]
    });
    rep.push(CheckResult::from_scan("R8", r8));
    rep.push(CheckResult::from_scan("R9", r9));
    rep.push(CheckResult::from_scan("R10", r10));
    rep.push(CheckResult::from_scan("unit-preimage", cor));
    rep
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreenessResult {
    pub free: bool,
    /// Least `(h,x)` with `h` not a unit and `h⥅x = x` (resp. `(x,t)` on the right).
    pub witness: Option<(Id, Id)>,
    pub free_on_units: bool,
    pub units_witness: Option<(Id, Id)>,
}

impl FreenessResult {
    /// Freeness on `X` and on `X⁰` agree.
    pub fn consistent(&self) -> bool {
        self.free == self.free_on_units
    }

    pub fn to_check(&self, name: &str) -> CheckResult {
        match self.witness {
            None => CheckResult::pass(name, 1),
            Some((a, b)) => CheckResult::fail(name, 1, Witness::new(vec![a, b], "non-unit fixes an element")),
        }
    }
}

pub fn is_free(a: &LeftAction) -> FreenessResult {
    let fixed = |only_units: bool| {
        a.domain().find(|&(h, x)| {
            (!only_units || a.x.is_unit(x)) && !a.h.is_unit(h) && a.act(h, x) == Some(x)
        })
    };
    let witness = fixed(false);
    let units_witness = fixed(true);
    FreenessResult { free: witness.is_none(), witness, free_on_units: units_witness.is_none(), units_witness }
}

pub fn is_free_right(a: &RightAction) -> FreenessResult {
    let fixed = |only_units: bool| {
        a.domain().find(|&(x, t)| {
            (!only_units || a.x.is_unit(x)) && !a.g.is_unit(t) && a.act(x, t) == Some(x)
        })
    };
    let witness = fixed(false);
    let units_witness = fixed(true);
    FreenessResult { free: witness.is_none(), witness, free_on_units: units_witness.is_none(), units_witness }
}

/// `H⥅x = H⥅x'` and `r(x) = r(x')` force `x = x'`.
pub fn check_unique_orbit_rep(a: &LeftAction) -> ValidationReport {
    let x = &a.x;
    let class: Vec<Id> = x.elements().map(|xx| a.orbit(xx)[0]).collect();
    let mut seen: HashMap<(Id, Id), Id> = HashMap::new();
    let mut s = Scan::new();
    for xx in x.elements() {
        let key = (class[xx], x.rng(xx));
        match seen.get(&key) {
            Some(&prev) => s.check(false, || vec![prev, xx], "distinct elements share orbit and range"),
            None => {
                s.check(true, Vec::new, "");
                seen.insert(key, xx);
            }
        }
    }
    let mut rep = ValidationReport::new();
    rep.push(CheckResult::from_scan("unique-orbit-rep", s));
    rep
}

/// Mirror of [`check_unique_orbit_rep`]: `x⋊G = x'⋊G` and `s(x) = s(x')` force `x = x'`.
pub fn check_unique_orbit_rep_right(a: &RightAction) -> ValidationReport {
    let x = &a.x;
    let class: Vec<Id> = x.elements().map(|xx| a.orbit(xx)[0]).collect();
    let mut seen: HashMap<(Id, Id), Id> = HashMap::new();
    let mut s = Scan::new();
    for xx in x.elements() {
        let key = (class[xx], x.src(xx));
        match seen.get(&key) {
            Some(&prev) => s.check(false, || vec![prev, xx], "distinct elements share orbit and source"),
            None => {
                s.check(true, Vec::new, "");
                seen.insert(key, xx);
            }
        }
    }
    let mut rep = ValidationReport::new();
    rep.push(CheckResult::from_scan("unique-orbit-rep-right", s));
    rep
}

/// C0–C3 for a left `H`-action and a right `G`-action on the same `X`.
pub fn check_in_tune(l: &LeftAction, r: &RightAction) -> ValidationReport {
    let mut rep = ValidationReport::new();
    if l.x != r.x {
        rep.push(CheckResult::fail("same-space", 0, Witness::new(vec![], "actions live on different groupoids")));
        return rep;
    }
    rep.push(CheckResult::pass("same-space", 1));
    let x = &l.x;
    let mut c0 = Scan::new();
    for (h, xx) in l.domain() {
        let y = l.act(h, xx).unwrap();
        c0.check(r.sigma(y) == r.sigma(xx), || vec![h, xx], "sigma(h>x) != sigma(x)");
    }
    for (xx, t) in r.domain() {
        let y = r.act(xx, t).unwrap();
        c0.check(l.rho(xx) == l.rho(y), || vec![xx, t], "rho(x) != rho(x<t)");
    }
    rep.push(CheckResult::from_scan("C0", c0));

    let [c1, c2, c3] = par_scan_many(l.h.len(), |h| {
        let mut c1 = Scan::new();
        let mut c2 = Scan::new();
        let mut c3 = Scan::new();
        for xx in x.elements().filter(|&xx| l.in_domain(h, xx)) {
            let hx = l.act(h, xx).unwrap();
            let h_x = l.restr(h, xx).unwrap();
            for t in r.g.elements().filter(|&t| r.in_domain(xx, t)) {
                let xt = r.act(xx, t).unwrap();
                let ids = || vec![h, xx, t];
                let in_dom = l.in_domain(h, xt) && r.in_domain(hx, t);
                let lhs = if in_dom { l.act(h, xt) } else { None };
                let rhs = if in_dom { r.act(hx, t) } else { None };
                c1.check(lhs.is_some() && lhs == rhs, ids, "h>(x<t) != (h>x)<t");
                let lhs = if in_dom { r.restr(hx, t) } else { None };
                c2.check(lhs.is_some() && lhs == r.restr(xx, t), ids, "(h>x)|t != x|t");
                let lhs = if in_dom { l.restr(h, xt) } else { None };
                c3.check(lhs == Some(h_x), ids, "h|(x<t) != h|x");
            }
        }
        [c1, c2, c3]
    });
    rep.push(CheckResult::from_scan("C1", c1));
    rep.push(CheckResult::from_scan("C2", c2));
    rep.push(CheckResult::from_scan("C3", c3));
    rep
}

/// A two-sided action certified to be free, proper and in tune.
#[derive(Debug, Clone)]
pub struct ParaEquivalence {
    pub left: LeftAction,
    pub right: RightAction,
    pub report: ValidationReport,
}

#[derive(Debug, Clone, thiserror::Error)]
#[error("para-equivalence rejected at {}", .report.first_failure().map(|c| c.check.as_str()).unwrap_or("?"))]
pub struct CertifyError {
    pub report: ValidationReport,
}

fn prefixed(mut rep: ValidationReport, prefix: &str) -> ValidationReport {
    for c in &mut rep.checks {
        c.check = format!("{prefix}{}", c.check);
    }
    rep
}

/// Runs every checker a para-equivalence needs.
pub fn certify_para_equivalence(l: LeftAction, r: RightAction) -> Result<ParaEquivalence, CertifyError> {
    let mut report = ValidationReport::new();
    report.extend(prefixed(l.h.validate(), "H/"));
    report.extend(prefixed(r.g.validate(), "G/"));
    report.extend(prefixed(l.x.validate(), "X/"));
    if !report.is_ok() {
        return Err(CertifyError { report });
    }
    report.extend(check_left_axioms(&l));
    report.extend(check_right_axioms(&r));
    if !report.is_ok() {
        return Err(CertifyError { report });
    }
    report.extend(check_in_tune(&l, &r));
    report.push(is_free(&l).to_check("free-left"));
    report.push(is_free_right(&r).to_check("free-right"));
    report.push(CheckResult::auto("proper-left"));
    report.push(CheckResult::auto("proper-right"));
    report.push(CheckResult::auto("open-source-maps"));
    if !report.is_ok() {
        return Err(CertifyError { report });
    }
    Ok(ParaEquivalence { left: l, right: r, report })
}

/// Counting measure is `⥅`-invariant: `x ↦ h⥅x` maps `X^u` bijectively onto `X^{h⥅u}`.
pub fn counting_haar_invariance(a: &LeftAction) -> ValidationReport {
    let x = &a.x;
    let mut s = Scan::new();
    for h in a.h.elements() {
        for &u in x.units() {
            if !a.in_domain(h, u) {
                continue;
            }
            let Some(v) = a.act(h, u) else {
                s.fail(vec![h, u], "h>u undefined");
                continue;
            };
            let fiber = x.arrows_to(u);
            let target = x.arrows_to(v);
            let mut img: Vec<Option<Id>> = fiber.iter().map(|&y| a.act(h, y)).collect();
            let into = img.iter().all(|y| y.map(|y| x.rng(y) == v).unwrap_or(false));
            img.sort_unstable();
            img.dedup();
            let bij = into && img.len() == fiber.len() && fiber.len() == target.len();
            s.check(bij, || vec![h, u], "x -> h>x is not a bijection X^u -> X^(h>u)");
        }
    }
    let mut rep = ValidationReport::new();
    rep.push(CheckResult::from_scan("counting-haar", s));
    rep
}

/// Mirror of [`counting_haar_invariance`]: `x ↦ x⋊t` maps `X_u` bijectively onto `X_{u⋊t}`.
pub fn counting_haar_invariance_right(a: &RightAction) -> ValidationReport {
    let x = &a.x;
    let mut s = Scan::new();
    for &u in x.units() {
        for t in a.g.elements() {
            if !a.in_domain(u, t) {
                continue;
            }
            let Some(v) = a.act(u, t) else {
                s.fail(vec![u, t], "u<t undefined");
                continue;
            };
            let fiber = x.arrows_from(u);
            let target = x.arrows_from(v);
            let mut img: Vec<Option<Id>> = fiber.iter().map(|&y| a.act(y, t)).collect();
            let into = img.iter().all(|y| y.map(|y| x.src(y) == v).unwrap_or(false));
            img.sort_unstable();
            img.dedup();
            let bij = into && img.len() == fiber.len() && fiber.len() == target.len();
            s.check(bij, || vec![u, t], "x -> x<t is not a bijection X_u -> X_(u<t)");
        }
    }
    let mut rep = ValidationReport::new();
    rep.push(CheckResult::from_scan("counting-haar-right", s));
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Status;

    fn z4_with_z2() -> LeftAction {
        // Z/2 acting on Z/4 by negation, trivial restriction (a semidirect action)
        let x = FiniteGroupoid::cyclic(4);
        let h = FiniteGroupoid::cyclic(2);
        LeftAction::from_fn(h, x, |_| 0, |hh, xx| if hh == 0 { xx } else { (4 - xx) % 4 }, |hh, _| hh).unwrap()
    }

    #[test]
    fn unit_space_action_passes() {
        let a = LeftAction::unit_space(FiniteGroupoid::pair(3));
        assert!(check_left_axioms(&a).is_ok(), "{}", check_left_axioms(&a));
        assert!(verify_derived_left_laws(&a).is_ok());
    }

    #[test]
    fn trivial_group_action_passes() {
        let a = LeftAction::trivial_group(FiniteGroupoid::cyclic(3));
        assert!(check_left_axioms(&a).is_ok());
        assert!(verify_derived_left_laws(&a).is_ok());
        assert!(is_free(&a).free);
    }

    #[test]
    fn perturbed_restriction_breaks_l6() {
        let mut a = z4_with_z2();
        assert!(check_left_axioms(&a).is_ok());
        a.set_restr(1, 1, 0);
        let rep = check_left_axioms(&a);
        assert_eq!(rep.status("L6"), Some(Status::Fail));
        // oracle: brute force over all (h,k,x) for the first L6 violation
        let (h, x) = (&a.h, &a.x);
        let mut first = None;
        'o: for hh in h.elements() {
            for kk in h.elements() {
                let hk = h.mul(hh, kk).unwrap();
                for xx in x.elements() {
                    let lhs = a.restr(hk, xx).unwrap();
                    let rhs = h.mul(a.restr(hh, a.act(kk, xx).unwrap()).unwrap(), a.restr(kk, xx).unwrap()).unwrap();
                    if lhs != rhs {
                        first = Some(vec![hh, kk, xx]);
                        break 'o;
                    }
                }
            }
        }
        assert_eq!(rep.get("L6").unwrap().witness.as_ref().map(|w| w.ids.clone()), first);
    }

    #[test]
    fn unit_space_acting_on_group_with_fixed_point() {
        // Z/2 acting trivially on the one-point groupoid fixes it
        let h = FiniteGroupoid::cyclic(2);
        let a = LeftAction::from_fn(h, FiniteGroupoid::space(1), |_| 0, |_, x| x, |hh, _| hh).unwrap();
        assert!(check_left_axioms(&a).is_ok());
        let f = is_free(&a);
        assert!(!f.free);
        assert_eq!(f.witness, Some((1, 0)));
        assert!(f.consistent());
    }

    #[test]
    fn mirror_is_a_right_action() {
        let r = RightAction::mirror(&z4_with_z2()).unwrap();
        assert!(check_right_axioms(&r).is_ok(), "{}", check_right_axioms(&r));
        assert!(verify_derived_right_laws(&r).is_ok());
    }

    #[test]
    fn unit_space_with_nontrivial_right_action_fails_c0() {
        let x = FiniteGroupoid::pair(2);
        let l = LeftAction::unit_space(x.clone());
        // Z/2 swapping the two points of the pair groupoid from the right
        let g = FiniteGroupoid::cyclic(2);
        let n = 2;
        let sw = |e: Id, t: Id| if t == 0 { e } else { ((e / n) ^ 1) * n + ((e % n) ^ 1) };
        let r = RightAction::from_fn(g, x, |_| 0, sw, |_, t| t).unwrap();
        assert!(check_right_axioms(&r).is_ok(), "{}", check_right_axioms(&r));
        let rep = check_in_tune(&l, &r);
        assert_eq!(rep.status("C0"), Some(Status::Fail));
        assert!(certify_para_equivalence(l, r).is_err());
    }

    #[test]
    fn trivial_left_is_in_tune_with_free_right() {
        let x = FiniteGroupoid::pair(2);
        let g = FiniteGroupoid::cyclic(2);
        let n = 2;
        let sw = |e: Id, t: Id| if t == 0 { e } else { ((e / n) ^ 1) * n + ((e % n) ^ 1) };
        let r = RightAction::from_fn(g, x.clone(), |_| 0, sw, |_, t| t).unwrap();
        let l = LeftAction::trivial_group(x);
        assert!(check_in_tune(&l, &r).is_ok());
        let p = certify_para_equivalence(l, r).unwrap();
        assert_eq!(p.report.status("proper-left"), Some(Status::AutoPassFinite));
    }

    #[test]
    fn fake_act_fails_counting_haar() {
        let mut a = z4_with_z2();
        assert!(counting_haar_invariance(&a).is_ok());
        a.set_act(1, 1, 2);
        assert!(!counting_haar_invariance(&a).is_ok());
    }
}
