//! Finite groupoids as dense id tables.

use std::collections::HashMap;

use crate::report::{par_scan, par_scan_many, CheckResult, Scan, ValidationReport, Witness};
use crate::Id;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StructureError {
    #[error("table `{table}` has length {got}, expected {expected}")]
    Length { table: &'static str, got: usize, expected: usize },
    #[error("table `{table}` refers to id {id}, but there are only {n} elements")]
    OutOfRange { table: &'static str, id: Id, n: usize },
    #[error("unit {0} listed twice")]
    DuplicateUnit(Id),
    #[error("{0}")]
    Other(String),
}

/// A finite groupoid given by its tables.
///
/// Construction only checks that every id is in range; whether the tables
/// satisfy the groupoid laws is what [`FiniteGroupoid::validate`] reports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroupoid {
    units: Vec<Id>,
    is_unit: Vec<bool>,
    src: Vec<Id>,
    rng: Vec<Id>,
    inv: Vec<Id>,
    mul: HashMap<(Id, Id), Id>,
    labels: Vec<String>,
    by_src: Vec<Vec<Id>>,
    by_rng: Vec<Vec<Id>>,
}

fn check_ids(table: &'static str, ids: &[Id], n: usize) -> Result<(), StructureError> {
    match ids.iter().find(|&&i| i >= n) {
        Some(&id) => Err(StructureError::OutOfRange { table, id, n }),
        None => Ok(()),
    }
}

fn check_len(table: &'static str, got: usize, expected: usize) -> Result<(), StructureError> {
    if got == expected {
        Ok(())
    } else {
        Err(StructureError::Length { table, got, expected })
    }
}

impl FiniteGroupoid {
    pub fn new(
        units: Vec<Id>,
        src: Vec<Id>,
        rng: Vec<Id>,
        inv: Vec<Id>,
        mul: HashMap<(Id, Id), Id>,
        labels: Option<Vec<String>>,
    ) -> Result<Self, StructureError> {
        let n = src.len();
        check_len("rng", rng.len(), n)?;
        check_len("inv", inv.len(), n)?;
        check_ids("units", &units, n)?;
        check_ids("src", &src, n)?;
        check_ids("rng", &rng, n)?;
        check_ids("inv", &inv, n)?;
        for (&(a, b), &c) in &mul {
            check_ids("mul", &[a, b, c], n)?;
        }
        let mut is_unit = vec![false; n];
        for &u in &units {
            if is_unit[u] {
                return Err(StructureError::DuplicateUnit(u));
            }
            is_unit[u] = true;
        }
        let labels = match labels {
            Some(l) => {
                check_len("labels", l.len(), n)?;
                l
            }
            None => (0..n).map(|i| format!("g{i}")).collect(),
        };
        let mut units = units;
        units.sort_unstable();
        let mut by_src = vec![Vec::new(); n];
        let mut by_rng = vec![Vec::new(); n];
        for a in 0..n {
            by_src[src[a]].push(a);
            by_rng[rng[a]].push(a);
        }
        Ok(FiniteGroupoid { units, is_unit, src, rng, inv, mul, labels, by_src, by_rng })
    }

    /// Builds the multiplication by calling `f` on every pair with `src(a) == rng(b)`.
    pub fn from_fn<F>(
        units: Vec<Id>,
        src: Vec<Id>,
        rng: Vec<Id>,
        inv: Vec<Id>,
        labels: Option<Vec<String>>,
        f: F,
    ) -> Result<Self, StructureError>
    where
        F: Fn(Id, Id) -> Option<Id>,
    {
        let n = src.len();
        check_ids("src", &src, n)?;
        check_ids("rng", &rng, n)?;
        let mut by_rng = vec![Vec::new(); n];
        for b in 0..n {
            by_rng[rng[b]].push(b);
        }
        let mut mul = HashMap::new();
        for a in 0..n {
            for &b in &by_rng[src[a]] {
                if let Some(c) = f(a, b) {
                    mul.insert((a, b), c);
                }
            }
        }
        Self::new(units, src, rng, inv, mul, labels)
    }

    /// One-object groupoid of a group given by its Cayley table.
    pub fn group(table: &[Vec<Id>], labels: Option<Vec<String>>) -> Result<Self, StructureError> {
        let n = table.len();
        let e = (0..n)
            .find(|&e| (0..n).all(|a| table[e][a] == a && table[a][e] == a))
            .ok_or_else(|| StructureError::Other("Cayley table has no identity".into()))?;
        let inv: Vec<Id> = (0..n)
            .map(|a| (0..n).find(|&b| table[a][b] == e).unwrap_or(a))
            .collect();
        Self::from_fn(vec![e], vec![e; n], vec![e; n], inv, labels, |a, b| Some(table[a][b]))
    }

    pub fn cyclic(n: usize) -> Self {
        let table: Vec<Vec<Id>> = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        let labels = (0..n).map(|i| format!("c{i}")).collect();
        Self::group(&table, Some(labels)).expect("cyclic table is well formed")
    }

    /// The trivial group `{e}`.
    pub fn trivial_group() -> Self {
        let mut g = Self::cyclic(1);
        g.labels = vec!["e".into()];
        g
    }

    /// A space: `n` units and nothing else.
    pub fn space(n: usize) -> Self {
        let ids: Vec<Id> = (0..n).collect();
        let labels = (0..n).map(|i| format!("p{i}")).collect();
        Self::from_fn(ids.clone(), ids.clone(), ids.clone(), ids, Some(labels), |a, b| {
            (a == b).then_some(a)
        })
        .expect("space tables are well formed")
    }

    /// Pair groupoid on `n` points; element `(i,j)` has id `i*n+j`, range `i`, source `j`.
    pub fn pair(n: usize) -> Self {
        let idx = |i: usize, j: usize| i * n + j;
        let mut src = Vec::new();
        let mut rng = Vec::new();
        let mut inv = Vec::new();
        let mut labels = Vec::new();
        for i in 0..n {
            for j in 0..n {
                src.push(idx(j, j));
                rng.push(idx(i, i));
                inv.push(idx(j, i));
                labels.push(format!("p{i}_{j}"));
            }
        }
        let units = (0..n).map(|i| idx(i, i)).collect();
        Self::from_fn(units, src, rng, inv, Some(labels), |a, b| {
            Some(idx(a / n, b % n))
        })
        .expect("pair tables are well formed")
    }

    pub fn len(&self) -> usize {
        self.src.len()
    }

    pub fn is_empty(&self) -> bool {
        self.src.is_empty()
    }

    pub fn elements(&self) -> std::ops::Range<Id> {
        0..self.len()
    }

    pub fn units(&self) -> &[Id] {
        &self.units
    }

    pub fn is_unit(&self, a: Id) -> bool {
        self.is_unit[a]
    }

    pub fn src(&self, a: Id) -> Id {
        self.src[a]
    }

    pub fn rng(&self, a: Id) -> Id {
        self.rng[a]
    }

    pub fn inv(&self, a: Id) -> Id {
        self.inv[a]
    }

    pub fn mul(&self, a: Id, b: Id) -> Option<Id> {
        self.mul.get(&(a, b)).copied()
    }

    pub fn mul_table(&self) -> &HashMap<(Id, Id), Id> {
        &self.mul
    }

    /// Defined products in lexicographic order of the pair.
    pub fn products(&self) -> Vec<(Id, Id, Id)> {
        let mut v: Vec<(Id, Id, Id)> = self.mul.iter().map(|(&(a, b), &c)| (a, b, c)).collect();
        v.sort_unstable();
        v
    }

    pub fn label(&self, a: Id) -> &str {
        &self.labels[a]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn set_labels(&mut self, labels: Vec<String>) {
        assert_eq!(labels.len(), self.len());
        self.labels = labels;
    }

    pub fn find(&self, label: &str) -> Option<Id> {
        self.labels.iter().position(|l| l == label)
    }

    /// Arrows with source `u`, ascending.
    pub fn arrows_from(&self, u: Id) -> &[Id] {
        &self.by_src[u]
    }

    /// Arrows with range `u`, ascending.
    pub fn arrows_to(&self, u: Id) -> &[Id] {
        &self.by_rng[u]
    }

    /// Arrows `a` with `src(a) == rng(a) == u`.
    pub fn isotropy(&self, u: Id) -> Vec<Id> {
        self.by_src[u].iter().copied().filter(|&a| self.rng[a] == u).collect()
    }

    /// Whether the groupoid has exactly one unit.
    pub fn is_group(&self) -> bool {
        self.units.len() == 1
    }

    /// The unit space as a groupoid, with the embedding into `self`.
    pub fn unit_space(&self) -> (FiniteGroupoid, Vec<Id>) {
        let emb = self.units.clone();
        let k = emb.len();
        let ids: Vec<Id> = (0..k).collect();
        let labels = emb.iter().map(|&u| self.labels[u].clone()).collect();
        let g = Self::from_fn(ids.clone(), ids.clone(), ids.clone(), ids, Some(labels), |a, b| {
            (a == b).then_some(a)
        })
        .expect("unit space tables are well formed");
        (g, emb)
    }

    pub fn power(&self, a: Id, k: usize) -> Option<Id> {
        let mut x = self.rng(a);
        for _ in 0..k {
            x = self.mul(x, a)?;
        }
        Some(x)
    }

    /// Order of `a` in its isotropy group, if `a` is a loop.
    pub fn order(&self, a: Id) -> Option<usize> {
        if self.src(a) != self.rng(a) {
            return None;
        }
        let u = self.rng(a);
        let mut x = a;
        for k in 1..=self.len() {
            if x == u {
                return Some(k);
            }
            x = self.mul(x, a)?;
        }
        None
    }

    /// Checks every groupoid law by enumeration.
    pub fn validate(&self) -> ValidationReport {
        let n = self.len();
        let mut rep = ValidationReport::new();

        let mut s = Scan::new();
        for a in 0..n {
            s.check(self.is_unit[self.src[a]], || vec![a], "src(a) is not a unit");
            s.check(self.is_unit[self.rng[a]], || vec![a], "rng(a) is not a unit");
        }
        rep.push(CheckResult::from_scan("src-rng-units", s));

        let mut s = Scan::new();
        for a in 0..n {
            let looks_unit = self.src[a] == a && self.rng[a] == a && self.mul(a, a) == Some(a);
            s.check(looks_unit == self.is_unit[a], || vec![a], "declared units differ from idempotent loops");
        }
        rep.push(CheckResult::from_scan("units", s));

        let [dom, sr] = par_scan_many(n, |a| {
            let mut dom = Scan::new();
            let mut sr = Scan::new();
            for b in 0..n {
                let composable = self.src[a] == self.rng[b];
                match self.mul(a, b) {
                    Some(c) => {
                        dom.check(composable, || vec![a, b], "product defined on a non-composable pair");
                        sr.check(
                            self.src[c] == self.src[b] && self.rng[c] == self.rng[a],
                            || vec![a, b],
                            "src(ab) != src(b) or rng(ab) != rng(a)",
                        );
                    }
                    None => dom.check(!composable, || vec![a, b], "product undefined on a composable pair"),
                }
            }
            [dom, sr]
        });
        rep.push(CheckResult::from_scan("mul-domain", dom));
        rep.push(CheckResult::from_scan("mul-src-rng", sr));

        let assoc = par_scan(n, |a| {
            let mut s = Scan::new();
            for &b in &self.by_rng[self.src[a]] {
                let Some(ab) = self.mul(a, b) else { continue };
                for &c in &self.by_rng[self.src[b]] {
                    let Some(bc) = self.mul(b, c) else { continue };
                    let l = self.mul(ab, c);
                    let r = self.mul(a, bc);
                    s.check(l.is_some() && l == r, || vec![a, b, c], "(ab)c != a(bc)");
                }
            }
            s
        });
        rep.push(CheckResult::from_scan("assoc", assoc));

        let mut s = Scan::new();
        for a in 0..n {
            s.check(self.mul(self.rng[a], a) == Some(a), || vec![a], "rng(a) a != a");
            s.check(self.mul(a, self.src[a]) == Some(a), || vec![a], "a src(a) != a");
        }
        rep.push(CheckResult::from_scan("identity", s));

        let mut s = Scan::new();
        for a in 0..n {
            let i = self.inv[a];
            s.check(self.inv[i] == a, || vec![a], "inv(inv(a)) != a");
            s.check(self.mul(a, i) == Some(self.rng[a]), || vec![a], "a inv(a) != rng(a)");
            s.check(self.mul(i, a) == Some(self.src[a]), || vec![a], "inv(a) a != src(a)");
        }
        rep.push(CheckResult::from_scan("inverse", s));
        rep
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }

    /// Connected components of the unit space, each sorted, ordered by least unit.
    pub fn unit_orbits(&self) -> Vec<Vec<Id>> {
        let mut uf = crate::algebra::UnionFind::new(self.len());
        for a in 0..self.len() {
            uf.union(self.src[a], self.rng[a]);
        }
        let mut groups: HashMap<Id, Vec<Id>> = HashMap::new();
        for &u in &self.units {
            groups.entry(uf.find(u)).or_default().push(u);
        }
        let mut out: Vec<Vec<Id>> = groups.into_values().collect();
        for g in &mut out {
            g.sort_unstable();
        }
        out.sort();
        out
    }
}

/// A map between groupoids, checked by [`GroupoidMorphism::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupoidMorphism {
    pub map: Vec<Id>,
}

impl GroupoidMorphism {
    pub fn new(map: Vec<Id>) -> Self {
        GroupoidMorphism { map }
    }

    pub fn apply(&self, a: Id) -> Id {
        self.map[a]
    }

    pub fn validate(&self, dom: &FiniteGroupoid, cod: &FiniteGroupoid) -> ValidationReport {
        let mut rep = ValidationReport::new();
        if self.map.len() != dom.len() || self.map.iter().any(|&b| b >= cod.len()) {
            rep.push(CheckResult::fail("morphism-total", 0, Witness::new(vec![], "map is not total into the codomain")));
            return rep;
        }
        let f = &self.map;
        let mut s = Scan::new();
        for a in dom.elements() {
            s.check(cod.src(f[a]) == f[dom.src(a)], || vec![a], "src not preserved");
            s.check(cod.rng(f[a]) == f[dom.rng(a)], || vec![a], "rng not preserved");
            s.check(cod.inv(f[a]) == f[dom.inv(a)], || vec![a], "inv not preserved");
            if dom.is_unit(a) {
                s.check(cod.is_unit(f[a]), || vec![a], "unit not sent to a unit");
            }
        }
        rep.push(CheckResult::from_scan("morphism-structure", s));
        let mut s = Scan::new();
        for (a, b, c) in dom.products() {
            s.check(cod.mul(f[a], f[b]) == Some(f[c]), || vec![a, b], "product not preserved");
        }
        rep.push(CheckResult::from_scan("morphism-mul", s));
        rep
    }

    pub fn is_bijective(&self, cod: &FiniteGroupoid) -> bool {
        if self.map.len() != cod.len() {
            return false;
        }
        let mut seen = vec![false; cod.len()];
        for &b in &self.map {
            if b >= cod.len() || seen[b] {
                return false;
            }
            seen[b] = true;
        }
        true
    }

    pub fn validate_iso(&self, dom: &FiniteGroupoid, cod: &FiniteGroupoid) -> ValidationReport {
        let mut rep = self.validate(dom, cod);
        let res = if self.is_bijective(cod) {
            CheckResult::pass("morphism-bijective", dom.len() as u64)
        } else {
            CheckResult::fail("morphism-bijective", dom.len() as u64, Witness::new(vec![], "map is not a bijection"))
        };
        rep.push(res);
        rep
    }
}

/// A verified isomorphism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Isomorphism {
    pub forward: GroupoidMorphism,
    pub backward: GroupoidMorphism,
}

impl Isomorphism {
    /// Wraps `map` after checking it is an isomorphism.
    pub fn verified(map: Vec<Id>, dom: &FiniteGroupoid, cod: &FiniteGroupoid) -> Option<Self> {
        let forward = GroupoidMorphism::new(map);
        if !forward.validate_iso(dom, cod).is_ok() {
            return None;
        }
        let mut back = vec![0; cod.len()];
        for (a, &b) in forward.map.iter().enumerate() {
            back[b] = a;
        }
        Some(Isomorphism { forward, backward: GroupoidMorphism::new(back) })
    }
}

/// Transformation groupoid `grp ⋉ space` with `r(t,x) = t*x`, `s(t,x) = x`.
///
/// Element `(t,x)` gets id `t * n + x`. `act(t, x)` must be a left action of
/// the one-object groupoid `grp` on `0..n`.
pub fn transformation_groupoid<F>(grp: &FiniteGroupoid, n: usize, act: F) -> Result<FiniteGroupoid, StructureError>
where
    F: Fn(Id, usize) -> usize,
{
    if !grp.is_group() {
        return Err(StructureError::Other("transformation groupoid needs a one-object groupoid".into()));
    }
    let e = grp.units()[0];
    let g = grp.len();
    let idx = |t: Id, x: usize| t * n + x;
    let table: Vec<Vec<usize>> = (0..g).map(|t| (0..n).map(|x| act(t, x)).collect()).collect();
    for row in &table {
        check_ids("act", row, n)?;
    }
    let mut src = Vec::with_capacity(g * n);
    let mut rng = Vec::with_capacity(g * n);
    let mut inv = Vec::with_capacity(g * n);
    let mut labels = Vec::with_capacity(g * n);
    for t in 0..g {
        for x in 0..n {
            src.push(idx(e, x));
            rng.push(idx(e, table[t][x]));
            inv.push(idx(grp.inv(t), table[t][x]));
            labels.push(format!("({},{})", grp.label(t), x));
        }
    }
    let units = (0..n).map(|x| idx(e, x)).collect();
    FiniteGroupoid::from_fn(units, src, rng, inv, Some(labels), |a, b| {
        let (t, _) = (a / n, a % n);
        let (s, y) = (b / n, b % n);
        grp.mul(t, s).map(|ts| idx(ts, y))
    })
}

/// Skew product `G(c)`: pairs `(g,h)` with `(g,h)(g', h c(g)) = (gg', h)`.
///
/// `c` maps `g` into the one-object groupoid `h`. Element `(g,k)` gets id `g * |h| + k`.
pub fn skew_product_groupoid(
    g: &FiniteGroupoid,
    h: &FiniteGroupoid,
    c: &GroupoidMorphism,
) -> Result<FiniteGroupoid, StructureError> {
    if !h.is_group() {
        return Err(StructureError::Other("skew product needs a group as target".into()));
    }
    if !c.validate(g, h).is_ok() {
        return Err(StructureError::Other("cocycle is not a homomorphism".into()));
    }
    let m = h.len();
    let idx = |a: Id, k: Id| a * m + k;
    let hm = |a: Id, b: Id| h.mul(a, b).expect("group product is total");
    let mut src = Vec::new();
    let mut rng = Vec::new();
    let mut inv = Vec::new();
    let mut labels = Vec::new();
    for a in g.elements() {
        for k in h.elements() {
            let kc = hm(k, c.apply(a));
            src.push(idx(g.src(a), kc));
            rng.push(idx(g.rng(a), k));
            inv.push(idx(g.inv(a), kc));
            labels.push(format!("({},{})", g.label(a), h.label(k)));
        }
    }
    let mut units = Vec::new();
    for &u in g.units() {
        for k in h.elements() {
            units.push(idx(u, k));
        }
    }
    FiniteGroupoid::from_fn(units, src, rng, inv, Some(labels), |x, y| {
        let (a, k) = (x / m, x % m);
        let (b, k2) = (y / m, y % m);
        if k2 != hm(k, c.apply(a)) {
            return None;
        }
        g.mul(a, b).map(|ab| idx(ab, k))
    })
}

#[derive(Debug, Clone)]
struct Component {
    base: Id,
    units: Vec<Id>,
    iso: Vec<Id>,
    orders: Vec<usize>,
}

fn components(g: &FiniteGroupoid) -> Vec<Component> {
    g.unit_orbits()
        .into_iter()
        .map(|units| {
            let base = units[0];
            let iso = g.isotropy(base);
            let mut orders: Vec<usize> = iso.iter().map(|&a| g.order(a).unwrap_or(0)).collect();
            orders.sort_unstable();
            Component { base, units, iso, orders }
        })
        .collect()
}

/// Greedy generating set of the isotropy group, in id order.
fn generators(g: &FiniteGroupoid, iso: &[Id], unit: Id) -> Vec<Id> {
    let mut gens = Vec::new();
    let mut span = vec![unit];
    for &a in iso {
        if span.contains(&a) {
            continue;
        }
        gens.push(a);
        span = closure(g, unit, &gens);
    }
    gens
}

fn closure(g: &FiniteGroupoid, unit: Id, gens: &[Id]) -> Vec<Id> {
    let mut seen = vec![unit];
    let mut i = 0;
    while i < seen.len() {
        let x = seen[i];
        for &s in gens {
            if let Some(y) = g.mul(x, s) {
                if !seen.contains(&y) {
                    seen.push(y);
                }
            }
        }
        i += 1;
    }
    seen
}

/// Extends a generator assignment to a map on the whole isotropy group.
fn extend_hom(
    a: &FiniteGroupoid,
    b: &FiniteGroupoid,
    ua: Id,
    ub: Id,
    gens: &[Id],
    images: &[Id],
) -> Option<HashMap<Id, Id>> {
    let mut map = HashMap::new();
    map.insert(ua, ub);
    let mut queue = vec![ua];
    let mut i = 0;
    while i < queue.len() {
        let x = queue[i];
        let fx = map[&x];
        for (&s, &fs) in gens.iter().zip(images) {
            let y = a.mul(x, s)?;
            let fy = b.mul(fx, fs)?;
            match map.get(&y) {
                Some(&prev) if prev != fy => return None,
                Some(_) => {}
                None => {
                    map.insert(y, fy);
                    queue.push(y);
                }
            }
        }
        i += 1;
    }
    Some(map)
}

fn group_iso(a: &FiniteGroupoid, ca: &Component, b: &FiniteGroupoid, cb: &Component) -> Option<HashMap<Id, Id>> {
    if ca.iso.len() != cb.iso.len() || ca.orders != cb.orders {
        return None;
    }
    let gens = generators(a, &ca.iso, ca.base);
    let cands: Vec<Vec<Id>> = gens
        .iter()
        .map(|&s| {
            let o = a.order(s);
            cb.iso.iter().copied().filter(|&t| b.order(t) == o).collect()
        })
        .collect();
    let mut pick = vec![0usize; gens.len()];
    loop {
        if cands.iter().any(|c| c.is_empty()) {
            return None;
        }
        let images: Vec<Id> = pick.iter().zip(&cands).map(|(&i, c)| c[i]).collect();
        if let Some(map) = extend_hom(a, b, ca.base, cb.base, &gens, &images) {
            let mut vals: Vec<Id> = map.values().copied().collect();
            vals.sort_unstable();
            vals.dedup();
            if map.len() == ca.iso.len() && vals.len() == map.len() {
                return Some(map);
            }
        }
        // odometer over candidate tuples, first generator slowest
        let mut k = gens.len();
        loop {
            if k == 0 {
                return None;
            }
            k -= 1;
            pick[k] += 1;
            if pick[k] < cands[k].len() {
                break;
            }
            pick[k] = 0;
        }
        if gens.is_empty() {
            return None;
        }
    }
}

/// Searches for an isomorphism `a → b`.
///
/// Components are matched by unit count and isotropy type; inside a
/// component the map is fixed by an isotropy isomorphism plus a choice of
/// arrows from the base unit, both taken in id order. The result is
/// checked before it is returned.
pub fn iso_check(a: &FiniteGroupoid, b: &FiniteGroupoid) -> Option<Isomorphism> {
    if a.len() != b.len() || a.units().len() != b.units().len() {
        return None;
    }
    let comps_a = components(a);
    let comps_b = components(b);
    if comps_a.len() != comps_b.len() {
        return None;
    }
    let mut used = vec![false; comps_b.len()];
    let mut map = vec![usize::MAX; a.len()];
    for ca in &comps_a {
        let mut found = None;
        for (j, cb) in comps_b.iter().enumerate() {
            if used[j] || cb.units.len() != ca.units.len() {
                continue;
            }
            if let Some(gmap) = group_iso(a, ca, b, cb) {
                found = Some((j, gmap));
                break;
            }
        }
        let (j, gmap) = found?;
        used[j] = true;
        let cb = &comps_b[j];
        // spanning arrows from the base unit to every unit of the component
        let span_a: HashMap<Id, Id> = ca
            .units
            .iter()
            .map(|&v| {
                let t = if v == ca.base {
                    v
                } else {
                    *a.arrows_from(ca.base).iter().find(|&&t| a.rng(t) == v).expect("component is connected")
                };
                (v, t)
            })
            .collect();
        let unit_map: HashMap<Id, Id> = ca.units.iter().copied().zip(cb.units.iter().copied()).collect();
        let span_b: HashMap<Id, Id> = cb
            .units
            .iter()
            .map(|&v| {
                let t = if v == cb.base {
                    v
                } else {
                    *b.arrows_from(cb.base).iter().find(|&&t| b.rng(t) == v).expect("component is connected")
                };
                (v, t)
            })
            .collect();
        for &v in &ca.units {
            for &x in a.arrows_from(v) {
                let w = a.rng(x);
                // x = t_w g t_v^{-1}, so g = t_w^{-1} x t_v
                let g = a.mul(a.mul(a.inv(span_a[&w]), x)?, span_a[&v])?;
                let fg = *gmap.get(&g)?;
                let tw = span_b[&unit_map[&w]];
                let tv = span_b[&unit_map[&v]];
                map[x] = b.mul(b.mul(tw, fg)?, b.inv(tv))?;
            }
        }
    }
    if map.contains(&usize::MAX) {
        return None;
    }
    Isomorphism::verified(map, a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn klein() -> FiniteGroupoid {
        let t: Vec<Vec<Id>> = (0..4).map(|a| (0..4).map(|b| a ^ b).collect()).collect();
        FiniteGroupoid::group(&t, None).unwrap()
    }

    #[test]
    fn trivial_groupoid_is_valid() {
        assert!(FiniteGroupoid::space(1).is_valid());
    }

    #[test]
    fn z2_is_valid() {
        assert!(FiniteGroupoid::cyclic(2).is_valid());
    }

    #[test]
    fn broken_z2_reports_inverse_law() {
        let g = FiniteGroupoid::cyclic(2);
        let mut mul = g.mul_table().clone();
        mul.insert((1, 1), 1);
        let bad = FiniteGroupoid::new(vec![0], vec![0, 0], vec![0, 0], vec![0, 1], mul, None).unwrap();
        let rep = bad.validate();
        assert_eq!(rep.status("inverse"), Some(crate::Status::Fail));
        assert_eq!(rep.get("inverse").unwrap().witness.as_ref().unwrap().ids, vec![1]);
    }

    #[test]
    fn brute_force_oracle_agrees_on_broken_tables() {
        // independent oracle: count inverse-law failures directly
        let g = FiniteGroupoid::cyclic(2);
        let mut mul = g.mul_table().clone();
        mul.insert((1, 1), 1);
        let oracle_bad: Vec<Id> = (0..2).filter(|&a| mul[&(a, a)] != 0).collect();
        assert_eq!(oracle_bad, vec![1]);
    }

    #[test]
    fn out_of_range_is_structural() {
        let err = FiniteGroupoid::new(vec![0], vec![0, 5], vec![0, 0], vec![0, 1], HashMap::new(), None);
        assert!(matches!(err, Err(StructureError::OutOfRange { .. })));
    }

    #[test]
    fn transformation_groupoid_swap() {
        let z2 = FiniteGroupoid::cyclic(2);
        let g = transformation_groupoid(&z2, 2, |t, x| (t + x) % 2).unwrap();
        assert_eq!(g.len(), 4);
        assert_eq!(g.units().len(), 2);
        assert!(g.is_valid());
    }

    #[test]
    fn transformation_groupoid_trivial() {
        let g = transformation_groupoid(&FiniteGroupoid::trivial_group(), 1, |_, x| x).unwrap();
        assert_eq!(g.len(), 1);
        assert!(g.is_valid());
    }

    #[test]
    fn skew_product_z4_mod2() {
        let z4 = FiniteGroupoid::cyclic(4);
        let z2 = FiniteGroupoid::cyclic(2);
        let c = GroupoidMorphism::new((0..4).map(|a| a % 2).collect());
        let g = skew_product_groupoid(&z4, &z2, &c).unwrap();
        assert_eq!(g.len(), 8);
        assert_eq!(g.units().len(), 2);
        assert!(g.is_valid());
    }

    #[test]
    fn skew_product_pair_trivial_cocycle_splits() {
        let p = FiniteGroupoid::pair(2);
        let z2 = FiniteGroupoid::cyclic(2);
        let c = GroupoidMorphism::new(vec![0; 4]);
        let g = skew_product_groupoid(&p, &z2, &c).unwrap();
        assert!(g.is_valid());
        // oracle: with c = 0 the second coordinate never changes, so there is one
        // component per element of h
        assert_eq!(g.unit_orbits().len(), 2);
        assert!(iso_check(&g, &FiniteGroupoid::pair(2)).is_none());
    }

    #[test]
    fn iso_identity() {
        let g = FiniteGroupoid::pair(3);
        let iso = iso_check(&g, &g).unwrap();
        assert_eq!(iso.forward.map.len(), 9);
    }

    #[test]
    fn z4_not_klein() {
        // oracle: Z/4 has an element of order 4, the Klein group has exponent 2
        let z4 = FiniteGroupoid::cyclic(4);
        let k = klein();
        assert_eq!((0..4).filter_map(|a| z4.order(a)).max(), Some(4));
        assert_eq!((0..4).filter_map(|a| k.order(a)).max(), Some(2));
        assert!(iso_check(&z4, &k).is_none());
        assert!(iso_check(&k, &z4).is_none());
    }

    #[test]
    fn iso_relabelled_transformation_groupoid() {
        let z3 = FiniteGroupoid::cyclic(3);
        let a = transformation_groupoid(&z3, 3, |t, x| (t + x) % 3).unwrap();
        let b = FiniteGroupoid::pair(3);
        assert!(iso_check(&a, &b).is_some());
    }

    #[test]
    fn inverse_of_product() {
        let g = FiniteGroupoid::pair(3);
        for (a, b, c) in g.products() {
            assert_eq!(g.inv(c), g.mul(g.inv(b), g.inv(a)).unwrap());
        }
    }
}
