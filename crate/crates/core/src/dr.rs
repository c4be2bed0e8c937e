//! Deaconu–Renault groupoids of commuting bijections of a finite set, cut to a degree window.
//!
//! On a finite `Y` the groupoid `Y ⋊ ℕ` of a bijection `M` is `{(x, k, M^k x)}`
//! with `k ∈ ℤ`, which is infinite. We keep `|k| ≤ k_bound` and leave
//! composites outside the window undefined; those pairs are listed in
//! [`DrGroupoid::excluded`] and every checker quantifies over defined
//! products only.

use std::collections::HashMap;

use crate::groupoid::{FiniteGroupoid, StructureError};
use crate::perm::{lcm, Perm};
use crate::report::{CheckResult, Scan, ValidationReport, Witness};
use crate::ssa::{is_free, FreenessResult, LeftAction};
use crate::Id;

/// Two self-maps `S`, `T` of `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarCommutingSystem {
    pub n: usize,
    pub s: Vec<usize>,
    pub t: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DrError {
    #[error("map {0} has length {1}, expected {2}")]
    Length(&'static str, usize, usize),
    #[error("map {0} sends a point outside 0..n")]
    Range(&'static str),
    #[error("map {0} is not a bijection; degree windows need invertible maps")]
    NotBijective(&'static str),
    #[error("fill-in element not unique for {0:?}")]
    FillIn(Witness),
    #[error("order {k} of T exceeds the window {k_bound}")]
    WindowTooSmall { k: usize, k_bound: usize },
    #[error(transparent)]
    Structure(#[from] StructureError),
}

impl StarCommutingSystem {
    pub fn new(n: usize, s: Vec<usize>, t: Vec<usize>) -> Result<Self, DrError> {
        for (name, m) in [("S", &s), ("T", &t)] {
            if m.len() != n {
                return Err(DrError::Length(name, m.len(), n));
            }
            if m.iter().any(|&v| v >= n) {
                return Err(DrError::Range(name));
            }
        }
        Ok(StarCommutingSystem { n, s, t })
    }

    pub fn from_perms(s: &Perm, t: &Perm) -> Result<Self, DrError> {
        Self::new(s.degree(), s.0.clone(), t.0.clone())
    }

    /// `θ_{p,m}(x) = T^p S^m x` for `p, m ≥ 0`.
    pub fn theta(&self, p: usize, m: usize, x: usize) -> usize {
        let mut y = x;
        for _ in 0..m {
            y = self.s[y];
        }
        for _ in 0..p {
            y = self.t[y];
        }
        y
    }

    fn perm(&self, which: &'static str) -> Result<Perm, DrError> {
        let m = if which == "S" { &self.s } else { &self.t };
        let mut seen = vec![false; self.n];
        for &v in m {
            if seen[v] {
                return Err(DrError::NotBijective(which));
            }
            seen[v] = true;
        }
        Ok(Perm(m.clone()))
    }

    pub fn s_perm(&self) -> Result<Perm, DrError> {
        self.perm("S")
    }

    pub fn t_perm(&self) -> Result<Perm, DrError> {
        self.perm("T")
    }
}

fn iterate(m: &[usize], k: usize, x: usize) -> usize {
    (0..k).fold(x, |y, _| m[y])
}

/// Surjectivity, `ST = TS`, and: `Sx = Ty` has exactly one `z` with `Tz = x`, `Sz = y`.
pub fn check_star_commuting(sys: &StarCommutingSystem) -> ValidationReport {
    let n = sys.n;
    let mut rep = ValidationReport::new();
    let mut s = Scan::new();
    for (name, m) in [("S", &sys.s), ("T", &sys.t)] {
        let mut hit = vec![false; n];
        for &v in m.iter() {
            hit[v] = true;
        }
        for (y, &h) in hit.iter().enumerate() {
            s.check(h, || vec![y], &format!("{name} misses a point"));
        }
    }
    rep.push(CheckResult::from_scan("surjective", s));

    let mut s = Scan::new();
    for x in 0..n {
        s.check(sys.s[sys.t[x]] == sys.t[sys.s[x]], || vec![x], "ST x != TS x");
    }
    rep.push(CheckResult::from_scan("commute", s));

    let mut s = Scan::new();
    for x in 0..n {
        for y in 0..n {
            if sys.s[x] != sys.t[y] {
                continue;
            }
            let fills = (0..n).filter(|&z| sys.t[z] == x && sys.s[z] == y).count();
            let note = if fills == 0 { "no fill-in z" } else { "fill-in z not unique" };
            s.check(fills == 1, || vec![x, y], note);
        }
    }
    rep.push(CheckResult::from_scan("star-commuting", s));
    rep
}

/// Rank-one window: elements `(x, k, M^k x)` with `|k| ≤ k_bound`.
#[derive(Debug, Clone)]
pub struct DrGroupoid {
    pub groupoid: FiniteGroupoid,
    /// `(x, k, y)` per id; id is `x·(2K+1) + (k+K)`.
    pub elements: Vec<(usize, i64, usize)>,
    pub k_bound: usize,
    /// Composable pairs whose product leaves the window.
    pub excluded: Vec<(Id, Id)>,
}

impl DrGroupoid {
    pub fn id(&self, x: usize, k: i64) -> Option<Id> {
        let kb = self.k_bound as i64;
        (k.abs() <= kb).then(|| x * (2 * self.k_bound + 1) + (k + kb) as usize)
    }

    pub fn degree(&self, a: Id) -> i64 {
        self.elements[a].1
    }
}

fn power(p: &Perm, k: i64, x: usize) -> usize {
    if k >= 0 {
        iterate(&p.0, k as usize, x)
    } else {
        iterate(&p.inverse().0, (-k) as usize, x)
    }
}

/// `Y ⋊_M ℕ` cut to `|k| ≤ k_bound`.
pub fn dr_groupoid(m: &Perm, k_bound: usize) -> Result<DrGroupoid, DrError> {
    let n = m.degree();
    let kb = k_bound as i64;
    let w = 2 * k_bound + 1;
    let id = |x: usize, k: i64| x * w + (k + kb) as usize;
    let mut elements = Vec::with_capacity(n * w);
    let mut src = Vec::new();
    let mut rng = Vec::new();
    let mut inv = Vec::new();
    let mut labels = Vec::new();
    for x in 0..n {
        for k in -kb..=kb {
            let y = power(m, k, x);
            elements.push((x, k, y));
            src.push(id(y, 0));
            rng.push(id(x, 0));
            inv.push(id(y, -k));
            labels.push(format!("({x},{k},{y})"));
        }
    }
    let mut mul = HashMap::new();
    let mut excluded = Vec::new();
    for a in 0..elements.len() {
        let (x, k, y) = elements[a];
        for l in -kb..=kb {
            let b = id(y, l);
            if (k + l).abs() <= kb {
                mul.insert((a, b), id(x, k + l));
            } else {
                excluded.push((a, b));
            }
        }
    }
    let units = (0..n).map(|x| id(x, 0)).collect();
    let groupoid = FiniteGroupoid::new(units, src, rng, inv, mul, Some(labels))?;
    Ok(DrGroupoid { groupoid, elements, k_bound, excluded })
}

/// The groupoid laws on defined products, with out-of-window composites
/// reported instead of counted as failures.
pub fn validate_windowed(d: &DrGroupoid) -> ValidationReport {
    let g = &d.groupoid;
    let mut rep = ValidationReport::new();
    for c in g.validate().checks {
        if c.check != "mul-domain" && c.check != "assoc" {
            rep.push(c);
        }
    }
    let excluded: std::collections::HashSet<(Id, Id)> = d.excluded.iter().copied().collect();
    let mut s = Scan::new();
    for a in g.elements() {
        for &b in g.arrows_to(g.src(a)) {
            let ok = g.mul(a, b).is_some() != excluded.contains(&(a, b));
            s.check(ok, || vec![a, b], "product undefined on a composable pair inside the window");
        }
    }
    rep.push(CheckResult::from_scan("mul-domain-windowed", s));
    let mut s = Scan::new();
    for (a, b, ab) in g.products() {
        for &c in g.arrows_to(g.src(b)) {
            let Some(bc) = g.mul(b, c) else { continue };
            match (g.mul(ab, c), g.mul(a, bc)) {
                (Some(l), Some(r)) => s.check(l == r, || vec![a, b, c], "(ab)c != a(bc)"),
                (None, None) => {}
                _ => s.fail(vec![a, b, c], "only one bracketing is defined"),
            }
        }
    }
    rep.push(CheckResult::from_scan("assoc-windowed", s));
    let mut c = CheckResult::pass("window-excluded", d.excluded.len() as u64);
    if let Some(&(a, b)) = d.excluded.first() {
        c.witness = Some(Witness::new(vec![a, b], "first composite outside the window"));
    }
    rep.push(c);
    rep
}

/// `H = Y ⋊_T ℕ` acting on `X = Y ⋊_S ℕ`.
#[derive(Debug, Clone)]
pub struct DrAction {
    pub h: DrGroupoid,
    pub x: DrGroupoid,
    pub action: LeftAction,
}

/// The unique `w` with `S^n w = S^m x` and `T^p w = T^q z`, found by search.
fn fill_in(sys: &StarCommutingSystem, x: usize, l: i64, k: i64, z: usize) -> Result<usize, DrError> {
    let (m, n) = (l.max(0) as usize, (-l).max(0) as usize);
    let (p, q) = (k.max(0) as usize, (-k).max(0) as usize);
    let lhs = iterate(&sys.s, m, x);
    let rhs = iterate(&sys.t, q, z);
    let mut found = (0..sys.n).filter(|&w| iterate(&sys.s, n, w) == lhs && iterate(&sys.t, p, w) == rhs);
    match (found.next(), found.next()) {
        (Some(w), None) => Ok(w),
        _ => Err(DrError::FillIn(Witness::new(vec![x, z], "w is missing or not unique"))),
    }
}

/// `(x,k,y)⥅(y,l,z) = (x,l,w)`, `(x,k,y)⥆(y,l,z) = (w,k,z)`.
pub fn dr_ss_action(sys: &StarCommutingSystem, k_bound: usize) -> Result<DrAction, DrError> {
    let h = dr_groupoid(&sys.t_perm()?, k_bound)?;
    let x = dr_groupoid(&sys.s_perm()?, k_bound)?;
    let mut act = HashMap::new();
    let mut restr = HashMap::new();
    let rho0: HashMap<Id, Id> = (0..sys.n).map(|y| (x.id(y, 0).unwrap(), h.id(y, 0).unwrap())).collect();
    for (hid, &(xx, k, y)) in h.elements.iter().enumerate() {
        for &gid in x.groupoid.arrows_to(x.id(y, 0).unwrap()) {
            let (_, l, z) = x.elements[gid];
            let w = fill_in(sys, xx, l, k, z)?;
            act.insert((hid, gid), x.id(xx, l).unwrap());
            restr.insert((hid, gid), h.id(w, k).unwrap());
        }
    }
    let action = LeftAction::new(h.groupoid.clone(), x.groupoid.clone(), &rho0, &act, &restr)?;
    Ok(DrAction { h, x, action })
}

/// The periodicity witness `(x,k,x)⥅(x,0,x) = (x,0,x)`.
#[derive(Debug, Clone)]
pub struct DrFreeness {
    /// Order of `T`: least `k > 0` with `T^k = id`.
    pub k: usize,
    pub x: usize,
    pub h: Id,
    pub unit: Id,
    pub result: FreenessResult,
    pub report: ValidationReport,
}

/// On a finite set `T` is periodic, so the action is never free. The
/// witness uses `k` = order of `T` at the least point.
pub fn dr_freeness(sys: &StarCommutingSystem, k_bound: usize) -> Result<DrFreeness, DrError> {
    let t = sys.t_perm()?;
    let k = t.cycle_type().into_iter().fold(1, lcm);
    if k > k_bound {
        return Err(DrError::WindowTooSmall { k, k_bound });
    }
    let d = dr_ss_action(sys, k_bound)?;
    let x = 0;
    let h = d.h.id(x, k as i64).unwrap();
    let unit = d.x.id(x, 0).unwrap();
    let mut report = ValidationReport::new();
    let mut s = Scan::new();
    s.check(!d.h.groupoid.is_unit(h), || vec![h], "periodicity witness is a unit");
    s.check(d.action.in_domain(h, unit), || vec![h, unit], "witness pair outside the domain");
    s.check(d.action.act(h, unit) == Some(unit), || vec![h, unit], "(x,k,x) does not fix (x,0,x)");
    report.push(CheckResult::from_scan("periodicity-witness", s));
    let result = is_free(&d.action);
    let mut s = Scan::new();
    s.check(!result.free, Vec::new, "enumeration found the action free");
    report.push(CheckResult::from_scan("not-free", s));
    Ok(DrFreeness { k, x, h, unit, result, report })
}

/// Rank-two window `(x, (k₁,k₂), T^{k₁}S^{k₂}x)` with both `|kᵢ| ≤ k_bound`.
#[derive(Debug, Clone)]
pub struct DrRank2 {
    pub groupoid: FiniteGroupoid,
    pub elements: Vec<(usize, (i64, i64), usize)>,
    pub k_bound: usize,
}

impl DrRank2 {
    pub fn id(&self, x: usize, k: (i64, i64)) -> Option<Id> {
        let kb = self.k_bound as i64;
        let w = 2 * self.k_bound + 1;
        (k.0.abs() <= kb && k.1.abs() <= kb).then(|| (x * w + (k.0 + kb) as usize) * w + (k.1 + kb) as usize)
    }
}

pub fn dr_rank2_groupoid(sys: &StarCommutingSystem, k_bound: usize) -> Result<DrRank2, DrError> {
    let (s, t) = (sys.s_perm()?, sys.t_perm()?);
    let kb = k_bound as i64;
    let w = 2 * k_bound + 1;
    let id = |x: usize, k: (i64, i64)| (x * w + (k.0 + kb) as usize) * w + (k.1 + kb) as usize;
    let inside = |k: (i64, i64)| k.0.abs() <= kb && k.1.abs() <= kb;
    let mut elements = Vec::new();
    let (mut src, mut rng, mut inv, mut labels) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for x in 0..sys.n {
        for k1 in -kb..=kb {
            for k2 in -kb..=kb {
                let z = power(&t, k1, power(&s, k2, x));
                elements.push((x, (k1, k2), z));
                src.push(id(z, (0, 0)));
                rng.push(id(x, (0, 0)));
                inv.push(id(z, (-k1, -k2)));
                labels.push(format!("({x},{k1}:{k2},{z})"));
            }
        }
    }
    let mut mul = HashMap::new();
    for (a, &(x, k, z)) in elements.iter().enumerate() {
        for l1 in -kb..=kb {
            for l2 in -kb..=kb {
                let kl = (k.0 + l1, k.1 + l2);
                if inside(kl) {
                    mul.insert((a, id(z, (l1, l2))), id(x, kl));
                }
            }
        }
    }
    let units = (0..sys.n).map(|x| id(x, (0, 0))).collect();
    let groupoid = FiniteGroupoid::new(units, src, rng, inv, mul, Some(labels))?;
    Ok(DrRank2 { groupoid, elements, k_bound })
}

/// `hg = (h⥅g)(h⥆g)` in the rank-two groupoid, with `H` and `X` embedded
/// as degrees `(k,0)` and `(0,l)`.
pub fn check_decomposition(d: &DrAction, k2: &DrRank2) -> ValidationReport {
    let a = &d.action;
    let mut s = Scan::new();
    let emb_h = |id: Id| {
        let (x, k, _) = d.h.elements[id];
        k2.id(x, (k, 0)).unwrap()
    };
    let emb_x = |id: Id| {
        let (x, l, _) = d.x.elements[id];
        k2.id(x, (0, l)).unwrap()
    };
    for (h, g) in a.domain() {
        let lhs = k2.groupoid.mul(emb_h(h), emb_x(g));
        let rhs = match (a.act(h, g), a.restr(h, g)) {
            (Some(hg), Some(hr)) => k2.groupoid.mul(emb_x(hg), emb_h(hr)),
            _ => None,
        };
        s.check(lhs.is_some() && lhs == rhs, || vec![h, g], "hg != (h>g)(h|g)");
    }
    let mut rep = ValidationReport::new();
    rep.push(CheckResult::from_scan("zs-decomposition", s));
    rep
}

/// `S = +2`, `T = +3` on `Z/6`.
pub fn z6_system() -> StarCommutingSystem {
    StarCommutingSystem::new(6, (0..6).map(|x| (x + 2) % 6).collect(), (0..6).map(|x| (x + 3) % 6).collect())
        .expect("shift maps")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ssa::{check_left_axioms, verify_derived_left_laws};

    #[test]
    fn identity_system() {
        let id = StarCommutingSystem::new(3, vec![0, 1, 2], vec![0, 1, 2]).unwrap();
        assert!(check_star_commuting(&id).is_ok());
        let d = dr_groupoid(&id.s_perm().unwrap(), 0).unwrap();
        // k_bound 0 leaves only the units (x,0,x)
        assert_eq!(d.groupoid.len(), 3);
        assert!(d.groupoid.is_valid());
        let a = dr_ss_action(&id, 1).unwrap();
        assert!(check_left_axioms(&a.action).is_ok());
        for (h, g) in a.action.domain() {
            assert_eq!(a.action.act(h, g), Some(g));
        }
        let f = dr_freeness(&id, 1).unwrap();
        assert_eq!(f.k, 1);
        assert!(f.report.is_ok());
    }

    #[test]
    fn z6_shifts() {
        let sys = z6_system();
        assert!(check_star_commuting(&sys).is_ok());
        let d = dr_ss_action(&sys, 2).unwrap();
        assert!(validate_windowed(&d.h).is_ok(), "{}", validate_windowed(&d.h));
        assert!(!d.h.excluded.is_empty());
        let rep = check_left_axioms(&d.action);
        assert!(rep.is_ok(), "{rep}");
        assert!(verify_derived_left_laws(&d.action).is_ok());
        let k2 = dr_rank2_groupoid(&sys, 2).unwrap();
        assert!(check_decomposition(&d, &k2).is_ok());
    }

    #[test]
    fn forged_swap_table_fails() {
        // S = T = swap, but S forged to collapse both points onto 0
        let sys = StarCommutingSystem::new(2, vec![0, 0], vec![1, 0]).unwrap();
        let rep = check_star_commuting(&sys);
        assert!(!rep.is_ok());
        assert_eq!(rep.status("surjective"), Some(crate::Status::Fail));
        let honest = StarCommutingSystem::new(2, vec![1, 0], vec![1, 0]).unwrap();
        assert!(check_star_commuting(&honest).is_ok());
    }

    #[test]
    fn freeness_witness_uses_order_of_t() {
        let t = Perm::parse_cycles(5, "(0 1)(2 3 4)", 0).unwrap();
        let sys = StarCommutingSystem::from_perms(&Perm::identity(5), &t).unwrap();
        let f = dr_freeness(&sys, 6).unwrap();
        assert_eq!(f.k, 6);
        assert!(f.report.is_ok(), "{}", f.report);
        assert!(matches!(dr_freeness(&sys, 5), Err(DrError::WindowTooSmall { k: 6, .. })));
    }

    #[test]
    fn s_only_system() {
        let s = Perm::parse_cycles(3, "(0 1 2)", 0).unwrap();
        let sys = StarCommutingSystem::from_perms(&s, &Perm::identity(3)).unwrap();
        assert!(check_star_commuting(&sys).is_ok());
        let d = dr_ss_action(&sys, 1).unwrap();
        assert!(check_left_axioms(&d.action).is_ok());
        assert!(validate_windowed(&d.x).is_ok());
    }
}
