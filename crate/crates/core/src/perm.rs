//! Permutations, symmetric groups, and internal Zappa–Szép decompositions.

use std::collections::{BTreeSet, HashMap};

use crate::groupoid::{FiniteGroupoid, StructureError};
use crate::Id;

/// A permutation of `0..n`, stored as its image vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(pub Vec<usize>);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PermError {
    #[error("malformed cycle notation at byte {0}")]
    Syntax(usize),
    #[error("point {0} out of range for degree {1}")]
    OutOfRange(usize, usize),
    #[error("point {0} repeated")]
    Repeated(usize),
}

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n).collect())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    /// `self ∘ other`, so `(pq)(i) = p(q(i))`.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.degree()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Perm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Builds a permutation from disjoint cycles of points in `0..n`.
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Self, PermError> {
        let mut img: Vec<usize> = (0..n).collect();
        let mut seen = vec![false; n];
        for c in cycles {
            for &p in c {
                if p >= n {
                    return Err(PermError::OutOfRange(p, n));
                }
                if seen[p] {
                    return Err(PermError::Repeated(p));
                }
                seen[p] = true;
            }
            for (k, &p) in c.iter().enumerate() {
                img[p] = c[(k + 1) % c.len()];
            }
        }
        Ok(Perm(img))
    }

    /// Parses `(0 2 4)(1 3 5)`; `()` or an empty string is the identity.
    /// Points are shifted down by `base` (use 1 for one-based notation).
    pub fn parse_cycles(n: usize, text: &str, base: usize) -> Result<Self, PermError> {
        let mut cycles = Vec::new();
        let bytes = text.as_bytes();
        let mut i = 0;
        let skip_ws = |i: &mut usize| {
            while *i < bytes.len() && bytes[*i].is_ascii_whitespace() {
                *i += 1;
            }
        };
        skip_ws(&mut i);
        while i < bytes.len() {
            if bytes[i] != b'(' {
                return Err(PermError::Syntax(i));
            }
            i += 1;
            let mut cyc = Vec::new();
            loop {
                skip_ws(&mut i);
                if i >= bytes.len() {
                    return Err(PermError::Syntax(i));
                }
                if bytes[i] == b')' {
                    i += 1;
                    break;
                }
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if start == i {
                    return Err(PermError::Syntax(i));
                }
                let p: usize = text[start..i].parse().map_err(|_| PermError::Syntax(start))?;
                if p < base {
                    return Err(PermError::OutOfRange(p, n));
                }
                cyc.push(p - base);
            }
            cycles.push(cyc);
            skip_ws(&mut i);
        }
        Self::from_cycles(n, &cycles)
    }

    /// Disjoint cycles of length at least two, each starting at its least point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut c = vec![s];
            seen[s] = true;
            let mut p = self.0[s];
            while p != s {
                seen[p] = true;
                c.push(p);
                p = self.0[p];
            }
            if c.len() > 1 {
                out.push(c);
            }
        }
        out
    }

    /// Lengths of all cycles, fixed points included.
    pub fn cycle_type(&self) -> Vec<usize> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if !seen[s] {
                let mut len = 0;
                let mut p = s;
                while !seen[p] {
                    seen[p] = true;
                    p = self.0[p];
                    len += 1;
                }
                out.push(len);
            }
        }
        out
    }

    pub fn order(&self) -> usize {
        self.cycle_type().into_iter().fold(1, lcm)
    }

    /// Cycle notation with points shifted up by `base`, separated by `sep`.
    pub fn to_cycle_string(&self, base: usize, sep: &str) -> String {
        let cs = self.cycles();
        if cs.is_empty() {
            return "()".into();
        }
        cs.iter()
            .map(|c| {
                let pts: Vec<String> = c.iter().map(|p| (p + base).to_string()).collect();
                format!("({})", pts.join(sep))
            })
            .collect()
    }
}

pub fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// `S_n` as a one-object groupoid, elements in lexicographic order of their
/// image vectors (so id 0 is the identity). Labels are compact one-based
/// cycle notation, with `e` for the identity.
pub fn symmetric_group(n: usize) -> (FiniteGroupoid, Vec<Perm>) {
    let mut perms = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        perms.push(Perm(cur.clone()));
        if !next_permutation(&mut cur) {
            break;
        }
    }
    let index: HashMap<Perm, Id> = perms.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    let table: Vec<Vec<Id>> = perms
        .iter()
        .map(|p| perms.iter().map(|q| index[&p.compose(q)]).collect())
        .collect();
    let labels = perms
        .iter()
        .map(|p| if p.is_identity() { "e".to_string() } else { p.to_cycle_string(1, "") })
        .collect();
    let g = FiniteGroupoid::group(&table, Some(labels)).expect("symmetric group table");
    (g, perms)
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Closure of `gens` under the product of a one-object groupoid, sorted.
pub fn generated_subgroup(k: &FiniteGroupoid, gens: &[Id]) -> Vec<Id> {
    let e = k.units()[0];
    let mut set: BTreeSet<Id> = BTreeSet::from([e]);
    let mut frontier = vec![e];
    while let Some(a) = frontier.pop() {
        for &g in gens {
            let b = k.mul(a, g).expect("group product is total");
            if set.insert(b) {
                frontier.push(b);
            }
        }
    }
    set.into_iter().collect()
}

/// The subgroup on `elems` (in the given order) as its own groupoid, with
/// `labels` or the inherited ones.
pub fn subgroup(k: &FiniteGroupoid, elems: &[Id], labels: Option<Vec<String>>) -> Result<FiniteGroupoid, StructureError> {
    let pos: HashMap<Id, Id> = elems.iter().enumerate().map(|(i, &a)| (a, i)).collect();
    let mut table = Vec::with_capacity(elems.len());
    for &a in elems {
        let mut row = Vec::with_capacity(elems.len());
        for &b in elems {
            let c = k.mul(a, b).ok_or_else(|| StructureError::Other("not a group".into()))?;
            row.push(*pos.get(&c).ok_or_else(|| {
                StructureError::Other(format!("subset not closed: {} {} = {}", k.label(a), k.label(b), k.label(c)))
            })?);
        }
        table.push(row);
    }
    let labels = labels.unwrap_or_else(|| elems.iter().map(|&a| k.label(a).to_string()).collect());
    FiniteGroupoid::group(&table, Some(labels))
}

/// The tables of `ht = (h·t)(h|_t)` for `K = G⋈H`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZsDecomposition {
    /// Elements of `G`, as ids of `K`; index `i` is element `i` of `G`.
    pub g: Vec<Id>,
    pub h: Vec<Id>,
    /// `dot[h][t]` is the index in `g` of `h·t`.
    pub dot: Vec<Vec<usize>>,
    /// `restr[h][t]` is the index in `h` of `h|_t`.
    pub restr: Vec<Vec<usize>>,
    /// `split[k] = (t, h)` with `k = th`.
    pub split: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ZsError {
    #[error("K must be a one-object groupoid")]
    NotAGroup,
    #[error("{0} is not a subgroup")]
    NotSubgroup(&'static str),
    #[error("G and H meet in the non-identity element {0}")]
    Intersect(Id),
    #[error("{0} is not a product th")]
    NotCovered(Id),
}

/// Decomposes every `ht` as `(h·t)(h|_t)` by brute force, after checking
/// that `K = GH` uniquely.
pub fn elaborate_zs_decomposition(k: &FiniteGroupoid, g_sub: &[Id], h_sub: &[Id]) -> Result<ZsDecomposition, ZsError> {
    if !k.is_group() {
        return Err(ZsError::NotAGroup);
    }
    let e = k.units()[0];
    let m = |a: Id, b: Id| k.mul(a, b).expect("group product is total");
    let closed = |s: &[Id]| {
        let set: BTreeSet<Id> = s.iter().copied().collect();
        set.contains(&e)
            && set.len() == s.len()
            && s.iter().all(|&a| set.contains(&k.inv(a)) && s.iter().all(|&b| set.contains(&m(a, b))))
    };
    if !closed(g_sub) {
        return Err(ZsError::NotSubgroup("G"));
    }
    if !closed(h_sub) {
        return Err(ZsError::NotSubgroup("H"));
    }
    if let Some(&x) = g_sub.iter().find(|&&x| x != e && h_sub.contains(&x)) {
        return Err(ZsError::Intersect(x));
    }
    let mut split: Vec<Option<(usize, usize)>> = vec![None; k.len()];
    for (ti, &t) in g_sub.iter().enumerate() {
        for (hi, &h) in h_sub.iter().enumerate() {
            split[m(t, h)] = Some((ti, hi));
        }
    }
    if let Some(x) = split.iter().position(Option::is_none) {
        return Err(ZsError::NotCovered(x));
    }
    let split: Vec<(usize, usize)> = split.into_iter().map(Option::unwrap).collect();
    let mut dot = vec![vec![0; g_sub.len()]; h_sub.len()];
    let mut restr = vec![vec![0; g_sub.len()]; h_sub.len()];
    for (hi, &h) in h_sub.iter().enumerate() {
        for (ti, &t) in g_sub.iter().enumerate() {
            let (a, b) = split[m(h, t)];
            dot[hi][ti] = a;
            restr[hi][ti] = b;
        }
    }
    Ok(ZsDecomposition { g: g_sub.to_vec(), h: h_sub.to_vec(), dot, restr, split })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_round_trip() {
        let p = Perm::parse_cycles(6, "(0 2 4)(1 3 5)", 0).unwrap();
        assert_eq!(p.0, vec![2, 3, 4, 5, 0, 1]);
        assert_eq!(p.to_cycle_string(0, " "), "(0 2 4)(1 3 5)");
        assert_eq!(Perm::parse_cycles(3, "()", 0).unwrap(), Perm::identity(3));
        assert_eq!(Perm::parse_cycles(3, "(0 0)", 0), Err(PermError::Repeated(0)));
    }

    #[test]
    fn composition_is_right_to_left() {
        let p = Perm::parse_cycles(3, "(1 2)", 1).unwrap();
        let q = Perm::parse_cycles(3, "(2 3)", 1).unwrap();
        // p(q(2)) = p(3) = 3 in one-based points
        assert_eq!(p.compose(&q).apply(1), 2);
    }

    #[test]
    fn order_is_lcm_of_cycle_lengths() {
        let p = Perm::parse_cycles(5, "(0 1)(2 3 4)", 0).unwrap();
        assert_eq!(p.order(), 6);
    }

    #[test]
    fn s3_is_valid() {
        let (g, perms) = symmetric_group(3);
        assert_eq!(g.len(), 6);
        assert!(perms[0].is_identity());
        assert!(g.is_valid());
    }

    #[test]
    fn direct_product_decomposition_is_trivial() {
        // Z/2 x Z/3 inside S5 as commuting disjoint cycles
        let (k, perms) = symmetric_group(5);
        let find = |s: &str| perms.iter().position(|p| *p == Perm::parse_cycles(5, s, 0).unwrap()).unwrap();
        let a = find("(0 1)");
        let b = find("(2 3 4)");
        let g = generated_subgroup(&k, &[a]);
        let h = generated_subgroup(&k, &[b]);
        let direct = {
            let elems: Vec<Id> = g.iter().flat_map(|&x| h.iter().map(move |&y| (x, y))).map(|(x, y)| k.mul(x, y).unwrap()).collect();
            let mut e = elems.clone();
            e.sort();
            e
        };
        let sub = subgroup(&k, &direct, None).unwrap();
        // rebuild on the subgroup itself
        let pos = |x: Id| direct.iter().position(|&y| y == x).unwrap();
        let gs: Vec<Id> = g.iter().map(|&x| pos(x)).collect();
        let hs: Vec<Id> = h.iter().map(|&x| pos(x)).collect();
        let z = elaborate_zs_decomposition(&sub, &gs, &hs).unwrap();
        for hi in 0..hs.len() {
            for ti in 0..gs.len() {
                assert_eq!(z.dot[hi][ti], ti);
                assert_eq!(z.restr[hi][ti], hi);
            }
        }
    }

    #[test]
    fn overlapping_subgroups_are_rejected() {
        let (k, _) = symmetric_group(3);
        let g = generated_subgroup(&k, &[1]);
        assert!(matches!(elaborate_zs_decomposition(&k, &g, &g), Err(ZsError::Intersect(_))));
    }
}
