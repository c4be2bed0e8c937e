//! Built-in examples.

use crate::construct::ProductGroupoid;
use crate::groupoid::{transformation_groupoid, FiniteGroupoid, GroupoidMorphism, Isomorphism, StructureError};
use crate::perm::{elaborate_zs_decomposition, generated_subgroup, subgroup, symmetric_group, Perm, ZsDecomposition, ZsError};
use crate::ssa::{LeftAction, RightAction};
use crate::Id;

/// `K = G⋈H` acting on a set `Y`, and `H` acting on `X = G⋉Y` by
/// `h⥅(t,y) = (h·t, h|_t ∗ y)`, `h⥆(t,y) = h|_t`.
#[derive(Debug, Clone)]
pub struct ZsFixture {
    pub k: FiniteGroupoid,
    pub zs: ZsDecomposition,
    pub g: FiniteGroupoid,
    pub h: FiniteGroupoid,
    /// `K` acting on `0..n`, `ky[k][y]`.
    pub ky: Vec<Vec<usize>>,
    /// `G⋉Y`, element `(t,y)` has id `t·n + y`.
    pub x: FiniteGroupoid,
    pub action: LeftAction,
}

#[derive(Debug, thiserror::Error)]
pub enum FixtureError {
    #[error(transparent)]
    Zs(#[from] ZsError),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

impl ZsFixture {
    /// `g_sub`, `h_sub` are ids of `K` in the order the subgroups should use.
    pub fn new(
        k: FiniteGroupoid,
        g_sub: &[Id],
        h_sub: &[Id],
        g_labels: Option<Vec<String>>,
        h_labels: Option<Vec<String>>,
        ky: Vec<Vec<usize>>,
        y_labels: Option<Vec<String>>,
    ) -> Result<Self, FixtureError> {
        let zs = elaborate_zs_decomposition(&k, g_sub, h_sub)?;
        let g = subgroup(&k, g_sub, g_labels)?;
        let h = subgroup(&k, h_sub, h_labels)?;
        let n = ky.first().map_or(0, Vec::len);
        let mut x = transformation_groupoid(&g, n, |t, y| ky[g_sub[t]][y])?;
        let ylab = |y: usize| y_labels.as_ref().map_or_else(|| y.to_string(), |l| l[y].clone());
        x.set_labels(
            g.elements()
                .flat_map(|t| (0..n).map(move |y| (t, y)))
                .map(|(t, y)| format!("({},{})", g.label(t), ylab(y)))
                .collect(),
        );
        let action = LeftAction::from_fn(
            h.clone(),
            x.clone(),
            |_| 0,
            |hh, ty| {
                let (t, y) = (ty / n, ty % n);
                zs.dot[hh][t] * n + ky[h_sub[zs.restr[hh][t]]][y]
            },
            |hh, ty| zs.restr[hh][ty / n],
        )?;
        Ok(ZsFixture { k, zs, g, h, ky, x, action })
    }

    pub fn n(&self) -> usize {
        self.ky.first().map_or(0, Vec::len)
    }

    /// `K ⋉ Y` with `r(k,y) = k∗y`.
    pub fn k_ltimes_y(&self) -> FiniteGroupoid {
        transformation_groupoid(&self.k, self.n(), |k, y| self.ky[k][y]).expect("K acts on Y")
    }

    /// `φ((t,y),h) = (th, h⁻¹∗y)` from `X⋈H` to `K⋉Y`.
    pub fn phi(&self, prod: &ProductGroupoid) -> Option<Isomorphism> {
        let n = self.n();
        let target = self.k_ltimes_y();
        let map: Vec<Id> = prod
            .pairs
            .iter()
            .map(|&(ty, hh)| {
                let (t, y) = (ty / n, ty % n);
                let (tk, hk) = (self.zs.g[t], self.zs.h[hh]);
                let th = self.k.mul(tk, hk).expect("group product is total");
                th * n + self.ky[self.k.inv(hk)][y]
            })
            .collect();
        Isomorphism::verified(map, &prod.base, &target)
    }
}

/// Labels for `G = ⟨a⟩` and `H = ⟨r,f⟩` in the S4 example.
pub const S4_G_LABELS: [&str; 3] = ["e", "a", "a2"];
pub const S4_H_LABELS: [&str; 8] = ["e", "r", "r2", "r3", "f", "rf", "r2f", "r3f"];

/// `S4 = C3⋈D4` with `a = (123)`, `r = (1234)`, `f = (13)`, `S4` acting on
/// itself by left translation.
pub fn s4_example() -> ZsFixture {
    let (k, perms) = symmetric_group(4);
    let find = |s: &str| {
        let p = Perm::parse_cycles(4, s, 1).expect("literal cycle");
        perms.iter().position(|q| *q == p).expect("in S4")
    };
    let mul = |a: Id, b: Id| k.mul(a, b).expect("group product is total");
    let (a, r, f) = (find("(1 2 3)"), find("(1 2 3 4)"), find("(1 3)"));
    let e = k.units()[0];
    let a2 = mul(a, a);
    let r2 = mul(r, r);
    let r3 = mul(r2, r);
    let g_sub = vec![e, a, a2];
    let h_sub = vec![e, r, r2, r3, f, mul(r, f), mul(r2, f), mul(r3, f)];
    debug_assert_eq!(generated_subgroup(&k, &[r, f]).len(), 8);
    let ky: Vec<Vec<usize>> = k.elements().map(|p| k.elements().map(|q| mul(p, q)).collect()).collect();
    let y_labels = k.labels().to_vec();
    ZsFixture::new(
        k,
        &g_sub,
        &h_sub,
        Some(S4_G_LABELS.iter().map(|s| s.to_string()).collect()),
        Some(S4_H_LABELS.iter().map(|s| s.to_string()).collect()),
        ky,
        Some(y_labels),
    )
    .expect("S4 example is well formed")
}

/// Pair groupoid on `Y = Z/2 × Z/3` (point `(i,j)` is `3i + j`), with `Z/2`
/// translating the first coordinate from the left and `Z/3` translating the
/// second from the right. Both restrictions are trivial.
pub fn semidirect_two_sided() -> (LeftAction, RightAction) {
    let n = 6;
    let x = FiniteGroupoid::pair(n);
    let shift_h = |h: Id, p: usize| 3 * ((p / 3 + h) % 2) + p % 3;
    let shift_g = |t: Id, p: usize| 3 * (p / 3) + (p % 3 + t) % 3;
    let on_pair = |f: &dyn Fn(usize) -> usize, e: Id| f(e / n) * n + f(e % n);
    let l = LeftAction::from_fn(
        FiniteGroupoid::cyclic(2),
        x.clone(),
        |_| 0,
        |h, e| on_pair(&|p| shift_h(h, p), e),
        |h, _| h,
    )
    .expect("left translation action");
    let r = RightAction::from_fn(
        FiniteGroupoid::cyclic(3),
        x,
        |_| 0,
        |e, t| on_pair(&|p| shift_g(t, p), e),
        |_, t| t,
    )
    .expect("right translation action");
    (l, r)
}

/// `c: Z/4 → Z/2`, reduction mod 2.
pub fn skew_mod_two() -> (FiniteGroupoid, FiniteGroupoid, GroupoidMorphism) {
    let g = FiniteGroupoid::cyclic(4);
    let h = FiniteGroupoid::cyclic(2);
    let c = GroupoidMorphism::new((0..4).map(|i| i % 2).collect());
    (g, h, c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::zs_product_left;
    use crate::ssa::{check_left_axioms, check_right_axioms, is_free, verify_derived_left_laws};

    #[test]
    fn s4_sizes() {
        let s = s4_example();
        assert_eq!(s.x.len(), 72);
        assert_eq!(s.x.units().len(), 24);
        assert!(s.x.is_valid());
        assert!(check_left_axioms(&s.action).is_ok(), "{}", check_left_axioms(&s.action));
        assert!(verify_derived_left_laws(&s.action).is_ok());
        assert!(is_free(&s.action).free);
    }

    #[test]
    fn s4_phi_is_an_isomorphism() {
        let s = s4_example();
        let p = zs_product_left(&s.action).unwrap();
        assert_eq!(p.base.len(), 576);
        assert!(s.phi(&p).is_some());
    }

    #[test]
    fn semidirect_actions_pass() {
        let (l, r) = semidirect_two_sided();
        assert!(check_left_axioms(&l).is_ok());
        assert!(check_right_axioms(&r).is_ok());
    }
}
