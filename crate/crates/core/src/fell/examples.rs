//! Settings used by the acceptance run and the CLI.

use std::collections::BTreeMap;

use super::action::{FellLeftAction, FellRightAction};
use super::bimodule::FellSetting;
use super::coord::{structure_constant_identity, CoordBundle};
use super::linalg::{c, CMat, Tol};
use super::matrix::{crossed_product_bundle, line_bundle, FellBundle};
use super::product::product_bundle_left;
use super::FellError;
use crate::construct::{zs_product_left, ProductGroupoid};
use crate::equiv::{build_equivalence, one_sided_equivalence};
use crate::fixtures::{s4_example, semidirect_two_sided, ZsFixture};
use crate::groupoid::FiniteGroupoid;
use crate::perm::{symmetric_group, Perm};
use crate::report::{CheckResult, Witness};
use crate::ssa::{certify_para_equivalence, LeftAction, RightAction};
use crate::Id;

fn trivial_right(equiv_right: RightAction, bundle: CoordBundle) -> Result<FellRightAction, FellError> {
    FellRightAction::identity(equiv_right, bundle)
}

fn one_sided(left: LeftAction, b: &FellBundle) -> Result<FellSetting, FellError> {
    let equiv = one_sided_equivalence(left.clone())?;
    let bundle = CoordBundle::from_matrix(b)?;
    let l = FellLeftAction::identity(left, bundle.clone())?;
    let r = trivial_right(equiv.para.right.clone(), bundle)?;
    FellSetting::new(equiv, l, r)
}

/// The line bundle over `X = C3⋉S4` with `D4` acting trivially on fibers.
pub fn s4_line_setting() -> Result<FellSetting, FellError> {
    let s4 = s4_example();
    one_sided(s4.action.clone(), &line_bundle(&s4.x))
}

/// The line bundle over `pair(6)` with both translation actions.
pub fn semidirect_line_setting() -> Result<FellSetting, FellError> {
    let (l, r) = semidirect_two_sided();
    let para = certify_para_equivalence(l, r).map_err(crate::equiv::EquivError::from)?;
    let equiv = build_equivalence(para)?;
    let bundle = CoordBundle::from_matrix(&line_bundle(equiv.x()))?;
    let left = FellLeftAction::identity(equiv.para.left.clone(), bundle.clone())?;
    let right = FellRightAction::identity(equiv.para.right.clone(), bundle)?;
    FellSetting::new(equiv, left, right)
}

/// `S3 = C3⋈C2` acting on itself by left translation; `X = C3⋉S3`.
pub fn s3_fixture() -> ZsFixture {
    let (k, perms) = symmetric_group(3);
    let find = |s: &str| {
        let p = Perm::parse_cycles(3, s, 0).expect("literal cycle");
        perms.iter().position(|q| *q == p).expect("in S3")
    };
    let mul = |a: Id, b: Id| k.mul(a, b).expect("group product is total");
    let (a, f) = (find("(0 1 2)"), find("(0 1)"));
    let e = k.units()[0];
    let ky: Vec<Vec<usize>> = k.elements().map(|p| k.elements().map(|q| mul(p, q)).collect()).collect();
    ZsFixture::new(k.clone(), &[e, a, mul(a, a)], &[e, f], None, None, ky, Some(k.labels().to_vec()))
        .expect("S3 example is well formed")
}

/// The dynamical system `(𝒜, X⋈H, α)` behind the crossed-product fixture:
/// `𝒜_u` is the diagonal `3×3` algebra and `α = Ad P(k)` for
/// `φ(x,h) = (k,y)`, with `P(σ)e_i = e_{σ(i)}`.
pub struct CrossedProductSystem {
    pub fx: ZsFixture,
    pub prod: ProductGroupoid,
    /// Unitary per arrow of `X⋈H`.
    pub u: Vec<CMat>,
}

fn perm_matrix(p: &Perm) -> CMat {
    let n = p.0.len();
    let mut m = CMat::zeros(n, n);
    for i in 0..n {
        m[(p.apply(i), i)] = c(1.0, 0.0);
    }
    m
}

fn diagonal_algebra(n: usize) -> Vec<CMat> {
    (0..n)
        .map(|i| {
            let mut m = CMat::zeros(n, n);
            m[(i, i)] = c(1.0, 0.0);
            m
        })
        .collect()
}

impl CrossedProductSystem {
    pub fn new() -> Result<Self, FellError> {
        let fx = s3_fixture();
        let (_, perms) = symmetric_group(3);
        let prod = zs_product_left(&fx.action)?;
        let phi = fx
            .phi(&prod)
            .ok_or_else(|| FellError::Precondition(Witness::new(vec![], "φ is not an isomorphism")))?;
        let n = fx.n();
        let u = prod.base.elements().map(|p| perm_matrix(&perms[phi.forward.apply(p) / n])).collect();
        Ok(CrossedProductSystem { fx, prod, u })
    }

    fn algebras(g: &FiniteGroupoid) -> BTreeMap<Id, Vec<CMat>> {
        g.units().iter().map(|&u| (u, diagonal_algebra(3))).collect()
    }

    fn u_x(&self, x: Id) -> &CMat {
        let e = self.fx.h.units()[0];
        &self.u[self.prod.id_of((x, e)).expect("(x, e) is in X⋈H")]
    }

    /// `B(𝒜, X, α|)`.
    pub fn x_bundle(&self) -> Result<FellBundle, FellError> {
        let x = &self.fx.x;
        let us: Vec<CMat> = x.elements().map(|xx| self.u_x(xx).clone()).collect();
        crossed_product_bundle(x, &Self::algebras(x), &us, Tol::default())
    }

    /// `B(𝒜, X⋈H, α)`.
    pub fn product_bundle(&self) -> Result<FellBundle, FellError> {
        crossed_product_bundle(&self.prod.base, &Self::algebras(&self.prod.base), &self.u, Tol::default())
    }

    /// `h⥅(aU_x) = α_{(r(h⥅x),h)}(a) U_{h⥅x}`.
    pub fn left_action(&self) -> Result<FellLeftAction, FellError> {
        let b = self.x_bundle()?;
        let l = &self.fx.action;
        let x = &self.fx.x;
        FellLeftAction::from_matrix(l.clone(), &b, |h, xx, m| {
            let hx = l.act(h, xx).expect("in domain");
            let v = &self.u[self.prod.id_of((x.rng(hx), h)).expect("(r(h>x), h) is in X⋈H")];
            let a = m * self.u_x(xx).adjoint();
            v * a * v.adjoint() * self.u_x(hx)
        })
    }

    pub fn setting(&self) -> Result<FellSetting, FellError> {
        let left = self.left_action()?;
        let equiv = one_sided_equivalence(left.action.clone())?;
        let right = trivial_right(equiv.para.right.clone(), left.bundle.clone())?;
        FellSetting::new(equiv, left, right)
    }

    /// `B(𝒜,X,α|)⋈H` against `B(𝒜,X⋈H,α)` cell by cell.
    pub fn identity_check(&self) -> Result<CheckResult, FellError> {
        let lhs = product_bundle_left(&self.left_action()?)?;
        let rhs = CoordBundle::from_matrix(&self.product_bundle()?)?;
        Ok(structure_constant_identity(&lhs.bundle, &rhs, "crossed-product-identity"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fell::action::check_fell_left_action;

    #[test]
    fn s3_sizes() {
        let sys = CrossedProductSystem::new().unwrap();
        assert_eq!(sys.fx.x.len(), 18);
        assert_eq!(sys.prod.base.len(), 36);
    }

    #[test]
    fn crossed_product_action_is_a_fell_action() {
        let sys = CrossedProductSystem::new().unwrap();
        let rep = check_fell_left_action(&sys.left_action().unwrap());
        assert!(rep.is_ok(), "{rep}");
    }

    #[test]
    fn crossed_product_identity_holds() {
        let sys = CrossedProductSystem::new().unwrap();
        let cr = sys.identity_check().unwrap();
        assert!(cr.is_ok(), "{cr:?}");
    }
}
