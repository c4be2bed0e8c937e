//! Self-similar product bundles and orbit quotient bundles.

use std::collections::BTreeMap;
use std::collections::HashMap;

use super::action::{FellLeftAction, FellRightAction};
use super::coord::CoordBundle;
use super::linalg::{combine, unit_vec, CMat};
use super::FellError;
use crate::construct::{orbit_groupoid_left, orbit_groupoid_right, zs_product_left, zs_product_right, OrbitGroupoid, ProductGroupoid};
use crate::report::Witness;
use crate::Id;

/// A bundle over `X⋈H` or `G⋈X`; the fiber over a pair is the fiber of `B`
/// over its `X` component.
#[derive(Debug, Clone)]
pub struct ProductBundle {
    pub product: ProductGroupoid,
    pub bundle: CoordBundle,
}

/// `(a,h)(b,k) = (a[h⥅b], [h⥆b]k)`, `(b,h)* = (h⁻¹⥅b*, h⁻¹⥆b*)`.
pub fn product_bundle_left(a: &FellLeftAction) -> Result<ProductBundle, FellError> {
    let (l, b) = (&a.action, &a.bundle);
    let product = zs_product_left(l)?;
    let pb = &product.base;
    let fdim: Vec<usize> = product.pairs.iter().map(|&(x, _)| b.fdim[x]).collect();
    let mut mul = HashMap::new();
    for (p, q, _) in pb.products() {
        let ((x, h), (y, _)) = (product.pairs[p], product.pairs[q]);
        let hy = l.act(h, y).ok_or_else(|| FellError::Shape(Witness::new(vec![p, q], "h>y undefined")))?;
        let t = a.map(h, y);
        let ms = b.mul[&(x, hy)].iter().map(|m| m * t).collect();
        mul.insert((p, q), ms);
    }
    let star = product
        .pairs
        .iter()
        .map(|&(x, h)| a.map(l.h.inv(h), l.x.inv(x)) * &b.star[x])
        .collect();
    let unit_rep = unit_reps(&product, b);
    let bundle = CoordBundle { base: pb.clone(), fdim, mul, star, unit_rep, tol: b.tol };
    Ok(ProductBundle { product, bundle })
}

/// `(t,a)(s,b) = (t[a⋉s], [a⋊s]b)`, `(t,b)* = (b*⋉t⁻¹, b*⋊t⁻¹)`.
pub fn product_bundle_right(a: &FellRightAction) -> Result<ProductBundle, FellError> {
    let (r, b) = (&a.action, &a.bundle);
    let product = zs_product_right(r)?;
    let pb = &product.base;
    let fdim: Vec<usize> = product.pairs.iter().map(|&(_, x)| b.fdim[x]).collect();
    let mut mul = HashMap::new();
    for (p, q, pq) in pb.products() {
        let ((_, x), (s, y)) = (product.pairs[p], product.pairs[q]);
        let xs = r.act(x, s).ok_or_else(|| FellError::Shape(Witness::new(vec![p, q], "x<s undefined")))?;
        let t = a.map(x, s);
        let ms = (0..b.fdim[x])
            .map(|i| combine(&(t * unit_vec(b.fdim[x], i)), &b.mul[&(xs, y)], fdim[pq], b.fdim[y]))
            .collect();
        mul.insert((p, q), ms);
    }
    let star = product
        .pairs
        .iter()
        .map(|&(t, x)| a.map(r.x.inv(x), r.g.inv(t)) * &b.star[x])
        .collect();
    let unit_rep = unit_reps(&product, b);
    let bundle = CoordBundle { base: pb.clone(), fdim, mul, star, unit_rep, tol: b.tol };
    Ok(ProductBundle { product, bundle })
}

fn unit_reps(product: &ProductGroupoid, b: &CoordBundle) -> BTreeMap<Id, Vec<CMat>> {
    product.unit_of.iter().map(|(&u, &p)| (p, b.unit_rep[&u].clone())).collect()
}

/// `H\B` or `B/G`: each class is carried to the fiber of its canonical
/// representative.
#[derive(Debug, Clone)]
pub struct QuotientBundle {
    pub orbit: OrbitGroupoid,
    pub bundle: CoordBundle,
    /// For each `x`, the acting element carrying `x` to its representative.
    pub to_rep: Vec<Id>,
}

impl QuotientBundle {
    pub fn class_of(&self, x: Id) -> Id {
        self.orbit.class_of[x]
    }
}

/// `(H⥅b)(H⥅c) = H⥅(bc)` for composable representatives, `(H⥅b)* = H⥅b*`.
pub fn quotient_bundle_left(a: &FellLeftAction) -> Result<QuotientBundle, FellError> {
    let (l, b) = (&a.action, &a.bundle);
    let orbit = orbit_groupoid_left(l)?;
    let x = &l.x;
    let mut to_rep = Vec::with_capacity(x.len());
    for xx in x.elements() {
        let rep = orbit.rep(orbit.class_of[xx]);
        let h = l
            .h
            .elements()
            .find(|&h| l.act(h, xx) == Some(rep))
            .ok_or_else(|| FellError::Shape(Witness::new(vec![xx], "no element reaches the representative")))?;
        to_rep.push(h);
    }
    let to = |y: Id| a.map(to_rep[y], y);
    let from = |y: Id| a.map(l.h.inv(to_rep[y]), orbit.rep(orbit.class_of[y]));

    let ob = &orbit.base;
    let fdim: Vec<usize> = ob.elements().map(|c| b.fdim[orbit.rep(c)]).collect();
    let mut mul = HashMap::new();
    for (c1, c2, c12) in ob.products() {
        let r1 = orbit.rep(c1);
        let y = *orbit.members[c2]
            .iter()
            .find(|&&y| x.rng(y) == x.src(r1))
            .ok_or_else(|| FellError::Shape(Witness::new(vec![c1, c2], "no composable representative")))?;
        let z = x.mul(r1, y).expect("r(y) = s(r1)");
        if orbit.class_of[z] != c12 {
            return Err(FellError::Shape(Witness::new(vec![c1, c2], "product lands in the wrong class")));
        }
        let ms = b.mul[&(r1, y)].iter().map(|m| to(z) * m * from(y)).collect();
        mul.insert((c1, c2), ms);
    }
    let star = ob
        .elements()
        .map(|cc| {
            let r = orbit.rep(cc);
            to(x.inv(r)) * &b.star[r]
        })
        .collect();
    let unit_rep = ob.units().iter().map(|&cc| (cc, b.unit_rep[&orbit.rep(cc)].clone())).collect();
    let bundle = CoordBundle { base: ob.clone(), fdim, mul, star, unit_rep, tol: b.tol };
    Ok(QuotientBundle { orbit, bundle, to_rep })
}

/// Mirror of [`quotient_bundle_left`] for `B/G`.
pub fn quotient_bundle_right(a: &FellRightAction) -> Result<QuotientBundle, FellError> {
    let (r, b) = (&a.action, &a.bundle);
    let orbit = orbit_groupoid_right(r)?;
    let x = &r.x;
    let mut to_rep = Vec::with_capacity(x.len());
    for xx in x.elements() {
        let rep = orbit.rep(orbit.class_of[xx]);
        let t = r
            .g
            .elements()
            .find(|&t| r.act(xx, t) == Some(rep))
            .ok_or_else(|| FellError::Shape(Witness::new(vec![xx], "no element reaches the representative")))?;
        to_rep.push(t);
    }
    let to = |y: Id| a.map(y, to_rep[y]);
    let from = |y: Id| a.map(orbit.rep(orbit.class_of[y]), r.g.inv(to_rep[y]));

    let ob = &orbit.base;
    let fdim: Vec<usize> = ob.elements().map(|c| b.fdim[orbit.rep(c)]).collect();
    let mut mul = HashMap::new();
    for (c1, c2, c12) in ob.products() {
        let r2 = orbit.rep(c2);
        let y = *orbit.members[c1]
            .iter()
            .find(|&&y| x.src(y) == x.rng(r2))
            .ok_or_else(|| FellError::Shape(Witness::new(vec![c1, c2], "no composable representative")))?;
        let z = x.mul(y, r2).expect("s(y) = r(r2)");
        if orbit.class_of[z] != c12 {
            return Err(FellError::Shape(Witness::new(vec![c1, c2], "product lands in the wrong class")));
        }
        let k1 = fdim[c1];
        let ms = (0..k1)
            .map(|i| to(z) * combine(&(from(y) * unit_vec(k1, i)), &b.mul[&(y, r2)], b.fdim[z], b.fdim[r2]))
            .collect();
        mul.insert((c1, c2), ms);
    }
    let star = ob
        .elements()
        .map(|cc| {
            let rr = orbit.rep(cc);
            to(x.inv(rr)) * &b.star[rr]
        })
        .collect();
    let unit_rep = ob.units().iter().map(|&cc| (cc, b.unit_rep[&orbit.rep(cc)].clone())).collect();
    let bundle = CoordBundle { base: ob.clone(), fdim, mul, star, unit_rep, tol: b.tol };
    Ok(QuotientBundle { orbit, bundle, to_rep })
}
