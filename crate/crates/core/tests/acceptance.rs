//! Acceptance run: one line per criterion, then a single assertion.

mod common;

use std::time::{Duration, Instant};

use gpdkit_core::algebra::{algebra_summary, morita_compatible};
use gpdkit_core::construct::{orbit_groupoid_left, skew_ss_action, zs_product_left};
use gpdkit_core::dr::{check_star_commuting, dr_freeness, z6_system};
use gpdkit_core::equiv::{build_equivalence, one_sided_equivalence, verify_equivalence};
use gpdkit_core::fell::examples::{s4_line_setting, semidirect_line_setting, CrossedProductSystem};
use gpdkit_core::fell::{build_bimodule, check_bc, check_fell_left_action, validate_fell, verify_bimodule, FellBundle, FellSetting};
use gpdkit_core::fixtures::{s4_example, semidirect_two_sided, skew_mod_two, ZsFixture, S4_G_LABELS, S4_H_LABELS};
use gpdkit_core::groupoid::GroupoidMorphism;
use gpdkit_core::ssa::{
    certify_para_equivalence, check_in_tune, check_left_axioms, check_right_axioms, counting_haar_invariance, counting_haar_invariance_right, is_free,
    verify_derived_left_laws, verify_derived_right_laws,
};
use gpdkit_core::{iso_check, CheckResult, FiniteGroupoid, LeftAction, RightAction, Status, ValidationReport};
use num_complex::Complex64;

/// Relative residual bound for every Fell-bundle identity.
const FELL_TOL: f64 = 1e-9;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn report_ok(what: &str, rep: &ValidationReport) -> Result<(), String> {
    ensure(rep.is_ok(), || format!("{what}: {:?}", rep.first_failure()))
}

// ---------------------------------------------------------------------------
// 1

/// `h·t` rows for h = e, r, r², r³, f, rf, r²f, r³f; columns t = e, a, a².
const S4_ACTION: [[&str; 3]; 8] = [
    ["e", "a", "a2"],
    ["e", "a2", "a"],
    ["e", "a", "a2"],
    ["e", "a2", "a"],
    ["e", "a2", "a"],
    ["e", "a", "a2"],
    ["e", "a2", "a"],
    ["e", "a", "a2"],
];

/// `h|_t`, same layout.
const S4_RESTR: [[&str; 3]; 8] = [
    ["e", "e", "e"],
    ["r", "r2f", "r3"],
    ["r2", "rf", "r3f"],
    ["r3", "r", "r2f"],
    ["f", "f", "f"],
    ["rf", "r3f", "r2"],
    ["r2f", "r3", "r"],
    ["r3f", "r2", "rf"],
];

fn criterion_1() -> Outcome {
    let fx = s4_example();
    let mut cells = 0;
    for (hi, h) in S4_H_LABELS.iter().enumerate() {
        for (ti, t) in S4_G_LABELS.iter().enumerate() {
            let dot = S4_G_LABELS[fx.zs.dot[hi][ti]];
            let restr = S4_H_LABELS[fx.zs.restr[hi][ti]];
            ensure(dot == S4_ACTION[hi][ti], || format!("{h}·{t} = {dot}, table has {}", S4_ACTION[hi][ti]))?;
            ensure(restr == S4_RESTR[hi][ti], || format!("{h}|_{t} = {restr}, table has {}", S4_RESTR[hi][ti]))?;
            cells += 2;
        }
    }
    ensure(cells == 48, || format!("{cells} cells"))?;
    Ok(format!("{cells} cells match"))
}

// ---------------------------------------------------------------------------
// 2

/// `C3⋉C3` by left translation.
fn c3_ltimes_c3() -> FiniteGroupoid {
    let k = FiniteGroupoid::cyclic(3);
    let ky: Vec<Vec<usize>> = (0..3).map(|a| (0..3).map(|b| (a + b) % 3).collect()).collect();
    ZsFixture::new(k, &[0, 1, 2], &[0], None, None, ky, None).expect("C3 over itself").x
}

fn criterion_2() -> Outcome {
    let fx = s4_example();
    let o = orbit_groupoid_left(&fx.action).map_err(|e| e.to_string())?;
    report_ok("representative independence", &o.report)?;
    ensure(o.base.len() == 9, || format!("orbit groupoid has {} elements", o.base.len()))?;
    let target = c3_ltimes_c3();
    let iso = iso_check(&o.base, &target).ok_or("no isomorphism to C3⋉C3")?;
    report_ok("isomorphism", &iso.forward.validate_iso(&o.base, &target))?;
    Ok("9 elements, isomorphic to C3⋉C3".into())
}

// ---------------------------------------------------------------------------
// 3

fn criterion_3() -> Outcome {
    let fx = s4_example();
    let p = zs_product_left(&fx.action).map_err(|e| e.to_string())?;
    let o = orbit_groupoid_left(&fx.action).map_err(|e| e.to_string())?;
    let (sp, so) = (algebra_summary(&p.base), algebra_summary(&o.base));
    ensure(sp.principal && sp.block_dims == Some(vec![24]), || format!("product summary {sp:?}"))?;
    ensure(so.principal && so.block_dims == Some(vec![3]), || format!("orbit summary {so:?}"))?;
    // Independent oracle for the product: S4⋉S4 by left translation is the pair groupoid on 24 points.
    ensure(iso_check(&p.base, &FiniteGroupoid::pair(24)).is_some(), || "product is not the pair groupoid on 24 points".into())?;
    let m = morita_compatible(&sp, &so).map_err(|e| e.to_string())?;
    ensure(m, || "morita_compatible returned false".into())?;
    Ok("dims [24] and [3], morita_compatible".into())
}

// ---------------------------------------------------------------------------
// 4

fn criterion_4() -> Outcome {
    let mut n = 0;
    for (name, x) in common::fixture_groupoids().into_iter().filter(|(_, x)| x.len() <= 50) {
        for (kind, a) in [("X⋈X⁰", LeftAction::unit_space(x.clone())), ("X⋈{e}", LeftAction::trivial_group(x.clone()))] {
            let p = zs_product_left(&a).map_err(|e| format!("{name} {kind}: {e}"))?;
            // The projection (x, h) ↦ x must itself be an isomorphism.
            let proj = GroupoidMorphism::new(p.pairs.iter().map(|&(xx, _)| xx).collect());
            report_ok(&format!("{name} {kind} projection"), &proj.validate_iso(&p.base, &x))?;
            ensure(iso_check(&p.base, &x).is_some(), || format!("{name} {kind}: iso_check found nothing"))?;
            n += 1;
        }
    }
    ensure(n >= 10, || format!("only {n} products"))?;
    Ok(format!("{n} products isomorphic to their base"))
}

// ---------------------------------------------------------------------------
// 5

fn criterion_5() -> Outcome {
    let corpus = common::corpus();
    ensure(corpus.len() >= 20, || format!("corpus has {} actions", corpus.len()))?;
    let (mut free, mut checks) = (0, 0usize);
    for (name, a) in &corpus {
        let mut rep = ValidationReport::new();
        rep.extend(check_left_axioms(a));
        rep.extend(verify_derived_left_laws(a));
        let r = RightAction::mirror(a).map_err(|e| format!("{name}: {e}"))?;
        rep.extend(check_right_axioms(&r));
        rep.extend(verify_derived_right_laws(&r));
        rep.extend(counting_haar_invariance(a));
        rep.extend(counting_haar_invariance_right(&r));
        if is_free(a).free {
            free += 1;
            let o = orbit_groupoid_left(a).map_err(|e| format!("{name}: {e}"))?;
            rep.extend(o.report);
            let w = one_sided_equivalence(a.clone()).map_err(|e| format!("{name}: {e}"))?;
            rep.extend(counting_haar_invariance(&w.ql.action));
            rep.extend(counting_haar_invariance_right(&w.qr.action));
        }
        checks += rep.checks.len();
        report_ok(name, &rep)?;
    }
    for (name, r) in common::fixture_right_actions() {
        let mut rep = verify_derived_right_laws(&r);
        rep.extend(counting_haar_invariance_right(&r));
        checks += rep.checks.len();
        report_ok(&name, &rep)?;
    }
    ensure(free >= 10, || format!("only {free} free actions reach the quotient checks"))?;
    Ok(format!("{} actions ({free} free), {checks} checks, zero violations", corpus.len()))
}

// ---------------------------------------------------------------------------
// 6

fn criterion_6() -> Outcome {
    let mut n = 0;
    for (name, a) in common::fixture_actions() {
        if !is_free(&a).free {
            continue;
        }
        let w = one_sided_equivalence(a).map_err(|e| format!("{name}: {e}"))?;
        let rep = verify_equivalence(&w);
        for check in ["action-laws", "free", "commute", "principal"] {
            ensure(rep.status(check) == Some(Status::Pass), || format!("{name}: {check} is {:?}", rep.status(check)))?;
        }
        n += 1;
    }
    ensure(n >= 4, || format!("only {n} one-sided fixtures"))?;
    let (l, r) = semidirect_two_sided();
    let para = certify_para_equivalence(l, r).map_err(|e| e.to_string())?;
    let w = build_equivalence(para).map_err(|e| e.to_string())?;
    report_ok("semidirect two-sided", &verify_equivalence(&w))?;
    Ok(format!("{n} one-sided fixtures (S4 included) and the semidirect pair"))
}

// ---------------------------------------------------------------------------
// 7

fn criterion_7() -> Outcome {
    let (g, h, c) = skew_mod_two();
    let a = skew_ss_action(&g, &h, &c).map_err(|e| e.to_string())?;
    let w = one_sided_equivalence(a).map_err(|e| e.to_string())?;
    report_ok("certificate", &w.para.report)?;
    report_ok("equivalence", &verify_equivalence(&w))?;
    let quotient = &w.qr.orbit.base;
    ensure(iso_check(quotient, &FiniteGroupoid::cyclic(4)).is_some(), || "H\\G(c) is not Z/4".into())?;
    Ok(format!("H\\G(c) has {} elements and is Z/4", quotient.len()))
}

// ---------------------------------------------------------------------------
// 8

fn fell_pass(name: &str, s: FellSetting) -> Result<f64, String> {
    let w = build_bimodule(s).map_err(|e| format!("{name}: {e}"))?;
    let rep = verify_bimodule(&w);
    for check in ["FE1", "FE2.a", "FE2.b", "FE2.c", "FE2.d", "FE3.full", "FE3.positive", "FE3.norm"] {
        ensure(rep.get(check).is_some_and(CheckResult::is_ok), || format!("{name}: {check} {:?}", rep.get(check)))?;
    }
    report_ok(name, &rep)?;
    let res = rep.max_residual();
    ensure(res <= FELL_TOL, || format!("{name}: residual {res:e}"))?;
    Ok(res)
}

fn criterion_8() -> Outcome {
    let r1 = fell_pass("S4 line bundle", s4_line_setting().map_err(|e| e.to_string())?)?;
    let sys = CrossedProductSystem::new().map_err(|e| e.to_string())?;
    let r2 = fell_pass("crossed product", sys.setting().map_err(|e| e.to_string())?)?;
    let id = sys.identity_check().map_err(|e| e.to_string())?;
    ensure(id.is_ok(), || format!("cellwise identity: {id:?}"))?;
    let r3 = id.max_residual.unwrap_or(0.0);
    ensure(r3 <= FELL_TOL, || format!("cellwise identity residual {r3:e}"))?;
    Ok(format!("max residuals {r1:.1e}, {r2:.1e}, identity {r3:.1e}"))
}

// ---------------------------------------------------------------------------
// 9

/// A single-cell corruption and the check family expected to catch it.
struct Mutation {
    family: &'static str,
    what: &'static str,
    run: fn() -> Result<ValidationReport, String>,
}

fn first_other(n: usize, avoid: usize) -> usize {
    (0..n).find(|&i| i != avoid).expect("at least two elements")
}

fn mutations() -> Vec<Mutation> {
    vec![
        Mutation {
            family: "L",
            what: "S4 action cell h⥅x",
            run: || {
                let mut a = s4_example().action;
                let (h, x) = a.domain().find(|&(h, _)| h != 0).unwrap();
                let y = a.act(h, x).unwrap();
                a.set_act(h, x, first_other(a.x.len(), y));
                Ok(check_left_axioms(&a))
            },
        },
        Mutation {
            family: "L",
            what: "S4 restriction cell h⥆x",
            run: || {
                let mut a = s4_example().action;
                let (h, x) = a.domain().find(|&(h, _)| h != 0).unwrap();
                let k = a.restr(h, x).unwrap();
                a.set_restr(h, x, first_other(a.h.len(), k));
                Ok(check_left_axioms(&a))
            },
        },
        Mutation {
            family: "R",
            what: "semidirect right action cell x⋊t",
            run: || {
                let (_, mut r) = semidirect_two_sided();
                let (x, t) = r.domain().find(|&(_, t)| t != 0).unwrap();
                let y = r.act(x, t).unwrap();
                r.set_act(x, t, first_other(r.x.len(), y));
                Ok(check_right_axioms(&r))
            },
        },
        Mutation {
            family: "R",
            what: "semidirect right restriction cell x⋉t",
            run: || {
                let (_, mut r) = semidirect_two_sided();
                let (x, t) = r.domain().find(|&(_, t)| t != 0).unwrap();
                let s = r.restr(x, t).unwrap();
                r.set_restr(x, t, first_other(r.g.len(), s));
                Ok(check_right_axioms(&r))
            },
        },
        Mutation {
            family: "C",
            what: "semidirect right restriction cell, in-tune check",
            run: || {
                let (l, mut r) = semidirect_two_sided();
                let (x, t) = r.domain().find(|&(_, t)| t != 0).unwrap();
                let s = r.restr(x, t).unwrap();
                r.set_restr(x, t, first_other(r.g.len(), s));
                let rep = check_in_tune(&l, &r);
                Ok(rep)
            },
        },
        Mutation {
            family: "B",
            what: "crossed-product bundle basis entry",
            run: || {
                let sys = CrossedProductSystem::new().map_err(|e| e.to_string())?;
                let b = sys.x_bundle().map_err(|e| e.to_string())?;
                let x = b.base.elements().find(|&x| !b.base.is_unit(x)).unwrap();
                let mut fibers: Vec<Vec<_>> = b.base.elements().map(|y| b.basis(y).to_vec()).collect();
                let m = &mut fibers[x][0];
                let (i, j) = (0..m.nrows()).flat_map(|i| (0..m.ncols()).map(move |j| (i, j))).find(|&(i, j)| m[(i, j)].norm() == 0.0).unwrap();
                m[(i, j)] = Complex64::new(1.0, 0.0);
                let mutated = FellBundle::new(b.base.clone(), b.dims().clone(), fibers, b.tol).map_err(|e| e.to_string())?;
                Ok(validate_fell(&mutated))
            },
        },
        Mutation {
            family: "BC",
            what: "semidirect left Fell map entry, compatibility",
            run: || {
                let mut s = semidirect_line_setting().map_err(|e| e.to_string())?;
                let key = *s.left.maps.keys().min().unwrap();
                s.left.maps.get_mut(&key).unwrap()[(0, 0)] = Complex64::new(-1.0, 0.0);
                Ok(check_bc(&s.left, &s.right))
            },
        },
        Mutation {
            family: "F",
            what: "crossed-product Fell action map entry",
            run: || {
                let sys = CrossedProductSystem::new().map_err(|e| e.to_string())?;
                let mut fa = sys.left_action().map_err(|e| e.to_string())?;
                let key = *fa.maps.keys().filter(|&&(h, _)| h != 0).min().unwrap();
                let m = fa.maps.get_mut(&key).unwrap();
                let ij = (0..m.nrows()).flat_map(|i| (0..m.ncols()).map(move |j| (i, j))).find(|&ij| m[ij].norm() > 0.5).unwrap();
                m[ij] *= Complex64::new(2.0, 0.0);
                Ok(check_fell_left_action(&fa))
            },
        },
        Mutation {
            family: "FE",
            what: "semidirect left inner product cell",
            run: || {
                let mut w = build_bimodule(semidirect_line_setting().map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
                let key = *w.lip.keys().min().unwrap();
                w.lip.get_mut(&key).unwrap().1[0][0] *= Complex64::new(2.0, 0.0);
                Ok(verify_bimodule(&w))
            },
        },
        Mutation {
            family: "FE",
            what: "S4 right module action cell",
            run: || {
                let mut w = build_bimodule(s4_line_setting().map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
                let key = *w.right_mod.keys().min().unwrap();
                w.right_mod.get_mut(&key).unwrap().1[0][(0, 0)] *= Complex64::new(-1.0, 0.0);
                Ok(verify_bimodule(&w))
            },
        },
    ]
}

fn criterion_9() -> Outcome {
    let ms = mutations();
    let families: std::collections::BTreeSet<&str> = ms.iter().map(|m| m.family).collect();
    ensure(ms.len() == 10, || format!("{} mutations", ms.len()))?;
    ensure(families.len() == 7, || format!("families {families:?}"))?;
    let mut lines = Vec::new();
    for m in &ms {
        let rep = (m.run)().map_err(|e| format!("{} ({}): {e}", m.family, m.what))?;
        let fail = rep.first_failure().ok_or_else(|| format!("{} ({}): false pass", m.family, m.what))?;
        let w = fail.witness.as_ref().ok_or_else(|| format!("{} ({}): {} failed without a witness", m.family, m.what, fail.check))?;
        lines.push(format!("{}:{}@{:?}", m.family, fail.check, w.ids));
    }
    Ok(format!("10/10 detected [{}]", lines.join(", ")))
}

// ---------------------------------------------------------------------------
// 10

/// Least common multiple of the cycle lengths, cycles found by walking.
fn lcm_oracle(t: &[usize]) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    let mut seen = vec![false; t.len()];
    let mut l = 1;
    for s in 0..t.len() {
        let mut len = 0;
        let mut p = s;
        while !seen[p] {
            seen[p] = true;
            p = t[p];
            len += 1;
        }
        if len > 0 {
            l = l / gcd(l, len) * len;
        }
    }
    l
}

fn criterion_10() -> Outcome {
    let sys = z6_system();
    ensure(sys.s == vec![2, 3, 4, 5, 0, 1] && sys.t == vec![3, 4, 5, 0, 1, 2], || "Z/6 system is not (+2, +3)".into())?;
    report_ok("star-commuting", &check_star_commuting(&sys))?;
    let k = lcm_oracle(&sys.t);
    let f = dr_freeness(&sys, k).map_err(|e| e.to_string())?;
    ensure(f.k == k, || format!("witness k = {}, oracle {k}", f.k))?;
    report_ok("periodicity witness", &f.report)?;
    ensure(!f.result.free, || "enumeration says free".into())?;
    // Minimality at the witness point: no smaller positive power of T fixes it.
    let min_here = (1..=k).find(|&j| (0..j).fold(f.x, |p, _| sys.t[p]) == f.x).unwrap();
    ensure(min_here == k, || format!("T^{min_here} already fixes {}", f.x))?;
    Ok(format!("star-commuting; witness (x,{k},x) at x = {}, k = lcm oracle", f.x))
}

// ---------------------------------------------------------------------------

struct Criterion {
    id: u32,
    title: &'static str,
    budget: Option<Duration>,
    run: fn() -> Outcome,
}

#[test]
fn acceptance() {
    let secs = |s| Some(Duration::from_secs(s));
    let criteria = [
        Criterion { id: 1, title: "S4 Zappa-Szép tables", budget: secs(1), run: criterion_1 },
        Criterion { id: 2, title: "S4 orbit groupoid", budget: secs(5), run: criterion_2 },
        Criterion { id: 3, title: "Morita pair", budget: None, run: criterion_3 },
        Criterion { id: 4, title: "trivial products", budget: None, run: criterion_4 },
        Criterion { id: 5, title: "law corpus", budget: secs(60), run: criterion_5 },
        Criterion { id: 6, title: "equivalence verifier", budget: secs(30), run: criterion_6 },
        Criterion { id: 7, title: "skew product", budget: None, run: criterion_7 },
        Criterion { id: 8, title: "Fell bimodule", budget: secs(60), run: criterion_8 },
        Criterion { id: 9, title: "mutation sensitivity", budget: None, run: criterion_9 },
        Criterion { id: 10, title: "DR system", budget: None, run: criterion_10 },
    ];
    let mut failed = Vec::new();
    for c in &criteria {
        let start = Instant::now();
        let out = (c.run)();
        let t = start.elapsed();
        let over = c.budget.is_some_and(|b| t > b);
        let budget = c.budget.map_or(String::new(), |b| format!(" / {}s", b.as_secs()));
        let (tag, detail) = match (&out, over) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("over budget; {d}")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        println!("criterion {:>2} {tag} [{:.2}s{budget}] {}: {detail}", c.id, t.as_secs_f64(), c.title);
        if tag == "FAIL" {
            failed.push(c.id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
