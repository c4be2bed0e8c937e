//! One function per verb; each fills a [`Report`] from an elaborated model.

use std::collections::BTreeSet;
use std::fmt::Display;

use gpdkit_core::algebra::{algebra_summary, morita_compatible, verify_matrix_units, GroupoidAlgebraSummary};
use gpdkit_core::construct::{orbit_groupoid_left, orbit_groupoid_right, quotient_left_action, quotient_right_action, zs_product_left, zs_product_right, OrbitGroupoid};
use gpdkit_core::dr::{check_star_commuting, dr_freeness};
use gpdkit_core::dsl::{groupoid_block, BlockKind, Document, FellActionDecl, Model};
use gpdkit_core::equiv::{build_equivalence, one_sided_equivalence, verify_equivalence, EquivalenceWitness};
use gpdkit_core::fell::bimodule::certify_fell_setting;
use gpdkit_core::fell::{
    build_bimodule, check_fell_left_action, check_fell_right_action, product_bundle_left, product_bundle_right, saturation, saturation_coords,
    validate_coords, validate_fell, FellLeftAction, FellRightAction, FellSetting,
};
use gpdkit_core::perm::lcm;
use gpdkit_core::ssa::{
    certify_para_equivalence, check_left_axioms, check_right_axioms, counting_haar_invariance, counting_haar_invariance_right, is_free, is_free_right,
    verify_derived_left_laws, verify_derived_right_laws,
};
use gpdkit_core::{CheckResult, FiniteGroupoid, Witness};
use serde_json::{json, Value};

use crate::report::Report;

fn error_check(name: &str, e: impl Display) -> CheckResult {
    CheckResult::fail(name, 0, Witness::new(vec![], e.to_string()))
}

fn sizes(g: &FiniteGroupoid) -> Value {
    json!({ "elements": g.len(), "units": g.units().len() })
}

pub fn check(m: &Model, r: &mut Report) {
    let mut blocks = Vec::new();
    for (kind, name) in &m.order {
        blocks.push(json!({ "kind": kind.as_str(), "name": name }));
        match kind {
            BlockKind::Groupoid => r.scoped(name, m.groupoids[name].validate()),
            BlockKind::LeftAction => {
                let a = &m.left_actions[name].action;
                r.scoped(name, check_left_axioms(a));
                r.scoped(name, verify_derived_left_laws(a));
                r.scoped(name, counting_haar_invariance(a));
            }
            BlockKind::RightAction => {
                let a = &m.right_actions[name].action;
                r.scoped(name, check_right_axioms(a));
                r.scoped(name, verify_derived_right_laws(a));
                r.scoped(name, counting_haar_invariance_right(a));
            }
            BlockKind::FellBundle => {
                let b = &m.bundles[name].bundle;
                r.scoped(name, validate_fell(b));
                r.push(name, saturation(b));
            }
            BlockKind::FellAction => match &m.fell_actions[name] {
                FellActionDecl::Left { fell, .. } => r.scoped(name, check_fell_left_action(fell)),
                FellActionDecl::Right { fell, .. } => r.scoped(name, check_fell_right_action(fell)),
            },
            BlockKind::DrSystem => r.scoped(name, check_star_commuting(&m.dr_systems[name])),
        }
    }
    r.insert("blocks", Value::Array(blocks));
}

/// Product groupoids; with `emit` they are also returned as a document.
pub fn product(m: &Model, r: &mut Report, emit: bool) -> Option<Document> {
    let mut doc = Document::default();
    let mut data = serde_json::Map::new();
    for (name, d) in &m.left_actions {
        match zs_product_left(&d.action) {
            Ok(p) => {
                r.scoped(&format!("{name}/product"), p.base.validate());
                data.insert(name.clone(), json!({ "product": format!("{}⋈{}", d.on, d.acting), "size": sizes(&p.base) }));
                emit.then(|| doc.blocks.push(groupoid_block(&format!("{name}-product"), &p.base)));
            }
            Err(e) => r.push(name, error_check("product", e)),
        }
    }
    for (name, d) in &m.right_actions {
        match zs_product_right(&d.action) {
            Ok(p) => {
                r.scoped(&format!("{name}/product"), p.base.validate());
                data.insert(name.clone(), json!({ "product": format!("{}⋈{}", d.acting, d.on), "size": sizes(&p.base) }));
                emit.then(|| doc.blocks.push(groupoid_block(&format!("{name}-product"), &p.base)));
            }
            Err(e) => r.push(name, error_check("product", e)),
        }
    }
    for (name, fa) in &m.fell_actions {
        let p = match fa {
            FellActionDecl::Left { fell, .. } => product_bundle_left(fell),
            FellActionDecl::Right { fell, .. } => product_bundle_right(fell),
        };
        match p {
            Ok(p) => {
                r.scoped(&format!("{name}/product"), validate_coords(&p.bundle));
                r.push(&format!("{name}/product"), saturation_coords(&p.bundle));
                data.insert(name.clone(), json!({ "base": sizes(&p.product.base), "fiber_dims": p.bundle.fdim }));
            }
            Err(e) => r.push(name, error_check("product", e)),
        }
    }
    r.insert("products", Value::Object(data));
    emit.then_some(doc)
}

fn orbit_data(o: &OrbitGroupoid) -> Value {
    json!({ "size": sizes(&o.base), "class_sizes": o.members.iter().map(Vec::len).collect::<Vec<_>>() })
}

/// Left and right actions that share the groupoid they act on.
fn pairs(m: &Model) -> Vec<(&String, &String)> {
    let mut out = Vec::new();
    for (rn, rd) in &m.right_actions {
        if let Some((ln, _)) = m.left_actions.iter().find(|(_, ld)| ld.on == rd.on) {
            out.push((ln, rn));
        }
    }
    out
}

pub fn quotient(m: &Model, r: &mut Report) {
    let mut data = serde_json::Map::new();
    for (name, d) in &m.left_actions {
        match orbit_groupoid_left(&d.action) {
            Ok(o) => {
                r.scoped(&format!("{name}/orbit"), o.report.clone());
                r.scoped(&format!("{name}/orbit"), o.base.validate());
                data.insert(name.clone(), orbit_data(&o));
            }
            Err(e) => r.push(name, error_check("orbit", e)),
        }
    }
    for (name, d) in &m.right_actions {
        match orbit_groupoid_right(&d.action) {
            Ok(o) => {
                r.scoped(&format!("{name}/orbit"), o.report.clone());
                r.scoped(&format!("{name}/orbit"), o.base.validate());
                data.insert(name.clone(), orbit_data(&o));
            }
            Err(e) => r.push(name, error_check("orbit", e)),
        }
    }
    for (ln, rn) in pairs(m) {
        let scope = format!("{ln}+{rn}");
        let para = match certify_para_equivalence(m.left_actions[ln].action.clone(), m.right_actions[rn].action.clone()) {
            Ok(p) => p,
            Err(e) => {
                r.scoped(&format!("{scope}/certify"), e.report);
                continue;
            }
        };
        match quotient_left_action(&para) {
            Ok(q) => {
                r.scoped(&format!("{scope}/quotient-left"), q.report);
                r.scoped(&format!("{scope}/quotient-left"), check_left_axioms(&q.action));
            }
            Err(e) => r.push(&scope, error_check("quotient-left", e)),
        }
        match quotient_right_action(&para) {
            Ok(q) => {
                r.scoped(&format!("{scope}/quotient-right"), q.report);
                r.scoped(&format!("{scope}/quotient-right"), check_right_axioms(&q.action));
            }
            Err(e) => r.push(&scope, error_check("quotient-right", e)),
        }
    }
    r.insert("orbits", Value::Object(data));
}

fn equivalence_data(w: &EquivalenceWitness) -> Value {
    json!({
        "x": sizes(w.x()),
        "left_groupoid": sizes(&w.a_gpd.base),
        "right_groupoid": sizes(&w.c_gpd.base),
    })
}

pub fn equiv(m: &Model, r: &mut Report) {
    let mut data = serde_json::Map::new();
    let paired = pairs(m);
    let used: BTreeSet<&String> = paired.iter().map(|(l, _)| *l).collect();
    for (ln, rn) in &paired {
        let scope = format!("{ln}+{rn}");
        let built = certify_para_equivalence(m.left_actions[*ln].action.clone(), m.right_actions[*rn].action.clone())
            .map_err(gpdkit_core::equiv::EquivError::from)
            .and_then(build_equivalence);
        record_equivalence(r, &mut data, &scope, built);
    }
    for (name, d) in m.left_actions.iter().filter(|(n, _)| !used.contains(n)) {
        record_equivalence(r, &mut data, name, one_sided_equivalence(d.action.clone()));
    }
    r.insert("equivalences", Value::Object(data));
}

fn record_equivalence(
    r: &mut Report,
    data: &mut serde_json::Map<String, Value>,
    scope: &str,
    built: Result<EquivalenceWitness, gpdkit_core::equiv::EquivError>,
) {
    match built {
        Ok(w) => {
            r.scoped(&format!("{scope}/certify"), w.para.report.clone());
            r.scoped(scope, verify_equivalence(&w));
            data.insert(scope.to_string(), equivalence_data(&w));
        }
        Err(gpdkit_core::equiv::EquivError::Certify(e)) => r.scoped(&format!("{scope}/certify"), e.report),
        Err(e) => r.push(scope, error_check("equivalence", e)),
    }
}

fn summary_json(s: &GroupoidAlgebraSummary) -> Value {
    serde_json::to_value(s).expect("plain data")
}

fn morita(r: &mut Report, scope: &str, a: &FiniteGroupoid, b: &FiniteGroupoid) -> Value {
    let (sa, sb) = (algebra_summary(a), algebra_summary(b));
    // Block counting only decides the principal case.
    let (c, verdict) = match morita_compatible(&sa, &sb) {
        Ok(true) => (CheckResult::pass("morita", 1), json!(true)),
        Ok(false) => (CheckResult::fail("morita", 1, Witness::new(vec![], "block counts differ")), json!(false)),
        Err(e) => {
            let mut c = CheckResult::skipped("morita");
            c.witness = Some(Witness::new(vec![e.0], e.to_string()));
            (c, Value::Null)
        }
    };
    r.push(scope, c);
    json!({ "product": summary_json(&sa), "orbit": summary_json(&sb), "morita_compatible": verdict })
}

pub fn algebra(m: &Model, r: &mut Report) {
    let mut data = serde_json::Map::new();
    for (name, g) in &m.groupoids {
        let sum = algebra_summary(g);
        if sum.principal {
            r.scoped(name, verify_matrix_units(g));
        } else {
            r.push(name, CheckResult::skipped("matrix-units"));
        }
        data.insert(name.clone(), summary_json(&sum));
    }
    for (name, d) in &m.left_actions {
        match (zs_product_left(&d.action), orbit_groupoid_left(&d.action)) {
            (Ok(p), Ok(o)) => {
                let v = morita(r, name, &p.base, &o.base);
                data.insert(name.clone(), v);
            }
            (Err(e), _) => r.push(name, error_check("product", e)),
            (_, Err(e)) => r.push(name, error_check("orbit", e)),
        }
    }
    for (name, d) in &m.right_actions {
        match (zs_product_right(&d.action), orbit_groupoid_right(&d.action)) {
            (Ok(p), Ok(o)) => {
                let v = morita(r, name, &p.base, &o.base);
                data.insert(name.clone(), v);
            }
            (Err(e), _) => r.push(name, error_check("product", e)),
            (_, Err(e)) => r.push(name, error_check("orbit", e)),
        }
    }
    r.insert("algebras", Value::Object(data));
}

fn one_sided_setting(fell: &FellLeftAction) -> Result<FellSetting, gpdkit_core::fell::FellError> {
    let equiv = one_sided_equivalence(fell.action.clone())?;
    let right = FellRightAction::identity(equiv.para.right.clone(), fell.bundle.clone())?;
    FellSetting::new(equiv, fell.clone(), right)
}

pub fn fell(m: &Model, r: &mut Report) {
    let mut data = serde_json::Map::new();
    for (name, b) in &m.bundles {
        r.scoped(name, validate_fell(&b.bundle));
        r.push(name, saturation(&b.bundle));
    }
    for (name, fa) in &m.fell_actions {
        let fell = match fa {
            FellActionDecl::Left { fell, .. } => fell,
            FellActionDecl::Right { fell, .. } => {
                r.scoped(name, check_fell_right_action(fell));
                continue;
            }
        };
        let setting = match one_sided_setting(fell) {
            Ok(s) => s,
            Err(e) => {
                r.push(name, error_check("setting", e));
                continue;
            }
        };
        let cert = certify_fell_setting(&setting);
        let certified = cert.is_ok();
        r.scoped(&format!("{name}/setting"), cert);
        if !certified {
            continue;
        }
        match build_bimodule(setting) {
            Ok(w) => {
                let rep = gpdkit_core::fell::verify_bimodule(&w);
                data.insert(
                    name.clone(),
                    json!({
                        "left_algebra_fibers": w.a().fdim.len(),
                        "right_algebra_fibers": w.c().fdim.len(),
                        "max_residual": rep.max_residual(),
                    }),
                );
                r.scoped(name, rep);
            }
            Err(e) => r.push(name, error_check("bimodule", e)),
        }
    }
    r.insert("bimodules", Value::Object(data));
}

pub fn dr(m: &Model, r: &mut Report, window: Option<usize>) {
    let mut data = serde_json::Map::new();
    for (name, sys) in &m.dr_systems {
        let star = check_star_commuting(sys);
        let star_ok = star.is_ok();
        r.scoped(name, star);
        if !star_ok {
            continue;
        }
        let order = sys.t_perm().map(|t| t.cycle_type().into_iter().fold(1, lcm)).unwrap_or(1);
        match dr_freeness(sys, window.unwrap_or(order.max(1))) {
            Ok(f) => {
                r.scoped(&format!("{name}/freeness"), f.report.clone());
                data.insert(
                    name.clone(),
                    json!({ "n": sys.n, "period": f.k, "point": f.x, "witness": [f.h, f.unit], "free": f.result.free }),
                );
            }
            Err(e) => r.push(name, error_check("freeness", e)),
        }
    }
    r.insert("dr", Value::Object(data));
}

/// Freeness summary reported alongside `check`.
pub fn freeness(m: &Model, r: &mut Report) {
    let mut data = serde_json::Map::new();
    for (name, d) in &m.left_actions {
        data.insert(name.clone(), json!(is_free(&d.action).free));
    }
    for (name, d) in &m.right_actions {
        data.insert(name.clone(), json!(is_free_right(&d.action).free));
    }
    r.insert("free", Value::Object(data));
}
