//! Action corpus shared by the property and acceptance targets.
#![allow(dead_code)]

use gpdkit_core::construct::skew_ss_action;
use gpdkit_core::fell::examples::s3_fixture;
use gpdkit_core::fixtures::{s4_example, semidirect_two_sided, skew_mod_two, ZsFixture};
use gpdkit_core::perm::{generated_subgroup, symmetric_group, Perm};
use gpdkit_core::{FiniteGroupoid, LeftAction, RightAction};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `K = S_n` split as `G⋈H` with subgroups found by random search; `K`
/// acts on itself by left translation or on `0..n` by permutation.
pub fn random_zs(seed: u64) -> ZsFixture {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(3..=4);
    let (k, perms) = symmetric_group(n);
    let e = k.units()[0];
    let pick = |rng: &mut ChaCha8Rng| {
        let count = rng.gen_range(1..=2);
        let gens: Vec<usize> = (0..count).map(|_| rng.gen_range(0..k.len())).collect();
        generated_subgroup(&k, &gens)
    };
    loop {
        let (g, h) = (pick(&mut rng), pick(&mut rng));
        if g.len() * h.len() != k.len() || g.iter().any(|a| *a != e && h.contains(a)) {
            continue;
        }
        let ky: Vec<Vec<usize>> = if rng.gen_bool(0.5) {
            k.elements().map(|a| k.elements().map(|b| k.mul(a, b).unwrap()).collect()).collect()
        } else {
            perms.iter().map(|p| (0..n).map(|i| p.apply(i)).collect()).collect()
        };
        return ZsFixture::new(k.clone(), &g, &h, None, None, ky, None).expect("exact factorization");
    }
}

/// `Z/m` acting on the pair groupoid of `0..n` through a random permutation
/// of order `m`, with trivial restriction.
pub fn random_translation(seed: u64) -> LeftAction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=5);
    let mut img: Vec<usize> = (0..n).collect();
    img.shuffle(&mut rng);
    let p = Perm(img);
    let m = p.order();
    let pow = |h: usize, i: usize| (0..h).fold(i, |j, _| p.apply(j));
    LeftAction::from_fn(
        FiniteGroupoid::cyclic(m),
        FiniteGroupoid::pair(n),
        |_| 0,
        |h, x| pow(h, x / n) * n + pow(h, x % n),
        |h, _| h,
    )
    .expect("diagonal translation")
}

/// One-sided fixtures: every hand-built left action.
pub fn fixture_actions() -> Vec<(String, LeftAction)> {
    let (g, h, c) = skew_mod_two();
    let (semi_l, _) = semidirect_two_sided();
    vec![
        ("s4".into(), s4_example().action),
        ("semidirect-left".into(), semi_l),
        ("skew".into(), skew_ss_action(&g, &h, &c).expect("skew product action")),
        ("s3".into(), s3_fixture().action),
        ("trivial-group-pair3".into(), LeftAction::trivial_group(FiniteGroupoid::pair(3))),
        ("unit-space-pair3".into(), LeftAction::unit_space(FiniteGroupoid::pair(3))),
        ("trivial-group-c4".into(), LeftAction::trivial_group(FiniteGroupoid::cyclic(4))),
    ]
}

pub fn fixture_right_actions() -> Vec<(String, RightAction)> {
    let (_, r) = semidirect_two_sided();
    vec![("semidirect-right".into(), r)]
}

pub const ZS_SEEDS: std::ops::Range<u64> = 0..10;
pub const TRANSLATION_SEEDS: std::ops::Range<u64> = 100..106;

/// Fixtures plus randomized actions from fixed seeds.
pub fn corpus() -> Vec<(String, LeftAction)> {
    let mut out = fixture_actions();
    out.extend(ZS_SEEDS.map(|s| (format!("random-zs-{s}"), random_zs(s).action)));
    out.extend(TRANSLATION_SEEDS.map(|s| (format!("random-translation-{s}"), random_translation(s))));
    out
}

/// Every groupoid appearing in a fixture.
pub fn fixture_groupoids() -> Vec<(String, FiniteGroupoid)> {
    let mut out = Vec::new();
    for (name, a) in fixture_actions() {
        out.push((format!("{name}.X"), a.x.clone()));
        out.push((format!("{name}.H"), a.h.clone()));
    }
    for (name, a) in fixture_right_actions() {
        out.push((format!("{name}.G"), a.g.clone()));
    }
    let (g, h, _) = skew_mod_two();
    out.push(("skew.G".into(), g));
    out.push(("skew.Z2".into(), h));
    out
}
