mod common;

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use zerosum::constructions::{extremal_cyclic, random_labelling};
use zerosum::paths::{find_balanced_cycle, reach_set_between};
use zerosum::proof::{augmenting_pairs, AuxiliaryCycle};
use zerosum::{
    augment_tuple, key_lemma, make_efficient_tuple, validate_tuple, Dichotomy, EfficientTuple, FiniteGroup,
    GroupElement, GroupSpec, Labelling, ShiftWitness, Side,
};

/// Independent check of a key-lemma outcome against brute force.
fn outcome_valid(l: &Labelling, result: &Dichotomy<zerosum::StabilizerCertificate>) -> Result<(), String> {
    match result {
        Dichotomy::Cycle { cycle } => {
            let mut walk = cycle.vertices.clone();
            walk.push(walk[0]);
            if !walk.windows(2).all(|w| l.has_arc(w[0], w[1])) || !common::value(l, &walk).is_identity() {
                return Err(format!("cycle {:?} is not balanced", cycle.vertices));
            }
        }
        Dichotomy::Certificate(c) => {
            let scope = common::scope_of(c.scope);
            let r = common::reach_set(l, &scope, c.x);
            if r != common::to_set(c.values) {
                return Err(format!("R {:?} differs from brute force {r:?}", c.values));
            }
            if r.len() < scope.len() {
                return Err(format!("|R| = {} < |X| = {}", r.len(), scope.len()));
            }
            if common::right_stabilizer(l.group(), &r).len() < 2 {
                return Err("trivial right stabilizer".into());
            }
        }
    }
    Ok(())
}

/// `ℛ_i ∪ ℛ_{i+1}·γ(v_{i+1}, v_i) ⊆ ℛ(U, v_i)` along the auxiliary cycle.
fn trace_inclusions_hold(l: &Labelling, t: &AuxiliaryCycle) -> bool {
    let g = l.group();
    let u = common::scope_of(t.minimal_set);
    let len = t.cycle.len();
    (0..len).all(|i| {
        let next = (i + 1) % len;
        let shifted = g.right_mul_set(t.values[next], l.label(t.cycle[next], t.cycle[i]));
        let big = common::reach_set(l, &u, t.cycle[i]);
        common::to_set(t.values[i].union(shifted)).is_subset(&big)
    })
}

#[test]
fn key_lemma_on_every_z3_labelling_of_three_vertices() {
    let g = common::group(GroupSpec::cyclic(3));
    let arcs: Vec<(usize, usize)> =
        (0..3).flat_map(|u| (0..3).map(move |v| (u, v))).filter(|(u, v)| u != v).collect();
    let mut certificates = 0;
    for code in 0..729usize {
        let l = Labelling::from_fn(Arc::clone(&g), 3, |u, v| {
            let k = arcs.iter().position(|&a| a == (u, v)).unwrap();
            GroupElement::new(code / 3usize.pow(k as u32) % 3)
        })
        .unwrap();
        let out = key_lemma(&l).unwrap();
        outcome_valid(&l, &out.result).unwrap_or_else(|e| panic!("labelling {code}: {e}"));
        if common::balanced_cycles(&l).is_empty() {
            assert!(out.result.certificate().is_some(), "labelling {code}: cycle-free input gave a cycle");
            certificates += 1;
        }
        if let Some(t) = &out.trace {
            assert!(trace_inclusions_hold(&l, t), "labelling {code}");
        }
    }
    assert!(certificates > 0);
}

#[test]
fn key_lemma_on_random_instances_with_group_order_vertices() {
    let groups = [
        GroupSpec::cyclic(2),
        GroupSpec::cyclic(4),
        GroupSpec::cyclic(5),
        GroupSpec::symmetric3(),
        GroupSpec::cyclic(7),
    ];
    for spec in groups {
        let g = common::group(spec);
        for seed in 0..60 {
            let l = random_labelling(&g, g.order(), seed).unwrap();
            let out = key_lemma(&l).unwrap();
            assert!(out.within_hypothesis);
            outcome_valid(&l, &out.result).unwrap_or_else(|e| panic!("{} seed {seed}: {e}", g.name()));
            if let Some(t) = &out.trace {
                assert!(trace_inclusions_hold(&l, t), "{} seed {seed}", g.name());
            }
        }
    }
}

#[test]
fn key_lemma_tags_inputs_outside_the_hypothesis() {
    let g = common::group(GroupSpec::cyclic(3));
    for seed in 0..50 {
        let l = random_labelling(&g, 5, seed).unwrap();
        let out = key_lemma(&l).unwrap();
        assert!(!out.within_hypothesis);
        outcome_valid(&l, &out.result).unwrap();
    }
}

#[test]
fn extremal_certificates_match_brute_force() {
    for q in [3, 5, 7] {
        let l = extremal_cyclic(q, q).unwrap();
        let out = key_lemma(&l).unwrap();
        outcome_valid(&l, &out.result).unwrap();
        assert!(out.result.certificate().is_some());
    }
}

#[test]
fn make_efficient_tuple_branches_are_valid() {
    for spec in [GroupSpec::cyclic(3), GroupSpec::cyclic(5), GroupSpec::symmetric3()] {
        let g = common::group(spec);
        for seed in 0..40 {
            let l = random_labelling(&g, g.order() + 1, seed).unwrap();
            match make_efficient_tuple(&l, (seed % 3) as usize).unwrap() {
                Dichotomy::Cycle { cycle } => assert!(l.is_balanced(&cycle).unwrap()),
                Dichotomy::Certificate(t) => {
                    let report = validate_tuple(&l, &t);
                    assert!(report.definition_ok(), "{report:?}");
                }
            }
        }
    }
}

/// Tuple realizing `R = r·⟨h⟩` directly: `u = 0`, `v = 1`, one helper vertex
/// per non-identity element of `⟨h⟩`, then 2 to 4 vertices outside `X`. The
/// base labelling is a random shift of the tuple labelling.
fn synthetic_tuple(
    g: &Arc<FiniteGroup>,
    rng: &mut Xoshiro256PlusPlus,
) -> Option<(Labelling, EfficientTuple)> {
    let h = GroupElement::new(rng.gen_range(1..g.order()));
    let sub: Vec<GroupElement> = g.subgroup_closure(&[h]).iter().collect();
    if sub.len() > 9 {
        return None;
    }
    let m = sub.len();
    let r = GroupElement::new(rng.gen_range(0..g.order()));
    let n = m + 1 + rng.gen_range(2..=4);
    let noise = random_labelling(g, n, rng.gen()).unwrap();
    let tuple_labels = Labelling::from_fn(Arc::clone(g), n, |a, b| match (a, b) {
        (0, 1) => r,
        (0, i) if i <= m => r,
        (i, 1) if (2..=m).contains(&i) => sub[i - 1],
        _ => noise.label(a, b),
    })
    .unwrap();
    let s: Vec<GroupElement> = (0..n).map(|_| GroupElement::new(rng.gen_range(0..g.order()))).collect();
    let base = tuple_labels.apply_shifts(&ShiftWitness(s.clone())).unwrap();
    let back = ShiftWitness(s.iter().map(|&x| g.inverse(x)).collect());
    let values = g.left_mul_set(r, g.subgroup_closure(&[h]));
    let t = EfficientTuple {
        scope: (1u64 << (m + 1)) - 1,
        u: 0,
        v: 1,
        labelling: base.apply_shifts(&back).unwrap(),
        shifts: back,
        values,
        is_super: false,
    };
    Some((base, t))
}

#[test]
fn random_augmentations_stay_valid() {
    let groups: Vec<Arc<FiniteGroup>> = [
        GroupSpec::cyclic(5),
        GroupSpec::cyclic(9),
        GroupSpec::cyclic(15),
        GroupSpec::product(GroupSpec::cyclic(3), GroupSpec::cyclic(9)),
        GroupSpec::frobenius21(),
        GroupSpec::symmetric3(),
    ]
    .into_iter()
    .map(common::group)
    .collect();
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(2024);
    let mut augmented = 0;
    let mut attempts = 0;
    while augmented < 1000 {
        attempts += 1;
        assert!(attempts < 20_000, "too few augmentable tuples");
        let g = &groups[rng.gen_range(0..groups.len())];
        let Some((base, mut t)) = synthetic_tuple(g, &mut rng) else { continue };
        assert!(validate_tuple(&base, &t).definition_ok());
        loop {
            let pairs = augmenting_pairs(&t).unwrap();
            if pairs.is_empty() {
                break;
            }
            let (w1, w2) = pairs[rng.gen_range(0..pairs.len())];
            let next = augment_tuple(&base, &t, w1, w2).unwrap();
            let stab = g.stabilizer(t.values, Side::Right);
            assert!(next.values.len() >= t.values.len() + stab.len());
            assert!(stab.is_subset(g.stabilizer(next.values, Side::Right)));
            let report = validate_tuple(&base, &next);
            assert!(report.definition_ok(), "{:?}", report.failures().collect::<Vec<_>>());
            if next.size() <= 6 {
                let oracle =
                    common::reach_set_between(&next.labelling, &common::scope_of(next.scope), w1, next.v);
                assert!(common::to_set(next.values).is_subset(&oracle));
            }
            augmented += 1;
            t = next;
        }
    }
}

#[test]
fn augmented_tuple_membership_uses_both_prefixes() {
    let g = common::group(GroupSpec::cyclic(9));
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(5);
    for _ in 0..50 {
        let Some((base, t)) = synthetic_tuple(&g, &mut rng) else { continue };
        for (w1, w2) in augmenting_pairs(&t).unwrap().into_iter().take(3) {
            let next = augment_tuple(&base, &t, w1, w2).unwrap();
            let reach = reach_set_between(&next.labelling, next.scope, w1, next.v).unwrap();
            assert!(next.values.is_subset(reach));
        }
    }
}

#[test]
fn prime_finder_agrees_with_exact_search() {
    for p in [3, 5] {
        let g = common::group(GroupSpec::cyclic(p));
        for seed in 0..100 {
            let l = random_labelling(&g, p + 1, seed).unwrap();
            let c = zerosum::prime_finder(&l).unwrap();
            assert!(l.is_balanced(&c).unwrap());
            assert!(find_balanced_cycle(&l).unwrap().is_some());
        }
    }
}
