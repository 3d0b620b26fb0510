//! Factorial-time reference implementations. They read labels through
//! `Labelling::label`/`has_arc` and group products through `multiply` only.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use itertools::Itertools;
use zerosum::{FiniteGroup, GroupElement, GroupSpec, Labelling};

/// Every simple path (as a vertex sequence, length ≥ 1) inside `scope` that
/// uses only present arcs.
pub fn simple_paths(l: &Labelling, scope: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for k in 1..=scope.len() {
        for p in scope.iter().copied().permutations(k) {
            if p.windows(2).all(|w| l.has_arc(w[0], w[1])) {
                out.push(p);
            }
        }
    }
    out
}

pub fn value(l: &Labelling, walk: &[usize]) -> GroupElement {
    let g = l.group();
    walk.windows(2).fold(GroupElement::IDENTITY, |acc, w| g.multiply(acc, l.label(w[0], w[1])))
}

pub fn scope_of(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask >> i & 1 == 1).collect()
}

fn as_indices(values: impl IntoIterator<Item = GroupElement>) -> BTreeSet<usize> {
    values.into_iter().map(|g| g.index()).collect()
}

/// Values of all simple paths in `scope` that end at `x`.
pub fn reach_set(l: &Labelling, scope: &[usize], x: usize) -> BTreeSet<usize> {
    as_indices(simple_paths(l, scope).into_iter().filter(|p| *p.last().unwrap() == x).map(|p| value(l, &p)))
}

/// Values of all simple `u`-`v` paths in `scope`.
pub fn reach_set_between(l: &Labelling, scope: &[usize], u: usize, v: usize) -> BTreeSet<usize> {
    as_indices(
        simple_paths(l, scope)
            .into_iter()
            .filter(|p| p[0] == u && *p.last().unwrap() == v)
            .map(|p| value(l, &p)),
    )
}

/// Balanced cycles, each as its rotation starting at the smallest vertex.
pub fn balanced_cycles(l: &Labelling) -> BTreeSet<Vec<usize>> {
    let all: Vec<usize> = (0..l.n()).collect();
    simple_paths(l, &all)
        .into_iter()
        .filter(|p| p.len() >= 2 && p[0] == *p.iter().min().unwrap())
        .filter(|p| l.has_arc(*p.last().unwrap(), p[0]))
        .filter(|p| {
            let mut closed = p.clone();
            closed.push(p[0]);
            value(l, &closed).is_identity()
        })
        .collect()
}

pub fn to_set(s: zerosum::GroupSubset) -> BTreeSet<usize> {
    s.iter().map(|g| g.index()).collect()
}

/// Right stabilizer by checking every element against every member.
pub fn right_stabilizer(g: &FiniteGroup, s: &BTreeSet<usize>) -> BTreeSet<usize> {
    (0..g.order())
        .filter(|&h| {
            let moved: BTreeSet<usize> =
                s.iter().map(|&x| g.multiply(GroupElement::new(x), GroupElement::new(h)).index()).collect();
            moved == *s
        })
        .collect()
}

/// The catalog used across integration tests.
pub fn catalog() -> Vec<Arc<FiniteGroup>> {
    [
        GroupSpec::cyclic(2),
        GroupSpec::cyclic(3),
        GroupSpec::cyclic(4),
        GroupSpec::cyclic(5),
        GroupSpec::cyclic(7),
        GroupSpec::cyclic(9),
        GroupSpec::cyclic(15),
        GroupSpec::product(GroupSpec::cyclic(3), GroupSpec::cyclic(3)),
        GroupSpec::product(GroupSpec::cyclic(3), GroupSpec::cyclic(9)),
        GroupSpec::frobenius21(),
        GroupSpec::symmetric3(),
    ]
    .into_iter()
    .map(|s| Arc::new(s.build().unwrap()))
    .collect()
}

pub fn group(spec: GroupSpec) -> Arc<FiniteGroup> {
    Arc::new(spec.build().unwrap())
}

/// Compares the subset DP against brute force on one instance: reach sets
/// for every endpoint over the full vertex set and over `scope`, reach sets
/// between every ordered pair of `scope`, balanced-cycle existence and the
/// full list of balanced cycles.
pub fn dp_agrees_with_oracle(l: &Labelling, scope: u64) -> Result<(), String> {
    let all: Vec<usize> = (0..l.n()).collect();
    let paths = simple_paths(l, &all);
    let full = if l.n() == 64 { u64::MAX } else { (1u64 << l.n()) - 1 };
    for mask in [full, scope] {
        let inside = |p: &Vec<usize>| p.iter().all(|&v| mask >> v & 1 == 1);
        for x in scope_of(mask) {
            let expected = as_indices(
                paths.iter().filter(|p| inside(p) && *p.last().unwrap() == x).map(|p| value(l, p)),
            );
            let got = to_set(zerosum::paths::reach_set(l, mask, x).map_err(|e| e.to_string())?);
            if got != expected {
                return Err(format!("reach_set({mask:#b}, {x}): dp {got:?}, oracle {expected:?}"));
            }
            for u in scope_of(mask) {
                if u == x {
                    continue;
                }
                let expected = as_indices(
                    paths
                        .iter()
                        .filter(|p| inside(p) && p[0] == u && *p.last().unwrap() == x)
                        .map(|p| value(l, p)),
                );
                let got =
                    to_set(zerosum::paths::reach_set_between(l, mask, u, x).map_err(|e| e.to_string())?);
                if got != expected {
                    return Err(format!(
                        "reach_set_between({mask:#b}, {u}, {x}): dp {got:?}, oracle {expected:?}"
                    ));
                }
            }
        }
    }
    let expected = balanced_cycles(l);
    let found = zerosum::paths::find_balanced_cycle(l).map_err(|e| e.to_string())?;
    match &found {
        Some(c) if !expected.contains(&c.canonical().vertices) => {
            return Err(format!("dp cycle {:?} not in oracle list", c.vertices))
        }
        None if !expected.is_empty() => return Err(format!("dp missed {} cycles", expected.len())),
        _ => {}
    }
    let listed: BTreeSet<Vec<usize>> = zerosum::paths::enumerate_balanced_cycles(l)
        .map_err(|e| e.to_string())?
        .into_iter()
        .map(|c| c.vertices)
        .collect();
    if listed != expected {
        return Err(format!("enumeration {} cycles, oracle {}", listed.len(), expected.len()));
    }
    Ok(())
}

/// Instance `i` of the oracle-equivalence family: group from the catalog,
/// 2 to 7 vertices, every third instance with a few arcs removed, and a
/// pseudo-random sub-scope.
pub fn oracle_instance(i: u64) -> (Labelling, u64) {
    use rand::{Rng, SeedableRng};
    let groups = catalog();
    let g = &groups[(i % groups.len() as u64) as usize];
    let n = 2 + (i % 6) as usize;
    let mut l = zerosum::constructions::random_labelling(g, n, 1_000 + i).unwrap();
    let mut rng = rand_xoshiro::Xoshiro256PlusPlus::seed_from_u64(i);
    if i.is_multiple_of(3) {
        for _ in 0..rng.gen_range(1..=n) {
            let u = rng.gen_range(0..n);
            let v = rng.gen_range(0..n);
            if u != v && l.has_arc(u, v) {
                l = l.without_arc(u, v).unwrap();
            }
        }
    }
    let scope = rng.gen_range(1..(1u64 << n));
    (l, scope)
}
