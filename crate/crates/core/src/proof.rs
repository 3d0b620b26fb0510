//! Certificate-producing procedures around balanced-cycle-free labellings.
//!
//! Each procedure is total: where the underlying argument assumes that no
//! balanced cycle exists, the procedure instead returns the balanced cycle it
//! runs into.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{GroupElement, Side};
use crate::labelling::{full_mask, CycleWitness, Labelling, ShiftWitness};
use crate::paths::{self, bits, find_path_with_value, reach_set_between, TABLE_CAP};
use crate::subset::GroupSubset;

/// Either a balanced cycle or a certificate that the search for one was
/// blocked.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "branch", rename_all = "lowercase")]
pub enum Dichotomy<T> {
    Cycle { cycle: CycleWitness },
    Certificate(T),
}

impl<T> Dichotomy<T> {
    pub fn cycle(&self) -> Option<&CycleWitness> {
        match self {
            Dichotomy::Cycle { cycle } => Some(cycle),
            Dichotomy::Certificate(_) => None,
        }
    }

    pub fn certificate(&self) -> Option<&T> {
        match self {
            Dichotomy::Cycle { .. } => None,
            Dichotomy::Certificate(t) => Some(t),
        }
    }
}

/// A vertex set `X ∋ x` whose reach set `R = ℛ(X, x)` has `|R| ≥ |X|` and a
/// non-trivial right stabilizer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilizerCertificate {
    #[serde(rename = "X", serialize_with = "ser_mask")]
    pub scope: u64,
    pub x: usize,
    #[serde(rename = "R")]
    pub values: GroupSubset,
    #[serde(rename = "stab_r")]
    pub right_stab: GroupSubset,
}

fn ser_mask<S: serde::Serializer>(mask: &u64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(bits(*mask))
}

impl StabilizerCertificate {
    /// Recomputes `ℛ(X, x)` and its stabilizer and checks every property.
    pub fn verify(&self, l: &Labelling) -> bool {
        let Ok(r) = paths::reach_set(l, self.scope, self.x) else { return false };
        let stab = l.group().stabilizer(r, Side::Right);
        r == self.values
            && stab == self.right_stab
            && r.len() >= self.scope.count_ones() as usize
            && stab.len() >= 2
    }
}

/// Record of the auxiliary-digraph step: the minimal set `U`, the cycle
/// `v_0 → v_1 → … → v_{ℓ-1} → v_0` found in it, the sets
/// `ℛ_i = ℛ(U∖{v_{i-1}}, v_i)` and the product `p` around the reversed cycle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuxiliaryCycle {
    pub minimal_set: u64,
    pub cycle: Vec<usize>,
    pub values: Vec<GroupSubset>,
    pub product: GroupElement,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeyLemmaOutcome {
    pub result: Dichotomy<StabilizerCertificate>,
    /// Present when a minimal set `U` was found.
    pub trace: Option<AuxiliaryCycle>,
    /// The digraph has exactly `|Γ|` vertices.
    pub within_hypothesis: bool,
}

/// Finds a balanced cycle or a stabilizer certificate.
///
/// Let `𝒰` be the non-empty sets `U` with `|ℛ(U, u)| < |U|` for all `u ∈ U`.
/// If `𝒰` is empty the whole vertex set certifies (on `|Γ|` vertices its
/// large reach set is all of `Γ`). Otherwise take the first member of smallest
/// size (numeric mask order), follow smallest out-neighbours in the auxiliary
/// digraph `u → v ⟺ |ℛ(U∖{u}, v)| ≥ |U| - 1` to a cycle, and multiply the
/// labels around it backwards. That product either is the identity, giving a
/// balanced cycle, or stabilizes `ℛ_0` on the right.
pub fn key_lemma(l: &Labelling) -> Result<KeyLemmaOutcome> {
    if !l.is_complete() {
        return Err(Error::IncompleteDigraph);
    }
    if l.group().is_trivial() {
        return Err(Error::TrivialGroup);
    }
    let n = l.n();
    if n > TABLE_CAP {
        return Err(Error::TooLarge { what: "digraph", size: n, cap: TABLE_CAP });
    }
    let group = l.group();
    let within_hypothesis = n == group.order();
    let reach = paths::reach_table(l, l.vertex_mask())?.into_subset_unions();
    debug_assert_eq!(reach.k(), n);

    let in_family = |u_set: u64| {
        let size = u_set.count_ones() as usize;
        bits(u_set).all(|u| reach.get(u_set, u).len() < size)
    };
    let minimal = (1..=n).find_map(|size| masks_of_size(n, size).find(|&m| in_family(m)));

    let Some(u_set) = minimal else {
        let all = full_mask(n);
        for x in 0..n {
            let values = reach.get(all, x);
            if values.len() >= n {
                let right_stab = group.stabilizer(values, Side::Right);
                if right_stab.len() >= 2 {
                    let cert = StabilizerCertificate { scope: all, x, values, right_stab };
                    return Ok(KeyLemmaOutcome {
                        result: Dichotomy::Certificate(cert),
                        trace: None,
                        within_hypothesis,
                    });
                }
            }
        }
        // Only reachable with fewer than |Γ| vertices.
        return fallback(l, &reach, within_hypothesis);
    };

    let size = u_set.count_ones() as usize;
    let successor = |u: usize| {
        let rest = u_set & !(1 << u);
        bits(rest).find(|&v| reach.get(rest, v).len() + 1 >= size)
    };
    let mut walk = vec![u_set.trailing_zeros() as usize];
    let cycle = loop {
        let last = *walk.last().unwrap();
        let next = successor(last).expect("minimality gives every vertex an out-neighbour");
        if let Some(pos) = walk.iter().position(|&w| w == next) {
            break walk.split_off(pos);
        }
        walk.push(next);
    };
    let len = cycle.len();
    let prev = |i: usize| cycle[(i + len - 1) % len];
    let values: Vec<GroupSubset> = (0..len).map(|i| reach.get(u_set & !(1 << prev(i)), cycle[i])).collect();
    for i in 0..len {
        let next = (i + 1) % len;
        let shifted = group.right_mul_set(values[next], l.label(cycle[next], cycle[i]));
        assert_eq!(values[i], shifted, "reach-set propagation failed at step {i}");
    }
    // γ(v_0, v_{ℓ-1}) · γ(v_{ℓ-1}, v_{ℓ-2}) · … · γ(v_1, v_0)
    let backwards: Vec<usize> = std::iter::once(cycle[0]).chain(cycle[1..].iter().rev().copied()).collect();
    let product = group.product((0..len).map(|i| l.label(backwards[i], backwards[(i + 1) % len])));
    let trace = AuxiliaryCycle { minimal_set: u_set, cycle: cycle.clone(), values: values.clone(), product };

    let result = if product.is_identity() {
        let cycle = CycleWitness::new(backwards)?;
        debug_assert!(l.is_balanced(&cycle)?);
        Dichotomy::Cycle { cycle }
    } else {
        let right_stab = group.stabilizer(values[0], Side::Right);
        assert!(right_stab.contains(product));
        Dichotomy::Certificate(StabilizerCertificate {
            scope: u_set & !(1 << cycle[len - 1]),
            x: cycle[0],
            values: values[0],
            right_stab,
        })
    };
    Ok(KeyLemmaOutcome { result, trace: Some(trace), within_hypothesis })
}

fn fallback(l: &Labelling, reach: &paths::SubsetUnions, within_hypothesis: bool) -> Result<KeyLemmaOutcome> {
    let n = l.n();
    let group = l.group();
    for size in 1..=n {
        for m in masks_of_size(n, size) {
            for x in bits(m) {
                let values = reach.get(m, x);
                if values.len() >= size {
                    let right_stab = group.stabilizer(values, Side::Right);
                    if right_stab.len() >= 2 {
                        let scope = reach.global_mask(m);
                        let x = reach.global(x);
                        return Ok(KeyLemmaOutcome {
                            result: Dichotomy::Certificate(StabilizerCertificate {
                                scope,
                                x,
                                values,
                                right_stab,
                            }),
                            trace: None,
                            within_hypothesis,
                        });
                    }
                }
            }
        }
    }
    if let Some(cycle) = paths::find_balanced_cycle(l)? {
        return Ok(KeyLemmaOutcome { result: Dichotomy::Cycle { cycle }, trace: None, within_hypothesis });
    }
    Err(Error::OutsideHypothesis(format!(
        "{n} vertices over a group of order {}: no balanced cycle and no certificate",
        group.order()
    )))
}

/// Masks over `0..n` with exactly `size` bits, ascending.
fn masks_of_size(n: usize, size: usize) -> impl Iterator<Item = u64> {
    let limit = 1u64 << n;
    let mut m = if size == 0 || size > n { limit } else { (1u64 << size) - 1 };
    std::iter::from_fn(move || {
        if m >= limit {
            return None;
        }
        let out = m;
        let c = m & m.wrapping_neg();
        let r = m + c;
        m = (((r ^ m) >> 2) / c) | r;
        Some(out)
    })
}

/// `(X, u, v, γ', R)`: `γ'` is shifting-equivalent to the base labelling,
/// `R ⊆ ℛ_{γ'}(X, u, v)`, `R` has a non-trivial right stabilizer and
/// `|R| ≥ |X| - 1` (`|R| ≥ |X|` when super-efficient).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EfficientTuple {
    pub scope: u64,
    pub u: usize,
    pub v: usize,
    pub labelling: Labelling,
    /// `labelling = base.apply_shifts(shifts)`.
    pub shifts: ShiftWitness,
    pub values: GroupSubset,
    pub is_super: bool,
}

impl EfficientTuple {
    pub fn size(&self) -> usize {
        self.scope.count_ones() as usize
    }

    /// A balanced cycle through the back-arc `(v, u)`, available whenever
    /// `γ'(v, u)⁻¹` is the value of some `u`-`v` path inside `X`.
    pub fn close(&self) -> Result<Option<CycleWitness>> {
        let l = &self.labelling;
        let target = l.group().inverse(l.label(self.v, self.u));
        let Some(path) = find_path_with_value(l, self.scope, self.u, self.v, target)? else {
            return Ok(None);
        };
        let cycle = path.close()?;
        assert!(l.is_balanced(&cycle)?);
        Ok(Some(cycle))
    }
}

fn tuple_from_base(l: &Labelling, v0: usize) -> Result<Dichotomy<EfficientTuple>> {
    l.check_vertex(v0)?;
    if !l.is_complete() {
        return Err(Error::IncompleteDigraph);
    }
    let n = l.n();
    if n < 2 {
        return Err(Error::BadSize("efficient tuples need at least two vertices".into()));
    }
    if n - 1 > TABLE_CAP {
        return Err(Error::TooLarge { what: "digraph minus one vertex", size: n - 1, cap: TABLE_CAP });
    }
    let shifts = l.normalizing_shifts(v0)?;
    let normalized = l.apply_shifts(&shifts)?;
    let others: Vec<usize> = (0..n).filter(|&w| w != v0).collect();
    let inner = key_lemma(&normalized.induced(&others)?)?;
    Ok(match inner.result {
        Dichotomy::Cycle { cycle } => {
            let cycle = CycleWitness::new(cycle.vertices.iter().map(|&i| others[i]).collect())?;
            assert!(l.is_balanced(&cycle)?);
            Dichotomy::Cycle { cycle }
        }
        Dichotomy::Certificate(cert) => {
            let scope = bits(cert.scope).fold(1u64 << v0, |m, i| m | 1 << others[i]);
            let values = cert.values;
            Dichotomy::Certificate(EfficientTuple {
                scope,
                u: v0,
                v: others[cert.x],
                labelling: normalized,
                shifts,
                values,
                is_super: values.len() >= scope.count_ones() as usize,
            })
        }
    })
}

/// Normalizes at `v0`, applies [`key_lemma`] to the rest and lifts the
/// certificate to an efficient tuple with `u = v0`. A tuple whose `R` is the
/// whole group is closed into a balanced cycle before returning.
pub fn make_efficient_tuple(l: &Labelling, v0: usize) -> Result<Dichotomy<EfficientTuple>> {
    let out = tuple_from_base(l, v0)?;
    if let Dichotomy::Certificate(t) = &out {
        if t.values == l.group().full_set() {
            let cycle = t.close()?.expect("R = Γ contains the back-arc inverse");
            assert!(l.is_balanced(&cycle)?);
            return Ok(Dichotomy::Cycle { cycle });
        }
    }
    Ok(out)
}

/// One named check of a [`TupleReport`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: impl Into<String>) -> Check {
    Check { name, passed, detail: detail.into() }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TupleReport {
    /// The defining properties of an (super-)efficient tuple.
    pub definition: Vec<Check>,
    /// `R ≠ Γ` and `|V ∖ X| ≥ max(|stab_l R|, |stab_r R|)` (plus one when
    /// super). On `|Γ| + 1` vertices without balanced cycles both must hold,
    /// so a failure is evidence of a balanced cycle.
    pub consequences: Vec<Check>,
    /// The digraph has exactly `|Γ| + 1` vertices.
    pub consequences_apply: bool,
    /// Closing cycle through `(v, u)`, when one exists.
    pub witness: Option<CycleWitness>,
}

impl TupleReport {
    pub fn definition_ok(&self) -> bool {
        self.definition.iter().all(|c| c.passed)
    }

    pub fn consequences_ok(&self) -> bool {
        self.consequences.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.definition.iter().chain(&self.consequences).filter(|c| !c.passed)
    }
}

/// Re-derives every property of `t` against `base` from scratch.
pub fn validate_tuple(base: &Labelling, t: &EfficientTuple) -> TupleReport {
    let group = base.group();
    let size = t.size();
    let mut definition = Vec::new();

    let endpoints = t.u != t.v && t.scope >> t.u & 1 == 1 && t.scope >> t.v & 1 == 1;
    definition.push(check("endpoints", endpoints, format!("u = {}, v = {}", t.u, t.v)));

    let replay = base.apply_shifts(&t.shifts).map(|l| l == t.labelling).unwrap_or(false);
    let equivalent = matches!(base.shifting_equivalent(&t.labelling), Ok(Some(_)));
    definition.push(check(
        "shifting_equivalent",
        replay && equivalent,
        format!("stored shifts replay: {replay}; decision procedure: {equivalent}"),
    ));

    let reach = if endpoints {
        reach_set_between(&t.labelling, t.scope, t.u, t.v)
    } else {
        Err(Error::BadWitness("bad endpoints".into()))
    };
    match &reach {
        Ok(r) => definition.push(check(
            "membership",
            t.values.is_subset(*r),
            format!("R = {:?}, ℛ(X, u, v) = {:?}", t.values, r),
        )),
        Err(e) => definition.push(check("membership", false, e.to_string())),
    }

    let right = group.stabilizer(t.values, Side::Right);
    let left = group.stabilizer(t.values, Side::Left);
    definition.push(check("right_stabilizer", right.len() >= 2, format!("stab_r(R) = {right:?}")));
    definition.push(check(
        "size",
        t.values.len() + 1 >= size,
        format!("|R| = {}, |X| = {size}", t.values.len()),
    ));
    if t.is_super {
        definition.push(check(
            "super_size",
            t.values.len() >= size,
            format!("|R| = {}, |X| = {size}", t.values.len()),
        ));
    }

    let mut consequences = Vec::new();
    let whole = t.values == group.full_set();
    consequences.push(check("not_whole_group", !whole, format!("|R| = {}", t.values.len())));
    let outside = base.n().saturating_sub(size);
    let needed = left.len().max(right.len()) + usize::from(t.is_super);
    consequences.push(check(
        "room_outside",
        outside >= needed,
        format!("|V∖X| = {outside}, needed {needed}"),
    ));

    let witness = match &reach {
        Ok(r) if r.contains(group.inverse(t.labelling.label(t.v, t.u))) => {
            t.close().ok().flatten().filter(|c| base.is_balanced(c).unwrap_or(false))
        }
        _ => None,
    };

    TupleReport { definition, consequences, consequences_apply: base.n() == group.order() + 1, witness }
}

/// Shifts every vertex outside `X` so that its arc into `u` carries the
/// identity. Arcs inside `X` are unchanged.
pub fn renormalize_outside(t: &EfficientTuple) -> Result<EfficientTuple> {
    let l = &t.labelling;
    let group = l.group();
    let h =
        ShiftWitness(
            (0..l.n())
                .map(|w| {
                    if t.scope >> w & 1 == 1 {
                        GroupElement::IDENTITY
                    } else {
                        group.inverse(l.label(w, t.u))
                    }
                })
                .collect(),
        );
    Ok(EfficientTuple { labelling: l.apply_shifts(&h)?, shifts: t.shifts.compose(group, &h), ..t.clone() })
}

/// Pairs `(w1, w2)` outside `X` whose label after [`renormalize_outside`]
/// does not stabilize `R` on the left.
pub fn augmenting_pairs(t: &EfficientTuple) -> Result<Vec<(usize, usize)>> {
    let norm = renormalize_outside(t)?;
    let group = norm.labelling.group();
    let stab_l = group.stabilizer(t.values, Side::Left);
    let outside: Vec<usize> = (0..norm.labelling.n()).filter(|&w| t.scope >> w & 1 == 0).collect();
    let mut out = Vec::new();
    for &a in &outside {
        for &b in &outside {
            if a != b && !stab_l.contains(norm.labelling.label(a, b)) {
                out.push((a, b));
            }
        }
    }
    Ok(out)
}

/// Adds `w1, w2` to the tuple: `X' = X ∪ {w1, w2}`, `u' = w1`, and
/// `R' = {1, δ(w1, w2)}·R` where `δ` is the labelling re-normalized outside
/// `X`. Values of `R` come from prepending `(w1, u)`, values of
/// `δ(w1, w2)·R` from prepending `(w1, w2), (w2, u)`.
pub fn augment_tuple(base: &Labelling, t: &EfficientTuple, w1: usize, w2: usize) -> Result<EfficientTuple> {
    base.check_vertex(w1)?;
    base.check_vertex(w2)?;
    if w1 == w2 {
        return Err(Error::PreconditionViolated("w1 and w2 must be distinct".into()));
    }
    if t.scope >> w1 & 1 == 1 || t.scope >> w2 & 1 == 1 {
        return Err(Error::PreconditionViolated("w1 and w2 must lie outside X".into()));
    }
    if base.apply_shifts(&t.shifts)? != t.labelling {
        return Err(Error::PreconditionViolated("tuple labelling does not replay from the base".into()));
    }
    let norm = renormalize_outside(t)?;
    let group = base.group();
    let x = norm.labelling.label(w1, w2);
    if group.stabilizer(t.values, Side::Left).contains(x) {
        return Err(Error::PreconditionViolated(format!(
            "label {x} of ({w1}, {w2}) stabilizes R on the left"
        )));
    }
    let values = group.grow_set(t.values, x);
    let scope = t.scope | 1 << w1 | 1 << w2;
    Ok(EfficientTuple {
        scope,
        u: w1,
        v: t.v,
        values,
        is_super: values.len() >= scope.count_ones() as usize,
        ..norm
    })
}

fn is_prime(p: usize) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// A balanced cycle in a `Z_p`-labelled complete digraph on at least `p + 1`
/// vertices, built through an efficient tuple on the first `p + 1` vertices.
///
/// In `Z_p` a non-trivial right stabilizer is the whole group, so the tuple's
/// `R` is everything and in particular contains `-γ'(v, u)`; the matching
/// `u`-`v` path plus the back-arc is the cycle.
pub fn prime_finder(l: &Labelling) -> Result<CycleWitness> {
    let p = l.group().order();
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if l.n() < p + 1 {
        return Err(Error::BadSize(format!("need at least {} vertices, got {}", p + 1, l.n())));
    }
    if p > TABLE_CAP {
        return Err(Error::TooLarge { what: "digraph minus one vertex", size: p, cap: TABLE_CAP });
    }
    let sub = if l.n() == p + 1 { l.clone() } else { l.induced(&(0..=p).collect::<Vec<_>>())? };
    let cycle = match tuple_from_base(&sub, 0)? {
        Dichotomy::Cycle { cycle } => cycle,
        Dichotomy::Certificate(t) => {
            let full = l.group().full_set();
            if l.group().stabilizer(t.values, Side::Right) != full || t.values != full {
                return Err(Error::TheoremViolation(format!(
                    "tuple R = {:?} in Z_{p} is not the whole group",
                    t.values
                )));
            }
            t.close()?.ok_or_else(|| {
                Error::TheoremViolation("R = Z_p but no closing path was reconstructed".into())
            })?
        }
    };
    if !l.is_balanced(&cycle)? {
        return Err(Error::TheoremViolation(format!("cycle {:?} is not balanced", cycle.vertices)));
    }
    Ok(cycle)
}
