//! Verification campaigns and `n(Γ)` search.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::constructions::random_labelling;
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, GroupElement, GroupSpec};
use crate::labelling::Labelling;
use crate::paths::{self, DP_CAP, ENUMERATION_CAP};

/// Exhaustive campaigns refuse search spaces beyond this many labellings.
pub const MAX_SEARCH_SPACE: u128 = 100_000_000;
/// Counterexamples kept in a report; the count is always exact.
pub const MAX_REPORTED: usize = 32;
/// Default node budget for [`compute_n`].
pub const DEFAULT_NODE_LIMIT: u64 = 50_000_000;

const CHUNK: u64 = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CampaignMode {
    Exhaustive,
    ExhaustiveNormalized,
    Randomized,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerdictReport {
    pub group: GroupSpec,
    pub group_name: String,
    pub n: usize,
    pub mode: CampaignMode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub trials: u64,
    /// Labellings without a balanced cycle.
    pub counterexample_count: u64,
    /// The first [`MAX_REPORTED`] counterexamples, each re-verified.
    #[serde(serialize_with = "ser_labellings")]
    pub counterexamples: Vec<Labelling>,
    /// Trials where the heuristic found nothing and exact search was out of
    /// reach.
    pub unresolved: u64,
    /// Length of the witness found, per trial.
    pub witness_lengths: BTreeMap<usize, u64>,
    #[serde(rename = "elapsed_secs", serialize_with = "ser_secs")]
    pub elapsed: Duration,
}

impl VerdictReport {
    pub fn has_counterexample(&self) -> bool {
        self.counterexample_count > 0
    }

    /// Equal up to elapsed time.
    pub fn same_outcome(&self, other: &VerdictReport) -> bool {
        self.group == other.group
            && self.n == other.n
            && self.mode == other.mode
            && self.seed == other.seed
            && self.trials == other.trials
            && self.counterexample_count == other.counterexample_count
            && self.counterexamples == other.counterexamples
            && self.unresolved == other.unresolved
            && self.witness_lengths == other.witness_lengths
    }
}

fn ser_labellings<S: Serializer>(ls: &[Labelling], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(ls.iter().map(Labelling::to_json))
}

fn ser_secs<S: Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

#[derive(Default)]
struct Tally {
    trials: u64,
    counterexample_count: u64,
    counterexamples: Vec<Labelling>,
    unresolved: u64,
    witness_lengths: BTreeMap<usize, u64>,
    error: Option<Error>,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.trials += other.trials;
        self.counterexample_count += other.counterexample_count;
        let room = MAX_REPORTED - self.counterexamples.len();
        self.counterexamples.extend(other.counterexamples.into_iter().take(room));
        self.unresolved += other.unresolved;
        for (k, c) in other.witness_lengths {
            *self.witness_lengths.entry(k).or_default() += c;
        }
        self.error = self.error.or(other.error);
        self
    }

    fn witness(&mut self, len: usize) {
        self.trials += 1;
        *self.witness_lengths.entry(len).or_default() += 1;
    }

    fn counterexample(&mut self, l: Labelling) {
        self.trials += 1;
        if let Err(e) = reverify(&l) {
            self.error.get_or_insert(e);
            return;
        }
        self.counterexample_count += 1;
        if self.counterexamples.len() < MAX_REPORTED {
            self.counterexamples.push(l);
        }
    }

    fn into_report(
        self,
        group: &FiniteGroup,
        n: usize,
        mode: CampaignMode,
        seed: Option<u64>,
        start: Instant,
    ) -> Result<VerdictReport> {
        if let Some(e) = self.error {
            return Err(e);
        }
        Ok(VerdictReport {
            group: group.spec().clone(),
            group_name: group.name().to_string(),
            n,
            mode,
            seed,
            trials: self.trials,
            counterexample_count: self.counterexample_count,
            counterexamples: self.counterexamples,
            unresolved: self.unresolved,
            witness_lengths: self.witness_lengths,
            elapsed: start.elapsed(),
        })
    }
}

/// Confirms absence of balanced cycles with a search that shares no code
/// with the subset DP.
fn reverify(l: &Labelling) -> Result<()> {
    let found = if l.n() <= ENUMERATION_CAP {
        paths::enumerate_balanced_cycles(l)?.into_iter().next()
    } else {
        paths::dfs_balanced_cycle(l)
    };
    match found {
        None => Ok(()),
        Some(c) => Err(Error::Mismatch(format!(
            "exact search reported no balanced cycle but {:?} is one",
            c.vertices
        ))),
    }
}

/// Free arcs in row-major order; with `normalized`, arcs leaving vertex 0
/// are pinned to the identity.
fn free_arcs(n: usize, normalized: bool) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|u| (0..n).map(move |v| (u, v)))
        .filter(|&(u, v)| u != v && !(normalized && u == 0))
        .collect()
}

/// Checks every labelling of the complete digraph on `n` vertices.
///
/// Normalized mode is sound because shifting at every `w ≠ 0` by
/// `γ(0, w)` reaches a labelling of that form with the same balanced cycles.
pub fn verify_all(group: &Arc<FiniteGroup>, n: usize, normalized: bool) -> Result<VerdictReport> {
    verify_all_capped(group, n, normalized, DP_CAP)
}

pub fn verify_all_capped(
    group: &Arc<FiniteGroup>,
    n: usize,
    normalized: bool,
    cap: usize,
) -> Result<VerdictReport> {
    let start = Instant::now();
    let mode = if normalized { CampaignMode::ExhaustiveNormalized } else { CampaignMode::Exhaustive };
    let arcs = free_arcs(n, normalized);
    let order = group.order() as u128;
    let total = (0..arcs.len()).try_fold(1u128, |acc, _| {
        let next = acc * order;
        (next <= MAX_SEARCH_SPACE).then_some(next)
    });
    let Some(total) = total else {
        return Err(Error::SearchSpaceTooLarge(format!(
            "{}^{} labellings exceed {MAX_SEARCH_SPACE}",
            group.order(),
            arcs.len()
        )));
    };
    let cap = cap.min(DP_CAP);
    if n > cap {
        return Err(Error::TooLarge { what: "digraph", size: n, cap });
    }
    let total = total as u64;
    let chunks = total.div_ceil(CHUNK);
    let tally = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(total);
            let mut tally = Tally::default();
            let mut digits = decode(lo, group.order(), arcs.len());
            for index in lo..hi {
                if index > lo {
                    increment(&mut digits, group.order());
                }
                let l = assemble(group, n, &arcs, &digits);
                match paths::find_balanced_cycle_capped(&l, cap) {
                    Ok(Some(cycle)) => tally.witness(cycle.len()),
                    Ok(None) => tally.counterexample(l),
                    Err(e) => {
                        tally.error.get_or_insert(e);
                    }
                }
            }
            tally
        })
        .reduce(Tally::default, Tally::merge);
    tally.into_report(group, n, mode, None, start)
}

/// Digits of `index` in base `radix`, least significant first.
fn decode(mut index: u64, radix: usize, len: usize) -> Vec<usize> {
    (0..len)
        .map(|_| {
            let d = (index % radix as u64) as usize;
            index /= radix as u64;
            d
        })
        .collect()
}

fn increment(digits: &mut [usize], radix: usize) {
    for d in digits {
        *d += 1;
        if *d < radix {
            return;
        }
        *d = 0;
    }
}

fn assemble(group: &Arc<FiniteGroup>, n: usize, arcs: &[(usize, usize)], digits: &[usize]) -> Labelling {
    let mut matrix = vec![GroupElement::IDENTITY; n * n];
    for (&(u, v), &d) in arcs.iter().zip(digits) {
        matrix[u * n + v] = GroupElement::new(d);
    }
    Labelling::from_fn(Arc::clone(group), n, |u, v| matrix[u * n + v]).expect("valid labels")
}

/// Random campaign: trial `i` uses seed `seed + i` (wrapping). Each trial
/// runs the short-cycle heuristic, then exact search when `n ≤ cap`; a trial
/// that neither finds a cycle nor can run the exact search is unresolved.
pub fn verify_random(
    group: &Arc<FiniteGroup>,
    n: usize,
    trials: u64,
    seed: u64,
    cap: usize,
) -> Result<VerdictReport> {
    let start = Instant::now();
    let cap = cap.min(DP_CAP);
    let tally = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut tally = Tally::default();
            let l = match random_labelling(group, n, seed.wrapping_add(i)) {
                Ok(l) => l,
                Err(e) => {
                    tally.error = Some(e);
                    return tally;
                }
            };
            let verdict = paths::check(&l, cap);
            match verdict.balanced_cycle {
                Some(cycle) => tally.witness(cycle.len()),
                None if verdict.is_inconclusive() => {
                    tally.trials += 1;
                    tally.unresolved += 1;
                }
                None => tally.counterexample(l),
            }
            tally
        })
        .reduce(Tally::default, Tally::merge);
    tally.into_report(group, n, CampaignMode::Randomized, Some(seed), start)
}

#[derive(Clone, Debug, Serialize)]
pub struct NReport {
    pub group: GroupSpec,
    pub group_name: String,
    /// Least `n` such that every labelling on `n` vertices has a balanced
    /// cycle.
    pub n_value: usize,
    /// A labelling on `n_value - 1` vertices without balanced cycles.
    #[serde(serialize_with = "ser_labelling")]
    pub witness: Labelling,
    pub nodes: u64,
    #[serde(rename = "elapsed_secs", serialize_with = "ser_secs")]
    pub elapsed: Duration,
}

fn ser_labelling<S: Serializer>(l: &Labelling, s: S) -> std::result::Result<S::Ok, S::Error> {
    l.to_json().serialize(s)
}

/// Largest digraph [`compute_n`] will try.
pub const MAX_COMPUTE_N: usize = 24;

/// `n(Γ)` by backtracking: for `n = 1, 2, …` look for a labelling without
/// balanced cycles, with arcs out of vertex 0 fixed to the identity, adding
/// vertices one at a time and rejecting any label that closes a balanced
/// cycle among the arcs assigned so far.
pub fn compute_n(group: &Arc<FiniteGroup>, node_limit: u64) -> Result<NReport> {
    let start = Instant::now();
    let mut nodes = 0;
    let mut witness = Labelling::constant(Arc::clone(group), 1, GroupElement::IDENTITY)?;
    for n in 2..=MAX_COMPUTE_N {
        let mut search = Backtrack::new(group, n, node_limit.saturating_sub(nodes));
        let found = search.run(0);
        nodes += search.nodes;
        match found {
            Some(true) => witness = search.labelling()?,
            Some(false) => {
                return Ok(NReport {
                    group: group.spec().clone(),
                    group_name: group.name().to_string(),
                    n_value: n,
                    witness,
                    nodes,
                    elapsed: start.elapsed(),
                })
            }
            None => {
                return Err(Error::SearchSpaceTooLarge(format!(
                    "n({}) ≥ {n}: node budget {node_limit} exhausted while searching {n} vertices",
                    group.name()
                )))
            }
        }
    }
    Err(Error::SearchSpaceTooLarge(format!(
        "n({}) > {MAX_COMPUTE_N}: cycle-free labelling found on {MAX_COMPUTE_N} vertices",
        group.name()
    )))
}

struct Backtrack<'a> {
    group: &'a Arc<FiniteGroup>,
    n: usize,
    labels: Vec<GroupElement>,
    assigned: Vec<u64>,
    arcs: Vec<(usize, usize)>,
    nodes: u64,
    limit: u64,
}

impl<'a> Backtrack<'a> {
    fn new(group: &'a Arc<FiniteGroup>, n: usize, limit: u64) -> Self {
        let mut arcs = Vec::new();
        for k in 1..n {
            arcs.push((0, k));
            arcs.push((k, 0));
            for j in 1..k {
                arcs.push((j, k));
                arcs.push((k, j));
            }
        }
        Backtrack {
            group,
            n,
            labels: vec![GroupElement::IDENTITY; n * n],
            assigned: vec![0; n],
            arcs,
            nodes: 0,
            limit,
        }
    }

    /// `Some(true)` when a full cycle-free labelling is reached, `None` when
    /// the node budget runs out.
    fn run(&mut self, i: usize) -> Option<bool> {
        let Some(&(a, b)) = self.arcs.get(i) else { return Some(true) };
        let choices = if a == 0 { 1 } else { self.group.order() };
        for g in (0..choices).map(GroupElement::new) {
            self.nodes += 1;
            if self.nodes > self.limit {
                return None;
            }
            let need = self.group.inverse(g);
            if self.closes(b, a, need, 1 << b, GroupElement::IDENTITY) {
                continue;
            }
            self.labels[a * self.n + b] = g;
            self.assigned[a] |= 1 << b;
            if self.run(i + 1)? {
                return Some(true);
            }
            self.assigned[a] &= !(1 << b);
        }
        Some(false)
    }

    /// A simple assigned path from `x` to `target_vertex` avoiding `used`,
    /// continuing a prefix of value `value`, whose total is `target`.
    fn closes(
        &self,
        x: usize,
        target_vertex: usize,
        target: GroupElement,
        used: u64,
        value: GroupElement,
    ) -> bool {
        if x == target_vertex {
            return value == target;
        }
        let mut next = self.assigned[x] & !used;
        while next != 0 {
            let y = next.trailing_zeros() as usize;
            next &= next - 1;
            let value = self.group.multiply(value, self.labels[x * self.n + y]);
            if self.closes(y, target_vertex, target, used | 1 << y, value) {
                return true;
            }
        }
        false
    }

    fn labelling(&self) -> Result<Labelling> {
        Labelling::from_fn(Arc::clone(self.group), self.n, |u, v| self.labels[u * self.n + v])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::extremal_cyclic;
    use crate::group::GroupSpec;

    fn group(spec: GroupSpec) -> Arc<FiniteGroup> {
        Arc::new(spec.build().unwrap())
    }

    #[test]
    fn z2_on_three_vertices_full() {
        let r = verify_all(&group(GroupSpec::cyclic(2)), 3, false).unwrap();
        assert_eq!(r.trials, 64);
        assert_eq!(r.counterexample_count, 0);
    }

    #[test]
    fn z3_on_four_vertices_normalized() {
        let r = verify_all(&group(GroupSpec::cyclic(3)), 4, true).unwrap();
        assert_eq!(r.trials, 19683);
        assert_eq!(r.counterexample_count, 0);
    }

    #[test]
    fn z3_on_three_vertices_has_extremal_counterexample() {
        let g = group(GroupSpec::cyclic(3));
        let full = verify_all(&g, 3, false).unwrap();
        assert!(full.has_counterexample());
        let extremal = extremal_cyclic(3, 3).unwrap();
        assert!(full.counterexamples.iter().any(|c| c.shifting_equivalent(&extremal).unwrap().is_some()));
        let normalized = verify_all(&g, 3, true).unwrap();
        assert_eq!(normalized.trials, 81);
        assert!(normalized.has_counterexample());
        // each normalized class stands for |Γ|^(n-1) full labellings
        assert_eq!(normalized.counterexample_count * 9, full.counterexample_count);
    }

    #[test]
    fn normalized_and_full_agree_on_z2() {
        let g = group(GroupSpec::cyclic(2));
        for n in [2, 3] {
            let full = verify_all(&g, n, false).unwrap();
            let norm = verify_all(&g, n, true).unwrap();
            assert_eq!(full.has_counterexample(), norm.has_counterexample(), "n = {n}");
        }
    }

    #[test]
    fn search_space_guard() {
        let g = group(GroupSpec::cyclic(9));
        assert!(matches!(verify_all(&g, 6, true), Err(Error::SearchSpaceTooLarge(_))));
    }

    #[test]
    fn random_campaign_is_deterministic() {
        let g = group(GroupSpec::cyclic(5));
        let a = verify_random(&g, 6, 50, 11, DP_CAP).unwrap();
        let b = verify_random(&g, 6, 50, 11, DP_CAP).unwrap();
        assert!(a.same_outcome(&b));
        assert_eq!(a.trials, 50);
        assert_eq!(a.counterexample_count, 0);
        assert_eq!(a.witness_lengths.values().sum::<u64>(), 50);
    }

    #[test]
    fn random_campaign_finds_counterexamples_below_threshold() {
        // Z_2 on two vertices: balanced iff both labels agree
        let g = group(GroupSpec::cyclic(2));
        let r = verify_random(&g, 2, 200, 0, DP_CAP).unwrap();
        assert!(r.counterexample_count > 0);
        assert!(r.counterexample_count < 200);
        assert_eq!(r.unresolved, 0);
    }

    #[test]
    fn over_cap_trials_without_short_cycle_are_unresolved() {
        // cap 3 on extremal-like random Z_21 instances with 5 vertices:
        // some trials have no cycle of length ≤ 4
        let g = group(GroupSpec::cyclic(21));
        let r = verify_random(&g, 5, 200, 3, 3).unwrap();
        assert!(r.unresolved > 0);
        assert_eq!(r.counterexample_count, 0);
    }

    #[test]
    fn n_of_tiny_groups() {
        let limit = DEFAULT_NODE_LIMIT;
        let r = compute_n(&group(GroupSpec::cyclic(1)), limit).unwrap();
        assert_eq!((r.n_value, r.witness.n()), (2, 1));
        let r = compute_n(&group(GroupSpec::cyclic(2)), limit).unwrap();
        assert_eq!(r.n_value, 3);
        let r = compute_n(&group(GroupSpec::cyclic(3)), limit).unwrap();
        assert_eq!(r.n_value, 4);
        assert!(paths::find_balanced_cycle(&r.witness).unwrap().is_none());
    }

    #[test]
    fn z3_witness_is_extremal_up_to_relabelling() {
        let w = compute_n(&group(GroupSpec::cyclic(3)), DEFAULT_NODE_LIMIT).unwrap().witness;
        let extremal = extremal_cyclic(3, 3).unwrap();
        let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        assert!(perms.iter().any(|p| {
            let permuted = w.induced(p).unwrap();
            permuted.shifting_equivalent(&extremal).unwrap().is_some()
        }));
    }

    #[test]
    fn node_budget_is_reported() {
        let r = compute_n(&group(GroupSpec::cyclic(3)), 10);
        assert!(matches!(r, Err(Error::SearchSpaceTooLarge(_))));
    }
}
