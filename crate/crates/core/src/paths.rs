//! Exact path-value sets and balanced-cycle detection by subset dynamic
//! programming.
//!
//! For a vertex set `M` and an endpoint `e ∈ M`, the DP entry is the set of
//! values `γ(P)` over simple paths with vertex set exactly `M` ending at `e`:
//!
//! ```text
//! V[{v}][v] = {1}
//! V[M][e]   = ⋃_{p ∈ M∖{e}, (p,e) an arc} V[M∖{e}][p] · γ(p, e)
//! ```
//!
//! Layers are processed by ascending popcount and only the previous layer is
//! kept, so memory peaks at about `C(k, k/2) · k/2` words for a scope of `k`
//! vertices. Within a layer, masks are stored in colex order (the order
//! Gosper's hack produces) and only endpoints inside the mask get a slot.

use std::ops::ControlFlow;

use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::labelling::{full_mask, CycleWitness, Labelling, PathWitness};
use crate::subset::GroupSubset;

/// Largest scope the streaming DP accepts.
pub const DP_CAP: usize = 24;
/// Largest scope for which a full [`ReachTable`] is retained.
pub const TABLE_CAP: usize = 20;
/// Largest digraph [`enumerate_balanced_cycles`] accepts.
pub const ENUMERATION_CAP: usize = 12;

/// Which paths a sweep counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Anchor {
    /// Paths may start anywhere.
    Free,
    /// Paths start at this local vertex.
    At(usize),
    /// Paths start at the smallest vertex of their vertex set.
    MinVertex,
}

/// A scope `X` translated to local indices `0..k`.
pub(crate) struct Scope<'a> {
    l: &'a Labelling,
    verts: Vec<usize>,
    // lab[p * k + e] = γ(verts[p], verts[e])
    lab: Vec<GroupElement>,
    // bit p of preds[e] set iff (verts[p], verts[e]) is an arc
    preds: Vec<u64>,
}

impl<'a> Scope<'a> {
    pub(crate) fn new(l: &'a Labelling, mask: u64, cap: usize) -> Result<Self> {
        if mask & !l.vertex_mask() != 0 {
            let v = (mask & !l.vertex_mask()).trailing_zeros() as usize;
            return Err(Error::InvalidVertex { vertex: v, n: l.n() });
        }
        let verts: Vec<usize> = bits(mask).collect();
        let k = verts.len();
        let cap = cap.min(DP_CAP);
        if k > cap {
            return Err(Error::TooLarge { what: "scope", size: k, cap });
        }
        let mut lab = vec![GroupElement::IDENTITY; k * k];
        let mut preds = vec![0u64; k];
        for (p, &a) in verts.iter().enumerate() {
            for (e, &b) in verts.iter().enumerate() {
                if p != e && l.has_arc(a, b) {
                    lab[p * k + e] = l.label(a, b);
                    preds[e] |= 1 << p;
                }
            }
        }
        Ok(Scope { l, verts, lab, preds })
    }

    pub(crate) fn k(&self) -> usize {
        self.verts.len()
    }

    pub(crate) fn global(&self, local: usize) -> usize {
        self.verts[local]
    }

    pub(crate) fn local(&self, global: usize) -> Option<usize> {
        self.verts.iter().position(|&v| v == global)
    }

    pub(crate) fn global_mask(&self, local_mask: u64) -> u64 {
        bits(local_mask).fold(0, |m, i| m | 1 << self.verts[i])
    }

    /// Runs the DP, calling `visit(mask, end, values)` for every non-empty
    /// entry in ascending popcount order. Masks and ends are local.
    pub(crate) fn sweep<F>(&self, anchor: Anchor, mut visit: F) -> ControlFlow<()>
    where
        F: FnMut(u64, usize, GroupSubset) -> ControlFlow<()>,
    {
        let k = self.k();
        if k == 0 {
            return ControlFlow::Continue(());
        }
        let group = self.l.group();
        let binom = binomials();
        let one = GroupSubset::singleton(GroupElement::IDENTITY);

        let mut prev = vec![GroupSubset::EMPTY; k];
        for (v, slot) in prev.iter_mut().enumerate() {
            let seeded = match anchor {
                Anchor::Free | Anchor::MinVertex => true,
                Anchor::At(s) => v == s,
            };
            if seeded {
                *slot = one;
                visit(1 << v, v, one)?;
            }
        }

        let mut pos = [0usize; DP_CAP];
        let mut prefix = [0usize; DP_CAP];
        let mut suffix = [0usize; DP_CAP];
        for j in 2..=k {
            let count = binom[k][j];
            let mut cur = vec![GroupSubset::EMPTY; count * j];
            let mut any = false;
            let mut m: u64 = (1 << j) - 1;
            let limit: u64 = 1 << k;
            let mut rank = 0usize;
            while m < limit {
                let skip = matches!(anchor, Anchor::At(s) if m >> s & 1 == 0);
                if !skip {
                    let mut rest = m;
                    for slot in pos.iter_mut().take(j) {
                        *slot = rest.trailing_zeros() as usize;
                        rest &= rest - 1;
                    }
                    // colex rank of m ∖ {pos[t]} = prefix[t] + suffix[t]
                    let mut acc = 0;
                    for t in 0..j {
                        prefix[t] = acc;
                        acc += binom[pos[t]][t + 1];
                    }
                    let mut acc = 0;
                    for t in (0..j).rev() {
                        suffix[t] = acc;
                        acc += binom[pos[t]][t];
                    }
                    for t in 0..j {
                        let e = pos[t];
                        let forbidden = match anchor {
                            Anchor::Free => false,
                            Anchor::At(s) => e == s,
                            Anchor::MinVertex => t == 0,
                        };
                        if forbidden {
                            continue;
                        }
                        let prev_mask = m & !(1 << e);
                        let base = (prefix[t] + suffix[t]) * (j - 1);
                        let mut ps = prev_mask & self.preds[e];
                        let mut values = GroupSubset::EMPTY;
                        while ps != 0 {
                            let p = ps.trailing_zeros() as usize;
                            ps &= ps - 1;
                            let slot = (prev_mask & ((1 << p) - 1)).count_ones() as usize;
                            let s = prev[base + slot];
                            if !s.is_empty() {
                                values = values.union(group.right_mul_set(s, self.lab[p * k + e]));
                            }
                        }
                        if !values.is_empty() {
                            cur[rank * j + t] = values;
                            any = true;
                            visit(m, e, values)?;
                        }
                    }
                }
                rank += 1;
                let c = m & m.wrapping_neg();
                let r = m + c;
                m = (((r ^ m) >> 2) / c) | r;
            }
            if !any {
                break;
            }
            prev = cur;
        }
        ControlFlow::Continue(())
    }

    /// Entries `W[M][e]` for the full scope `M`, paths starting at `start`.
    fn full_entries(&self, start: usize) -> Vec<GroupSubset> {
        let full = full_mask(self.k());
        let mut out = vec![GroupSubset::EMPTY; self.k()];
        let _ = self.sweep(Anchor::At(start), |m, e, s| {
            if m == full {
                out[e] = s;
            }
            ControlFlow::Continue(())
        });
        out
    }
}

fn binomials() -> [[usize; DP_CAP + 1]; DP_CAP + 1] {
    let mut c = [[0usize; DP_CAP + 1]; DP_CAP + 1];
    for n in 0..=DP_CAP {
        c[n][0] = 1;
        for k in 1..=n {
            c[n][k] = c[n - 1][k - 1] + c[n - 1][k];
        }
    }
    c
}

/// Ascending bit positions of a mask.
pub(crate) fn bits(mask: u64) -> impl Iterator<Item = usize> {
    let mut rest = mask;
    std::iter::from_fn(move || {
        (rest != 0).then(|| {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            i
        })
    })
}

/// Which paths a [`ReachTable`] records.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableKind {
    /// Paths may start at any vertex of their vertex set.
    AnyStart,
    /// Paths start at the smallest vertex of their vertex set.
    MinStart,
}

/// Fully retained DP table over a scope of at most [`TABLE_CAP`] vertices.
#[derive(Clone, Debug)]
pub struct ReachTable {
    kind: TableKind,
    verts: Vec<usize>,
    entries: Vec<GroupSubset>,
}

impl ReachTable {
    pub fn kind(&self) -> TableKind {
        self.kind
    }

    /// Scope vertices in ascending order.
    pub fn vertices(&self) -> &[usize] {
        &self.verts
    }

    fn local_mask(&self, global_mask: u64) -> Option<u64> {
        let mut m = 0;
        for v in bits(global_mask) {
            m |= 1 << self.verts.iter().position(|&w| w == v)?;
        }
        Some(m)
    }

    /// Values of paths with vertex set exactly `vertex_set` ending at `end`.
    /// Empty when either lies outside the scope.
    pub fn entry(&self, vertex_set: u64, end: usize) -> GroupSubset {
        let k = self.verts.len();
        match (self.local_mask(vertex_set), self.verts.iter().position(|&w| w == end)) {
            (Some(m), Some(e)) => self.entries[m as usize * k + e],
            _ => GroupSubset::EMPTY,
        }
    }

    /// Union of all entries ending at `end`.
    pub fn reach_set(&self, end: usize) -> GroupSubset {
        let k = self.verts.len();
        let Some(e) = self.verts.iter().position(|&w| w == end) else {
            return GroupSubset::EMPTY;
        };
        (0..1usize << k).fold(GroupSubset::EMPTY, |acc, m| acc.union(self.entries[m * k + e]))
    }

    /// Replaces every entry `[M][e]` by the union over all `M' ⊆ M`, turning
    /// the table into `ℛ(M, e)` for every `M`.
    pub(crate) fn into_subset_unions(mut self) -> SubsetUnions {
        let k = self.verts.len();
        for w in 0..k {
            for m in 0..1usize << k {
                if m >> w & 1 == 1 {
                    let from = (m & !(1 << w)) * k;
                    let to = m * k;
                    for e in 0..k {
                        let s = self.entries[from + e];
                        self.entries[to + e] = self.entries[to + e].union(s);
                    }
                }
            }
        }
        SubsetUnions { verts: self.verts, entries: self.entries }
    }
}

/// `ℛ(U, u)` for every `U` within a scope, indexed by local mask.
pub(crate) struct SubsetUnions {
    verts: Vec<usize>,
    entries: Vec<GroupSubset>,
}

impl SubsetUnions {
    pub(crate) fn k(&self) -> usize {
        self.verts.len()
    }

    pub(crate) fn global(&self, local: usize) -> usize {
        self.verts[local]
    }

    pub(crate) fn global_mask(&self, local_mask: u64) -> u64 {
        bits(local_mask).fold(0, |m, i| m | 1 << self.verts[i])
    }

    #[inline]
    pub(crate) fn get(&self, local_mask: u64, local_end: usize) -> GroupSubset {
        self.entries[local_mask as usize * self.verts.len() + local_end]
    }
}

fn build_table(l: &Labelling, scope: u64, kind: TableKind) -> Result<ReachTable> {
    let sc = Scope::new(l, scope, TABLE_CAP)?;
    let k = sc.k();
    let mut entries = vec![GroupSubset::EMPTY; k << k];
    let anchor = match kind {
        TableKind::AnyStart => Anchor::Free,
        TableKind::MinStart => Anchor::MinVertex,
    };
    let _ = sc.sweep(anchor, |m, e, s| {
        entries[m as usize * k + e] = s;
        ControlFlow::Continue(())
    });
    Ok(ReachTable { kind, verts: sc.verts, entries })
}

/// Full DP table of path values inside `D[X]`, any start.
pub fn reach_table(l: &Labelling, scope: u64) -> Result<ReachTable> {
    build_table(l, scope, TableKind::AnyStart)
}

/// Full DP table of path values inside `D[X]`, each path starting at the
/// smallest vertex of its vertex set.
pub fn start_anchored_table(l: &Labelling, scope: u64) -> Result<ReachTable> {
    build_table(l, scope, TableKind::MinStart)
}

/// `ℛ(X, x)`: values of all simple paths inside `D[X]` ending at `x`,
/// including the single-vertex path.
pub fn reach_set(l: &Labelling, scope: u64, x: usize) -> Result<GroupSubset> {
    reach_set_capped(l, scope, x, DP_CAP)
}

pub fn reach_set_capped(l: &Labelling, scope: u64, x: usize, cap: usize) -> Result<GroupSubset> {
    l.check_vertex(x)?;
    let sc = Scope::new(l, scope, cap)?;
    let lx = sc.local(x).ok_or(Error::NotInScope(x))?;
    let mut acc = GroupSubset::EMPTY;
    let _ = sc.sweep(Anchor::Free, |_, e, s| {
        if e == lx {
            acc = acc.union(s);
        }
        ControlFlow::Continue(())
    });
    Ok(acc)
}

/// `ℛ(X, u, v)`: values of all simple `u`-`v` paths inside `D[X]`. For
/// `u = v` this is `{1}`, the single-vertex path.
pub fn reach_set_between(l: &Labelling, scope: u64, u: usize, v: usize) -> Result<GroupSubset> {
    l.check_vertex(u)?;
    l.check_vertex(v)?;
    let sc = Scope::new(l, scope, DP_CAP)?;
    let lu = sc.local(u).ok_or(Error::NotInScope(u))?;
    let lv = sc.local(v).ok_or(Error::NotInScope(v))?;
    let mut acc = GroupSubset::EMPTY;
    let _ = sc.sweep(Anchor::At(lu), |_, e, s| {
        if e == lv {
            acc = acc.union(s);
        }
        ControlFlow::Continue(())
    });
    Ok(acc)
}

/// A simple `u`-`v` path inside `D[X]` with value `target`, if one exists.
pub fn find_path_with_value(
    l: &Labelling,
    scope: u64,
    u: usize,
    v: usize,
    target: GroupElement,
) -> Result<Option<PathWitness>> {
    l.check_vertex(u)?;
    l.check_vertex(v)?;
    let sc = Scope::new(l, scope, DP_CAP)?;
    let lu = sc.local(u).ok_or(Error::NotInScope(u))?;
    let lv = sc.local(v).ok_or(Error::NotInScope(v))?;
    let mut hit = None;
    let _ = sc.sweep(Anchor::At(lu), |m, e, s| {
        if e == lv && s.contains(target) {
            hit = Some(m);
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    });
    let Some(m) = hit else { return Ok(None) };
    let path = path_on_vertex_set(l, u, v, sc.global_mask(m), target)?.expect("DP entry promised a path");
    Ok(Some(path))
}

/// Rebuilds a `start`-`end` path with vertex set exactly `vertex_set` and the
/// given value by peeling off the last vertex, recomputing the anchored DP on
/// the remaining set each time.
pub fn path_on_vertex_set(
    l: &Labelling,
    start: usize,
    end: usize,
    vertex_set: u64,
    target: GroupElement,
) -> Result<Option<PathWitness>> {
    let group = l.group();
    let mut rev = vec![end];
    let mut end = end;
    let mut set = vertex_set;
    let mut target = target;
    while set != 1 << start {
        let rest = set & !(1 << end);
        if rest >> start & 1 == 0 {
            return Ok(None);
        }
        let sc = Scope::new(l, rest, DP_CAP)?;
        let entries = sc.full_entries(sc.local(start).expect("start in scope"));
        let step = bits(rest).find_map(|p| {
            if !l.has_arc(p, end) {
                return None;
            }
            let need = group.multiply(target, group.inverse(l.label(p, end)));
            entries[sc.local(p).unwrap()].contains(need).then_some((p, need))
        });
        let Some((p, need)) = step else { return Ok(None) };
        rev.push(p);
        end = p;
        set = rest;
        target = need;
    }
    if end != start || !target.is_identity() {
        return Ok(None);
    }
    rev.reverse();
    Ok(Some(PathWitness::new(rev)?))
}

fn checked(l: &Labelling, cycle: CycleWitness) -> CycleWitness {
    assert!(
        l.is_balanced(&cycle).unwrap_or(false),
        "internal error: cycle {:?} does not re-evaluate to the identity",
        cycle.vertices
    );
    cycle
}

/// Balanced cycles of length at most `max_len` (2 ≤ max_len ≤ 4) found by
/// direct scanning, smallest length first.
pub fn short_balanced_cycle(l: &Labelling, max_len: usize) -> Option<CycleWitness> {
    let n = l.n();
    let g = l.group();
    let arc = |a: usize, b: usize| l.has_arc(a, b);
    for u in 0..n {
        for v in u + 1..n {
            if arc(u, v) && arc(v, u) && g.multiply(l.label(u, v), l.label(v, u)).is_identity() {
                return Some(checked(l, CycleWitness { vertices: vec![u, v] }));
            }
        }
    }
    if max_len >= 3 {
        for u in 0..n {
            for v in u + 1..n {
                if !arc(u, v) {
                    continue;
                }
                let a = l.label(u, v);
                for w in u + 1..n {
                    if w == v || !arc(v, w) || !arc(w, u) {
                        continue;
                    }
                    if g.product([a, l.label(v, w), l.label(w, u)]).is_identity() {
                        return Some(checked(l, CycleWitness { vertices: vec![u, v, w] }));
                    }
                }
            }
        }
    }
    if max_len >= 4 {
        for u in 0..n {
            for v in u + 1..n {
                if !arc(u, v) {
                    continue;
                }
                let a = l.label(u, v);
                for w in u + 1..n {
                    if w == v || !arc(v, w) {
                        continue;
                    }
                    let b = g.multiply(a, l.label(v, w));
                    for x in u + 1..n {
                        if x == v || x == w || !arc(w, x) || !arc(x, u) {
                            continue;
                        }
                        if g.product([b, l.label(w, x), l.label(x, u)]).is_identity() {
                            return Some(checked(l, CycleWitness { vertices: vec![u, v, w, x] }));
                        }
                    }
                }
            }
        }
    }
    None
}

/// Exact search: some balanced cycle if one exists, `None` otherwise.
///
/// Short cycles are scanned first; the rest is an anchored DP sweep where a
/// set of paths from `min(M)` to `e` closes into a balanced cycle iff it
/// contains `γ(e, min(M))⁻¹`.
pub fn find_balanced_cycle(l: &Labelling) -> Result<Option<CycleWitness>> {
    find_balanced_cycle_capped(l, DP_CAP)
}

pub fn find_balanced_cycle_capped(l: &Labelling, cap: usize) -> Result<Option<CycleWitness>> {
    let cap = cap.min(DP_CAP);
    if l.n() > cap {
        return Err(Error::TooLarge { what: "digraph", size: l.n(), cap });
    }
    if let Some(c) = short_balanced_cycle(l, 3) {
        return Ok(Some(c));
    }
    let sc = Scope::new(l, l.vertex_mask(), cap)?;
    let g = l.group();
    let mut hit = None;
    let _ = sc.sweep(Anchor::MinVertex, |m, e, s| {
        if m.count_ones() < 2 {
            return ControlFlow::Continue(());
        }
        let (start, end) = (m.trailing_zeros() as usize, e);
        let (a, b) = (sc.global(end), sc.global(start));
        if l.has_arc(a, b) {
            let need = g.inverse(l.label(a, b));
            if s.contains(need) {
                hit = Some((sc.global_mask(m), b, a, need));
                return ControlFlow::Break(());
            }
        }
        ControlFlow::Continue(())
    });
    let Some((set, start, end, need)) = hit else { return Ok(None) };
    let path = path_on_vertex_set(l, start, end, set, need)?.expect("DP entry promised a path");
    Ok(Some(checked(l, path.close()?)))
}

/// How a [`Verdict`] was reached.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    Exact,
    Heuristic,
}

/// Outcome of [`check`].
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Verdict {
    pub balanced_cycle: Option<CycleWitness>,
    pub mode: SearchMode,
}

impl Verdict {
    /// No cycle found and none can exist.
    pub fn is_exact_none(&self) -> bool {
        self.balanced_cycle.is_none() && self.mode == SearchMode::Exact
    }

    pub fn is_inconclusive(&self) -> bool {
        self.balanced_cycle.is_none() && self.mode == SearchMode::Heuristic
    }
}

/// Cycles of length ≤ 4 by scanning; never proves absence.
pub fn find_balanced_cycle_heuristic(l: &Labelling) -> Option<CycleWitness> {
    short_balanced_cycle(l, 4)
}

/// Heuristic scan first, then the exact DP when `n ≤ cap`. Mode is
/// `Heuristic` only when the digraph is above the cap.
pub fn check(l: &Labelling, cap: usize) -> Verdict {
    let cap = cap.min(DP_CAP);
    let exact = l.n() <= cap;
    let mode = if exact { SearchMode::Exact } else { SearchMode::Heuristic };
    if let Some(c) = find_balanced_cycle_heuristic(l) {
        return Verdict { balanced_cycle: Some(c), mode };
    }
    let balanced_cycle = if exact { find_balanced_cycle_capped(l, cap).expect("size checked") } else { None };
    Verdict { balanced_cycle, mode }
}

/// Depth-first search over simple cycles, each rooted at its smallest vertex.
fn dfs_cycles(l: &Labelling, mut found: impl FnMut(&[usize]) -> ControlFlow<()>) {
    let n = l.n();
    let g = l.group();
    let mut path = Vec::with_capacity(n);
    for s in 0..n {
        path.clear();
        path.push(s);
        let used = 1u64 << s;
        if dfs_from(l, g, s, used, GroupElement::IDENTITY, &mut path, &mut found).is_break() {
            return;
        }
    }
}

fn dfs_from(
    l: &Labelling,
    g: &crate::group::FiniteGroup,
    s: usize,
    used: u64,
    value: GroupElement,
    path: &mut Vec<usize>,
    found: &mut impl FnMut(&[usize]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let e = *path.last().unwrap();
    if path.len() >= 2 && l.has_arc(e, s) && g.multiply(value, l.label(e, s)).is_identity() {
        found(path)?;
    }
    // only vertices above s, so s stays the minimum
    let mut next = l.out_mask(e) & !used & !((2u64 << s) - 1);
    while next != 0 {
        let w = next.trailing_zeros() as usize;
        next &= next - 1;
        path.push(w);
        let r = dfs_from(l, g, s, used | 1 << w, g.multiply(value, l.label(e, w)), path, found);
        path.pop();
        r?;
    }
    ControlFlow::Continue(())
}

/// Every balanced cycle exactly once, rotated to start at its smallest
/// vertex. Exponential output; limited to [`ENUMERATION_CAP`] vertices.
pub fn enumerate_balanced_cycles(l: &Labelling) -> Result<Vec<CycleWitness>> {
    if l.n() > ENUMERATION_CAP {
        return Err(Error::TooLarge { what: "digraph", size: l.n(), cap: ENUMERATION_CAP });
    }
    let mut out = Vec::new();
    dfs_cycles(l, |p| {
        out.push(checked(l, CycleWitness { vertices: p.to_vec() }));
        ControlFlow::Continue(())
    });
    Ok(out)
}

/// Depth-first existence check with no size cap. Independent of the DP;
/// used to re-verify counterexamples.
pub fn dfs_balanced_cycle(l: &Labelling) -> Option<CycleWitness> {
    let mut hit = None;
    dfs_cycles(l, |p| {
        hit = Some(CycleWitness { vertices: p.to_vec() });
        ControlFlow::Break(())
    });
    hit.map(|c| checked(l, c))
}
