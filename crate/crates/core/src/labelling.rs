//! Group-labelled digraphs on vertices `0..n` and the shifting / inversion
//! calculus on their labellings.

use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{FiniteGroup, GroupElement, GroupSpec};

/// Largest vertex count a [`Labelling`] accepts.
pub const MAX_VERTICES: usize = 64;

/// An arc-labelled digraph over a finite group.
///
/// Arcs are all ordered pairs of distinct vertices, minus those removed from
/// the presence mask. Diagonal entries carry no meaning and are kept at the
/// identity.
#[derive(Clone, Debug)]
pub struct Labelling {
    group: Arc<FiniteGroup>,
    n: usize,
    labels: Vec<GroupElement>,
    // bit w of out_arcs[v] is set iff (v, w) is an arc
    out_arcs: Vec<u64>,
}

impl PartialEq for Labelling {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.out_arcs == other.out_arcs
            && *self.group == *other.group
            && self.arcs().all(|(u, v)| self.label(u, v) == other.label(u, v))
    }
}

impl Eq for Labelling {}

/// A simple directed path, listed vertex by vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PathWitness {
    pub vertices: Vec<usize>,
}

/// A directed cycle `v_0 → v_1 → … → v_{k-1} → v_0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CycleWitness {
    pub vertices: Vec<usize>,
}

impl PathWitness {
    pub fn new(vertices: Vec<usize>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::BadWitness("path needs at least one vertex".into()));
        }
        if !all_distinct(&vertices) {
            return Err(Error::BadWitness("path repeats a vertex".into()));
        }
        Ok(PathWitness { vertices })
    }

    pub fn start(&self) -> usize {
        self.vertices[0]
    }

    pub fn end(&self) -> usize {
        *self.vertices.last().unwrap()
    }

    /// Closes the path with the arc from its end back to its start.
    pub fn close(self) -> Result<CycleWitness> {
        CycleWitness::new(self.vertices)
    }
}

impl CycleWitness {
    pub fn new(vertices: Vec<usize>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::BadWitness("cycle needs at least two vertices".into()));
        }
        if !all_distinct(&vertices) {
            return Err(Error::BadWitness("cycle repeats a vertex".into()));
        }
        Ok(CycleWitness { vertices })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Arcs of the cycle in order, starting from `vertices[0]`.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let k = self.vertices.len();
        (0..k).map(move |i| (self.vertices[i], self.vertices[(i + 1) % k]))
    }

    /// Same cycle rotated so that its smallest vertex comes first.
    pub fn canonical(&self) -> CycleWitness {
        let pos = (0..self.vertices.len()).min_by_key(|&i| self.vertices[i]).unwrap();
        let mut vertices = self.vertices.clone();
        vertices.rotate_left(pos);
        CycleWitness { vertices }
    }

    /// Same cycle traversed backwards, keeping the first vertex.
    pub fn reversed(&self) -> CycleWitness {
        let mut vertices = vec![self.vertices[0]];
        vertices.extend(self.vertices[1..].iter().rev());
        CycleWitness { vertices }
    }
}

fn all_distinct(vertices: &[usize]) -> bool {
    let mut seen = std::collections::HashSet::with_capacity(vertices.len());
    vertices.iter().all(|v| seen.insert(*v))
}

/// Per-vertex shift elements `g_v`, describing the labelling
/// `γ'(u, v) = g_u · γ(u, v) · g_v⁻¹`.
///
/// Shifting one vertex at a time in any order by `g_v` at `v` produces the
/// same labelling.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ShiftWitness(pub Vec<GroupElement>);

impl ShiftWitness {
    pub fn identity(n: usize) -> Self {
        ShiftWitness(vec![GroupElement::IDENTITY; n])
    }

    /// Shifts `self` first and then `then`.
    pub fn compose(&self, group: &FiniteGroup, then: &ShiftWitness) -> ShiftWitness {
        ShiftWitness(self.0.iter().zip(&then.0).map(|(&g, &h)| group.multiply(h, g)).collect())
    }
}

/// Serialized form of a [`Labelling`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LabellingJson {
    pub group: GroupSpec,
    pub n: usize,
    pub labels: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mask: Option<Vec<Vec<bool>>>,
}

impl Labelling {
    /// Complete digraph with every arc labelled by `label(u, v)`.
    pub fn from_fn(
        group: Arc<FiniteGroup>,
        n: usize,
        mut label: impl FnMut(usize, usize) -> GroupElement,
    ) -> Result<Self> {
        check_vertex_count(n)?;
        let mut labels = vec![GroupElement::IDENTITY; n * n];
        for u in 0..n {
            for v in 0..n {
                if u != v {
                    let g = label(u, v);
                    group.element(g.index())?;
                    labels[u * n + v] = g;
                }
            }
        }
        let out_arcs = (0..n).map(|u| full_mask(n) & !(1u64 << u)).collect();
        Ok(Labelling { group, n, labels, out_arcs })
    }

    /// Complete digraph with every arc labelled `g`.
    pub fn constant(group: Arc<FiniteGroup>, n: usize, g: GroupElement) -> Result<Self> {
        Self::from_fn(group, n, |_, _| g)
    }

    /// Builds from a label matrix and an optional presence mask.
    pub fn from_matrix(
        group: Arc<FiniteGroup>,
        labels: &[Vec<usize>],
        mask: Option<&[Vec<bool>]>,
    ) -> Result<Self> {
        let n = labels.len();
        check_vertex_count(n)?;
        if labels.iter().any(|row| row.len() != n) {
            return Err(Error::BadSize("label matrix is not square".into()));
        }
        if let Some(mask) = mask {
            if mask.len() != n || mask.iter().any(|row| row.len() != n) {
                return Err(Error::BadSize("mask dimensions differ from labels".into()));
            }
        }
        let mut out = Labelling::constant(group, n, GroupElement::IDENTITY)?;
        for u in 0..n {
            for v in 0..n {
                if u == v {
                    continue;
                }
                let present = mask.is_none_or(|m| m[u][v]);
                if present {
                    let g = out.group.element(labels[u][v])?;
                    out.labels[u * n + v] = g;
                } else {
                    out.out_arcs[u] &= !(1u64 << v);
                }
            }
        }
        Ok(out)
    }

    pub fn from_json(json: &LabellingJson) -> Result<Self> {
        let group = Arc::new(json.group.build()?);
        if json.labels.len() != json.n {
            return Err(Error::BadSize(format!(
                "n = {} but label matrix has {} rows",
                json.n,
                json.labels.len()
            )));
        }
        Labelling::from_matrix(group, &json.labels, json.mask.as_deref())
    }

    pub fn to_json(&self) -> LabellingJson {
        let labels =
            (0..self.n).map(|u| (0..self.n).map(|v| self.labels[u * self.n + v].index()).collect()).collect();
        let mask = (!self.is_complete())
            .then(|| (0..self.n).map(|u| (0..self.n).map(|v| self.has_arc(u, v)).collect()).collect());
        LabellingJson { group: self.group.spec().clone(), n: self.n, labels, mask }
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn group_arc(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Mask with one bit per vertex.
    pub fn vertex_mask(&self) -> u64 {
        full_mask(self.n)
    }

    #[inline]
    pub fn label(&self, u: usize, v: usize) -> GroupElement {
        self.labels[u * self.n + v]
    }

    #[inline]
    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        self.out_arcs[u] >> v & 1 == 1
    }

    /// Out-neighbours of `u` as a vertex mask.
    #[inline]
    pub fn out_mask(&self, u: usize) -> u64 {
        self.out_arcs[u]
    }

    /// In-neighbours of `v` as a vertex mask.
    pub fn in_mask(&self, v: usize) -> u64 {
        (0..self.n).filter(|&u| self.has_arc(u, v)).fold(0, |m, u| m | 1 << u)
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| (0..self.n).filter(move |&v| self.has_arc(u, v)).map(move |v| (u, v)))
    }

    pub fn is_complete(&self) -> bool {
        (0..self.n).all(|u| self.out_arcs[u] == full_mask(self.n) & !(1u64 << u))
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::InvalidVertex { vertex: v, n: self.n })
        }
    }

    /// Copy with the label of arc `(u, v)` replaced.
    pub fn with_label(&self, u: usize, v: usize, g: GroupElement) -> Result<Self> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        self.group.element(g.index())?;
        if u == v {
            return Err(Error::BadIndex("diagonal entries carry no label".into()));
        }
        let mut out = self.clone();
        out.labels[u * self.n + v] = g;
        Ok(out)
    }

    /// Copy with arc `(u, v)` removed.
    pub fn without_arc(&self, u: usize, v: usize) -> Result<Self> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        let mut out = self.clone();
        out.out_arcs[u] &= !(1u64 << v);
        Ok(out)
    }

    /// Induced sub-labelling on `vertices`; new vertex `i` is `vertices[i]`.
    pub fn induced(&self, vertices: &[usize]) -> Result<Self> {
        for &v in vertices {
            self.check_vertex(v)?;
        }
        let k = vertices.len();
        check_vertex_count(k)?;
        let mut labels = vec![GroupElement::IDENTITY; k * k];
        let mut out_arcs = vec![0u64; k];
        for (i, &a) in vertices.iter().enumerate() {
            for (j, &b) in vertices.iter().enumerate() {
                if i != j && self.has_arc(a, b) {
                    labels[i * k + j] = self.label(a, b);
                    out_arcs[i] |= 1 << j;
                }
            }
        }
        Ok(Labelling { group: Arc::clone(&self.group), n: k, labels, out_arcs })
    }

    /// Product of the labels along `path`; the identity for a single vertex.
    pub fn path_value(&self, path: &PathWitness) -> Result<GroupElement> {
        for &v in &path.vertices {
            self.check_vertex(v)?;
        }
        let mut acc = GroupElement::IDENTITY;
        for w in path.vertices.windows(2) {
            if !self.has_arc(w[0], w[1]) {
                return Err(Error::MissingArc { from: w[0], to: w[1] });
            }
            acc = self.group.multiply(acc, self.label(w[0], w[1]));
        }
        Ok(acc)
    }

    /// Product of the labels around `cycle`, starting at `vertices[start]`.
    pub fn cycle_value(&self, cycle: &CycleWitness, start: usize) -> Result<GroupElement> {
        let k = cycle.vertices.len();
        if start >= k {
            return Err(Error::BadIndex(format!("start {start} outside cycle of length {k}")));
        }
        for &v in &cycle.vertices {
            self.check_vertex(v)?;
        }
        let mut acc = GroupElement::IDENTITY;
        for i in 0..k {
            let a = cycle.vertices[(start + i) % k];
            let b = cycle.vertices[(start + i + 1) % k];
            if !self.has_arc(a, b) {
                return Err(Error::MissingArc { from: a, to: b });
            }
            acc = self.group.multiply(acc, self.label(a, b));
        }
        Ok(acc)
    }

    pub fn is_balanced(&self, cycle: &CycleWitness) -> Result<bool> {
        Ok(self.cycle_value(cycle, 0)?.is_identity())
    }

    /// Shift by `g` at `v`: in-arcs `(u, v)` become `γ(u, v)·g⁻¹` and out-arcs
    /// `(v, w)` become `g·γ(v, w)`.
    pub fn shift(&self, v: usize, g: GroupElement) -> Result<Self> {
        self.check_vertex(v)?;
        self.group.element(g.index())?;
        let ginv = self.group.inverse(g);
        let mut out = self.clone();
        for u in 0..self.n {
            if u == v {
                continue;
            }
            let i = u * self.n + v;
            out.labels[i] = self.group.multiply(self.labels[i], ginv);
            let o = v * self.n + u;
            out.labels[o] = self.group.multiply(g, self.labels[o]);
        }
        Ok(out)
    }

    /// Applies all per-vertex shifts at once.
    pub fn apply_shifts(&self, shifts: &ShiftWitness) -> Result<Self> {
        if shifts.0.len() != self.n {
            return Err(Error::Mismatch(format!(
                "{} shift elements for {} vertices",
                shifts.0.len(),
                self.n
            )));
        }
        for g in &shifts.0 {
            self.group.element(g.index())?;
        }
        let group = &self.group;
        let mut out = self.clone();
        for u in 0..self.n {
            for v in 0..self.n {
                if u != v {
                    let i = u * self.n + v;
                    let left = group.multiply(shifts.0[u], self.labels[i]);
                    out.labels[i] = group.multiply(left, group.inverse(shifts.0[v]));
                }
            }
        }
        Ok(out)
    }

    /// `inv(γ)(u, v) = γ(v, u)⁻¹`.
    pub fn invert(&self) -> Result<Self> {
        for u in 0..self.n {
            for v in 0..self.n {
                if self.has_arc(u, v) != self.has_arc(v, u) {
                    return Err(Error::AsymmetricMask);
                }
            }
        }
        let mut out = self.clone();
        for u in 0..self.n {
            for v in 0..self.n {
                if u != v {
                    out.labels[u * self.n + v] = self.group.inverse(self.label(v, u));
                }
            }
        }
        Ok(out)
    }

    /// Shifts that make every arc out of `v0` carry the identity: `γ(v0, w)`
    /// at each `w ≠ v0`.
    pub fn normalizing_shifts(&self, v0: usize) -> Result<ShiftWitness> {
        self.check_vertex(v0)?;
        if !self.is_complete() {
            return Err(Error::IncompleteDigraph);
        }
        Ok(ShiftWitness(
            (0..self.n).map(|w| if w == v0 { GroupElement::IDENTITY } else { self.label(v0, w) }).collect(),
        ))
    }

    /// Shifting-equivalent labelling whose arcs out of `v0` are all the
    /// identity; inside the remaining vertices
    /// `γ'(u, w) = γ(v0, u)·γ(u, w)·γ(v0, w)⁻¹`.
    pub fn normalize(&self, v0: usize) -> Result<Self> {
        let shifts = self.normalizing_shifts(v0)?;
        self.apply_shifts(&shifts)
    }

    /// Decides whether `other` arises from `self` by shifting. On success the
    /// witness `g` satisfies `other(u, v) = g_u·self(u, v)·g_v⁻¹`.
    ///
    /// Both labellings are normalized at vertex 0; the only freedom left after
    /// that is a global conjugation, which is swept over the group.
    pub fn shifting_equivalent(&self, other: &Labelling) -> Result<Option<ShiftWitness>> {
        if *self.group != *other.group {
            return Err(Error::Mismatch("labellings use different groups".into()));
        }
        if self.n != other.n {
            return Err(Error::Mismatch(format!("{} vs {} vertices", self.n, other.n)));
        }
        if !self.is_complete() || !other.is_complete() {
            return Err(Error::IncompleteDigraph);
        }
        let group = &self.group;
        let c = self.normalizing_shifts(0)?;
        let d = other.normalizing_shifts(0)?;
        let n1 = self.apply_shifts(&c)?;
        let n2 = other.apply_shifts(&d)?;
        for h in group.elements() {
            let conj = n1.arcs().all(|(u, v)| n2.label(u, v) == group.conjugate(n1.label(u, v), h));
            if conj {
                let witness =
                    (0..self.n).map(|v| group.product([group.inverse(d.0[v]), h, c.0[v]])).collect();
                return Ok(Some(ShiftWitness(witness)));
            }
        }
        Ok(None)
    }

    /// Graphviz rendering. Arcs of `highlight` get `color=red, penwidth=2`.
    pub fn to_dot(&self, highlight: Option<&CycleWitness>) -> String {
        let marked: std::collections::HashSet<(usize, usize)> =
            highlight.map(|c| c.arcs().collect()).unwrap_or_default();
        let mut out = String::new();
        writeln!(out, "digraph labelling {{").unwrap();
        writeln!(out, "  label=\"{}\";", self.group.name()).unwrap();
        for v in 0..self.n {
            writeln!(out, "  {v};").unwrap();
        }
        for (u, v) in self.arcs() {
            let g = self.label(u, v);
            if marked.contains(&(u, v)) {
                writeln!(out, "  {u} -> {v} [label=\"{g}\", color=red, penwidth=2];").unwrap();
            } else {
                writeln!(out, "  {u} -> {v} [label=\"{g}\"];").unwrap();
            }
        }
        writeln!(out, "}}").unwrap();
        out
    }
}

fn check_vertex_count(n: usize) -> Result<()> {
    if n == 0 || n > MAX_VERTICES {
        Err(Error::BadSize(format!("vertex count {n} outside 1..={MAX_VERTICES}")))
    } else {
        Ok(())
    }
}

pub(crate) fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupSpec;

    fn z(q: usize) -> Arc<FiniteGroup> {
        Arc::new(GroupSpec::cyclic(q).build().unwrap())
    }

    fn e(i: usize) -> GroupElement {
        GroupElement::new(i)
    }

    fn extremal(q: usize, n: usize) -> Labelling {
        Labelling::from_fn(z(q), n, |u, v| e(usize::from(u < v))).unwrap()
    }

    #[test]
    fn path_values() {
        let l = extremal(3, 3);
        assert_eq!(l.path_value(&PathWitness::new(vec![1]).unwrap()).unwrap(), e(0));
        assert_eq!(l.path_value(&PathWitness::new(vec![0, 1, 2]).unwrap()).unwrap(), e(2));

        let l = Labelling::constant(z(5), 3, e(0)).unwrap();
        let l = l.with_label(0, 1, e(2)).unwrap().with_label(1, 2, e(4)).unwrap();
        assert_eq!(l.path_value(&PathWitness::new(vec![0, 1, 2]).unwrap()).unwrap(), e(1));
    }

    #[test]
    fn missing_arc_is_reported() {
        let l = extremal(3, 3).without_arc(0, 1).unwrap();
        let p = PathWitness::new(vec![0, 1]).unwrap();
        assert_eq!(l.path_value(&p), Err(Error::MissingArc { from: 0, to: 1 }));
        assert!(!l.is_complete());
        assert_eq!(l.invert(), Err(Error::AsymmetricMask));
        assert_eq!(l.normalize(0), Err(Error::IncompleteDigraph));
    }

    #[test]
    fn cycle_values() {
        let l = extremal(3, 4);
        let c = CycleWitness::new(vec![0, 1, 2, 3]).unwrap();
        for s in 0..4 {
            assert_eq!(l.cycle_value(&c, s).unwrap(), e(0));
        }
        assert!(l.cycle_value(&c, 4).is_err());

        let g = Arc::new(GroupSpec::symmetric3().build().unwrap());
        let l = Labelling::constant(Arc::clone(&g), 2, e(0)).unwrap();
        let l = l.with_label(0, 1, e(1)).unwrap().with_label(1, 0, e(3)).unwrap();
        let c = CycleWitness::new(vec![0, 1]).unwrap();
        let from_u = l.cycle_value(&c, 0).unwrap();
        let from_v = l.cycle_value(&c, 1).unwrap();
        assert_eq!(from_u, g.multiply(e(1), e(3)));
        assert_eq!(from_v, g.multiply(e(3), e(1)));
        assert_eq!(from_u.is_identity(), from_v.is_identity());
    }

    #[test]
    fn witness_validation() {
        assert!(CycleWitness::new(vec![0]).is_err());
        assert!(CycleWitness::new(vec![0, 1, 0]).is_err());
        assert!(PathWitness::new(vec![]).is_err());
        let c = CycleWitness::new(vec![3, 1, 2]).unwrap();
        assert_eq!(c.canonical().vertices, vec![1, 2, 3]);
        assert_eq!(c.reversed().vertices, vec![3, 2, 1]);
    }

    #[test]
    fn shift_rules() {
        let l = Labelling::constant(z(5), 3, e(1)).unwrap();
        let s = l.shift(1, e(2)).unwrap();
        assert_eq!(s.label(0, 1), e(4));
        assert_eq!(s.label(1, 2), e(3));
        assert_eq!(s.label(0, 2), e(1));
        assert_eq!(l.shift(1, e(0)).unwrap(), l);
    }

    #[test]
    fn shifts_at_one_vertex_compose() {
        let g = Arc::new(GroupSpec::frobenius21().build().unwrap());
        let l = Labelling::from_fn(Arc::clone(&g), 4, |u, v| e((u * 7 + v * 3) % 21)).unwrap();
        let twice = l.shift(2, e(5)).unwrap().shift(2, e(11)).unwrap();
        let once = l.shift(2, g.multiply(e(11), e(5))).unwrap();
        assert_eq!(twice, once);
    }

    #[test]
    fn invert_rules() {
        let l = Labelling::constant(z(5), 2, e(0)).unwrap().with_label(0, 1, e(2)).unwrap();
        let inv = l.invert().unwrap();
        assert_eq!(inv.label(1, 0), e(3));
        assert_eq!(inv.invert().unwrap(), l);
    }

    #[test]
    fn normalize_extremal() {
        let l = extremal(3, 4);
        let norm = l.normalize(0).unwrap();
        for w in 1..4 {
            assert_eq!(norm.label(0, w), e(0));
        }
        for u in 1..4 {
            for w in 1..4 {
                if u != w {
                    assert_eq!(norm.label(u, w), l.label(u, w));
                }
            }
            // γ(0,u)·γ(u,0) = 1 + 0
            assert_eq!(norm.label(u, 0), e(1));
        }
        assert_eq!(norm.normalize(0).unwrap(), norm);
    }

    #[test]
    fn equivalence_basic() {
        let l = extremal(5, 4);
        let s = l.shift(2, e(3)).unwrap().shift(0, e(1)).unwrap();
        let w = l.shifting_equivalent(&s).unwrap().unwrap();
        assert_eq!(l.apply_shifts(&w).unwrap(), s);

        let id = Labelling::constant(z(3), 3, e(0)).unwrap();
        assert_eq!(id.shifting_equivalent(&id).unwrap(), Some(ShiftWitness::identity(3)));
        assert_eq!(extremal(3, 3).shifting_equivalent(&id).unwrap(), None);

        assert!(matches!(extremal(3, 3).shifting_equivalent(&extremal(3, 4)), Err(Error::Mismatch(_))));
        assert!(matches!(extremal(3, 3).shifting_equivalent(&extremal(5, 3)), Err(Error::Mismatch(_))));
    }

    #[test]
    fn equivalence_nonabelian_needs_conjugation() {
        let g = Arc::new(GroupSpec::frobenius21().build().unwrap());
        let l = Labelling::from_fn(Arc::clone(&g), 4, |u, v| e((u * 5 + v * 2 + 1) % 21)).unwrap();
        let h = e(4);
        let shifts = ShiftWitness(vec![h, e(7), e(13), e(20)]);
        let other = l.apply_shifts(&shifts).unwrap();
        let w = l.shifting_equivalent(&other).unwrap().unwrap();
        assert_eq!(l.apply_shifts(&w).unwrap(), other);
    }

    #[test]
    fn json_roundtrip_with_mask() {
        let l = extremal(3, 4).without_arc(3, 0).unwrap();
        let json = serde_json::to_string(&l.to_json()).unwrap();
        let back: LabellingJson = serde_json::from_str(&json).unwrap();
        assert_eq!(Labelling::from_json(&back).unwrap(), l);

        let complete = serde_json::to_value(extremal(3, 3).to_json()).unwrap();
        assert!(complete.get("mask").is_none());
        assert_eq!(complete["labels"], serde_json::json!([[0, 1, 1], [0, 0, 1], [0, 0, 0]]));
    }

    #[test]
    fn json_rejects_bad_entries() {
        let bad = LabellingJson {
            group: GroupSpec::cyclic(3),
            n: 2,
            labels: vec![vec![0, 3], vec![0, 0]],
            mask: None,
        };
        assert!(matches!(Labelling::from_json(&bad), Err(Error::InvalidElement { .. })));
        // masked-out entries are not checked
        let masked = LabellingJson { mask: Some(vec![vec![false, false], vec![true, false]]), ..bad };
        assert!(Labelling::from_json(&masked).is_ok());
    }

    #[test]
    fn induced_relabels() {
        let l = extremal(5, 5);
        let sub = l.induced(&[4, 1, 2]).unwrap();
        assert_eq!(sub.n(), 3);
        assert_eq!(sub.label(0, 1), l.label(4, 1));
        assert_eq!(sub.label(1, 2), l.label(1, 2));
    }

    #[test]
    fn dot_golden() {
        let l = extremal(2, 2);
        let c = CycleWitness::new(vec![0, 1]).unwrap();
        let dot = l.to_dot(Some(&c));
        let expected = "digraph labelling {\n  label=\"Z2\";\n  0;\n  1;\n  0 -> 1 [label=\"1\", color=red, penwidth=2];\n  1 -> 0 [label=\"0\", color=red, penwidth=2];\n}\n";
        assert_eq!(dot, expected);
        let plain = l.to_dot(None);
        assert!(plain.contains("  0 -> 1 [label=\"1\"];\n"));
    }
}
