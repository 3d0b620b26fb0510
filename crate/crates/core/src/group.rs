//! Finite groups given by Cayley tables, plus the subset algebra built on them.
//!
//! Elements are dense indices `0..order` with the identity at index 0. Orders
//! are capped at 64 so that every subset fits in a [`GroupSubset`] word.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::subset::GroupSubset;

/// Largest supported group order.
pub const MAX_ORDER: usize = 64;

/// An element of a [`FiniteGroup`], identified by its index in the table.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement(u8);

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement(0);

    pub fn new(index: usize) -> Self {
        debug_assert!(index < MAX_ORDER);
        GroupElement(index as u8)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn is_identity(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Which side a group element acts from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

/// Construction recipe for a group.
///
/// The JSON form is tagged by `kind`:
/// `{"kind":"cyclic","q":5}`, `{"kind":"product","left":..,"right":..}`,
/// `{"kind":"metacyclic","m":7,"n":3,"r":2}` or `{"kind":"table","mul":[[..]]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GroupSpec {
    /// The integers modulo `q`.
    Cyclic { q: usize },
    /// Direct product; the pair `(a, b)` is encoded as `a * |right| + b`.
    Product { left: Box<GroupSpec>, right: Box<GroupSpec> },
    /// `Z_m ⋊ Z_n` with `(a,b)·(c,d) = (a + r^b c mod m, b + d mod n)`.
    /// The pair `(a, b)` is encoded as `a * n + b`.
    Metacyclic { m: usize, n: usize, r: usize },
    /// An explicit Cayley table whose identity is element 0.
    Table { mul: Vec<Vec<usize>> },
}

impl GroupSpec {
    pub fn cyclic(q: usize) -> Self {
        GroupSpec::Cyclic { q }
    }

    pub fn product(left: GroupSpec, right: GroupSpec) -> Self {
        GroupSpec::Product { left: Box::new(left), right: Box::new(right) }
    }

    pub fn metacyclic(m: usize, n: usize, r: usize) -> Self {
        GroupSpec::Metacyclic { m, n, r }
    }

    /// The non-abelian group of order 21.
    pub fn frobenius21() -> Self {
        GroupSpec::metacyclic(7, 3, 2)
    }

    /// A group isomorphic to the symmetric group on three letters.
    pub fn symmetric3() -> Self {
        GroupSpec::metacyclic(3, 2, 2)
    }

    pub fn build(&self) -> Result<FiniteGroup> {
        build_group(self)
    }
}

/// A validated finite group.
///
/// Besides the Cayley table this keeps byte-indexed lookup tables so that a
/// whole subset can be multiplied by one element with a handful of word ORs.
#[derive(Clone)]
pub struct FiniteGroup {
    order: usize,
    mul: Vec<u8>,
    inv: Vec<u8>,
    name: String,
    spec: GroupSpec,
    nbytes: usize,
    // (g * nbytes + byte) * 256 + value -> image of that byte's elements
    right_lut: Vec<u64>,
    left_lut: Vec<u64>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroup").field("name", &self.name).field("order", &self.order).finish()
    }
}

impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.mul == other.mul
    }
}

impl Eq for FiniteGroup {}

/// Builds and validates the group described by `spec`.
pub fn build_group(spec: &GroupSpec) -> Result<FiniteGroup> {
    let (order, mul, name) = raw_table(spec)?;
    FiniteGroup::from_raw(order, mul, name, spec.clone())
}

fn raw_table(spec: &GroupSpec) -> Result<(usize, Vec<usize>, String)> {
    match spec {
        GroupSpec::Cyclic { q } => {
            let q = *q;
            if q == 0 || q > MAX_ORDER {
                return Err(Error::BadSpec(format!("cyclic order {q} outside 1..={MAX_ORDER}")));
            }
            let mul = (0..q * q).map(|i| (i / q + i % q) % q).collect();
            Ok((q, mul, format!("Z{q}")))
        }
        GroupSpec::Product { left, right } => {
            let (lo, lm, ln) = raw_table(left)?;
            let (ro, rm, rn) = raw_table(right)?;
            let order = lo * ro;
            if order > MAX_ORDER {
                return Err(Error::BadSpec(format!("product order {order} exceeds {MAX_ORDER}")));
            }
            let mut mul = vec![0; order * order];
            for x in 0..order {
                for y in 0..order {
                    let (xa, xb) = (x / ro, x % ro);
                    let (ya, yb) = (y / ro, y % ro);
                    mul[x * order + y] = lm[xa * lo + ya] * ro + rm[xb * ro + yb];
                }
            }
            Ok((order, mul, format!("{ln}x{rn}")))
        }
        GroupSpec::Metacyclic { m, n, r } => {
            let (m, n, r) = (*m, *n, *r);
            if m == 0 || n == 0 {
                return Err(Error::BadSpec("metacyclic parameters must be positive".into()));
            }
            let order = m * n;
            if order > MAX_ORDER {
                return Err(Error::BadSpec(format!("metacyclic order {order} exceeds {MAX_ORDER}")));
            }
            // powers[b] = r^b mod m
            let mut powers = vec![1 % m; n + 1];
            for b in 1..=n {
                powers[b] = powers[b - 1] * (r % m) % m;
            }
            if powers[n] != 1 % m {
                return Err(Error::BadSpec(format!("{r}^{n} is not 1 modulo {m}")));
            }
            let mut mul = vec![0; order * order];
            for x in 0..order {
                for y in 0..order {
                    let (a, b) = (x / n, x % n);
                    let (c, d) = (y / n, y % n);
                    let first = (a + powers[b] * c) % m;
                    let second = (b + d) % n;
                    mul[x * order + y] = first * n + second;
                }
            }
            Ok((order, mul, format!("M({m},{n},{r})")))
        }
        GroupSpec::Table { mul } => {
            let order = mul.len();
            if order == 0 || order > MAX_ORDER {
                return Err(Error::NotAGroup(format!("table order {order} outside 1..={MAX_ORDER}")));
            }
            if mul.iter().any(|row| row.len() != order) {
                return Err(Error::NotAGroup("table is not square".into()));
            }
            let flat = mul.iter().flatten().copied().collect();
            Ok((order, flat, format!("T{order}")))
        }
    }
}

impl FiniteGroup {
    fn from_raw(order: usize, mul: Vec<usize>, name: String, spec: GroupSpec) -> Result<Self> {
        if mul.iter().any(|&x| x >= order) {
            return Err(Error::NotAGroup("table entry out of range".into()));
        }
        // Latin square
        for i in 0..order {
            let mut row = 0u64;
            let mut col = 0u64;
            for j in 0..order {
                row |= 1 << mul[i * order + j];
                col |= 1 << mul[j * order + i];
            }
            let full = GroupSubset::full(order).bits();
            if row != full || col != full {
                return Err(Error::NotAGroup(format!("row or column {i} is not a permutation")));
            }
        }
        for g in 0..order {
            if mul[g] != g || mul[g * order] != g {
                return Err(Error::NotAGroup("element 0 is not the identity".into()));
            }
        }
        for a in 0..order {
            for b in 0..order {
                let ab = mul[a * order + b];
                for c in 0..order {
                    let bc = mul[b * order + c];
                    if mul[ab * order + c] != mul[a * order + bc] {
                        return Err(Error::NotAGroup(format!("associativity fails at ({a}, {b}, {c})")));
                    }
                }
            }
        }
        // Latin rows guarantee exactly one right inverse per element; in a
        // group it is also the left inverse.
        let mut inv = vec![0u8; order];
        for g in 0..order {
            let h = (0..order).find(|&h| mul[g * order + h] == 0).expect("latin row");
            inv[g] = h as u8;
        }
        let mul: Vec<u8> = mul.into_iter().map(|x| x as u8).collect();
        let nbytes = order.div_ceil(8);
        let right_lut = build_lut(order, nbytes, |x, g| mul[x * order + g] as usize);
        let left_lut = build_lut(order, nbytes, |x, g| mul[g * order + x] as usize);
        Ok(FiniteGroup { order, mul, inv, name, spec, nbytes, right_lut, left_lut })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement::IDENTITY
    }

    /// Element with the given index, or an error if out of range.
    pub fn element(&self, index: usize) -> Result<GroupElement> {
        if index < self.order {
            Ok(GroupElement::new(index))
        } else {
            Err(Error::InvalidElement { index, order: self.order })
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order).map(GroupElement::new)
    }

    pub fn full_set(&self) -> GroupSubset {
        GroupSubset::full(self.order)
    }

    #[inline]
    pub fn multiply(&self, g: GroupElement, h: GroupElement) -> GroupElement {
        GroupElement(self.mul[g.index() * self.order + h.index()])
    }

    #[inline]
    pub fn inverse(&self, g: GroupElement) -> GroupElement {
        GroupElement(self.inv[g.index()])
    }

    /// Product of a sequence of elements, left to right.
    pub fn product<I: IntoIterator<Item = GroupElement>>(&self, items: I) -> GroupElement {
        items.into_iter().fold(GroupElement::IDENTITY, |acc, g| self.multiply(acc, g))
    }

    /// `h·g·h⁻¹`
    pub fn conjugate(&self, g: GroupElement, h: GroupElement) -> GroupElement {
        self.multiply(self.multiply(h, g), self.inverse(h))
    }

    pub fn is_abelian(&self) -> bool {
        self.elements().all(|g| self.elements().all(|h| self.multiply(g, h) == self.multiply(h, g)))
    }

    /// `S·g`
    #[inline]
    pub fn right_mul_set(&self, set: GroupSubset, g: GroupElement) -> GroupSubset {
        GroupSubset::from_bits(apply_lut(&self.right_lut, self.nbytes, set.bits(), g.index()))
    }

    /// `g·S`
    #[inline]
    pub fn left_mul_set(&self, g: GroupElement, set: GroupSubset) -> GroupSubset {
        GroupSubset::from_bits(apply_lut(&self.left_lut, self.nbytes, set.bits(), g.index()))
    }

    /// Elementwise product `A·B`.
    pub fn set_product(&self, a: GroupSubset, b: GroupSubset) -> GroupSubset {
        b.iter().fold(GroupSubset::EMPTY, |acc, g| acc.union(self.right_mul_set(a, g)))
    }

    /// `{g : g·S = S}` or `{g : S·g = S}`. The empty set is stabilized by
    /// every element.
    pub fn stabilizer(&self, set: GroupSubset, side: Side) -> GroupSubset {
        self.elements()
            .filter(|&g| match side {
                Side::Left => self.left_mul_set(g, set) == set,
                Side::Right => self.right_mul_set(set, g) == set,
            })
            .collect()
    }

    /// `{1, x}·S = S ∪ x·S`.
    pub fn grow_set(&self, set: GroupSubset, x: GroupElement) -> GroupSubset {
        set.union(self.left_mul_set(x, set))
    }

    /// Smallest subgroup containing `gens`.
    pub fn subgroup_closure(&self, gens: &[GroupElement]) -> GroupSubset {
        let mut closure = GroupSubset::singleton(GroupElement::IDENTITY);
        loop {
            let next = gens.iter().fold(closure, |acc, &g| acc.union(self.right_mul_set(closure, g)));
            if next == closure {
                return closure;
            }
            closure = next;
        }
    }

    /// Non-empty and closed under multiplication (sufficient in a finite group).
    pub fn is_subgroup(&self, set: GroupSubset) -> bool {
        set.contains(GroupElement::IDENTITY) && set.iter().all(|g| self.right_mul_set(set, g).is_subset(set))
    }

    /// Left cosets `gH` or right cosets `Hg`, ordered by smallest member.
    pub fn cosets(&self, subgroup: GroupSubset, side: Side) -> Result<Vec<GroupSubset>> {
        if !subgroup.is_subset(self.full_set()) || !self.is_subgroup(subgroup) {
            return Err(Error::NotASubgroup);
        }
        let mut covered = GroupSubset::EMPTY;
        let mut out = Vec::with_capacity(self.order / subgroup.len());
        for g in self.elements() {
            if covered.contains(g) {
                continue;
            }
            let coset = match side {
                Side::Left => self.left_mul_set(g, subgroup),
                Side::Right => self.right_mul_set(subgroup, g),
            };
            covered = covered.union(coset);
            out.push(coset);
        }
        Ok(out)
    }

    /// Order of an element.
    pub fn element_order(&self, g: GroupElement) -> usize {
        let mut x = g;
        let mut k = 1;
        while !x.is_identity() {
            x = self.multiply(x, g);
            k += 1;
        }
        k
    }
}

fn build_lut(order: usize, nbytes: usize, act: impl Fn(usize, usize) -> usize) -> Vec<u64> {
    let mut lut = vec![0u64; order * nbytes * 256];
    for g in 0..order {
        for byte in 0..nbytes {
            let base = (g * nbytes + byte) * 256;
            let mut single = [0u64; 8];
            for (bit, image) in single.iter_mut().enumerate() {
                let x = byte * 8 + bit;
                if x < order {
                    *image = 1 << act(x, g);
                }
            }
            for v in 1..256usize {
                let rest = v & (v - 1);
                lut[base + v] = lut[base + rest] | single[v.trailing_zeros() as usize];
            }
        }
    }
    lut
}

#[inline]
fn apply_lut(lut: &[u64], nbytes: usize, bits: u64, g: usize) -> u64 {
    let base = g * nbytes;
    let mut out = 0;
    let mut rest = bits;
    let mut byte = 0;
    while rest != 0 && byte < nbytes {
        out |= lut[(base + byte) * 256 + (rest & 0xff) as usize];
        rest >>= 8;
        byte += 1;
    }
    out
}

/// The group catalog used by tests and campaigns.
pub fn catalog() -> Vec<GroupSpec> {
    let mut specs: Vec<GroupSpec> = (1..=21).map(GroupSpec::cyclic).collect();
    specs.push(GroupSpec::product(GroupSpec::cyclic(3), GroupSpec::cyclic(3)));
    specs.push(GroupSpec::product(GroupSpec::cyclic(3), GroupSpec::cyclic(9)));
    specs.push(GroupSpec::frobenius21());
    specs.push(GroupSpec::symmetric3());
    specs
}
