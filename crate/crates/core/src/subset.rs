use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::group::GroupElement;

/// A set of elements of a group of order at most 64, stored as one word.
///
/// Bit `i` is set when element `i` is a member. The subset does not carry its
/// group; operations that need the multiplication live on
/// [`FiniteGroup`](crate::FiniteGroup).
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupSubset(u64);

impl GroupSubset {
    pub const EMPTY: GroupSubset = GroupSubset(0);

    pub const fn from_bits(bits: u64) -> Self {
        GroupSubset(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    /// All elements `0..order`.
    pub fn full(order: usize) -> Self {
        debug_assert!(order <= 64);
        if order == 64 {
            GroupSubset(u64::MAX)
        } else {
            GroupSubset((1u64 << order) - 1)
        }
    }

    pub fn singleton(g: GroupElement) -> Self {
        GroupSubset(1u64 << g.index())
    }

    pub fn contains(self, g: GroupElement) -> bool {
        self.0 >> g.index() & 1 == 1
    }

    pub fn insert(&mut self, g: GroupElement) {
        self.0 |= 1u64 << g.index();
    }

    pub fn remove(&mut self, g: GroupElement) {
        self.0 &= !(1u64 << g.index());
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: Self) -> Self {
        GroupSubset(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        GroupSubset(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        GroupSubset(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    /// Smallest member, if any.
    pub fn first(self) -> Option<GroupElement> {
        (self.0 != 0).then(|| GroupElement::new(self.0.trailing_zeros() as usize))
    }

    pub fn iter(self) -> Elements {
        Elements(self.0)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().map(GroupElement::index).collect()
    }
}

impl FromIterator<GroupElement> for GroupSubset {
    fn from_iter<I: IntoIterator<Item = GroupElement>>(iter: I) -> Self {
        let mut s = GroupSubset::EMPTY;
        for g in iter {
            s.insert(g);
        }
        s
    }
}

impl IntoIterator for GroupSubset {
    type Item = GroupElement;
    type IntoIter = Elements;

    fn into_iter(self) -> Elements {
        self.iter()
    }
}

/// Ascending iterator over the members of a [`GroupSubset`].
#[derive(Clone, Debug)]
pub struct Elements(u64);

impl Iterator for Elements {
    type Item = GroupElement;

    fn next(&mut self) -> Option<GroupElement> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(GroupElement::new(i as usize))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Elements {}

impl fmt::Debug for GroupSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(GroupElement::index)).finish()
    }
}

// Serialized as a sorted array of element indices.
impl Serialize for GroupSubset {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter().map(GroupElement::index))
    }
}

impl<'de> Deserialize<'de> for GroupSubset {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let items = Vec::<usize>::deserialize(deserializer)?;
        let mut s = GroupSubset::EMPTY;
        for i in items {
            if i >= 64 {
                return Err(serde::de::Error::custom(format!("element {i} out of range")));
            }
            s.insert(GroupElement::new(i));
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(items: &[usize]) -> GroupSubset {
        items.iter().map(|&i| GroupElement::new(i)).collect()
    }

    #[test]
    fn basic_ops() {
        let a = set(&[0, 3, 6]);
        let b = set(&[1, 3]);
        assert_eq!(a.len(), 3);
        assert_eq!(a.union(b), set(&[0, 1, 3, 6]));
        assert_eq!(a.intersection(b), set(&[3]));
        assert_eq!(a.difference(b), set(&[0, 6]));
        assert!(set(&[3]).is_subset(a));
        assert!(!b.is_subset(a));
        assert_eq!(a.to_vec(), vec![0, 3, 6]);
        assert_eq!(a.first().map(GroupElement::index), Some(0));
        assert_eq!(GroupSubset::EMPTY.first(), None);
    }

    #[test]
    fn full_word() {
        assert_eq!(GroupSubset::full(64).len(), 64);
        assert_eq!(GroupSubset::full(21).len(), 21);
        assert_eq!(GroupSubset::full(0), GroupSubset::EMPTY);
    }

    #[test]
    fn json_is_sorted_array() {
        let s = set(&[6, 0, 3]);
        assert_eq!(serde_json::to_string(&s).unwrap(), "[0,3,6]");
        let back: GroupSubset = serde_json::from_str("[3,0,6]").unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<GroupSubset>("[64]").is_err());
    }
}
