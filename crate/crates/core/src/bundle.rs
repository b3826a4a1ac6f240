use std::collections::BTreeSet;
use std::fmt;

/// A set of goods, stored as 0-based positions in the instance's good list.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bundle(BTreeSet<usize>);

impl Bundle {
    pub fn new() -> Self {
        Bundle(BTreeSet::new())
    }

    pub fn singleton(good: usize) -> Self {
        Bundle(BTreeSet::from([good]))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, good: usize) -> bool {
        self.0.contains(&good)
    }

    pub fn insert(&mut self, good: usize) -> bool {
        self.0.insert(good)
    }

    pub fn remove(&mut self, good: usize) -> bool {
        self.0.remove(&good)
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn first(&self) -> Option<usize> {
        self.0.first().copied()
    }

    pub fn with(&self, good: usize) -> Bundle {
        let mut b = self.clone();
        b.0.insert(good);
        b
    }

    pub fn without(&self, good: usize) -> Bundle {
        let mut b = self.clone();
        b.0.remove(&good);
        b
    }

    pub fn union(&self, other: &Bundle) -> Bundle {
        Bundle(self.0.union(&other.0).copied().collect())
    }

    pub fn minus(&self, other: &Bundle) -> Bundle {
        Bundle(self.0.difference(&other.0).copied().collect())
    }

    pub fn intersection(&self, other: &Bundle) -> Bundle {
        Bundle(self.0.intersection(&other.0).copied().collect())
    }

    pub fn is_subset(&self, other: &Bundle) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn is_disjoint(&self, other: &Bundle) -> bool {
        self.0.is_disjoint(&other.0)
    }

    /// Bit `j` set for every good at position `j`; only meaningful for `m <= 64`.
    pub fn mask(&self) -> u64 {
        self.0.iter().fold(0u64, |m, &g| m | (1u64 << g))
    }

    pub fn from_mask(mask: u64) -> Bundle {
        Bundle((0..64).filter(|g| mask >> g & 1 == 1).collect())
    }
}

impl FromIterator<usize> for Bundle {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        Bundle(iter.into_iter().collect())
    }
}

impl<const N: usize> From<[usize; N]> for Bundle {
    fn from(goods: [usize; N]) -> Self {
        goods.into_iter().collect()
    }
}

impl fmt::Debug for Bundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}
