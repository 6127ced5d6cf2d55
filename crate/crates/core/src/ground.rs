use crate::cmp_value;
use crate::error::{invalid, Result};

/// The ground set `{0, .., n-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GroundSet {
    n: usize,
}

impl GroundSet {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return invalid("ground set must contain at least one element");
        }
        Ok(GroundSet { n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn check(&self, j: usize) -> Result<()> {
        if j >= self.n {
            return invalid(format!("element {} out of range for ground set of size {}", j, self.n));
        }
        Ok(())
    }
}

const ABSENT: u32 = u32::MAX;

/// An ordered set of distinct element ids with O(1) membership.
///
/// Members keep their insertion order; removal preserves the relative order
/// of the remaining members (the log-det factor depends on it).
#[derive(Clone, Debug)]
pub struct Subset {
    members: Vec<usize>,
    pos: Vec<u32>,
}

impl Subset {
    pub fn empty(n: usize) -> Self {
        Subset {
            members: Vec::new(),
            pos: vec![ABSENT; n],
        }
    }

    pub fn full(n: usize) -> Self {
        let mut s = Subset::empty(n);
        for j in 0..n {
            s.insert(j);
        }
        s
    }

    /// Builds a subset from ids, rejecting duplicates and out-of-range ids.
    pub fn from_ids(n: usize, ids: &[usize]) -> Result<Self> {
        let mut s = Subset::empty(n);
        for &j in ids {
            if j >= n {
                return invalid(format!("element {} out of range for ground set of size {}", j, n));
            }
            if s.contains(j) {
                return invalid(format!("duplicate element {}", j));
            }
            s.insert(j);
        }
        Ok(s)
    }

    pub fn universe(&self) -> usize {
        self.pos.len()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    #[inline]
    pub fn contains(&self, j: usize) -> bool {
        self.pos[j] != ABSENT
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    /// Position of `j` in insertion order.
    pub fn position(&self, j: usize) -> Option<usize> {
        match self.pos[j] {
            ABSENT => None,
            p => Some(p as usize),
        }
    }

    /// Returns false if `j` was already present.
    pub fn insert(&mut self, j: usize) -> bool {
        if self.contains(j) {
            return false;
        }
        self.pos[j] = self.members.len() as u32;
        self.members.push(j);
        true
    }

    /// Returns false if `j` was absent.
    pub fn remove(&mut self, j: usize) -> bool {
        let p = match self.position(j) {
            Some(p) => p,
            None => return false,
        };
        self.members.remove(p);
        self.pos[j] = ABSENT;
        for (q, &m) in self.members.iter().enumerate().skip(p) {
            self.pos[m] = q as u32;
        }
        true
    }

    pub fn clear(&mut self) {
        for &m in &self.members {
            self.pos[m] = ABSENT;
        }
        self.members.clear();
    }

    /// Members sorted ascending.
    pub fn sorted(&self) -> Vec<usize> {
        let mut v = self.members.clone();
        v.sort_unstable();
        v
    }

    /// Elements of the ground set not in this subset, ascending.
    pub fn complement(&self) -> Vec<usize> {
        (0..self.universe()).filter(|&j| !self.contains(j)).collect()
    }
}

impl PartialEq for Subset {
    fn eq(&self, other: &Self) -> bool {
        self.universe() == other.universe()
            && self.len() == other.len()
            && self.members.iter().all(|&j| other.contains(j))
    }
}

/// A bijective ordering of the ground set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation {
    order: Vec<usize>,
}

impl Permutation {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        let mut seen = vec![false; n];
        for &j in &order {
            if j >= n || seen[j] {
                return invalid(format!("not a permutation of 0..{}: offending id {}", n, j));
            }
            seen[j] = true;
        }
        Ok(Permutation { order })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            order: (0..n).collect(),
        }
    }

    /// Orders elements by descending `x`, ties by ascending id.
    pub fn descending(x: &[f64]) -> Self {
        let mut order: Vec<usize> = (0..x.len()).collect();
        order.sort_by(|&a, &b| cmp_value(x[b], x[a]).then(a.cmp(&b)));
        Permutation { order }
    }

    /// Orders elements by ascending `x`, ties by ascending id.
    pub fn ascending(x: &[f64]) -> Self {
        let mut order: Vec<usize> = (0..x.len()).collect();
        order.sort_by(|&a, &b| cmp_value(x[a], x[b]).then(a.cmp(&b)));
        Permutation { order }
    }

    /// Places the members of `first` (in `tie_order` order) ahead of everything else.
    pub fn with_prefix(first: &Subset, tie_order: &Permutation) -> Self {
        let (mut head, tail): (Vec<usize>, Vec<usize>) = tie_order.order.iter().partition(|&&j| first.contains(j));
        head.extend(tail);
        Permutation { order: head }
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}
