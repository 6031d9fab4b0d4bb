//! Union-find over vertex indices with per-root size and oldest label.
//!
//! Indices are zero-based; vertex label `v` lives at index `v - 1`, so the
//! oldest vertex of a component is its smallest index.

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentForest {
    parent: Vec<u32>,
    size: Vec<u32>,
    oldest: Vec<u32>,
    component_count: usize,
}

impl ComponentForest {
    pub fn new() -> Self {
        Self {
            parent: Vec::new(),
            size: Vec::new(),
            oldest: Vec::new(),
            component_count: 0,
        }
    }

    pub fn with_singletons(n: usize) -> Self {
        let mut forest = Self::new();
        forest.reserve(n);
        for _ in 0..n {
            forest.push_singleton();
        }
        forest
    }

    pub fn reserve(&mut self, additional: usize) {
        self.parent.reserve(additional);
        self.size.reserve(additional);
        self.oldest.reserve(additional);
    }

    /// Number of vertices.
    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn component_count(&self) -> usize {
        self.component_count
    }

    /// Appends a new isolated vertex and returns its index.
    pub fn push_singleton(&mut self) -> u32 {
        let idx = u32::try_from(self.parent.len()).expect("vertex count exceeds u32");
        self.parent.push(idx);
        self.size.push(1);
        self.oldest.push(idx);
        self.component_count += 1;
        idx
    }

    /// Root of `v`'s component, halving the path on the way.
    pub fn find(&mut self, mut v: u32) -> u32 {
        while self.parent[v as usize] != v {
            let grandparent = self.parent[self.parent[v as usize] as usize];
            self.parent[v as usize] = grandparent;
            v = grandparent;
        }
        v
    }

    /// Root lookup without path compression.
    pub fn find_immutable(&self, mut v: u32) -> u32 {
        while self.parent[v as usize] != v {
            v = self.parent[v as usize];
        }
        v
    }

    pub fn is_root(&self, v: u32) -> bool {
        self.parent[v as usize] == v
    }

    /// Size of the component rooted at `root`.
    pub fn root_size(&self, root: u32) -> u32 {
        debug_assert!(self.is_root(root));
        self.size[root as usize]
    }

    /// Oldest (smallest) index in the component rooted at `root`.
    pub fn root_oldest(&self, root: u32) -> u32 {
        debug_assert!(self.is_root(root));
        self.oldest[root as usize]
    }

    pub fn component_size(&mut self, v: u32) -> u32 {
        let r = self.find(v);
        self.size[r as usize]
    }

    /// Merges the components of `a` and `b` (union by size) and returns the
    /// surviving root.
    pub fn union(&mut self, a: u32, b: u32) -> u32 {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return ra;
        }
        let (big, small) = if self.size[ra as usize] >= self.size[rb as usize] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[small as usize] = big;
        self.size[big as usize] += self.size[small as usize];
        self.oldest[big as usize] = self.oldest[big as usize].min(self.oldest[small as usize]);
        self.component_count -= 1;
        big
    }

    /// `(root, size, oldest)` for every component, in root-index order.
    pub fn components(&self) -> impl Iterator<Item = (u32, u32, u32)> + '_ {
        (0..self.parent.len() as u32)
            .filter(move |&v| self.is_root(v))
            .map(move |r| (r, self.size[r as usize], self.oldest[r as usize]))
    }

    /// `(sum |C|^2, sum |C|^3, sum |C|^4)` recomputed from scratch.
    pub fn power_sums(&self) -> Option<[u128; 3]> {
        let mut sums = [0u128; 3];
        for (_, size, _) in self.components() {
            let s = u128::from(size);
            let (s2, s3, s4) = (s * s, s * s * s, s * s * s * s);
            sums[0] = sums[0].checked_add(s2)?;
            sums[1] = sums[1].checked_add(s3)?;
            sums[2] = sums[2].checked_add(s4)?;
        }
        Some(sums)
    }
}

impl Default for ComponentForest {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn union_tracks_size_and_oldest() {
        let mut f = ComponentForest::with_singletons(6);
        assert_eq!(f.component_count(), 6);
        f.union(4, 5);
        f.union(2, 5);
        let r = f.find(4);
        assert_eq!(f.root_size(r), 3);
        assert_eq!(f.root_oldest(r), 2);
        assert_eq!(f.component_count(), 4);
        // idempotent
        assert_eq!(f.union(2, 4), r);
        assert_eq!(f.component_count(), 4);
        assert_eq!(f.power_sums().unwrap(), [9 + 3, 27 + 3, 81 + 3]);
    }

    proptest! {
        #[test]
        fn forest_invariants(n in 1usize..60, ops in prop::collection::vec((0u32..60, 0u32..60), 0..120)) {
            let mut f = ComponentForest::with_singletons(n);
            let mut naive: Vec<usize> = (0..n).collect();
            for (a, b) in ops {
                let (a, b) = (a % n as u32, b % n as u32);
                f.union(a, b);
                let (la, lb) = (naive[a as usize], naive[b as usize]);
                for label in naive.iter_mut() {
                    if *label == lb { *label = la; }
                }
            }
            let total: u64 = f.components().map(|(_, s, _)| u64::from(s)).sum();
            prop_assert_eq!(total, n as u64);
            prop_assert_eq!(f.components().count(), f.component_count());
            for v in 0..n as u32 {
                let r = f.find(v);
                prop_assert_eq!(f.find(r), r);
                prop_assert!(f.root_oldest(r) <= v);
                let members: Vec<usize> = (0..n).filter(|&u| naive[u] == naive[v as usize]).collect();
                prop_assert_eq!(f.root_size(r) as usize, members.len());
                prop_assert_eq!(f.root_oldest(r) as usize, members[0]);
            }
        }
    }
}
