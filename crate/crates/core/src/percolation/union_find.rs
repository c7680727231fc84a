use std::mem;

/// Disjoint sets with union by size and path halving.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(len: usize) -> UnionFind {
        UnionFind { parent: (0..len).collect(), size: vec![1; len] }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            let grandparent = self.parent[self.parent[x]];
            self.parent[x] = grandparent;
            x = grandparent;
        }
        x
    }

    /// Merges the sets of `x` and `y`; returns the new root, or `None` if
    /// they were already joined.
    pub fn union(&mut self, x: usize, y: usize) -> Option<usize> {
        let mut a = self.find(x);
        let mut b = self.find(y);
        if a == b {
            return None;
        }
        if self.size[a] < self.size[b] {
            mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        Some(a)
    }

    pub fn set_size(&mut self, x: usize) -> usize {
        let r = self.find(x);
        self.size[r]
    }

    /// All sets, each sorted, ordered by smallest member.
    pub fn sets(&mut self) -> Vec<Vec<usize>> {
        let mut by_root = vec![Vec::new(); self.parent.len()];
        for x in 0..self.parent.len() {
            let r = self.find(x);
            by_root[r].push(x);
        }
        let mut sets: Vec<Vec<usize>> = by_root.into_iter().filter(|s| !s.is_empty()).collect();
        sets.sort_unstable_by_key(|s| s[0]);
        sets
    }
}
