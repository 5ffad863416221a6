/// Disjoint sets with union by size and path halving.
#[derive(Debug, Clone)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Joins the sets of `a` and `b`, returning the surviving root.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> usize {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return ra;
        }
        if self.size[ra] < self.size[rb] || (self.size[ra] == self.size[rb] && rb < ra) {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        ra
    }

    pub(crate) fn size_of(&mut self, x: usize) -> usize {
        let r = self.find(x);
        self.size[r]
    }

    /// Dense component ids in order of first appearance over `0..n`.
    pub(crate) fn component_ids(&mut self) -> (Vec<u32>, usize) {
        let n = self.parent.len();
        let mut root_to_id = vec![u32::MAX; n];
        let mut next = 0u32;
        let mut ids = Vec::with_capacity(n);
        for i in 0..n {
            let r = self.find(i);
            if root_to_id[r] == u32::MAX {
                root_to_id[r] = next;
                next += 1;
            }
            ids.push(root_to_id[r]);
        }
        (ids, next as usize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unions_and_ids() {
        let mut uf = UnionFind::new(6);
        uf.union(4, 5);
        uf.union(1, 4);
        assert_eq!(uf.find(5), uf.find(1));
        assert_eq!(uf.size_of(5), 3);
        let (ids, n) = uf.component_ids();
        assert_eq!(n, 4);
        assert_eq!(ids, vec![0, 1, 2, 3, 1, 1]);
    }
}
