//! Union-find with union by size and explicit undo, for backtracking
//! enumeration. Finds do not compress paths so that unions stay reversible.

#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

/// Record returned by a successful union; pass back to `undo`.
#[derive(Debug, Clone, Copy)]
pub struct UnionRecord {
    child: usize,
    parent: usize,
}

impl UnionFind {
    pub fn new(len: usize) -> Self {
        UnionFind {
            parent: (0..len).collect(),
            size: vec![1; len],
        }
    }

    pub fn find(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    pub fn same(&self, x: usize, y: usize) -> bool {
        self.find(x) == self.find(y)
    }

    /// Union the sets of `x` and `y`; `None` when already joined.
    pub fn union(&mut self, x: usize, y: usize) -> Option<UnionRecord> {
        let mut x_root = self.find(x);
        let mut y_root = self.find(y);
        if x_root == y_root {
            return None;
        }
        if self.size[x_root] < self.size[y_root] {
            std::mem::swap(&mut x_root, &mut y_root);
        }
        self.parent[y_root] = x_root;
        self.size[x_root] += self.size[y_root];
        Some(UnionRecord {
            child: y_root,
            parent: x_root,
        })
    }

    /// Reverse a union. Records must be undone in reverse order.
    pub fn undo(&mut self, record: UnionRecord) {
        self.parent[record.child] = record.child;
        self.size[record.parent] -= self.size[record.child];
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn union_and_undo_restore_state() {
        let mut uf = UnionFind::new(4);
        let r1 = uf.union(0, 1).unwrap();
        let r2 = uf.union(1, 2).unwrap();
        assert!(uf.same(0, 2));
        assert!(uf.union(0, 2).is_none());
        uf.undo(r2);
        assert!(!uf.same(0, 2));
        assert!(uf.same(0, 1));
        uf.undo(r1);
        assert!(!uf.same(0, 1));
    }
}
