//! Small shared helpers.

/// Union-find with path compression. `freeze` assigns dense class ids in
/// order of least member, so downstream consumers get canonical,
/// deterministic representatives.
pub(crate) struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
        }
    }

    pub fn find(&mut self, x: u32) -> u32 {
        let mut root = x;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut cur = x;
        while self.parent[cur as usize] != root {
            let next = self.parent[cur as usize];
            self.parent[cur as usize] = root;
            cur = next;
        }
        root
    }

    pub fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // keep the least element on top so representatives are canonical
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi as usize] = lo;
        }
    }

    /// (class id per element, member lists per class); class ids are dense
    /// and ordered by least member.
    pub fn freeze(mut self) -> (Vec<u32>, Vec<Vec<u32>>) {
        let n = self.parent.len();
        let mut class_of = vec![u32::MAX; n];
        let mut members: Vec<Vec<u32>> = Vec::new();
        let mut root_class = vec![u32::MAX; n];
        for x in 0..n as u32 {
            let root = self.find(x);
            if root_class[root as usize] == u32::MAX {
                root_class[root as usize] = members.len() as u32;
                members.push(Vec::new());
            }
            let class = root_class[root as usize];
            class_of[x as usize] = class;
            members[class as usize].push(x);
        }
        (class_of, members)
    }
}
