//! Permutation groups given by generators: closure, orbits, double
//! transitivity and minimal blocks of imprimitivity.

use std::collections::{HashSet, VecDeque};

use serde::Serialize;

use super::perm::Permutation;
use crate::error::{Error, Result};

/// Default cap on the number of enumerated group elements.
pub const DEFAULT_CLOSURE_CAP: usize = 1_000_000;

/// Closure cap, overridable through `MOMENT_KERNEL_CAP`.
pub fn closure_cap() -> usize {
    std::env::var("MOMENT_KERNEL_CAP").ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_CLOSURE_CAP)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PermGroup {
    n: usize,
    generators: Vec<Permutation>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct GroupProperties {
    pub degree: usize,
    pub order: usize,
    /// Orbits as 1-based sorted lists.
    pub orbits: Vec<Vec<usize>>,
    pub transitive: bool,
    pub doubly_transitive: bool,
    /// Distinct minimal nontrivial blocks containing point 1 (1-based).
    pub minimal_blocks: Vec<Vec<usize>>,
    pub primitive: bool,
}

/// Union–find over {0..n−1}.
struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

impl PermGroup {
    pub fn new(n: usize, generators: Vec<Permutation>) -> Result<Self> {
        if generators.iter().any(|g| g.degree() != n) {
            return Err(Error::InvalidInput("generator degree mismatch".into()));
        }
        Ok(Self { n, generators })
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    /// All elements by breadth-first closure, failing beyond `cap`.
    pub fn elements(&self, cap: usize) -> Result<Vec<Permutation>> {
        let id = Permutation::identity(self.n);
        let mut seen: HashSet<Permutation> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(id.clone());
        queue.push_back(id);
        let mut out = Vec::new();
        while let Some(p) = queue.pop_front() {
            for g in &self.generators {
                let q = p.then(g);
                if !seen.contains(&q) {
                    if seen.len() >= cap {
                        return Err(Error::ClosureCapExceeded(cap));
                    }
                    seen.insert(q.clone());
                    queue.push_back(q);
                }
            }
            out.push(p);
        }
        Ok(out)
    }

    pub fn order(&self, cap: usize) -> Result<usize> {
        Ok(self.elements(cap)?.len())
    }

    /// Orbits on points, 0-based.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut d = Dsu::new(self.n);
        for g in &self.generators {
            for i in 0..self.n {
                d.union(i, g.apply(i));
            }
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut idx = vec![usize::MAX; self.n];
        for i in 0..self.n {
            let r = d.find(i);
            if idx[r] == usize::MAX {
                idx[r] = groups.len();
                groups.push(Vec::new());
            }
            groups[idx[r]].push(i);
        }
        groups
    }

    pub fn is_transitive(&self) -> bool {
        self.n <= 1 || self.orbits().len() == 1
    }

    /// Transitive on ordered pairs of distinct points.
    pub fn is_doubly_transitive(&self) -> bool {
        if self.n <= 1 {
            return true;
        }
        let n = self.n;
        let mut seen = vec![false; n * n];
        let mut stack = vec![(0usize, 1usize)];
        seen[1] = true;
        let mut count = 1;
        while let Some((a, b)) = stack.pop() {
            for g in &self.generators {
                let (x, y) = (g.apply(a), g.apply(b));
                if !seen[x * n + y] {
                    seen[x * n + y] = true;
                    count += 1;
                    stack.push((x, y));
                }
            }
        }
        count == n * (n - 1)
    }

    /// Finest block system in which `a` and `b` share a block.
    pub fn block_system(&self, a: usize, b: usize) -> Vec<Vec<usize>> {
        let mut d = Dsu::new(self.n);
        let mut queue = VecDeque::new();
        if d.union(a, b) {
            queue.push_back((a, b));
        }
        while let Some((u, v)) = queue.pop_front() {
            for g in &self.generators {
                let (x, y) = (g.apply(u), g.apply(v));
                let (rx, ry) = (d.find(x), d.find(y));
                if rx != ry {
                    d.union(rx, ry);
                    queue.push_back((rx, ry));
                }
            }
        }
        let mut classes: Vec<Vec<usize>> = Vec::new();
        let mut idx = vec![usize::MAX; self.n];
        for i in 0..self.n {
            let r = d.find(i);
            if idx[r] == usize::MAX {
                idx[r] = classes.len();
                classes.push(Vec::new());
            }
            classes[idx[r]].push(i);
        }
        classes
    }

    /// Nontrivial minimal blocks containing point 0 (0-based), deduplicated.
    pub fn minimal_blocks(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = Vec::new();
        for j in 1..self.n {
            let sys = self.block_system(0, j);
            let blk = sys.into_iter().find(|c| c.contains(&0)).unwrap_or_default();
            if blk.len() < self.n && !out.contains(&blk) {
                out.push(blk);
            }
        }
        // keep only blocks not strictly containing another found block
        let all = out.clone();
        out.retain(|b| !all.iter().any(|c| c.len() < b.len() && c.iter().all(|x| b.contains(x))));
        out.sort();
        out
    }

    /// Whether `set` is a block: every generator maps it to itself or off it.
    pub fn is_block(&self, set: &[usize]) -> bool {
        if set.is_empty() {
            return false;
        }
        let sys = self.block_system_of_set(set);
        sys.iter().any(|c| {
            let mut c = c.clone();
            let mut s = set.to_vec();
            c.sort();
            s.sort();
            c == s
        })
    }

    fn block_system_of_set(&self, set: &[usize]) -> Vec<Vec<usize>> {
        let mut d = Dsu::new(self.n);
        let mut queue = VecDeque::new();
        for &x in &set[1..] {
            if d.union(set[0], x) {
                queue.push_back((set[0], x));
            }
        }
        while let Some((u, v)) = queue.pop_front() {
            for g in &self.generators {
                let (rx, ry) = (d.find(g.apply(u)), d.find(g.apply(v)));
                if rx != ry {
                    d.union(rx, ry);
                    queue.push_back((rx, ry));
                }
            }
        }
        let mut classes: Vec<Vec<usize>> = vec![Vec::new(); self.n];
        for i in 0..self.n {
            let r = d.find(i);
            classes[r].push(i);
        }
        classes.into_iter().filter(|c| !c.is_empty()).collect()
    }

    /// Whether a partition of the points is invariant under every generator.
    pub fn is_block_system(&self, classes: &[Vec<usize>]) -> bool {
        let mut class_of = vec![usize::MAX; self.n];
        for (k, c) in classes.iter().enumerate() {
            for &i in c {
                if i >= self.n || class_of[i] != usize::MAX {
                    return false;
                }
                class_of[i] = k;
            }
        }
        if class_of.contains(&usize::MAX) {
            return false;
        }
        self.generators.iter().all(|g| {
            classes.iter().all(|c| {
                let target = class_of[g.apply(c[0])];
                c.iter().all(|&i| class_of[g.apply(i)] == target)
            })
        })
    }

    /// Size of the orbit of a subset under the group (acting on subsets).
    pub fn set_orbit_size(&self, set: &[usize]) -> usize {
        let mut start = vec![false; self.n];
        for &i in set {
            start[i] = true;
        }
        let mut seen: HashSet<Vec<bool>> = HashSet::new();
        seen.insert(start.clone());
        let mut stack = vec![start];
        while let Some(s) = stack.pop() {
            for g in &self.generators {
                let mut img = vec![false; self.n];
                for i in 0..self.n {
                    if s[i] {
                        img[g.apply(i)] = true;
                    }
                }
                if seen.insert(img.clone()) {
                    stack.push(img);
                }
            }
        }
        seen.len()
    }

    pub fn properties(&self, cap: usize) -> Result<GroupProperties> {
        let order = self.order(cap)?;
        let one = |v: &Vec<usize>| v.iter().map(|i| i + 1).collect::<Vec<_>>();
        let blocks = self.minimal_blocks();
        Ok(GroupProperties {
            degree: self.n,
            order,
            orbits: self.orbits().iter().map(one).collect(),
            transitive: self.is_transitive(),
            doubly_transitive: self.is_doubly_transitive(),
            primitive: self.is_transitive() && blocks.is_empty(),
            minimal_blocks: blocks.iter().map(one).collect(),
        })
    }
}

/// Properties of the group generated by `generators`, with the default cap.
pub fn group_properties(g: &PermGroup) -> Result<GroupProperties> {
    g.properties(closure_cap())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: usize, s: &str) -> Permutation {
        Permutation::parse(n, s).unwrap()
    }

    #[test]
    fn s3() {
        let g = PermGroup::new(3, vec![p(3, "(1 2)"), p(3, "(1 2 3)")]).unwrap();
        let pr = group_properties(&g).unwrap();
        assert_eq!(pr.order, 6);
        assert!(pr.doubly_transitive && pr.primitive);
    }

    #[test]
    fn cyclic4() {
        let g = PermGroup::new(4, vec![p(4, "(1 2 3 4)")]).unwrap();
        let pr = group_properties(&g).unwrap();
        assert_eq!(pr.order, 4);
        assert!(pr.transitive && !pr.doubly_transitive);
        assert_eq!(pr.minimal_blocks, vec![vec![1, 3]]);
        assert!(g.is_block(&[1, 3]));
        assert!(!g.is_block(&[0, 1]));
        assert!(g.is_block_system(&[vec![0, 2], vec![1, 3]]));
        assert!(!g.is_block_system(&[vec![0, 1], vec![2, 3]]));
    }

    #[test]
    fn section8_group() {
        let a = p(10, "(2,5,7,6,10,9)(3,8,4)");
        let b = p(10, "(1,5)(2,8)(4,7)");
        let g = PermGroup::new(10, vec![a, b]).unwrap();
        let pr = group_properties(&g).unwrap();
        assert_eq!(pr.order, 120);
        assert!(pr.transitive && !pr.doubly_transitive);
    }

    #[test]
    fn cap_exceeded() {
        let g = PermGroup::new(6, vec![p(6, "(1 2)"), p(6, "(1 2 3 4 5 6)")]).unwrap();
        assert_eq!(g.order(100), Err(Error::ClosureCapExceeded(100)));
        assert_eq!(g.order(1000).unwrap(), 720);
    }

    #[test]
    fn subset_orbits() {
        let g = PermGroup::new(3, vec![p(3, "(1 2)"), p(3, "(1 2 3)")]).unwrap();
        assert_eq!(g.set_orbit_size(&[0]), 3);
        let c = PermGroup::new(4, vec![p(4, "(1 2 3 4)")]).unwrap();
        assert_eq!(c.set_orbit_size(&[0, 2]), 2);
    }
}
