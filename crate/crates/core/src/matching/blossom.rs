//! Maximum-cardinality matching in general graphs by Edmonds' blossom contraction.
//!
//! The search grows an alternating tree from one exposed root at a time, contracting
//! odd cycles into their base vertex. Vertex order is always ascending, so the
//! matching returned for a given graph never changes between runs.

use super::graph::{Graph, Matching};

const NONE: usize = usize::MAX;

pub(crate) struct BlossomSearch<'g> {
    g: &'g Graph,
    mate: Vec<usize>,
    parent: Vec<usize>,
    base: Vec<usize>,
    used: Vec<bool>,
    in_blossom: Vec<bool>,
    lca_mark: Vec<bool>,
    queue: Vec<usize>,
}

impl<'g> BlossomSearch<'g> {
    pub(crate) fn new(g: &'g Graph) -> Self {
        let n = g.vertex_count();
        BlossomSearch {
            g,
            mate: vec![NONE; n],
            parent: vec![NONE; n],
            base: (0..n).collect(),
            used: vec![false; n],
            in_blossom: vec![false; n],
            lca_mark: vec![false; n],
            queue: Vec::with_capacity(n),
        }
    }

    /// Greedy start followed by one augmenting search per exposed vertex.
    pub(crate) fn run(&mut self) {
        let n = self.g.vertex_count();
        for v in 0..n {
            if self.mate[v] != NONE {
                continue;
            }
            if let Some(&w) = self.g.neighbors(v).iter().find(|&&w| self.mate[w] == NONE) {
                self.mate[v] = w;
                self.mate[w] = v;
            }
        }
        for root in 0..n {
            if self.mate[root] == NONE {
                if let Some(end) = self.find_augmenting_path(root, None) {
                    self.augment(end);
                }
            }
        }
    }

    pub(crate) fn matching(&self) -> Matching {
        Matching::from_mates(
            self.mate
                .iter()
                .map(|&m| if m == NONE { None } else { Some(m) })
                .collect(),
        )
    }

    /// Whether deleting `v` leaves the maximum matching size unchanged.
    ///
    /// Requires the current matching to be maximum. If `v` is matched to `u`, the
    /// only augmenting paths for `M - uv` in `G - v` start at `u`, so one search
    /// from `u` decides it.
    pub(crate) fn missed_by_some_maximum(&mut self, v: usize) -> bool {
        let u = self.mate[v];
        if u == NONE {
            return true;
        }
        self.mate[u] = NONE;
        self.mate[v] = NONE;
        let found = self.find_augmenting_path(u, Some(v)).is_some();
        self.mate[u] = v;
        self.mate[v] = u;
        found
    }

    fn lca(&mut self, mut a: usize, mut b: usize) -> usize {
        self.lca_mark.iter_mut().for_each(|m| *m = false);
        loop {
            a = self.base[a];
            self.lca_mark[a] = true;
            if self.mate[a] == NONE {
                break;
            }
            a = self.parent[self.mate[a]];
        }
        loop {
            b = self.base[b];
            if self.lca_mark[b] {
                return b;
            }
            b = self.parent[self.mate[b]];
        }
    }

    fn mark_path(&mut self, mut v: usize, b: usize, mut child: usize) {
        while self.base[v] != b {
            let m = self.mate[v];
            self.in_blossom[self.base[v]] = true;
            self.in_blossom[self.base[m]] = true;
            self.parent[v] = child;
            child = m;
            v = self.parent[m];
        }
    }

    /// Returns the exposed endpoint of an augmenting path from `root`, leaving the
    /// path encoded in `parent`. `blocked` is treated as deleted from the graph.
    fn find_augmenting_path(&mut self, root: usize, blocked: Option<usize>) -> Option<usize> {
        let n = self.g.vertex_count();
        let blocked = blocked.unwrap_or(NONE);
        self.used.iter_mut().for_each(|u| *u = false);
        self.parent.iter_mut().for_each(|p| *p = NONE);
        for (i, b) in self.base.iter_mut().enumerate() {
            *b = i;
        }
        self.used[root] = true;
        self.queue.clear();
        self.queue.push(root);
        let mut head = 0;
        while head < self.queue.len() {
            let v = self.queue[head];
            head += 1;
            for idx in 0..self.g.degree(v) {
                let to = self.g.neighbors(v)[idx];
                if to == blocked || self.base[v] == self.base[to] || self.mate[v] == to {
                    continue;
                }
                if to == root || (self.mate[to] != NONE && self.parent[self.mate[to]] != NONE) {
                    let cur_base = self.lca(v, to);
                    self.in_blossom.iter_mut().for_each(|b| *b = false);
                    self.mark_path(v, cur_base, to);
                    self.mark_path(to, cur_base, v);
                    for i in 0..n {
                        if self.in_blossom[self.base[i]] {
                            self.base[i] = cur_base;
                            if !self.used[i] {
                                self.used[i] = true;
                                self.queue.push(i);
                            }
                        }
                    }
                } else if self.parent[to] == NONE {
                    self.parent[to] = v;
                    if self.mate[to] == NONE {
                        return Some(to);
                    }
                    let next = self.mate[to];
                    self.used[next] = true;
                    self.queue.push(next);
                }
            }
        }
        None
    }

    fn augment(&mut self, mut v: usize) {
        while v != NONE {
            let pv = self.parent[v];
            let ppv = self.mate[pv];
            self.mate[v] = pv;
            self.mate[pv] = v;
            v = ppv;
        }
    }
}

/// A maximum-cardinality matching of `g`. Deterministic for a fixed graph.
pub fn max_matching(g: &Graph) -> Matching {
    let mut search = BlossomSearch::new(g);
    search.run();
    search.matching()
}
