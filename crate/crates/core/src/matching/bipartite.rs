//! Bipartite matching, Hall surplus, and the alternating-closure searches for tight
//! (`|S| = |N(S)|`) and near-tight (`|S| = |N(S)| - 1`) left sets.

use serde::{Deserialize, Serialize};
use thiserror::Error;

const NONE: usize = usize::MAX;

/// Left subsets up to this size are scanned exhaustively by [`surplus`].
pub const EXHAUSTIVE_SURPLUS_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BipartiteError {
    #[error("edge ({0}, {1}) is outside the {2}x{3} bipartite graph")]
    OutOfRange(usize, usize, usize, usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("matching leaves left vertex {0} unmatched")]
    LeftNotSaturated(usize),
    #[error("matching does not fit the bipartite graph")]
    InvalidMatching,
}

/// Bipartite graph with left vertices `0..left` and right vertices `0..right`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bigraph {
    adj: Vec<Vec<usize>>,
    radj: Vec<Vec<usize>>,
}

impl Bigraph {
    pub fn new(left: usize, right: usize, edges: &[(usize, usize)]) -> Result<Self, BipartiteError> {
        let mut adj = vec![Vec::new(); left];
        let mut radj = vec![Vec::new(); right];
        for &(a, r) in edges {
            if a >= left || r >= right {
                return Err(BipartiteError::OutOfRange(a, r, left, right));
            }
            adj[a].push(r);
            radj[r].push(a);
        }
        for (a, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(BipartiteError::DuplicateEdge(a, w[0]));
            }
        }
        radj.iter_mut().for_each(|l| l.sort_unstable());
        Ok(Bigraph { adj, radj })
    }

    pub fn complete(left: usize, right: usize) -> Self {
        let edges: Vec<_> = (0..left).flat_map(|a| (0..right).map(move |r| (a, r))).collect();
        Bigraph::new(left, right, &edges).expect("complete bigraph is simple")
    }

    pub fn left_count(&self) -> usize {
        self.adj.len()
    }

    pub fn right_count(&self) -> usize {
        self.radj.len()
    }

    pub fn left_neighbors(&self, a: usize) -> &[usize] {
        &self.adj[a]
    }

    pub fn right_neighbors(&self, r: usize) -> &[usize] {
        &self.radj[r]
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }

    /// `|N(S)|` for a set of left vertices.
    pub fn neighborhood_size(&self, set: &[usize]) -> usize {
        let mut seen = vec![false; self.right_count()];
        set.iter()
            .flat_map(|&a| self.adj[a].iter())
            .filter(|&&r| !std::mem::replace(&mut seen[r], true))
            .count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteMatching {
    left_mate: Vec<Option<usize>>,
    right_mate: Vec<Option<usize>>,
}

impl BipartiteMatching {
    pub fn from_edges(b: &Bigraph, edges: &[(usize, usize)]) -> Result<Self, BipartiteError> {
        let mut m = BipartiteMatching {
            left_mate: vec![None; b.left_count()],
            right_mate: vec![None; b.right_count()],
        };
        for &(a, r) in edges {
            let ok = a < b.left_count()
                && r < b.right_count()
                && b.adj[a].binary_search(&r).is_ok()
                && m.left_mate[a].is_none()
                && m.right_mate[r].is_none();
            if !ok {
                return Err(BipartiteError::InvalidMatching);
            }
            m.left_mate[a] = Some(r);
            m.right_mate[r] = Some(a);
        }
        Ok(m)
    }

    pub fn left_mate(&self, a: usize) -> Option<usize> {
        self.left_mate[a]
    }

    pub fn right_mate(&self, r: usize) -> Option<usize> {
        self.right_mate[r]
    }

    pub fn size(&self) -> usize {
        self.left_mate.iter().flatten().count()
    }

    /// Edges as `(left, right)`, by left vertex.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.left_mate
            .iter()
            .enumerate()
            .filter_map(|(a, r)| r.map(|r| (a, r)))
            .collect()
    }

    fn check_saturates_left(&self, b: &Bigraph) -> Result<(), BipartiteError> {
        if self.left_mate.len() != b.left_count() || self.right_mate.len() != b.right_count() {
            return Err(BipartiteError::InvalidMatching);
        }
        match self.left_mate.iter().position(Option::is_none) {
            Some(a) => Err(BipartiteError::LeftNotSaturated(a)),
            None => Ok(()),
        }
    }
}

/// Maximum matching by repeated augmenting paths (Kuhn), left vertices in ascending order.
pub fn bipartite_max_matching(b: &Bigraph) -> BipartiteMatching {
    fn try_augment(
        b: &Bigraph,
        a: usize,
        visited: &mut [bool],
        left_mate: &mut [usize],
        right_mate: &mut [usize],
    ) -> bool {
        for &r in &b.adj[a] {
            if visited[r] {
                continue;
            }
            visited[r] = true;
            if right_mate[r] == NONE || try_augment(b, right_mate[r], visited, left_mate, right_mate) {
                left_mate[a] = r;
                right_mate[r] = a;
                return true;
            }
        }
        false
    }

    let mut left_mate = vec![NONE; b.left_count()];
    let mut right_mate = vec![NONE; b.right_count()];
    let mut visited = vec![false; b.right_count()];
    for a in 0..b.left_count() {
        visited.iter_mut().for_each(|v| *v = false);
        try_augment(b, a, &mut visited, &mut left_mate, &mut right_mate);
    }
    let wrap = |v: Vec<usize>| v.into_iter().map(|x| (x != NONE).then_some(x)).collect();
    BipartiteMatching {
        left_mate: wrap(left_mate),
        right_mate: wrap(right_mate),
    }
}

/// Minimum of `|N(S)| - |S|` over nonempty left sets `S`, with a minimising witness.
/// `value` is `None` (+infinity) when the left side is empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Surplus {
    pub value: Option<i64>,
    pub witness: Vec<usize>,
}

/// Exhaustive scan for small left sides, flow-based otherwise.
pub fn surplus(b: &Bigraph) -> Surplus {
    if b.left_count() <= EXHAUSTIVE_SURPLUS_LIMIT {
        surplus_exhaustive(b)
    } else {
        surplus_by_flow(b)
    }
}

/// Scans every nonempty left subset in increasing bitmask order; the first minimiser wins.
pub fn surplus_exhaustive(b: &Bigraph) -> Surplus {
    let k = b.left_count();
    assert!(k < 64, "exhaustive surplus needs fewer than 64 left vertices");
    if k == 0 {
        return Surplus {
            value: None,
            witness: Vec::new(),
        };
    }
    let words = b.right_count().div_ceil(64).max(1);
    let masks: Vec<Vec<u64>> = (0..k)
        .map(|a| {
            let mut m = vec![0u64; words];
            for &r in &b.adj[a] {
                m[r / 64] |= 1 << (r % 64);
            }
            m
        })
        .collect();
    let mut best: Option<(i64, u64)> = None;
    let mut union = vec![0u64; words];
    for set in 1u64..(1u64 << k) {
        union.iter_mut().for_each(|w| *w = 0);
        for (a, mask) in masks.iter().enumerate() {
            if set >> a & 1 == 1 {
                union.iter_mut().zip(mask).for_each(|(u, m)| *u |= m);
            }
        }
        let n_s: u32 = union.iter().map(|w| w.count_ones()).sum();
        let value = n_s as i64 - set.count_ones() as i64;
        if best.is_none_or(|(v, _)| value < v) {
            best = Some((value, set));
        }
    }
    let (value, set) = best.expect("at least one nonempty subset");
    Surplus {
        value: Some(value),
        witness: (0..k).filter(|&a| set >> a & 1 == 1).collect(),
    }
}

/// Polynomial route: for each left vertex `a`, `min over S containing a of |N(S)| - |S|`
/// equals the max flow of the unit network where `a` alone gets unbounded source
/// capacity, minus `|A|`. The source side of the minimum cut is the witness.
pub fn surplus_by_flow(b: &Bigraph) -> Surplus {
    let k = b.left_count();
    if k == 0 {
        return Surplus {
            value: None,
            witness: Vec::new(),
        };
    }
    let base = bipartite_max_matching(b);
    let mut best: Option<(i64, Vec<usize>)> = None;
    for a in 0..k {
        let mut owner: Vec<usize> = (0..b.right_count())
            .map(|r| base.right_mate(r).unwrap_or(NONE))
            .collect();
        let mut load: Vec<usize> = (0..k).map(|x| usize::from(base.left_mate(x).is_some())).collect();
        let mut cap = vec![1usize; k];
        cap[a] = b.adj[a].len() + 1;
        let (set, reached_right) = loop {
            match augment_once(b, &cap, &mut owner, &mut load) {
                Augment::Done { set, reached_right } => break (set, reached_right),
                Augment::Augmented => {}
            }
        };
        let value = reached_right as i64 - set.len() as i64;
        if best.as_ref().is_none_or(|(v, _)| value < *v) {
            best = Some((value, set));
        }
    }
    let (value, witness) = best.expect("left side nonempty");
    Surplus {
        value: Some(value),
        witness,
    }
}

enum Augment {
    Augmented,
    Done { set: Vec<usize>, reached_right: usize },
}

/// One BFS over the residual network of the capacitated b-matching problem.
fn augment_once(b: &Bigraph, cap: &[usize], owner: &mut [usize], load: &mut [usize]) -> Augment {
    let k = b.left_count();
    let mut left_seen = vec![false; k];
    let mut via_right = vec![NONE; k];
    let mut right_from = vec![NONE; b.right_count()];
    let mut queue: Vec<usize> = (0..k).filter(|&x| load[x] < cap[x]).collect();
    for &x in &queue {
        left_seen[x] = true;
    }
    let mut head = 0;
    while head < queue.len() {
        let x = queue[head];
        head += 1;
        for &r in &b.adj[x] {
            if right_from[r] != NONE {
                continue;
            }
            right_from[r] = x;
            if owner[r] == NONE {
                let mut r = r;
                loop {
                    let x = right_from[r];
                    owner[r] = x;
                    if via_right[x] == NONE {
                        load[x] += 1;
                        break;
                    }
                    r = via_right[x];
                }
                return Augment::Augmented;
            }
            let y = owner[r];
            if !left_seen[y] {
                left_seen[y] = true;
                via_right[y] = r;
                queue.push(y);
            }
        }
    }
    let mut set: Vec<usize> = queue;
    set.sort_unstable();
    Augment::Done {
        set,
        reached_right: right_from.iter().filter(|&&x| x != NONE).count(),
    }
}

/// Alternating closure from `M(start)`: keep adding `M(i)` for every `i` in `N(S)` except
/// `skip`. Returns `S` and whether some vertex of `N(S) \ {skip}` is unmatched.
fn closure(
    b: &Bigraph,
    m: &BipartiteMatching,
    start: usize,
    skip: Option<usize>,
    in_s: &mut [bool],
    in_n: &mut [bool],
) -> (Vec<usize>, bool, bool) {
    in_s.iter_mut().for_each(|x| *x = false);
    in_n.iter_mut().for_each(|x| *x = false);
    let root = m.right_mate(start).expect("closure starts at a matched right vertex");
    in_s[root] = true;
    let mut set = vec![root];
    let mut exposed_neighbor = false;
    let mut reaches_skip = false;
    let mut head = 0;
    while head < set.len() {
        let a = set[head];
        head += 1;
        for &r in &b.adj[a] {
            if in_n[r] {
                continue;
            }
            in_n[r] = true;
            if Some(r) == skip {
                reaches_skip = true;
                continue;
            }
            match m.right_mate(r) {
                Some(next) if !in_s[next] => {
                    in_s[next] = true;
                    set.push(next);
                }
                Some(_) => {}
                None => exposed_neighbor = true,
            }
        }
    }
    set.sort_unstable();
    (set, exposed_neighbor, reaches_skip)
}

/// First nonempty left set with `|S| = |N(S)|`, trying closures from matched right
/// vertices in ascending order. `m` must be a maximum matching covering the left side.
pub fn find_tight_set(b: &Bigraph, m: &BipartiteMatching) -> Result<Option<Vec<usize>>, BipartiteError> {
    m.check_saturates_left(b)?;
    let mut in_s = vec![false; b.left_count()];
    let mut in_n = vec![false; b.right_count()];
    for start in (0..b.right_count()).filter(|&r| m.right_mate(r).is_some()) {
        let (set, exposed, _) = closure(b, m, start, None, &mut in_s, &mut in_n);
        if !exposed {
            return Ok(Some(set));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NearTight {
    pub set: Vec<usize>,
    /// The one vertex of `N(S)` not matched into `S`.
    pub i_star: usize,
}

/// First left set with `|S| = |N(S)| - 1`, over ordered pairs `(start, i_star)` of
/// distinct right vertices: the closure from `M(start)` never follows `i_star`'s mate,
/// and succeeds when `i_star` is in `N(S)` and every other neighbour is matched into `S`.
///
/// Intended for use once no tight set exists; with a tight set present it may still
/// report some near-tight set.
pub fn find_near_tight_set(b: &Bigraph, m: &BipartiteMatching) -> Result<Option<NearTight>, BipartiteError> {
    m.check_saturates_left(b)?;
    let mut in_s = vec![false; b.left_count()];
    let mut in_n = vec![false; b.right_count()];
    for start in (0..b.right_count()).filter(|&r| m.right_mate(r).is_some()) {
        for i_star in (0..b.right_count()).filter(|&r| r != start) {
            let (set, exposed, reaches) = closure(b, m, start, Some(i_star), &mut in_s, &mut in_n);
            if reaches && !exposed {
                return Ok(Some(NearTight { set, i_star }));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn both_routes(b: &Bigraph) -> Surplus {
        let ex = surplus_exhaustive(b);
        let fl = surplus_by_flow(b);
        assert_eq!(ex.value, fl.value);
        if let Some(v) = fl.value {
            assert_eq!(b.neighborhood_size(&fl.witness) as i64 - fl.witness.len() as i64, v);
        }
        ex
    }

    #[test]
    fn matching_sizes() {
        let single = Bigraph::new(1, 1, &[(0, 0)]).unwrap();
        assert_eq!(bipartite_max_matching(&single).size(), 1);
        assert_eq!(bipartite_max_matching(&Bigraph::complete(2, 3)).size(), 2);
        assert_eq!(bipartite_max_matching(&Bigraph::new(2, 2, &[]).unwrap()).size(), 0);
    }

    #[test]
    fn surplus_examples() {
        let s = both_routes(&Bigraph::complete(1, 3));
        assert_eq!(
            s,
            Surplus {
                value: Some(2),
                witness: vec![0]
            }
        );

        let b = Bigraph::new(2, 2, &[(0, 0), (1, 0), (1, 1)]).unwrap();
        let s = both_routes(&b);
        assert_eq!(s.value, Some(0));
        assert_eq!(s.witness, vec![0]);

        let empty = Bigraph::new(0, 3, &[]).unwrap();
        assert_eq!(
            surplus(&empty),
            Surplus {
                value: None,
                witness: vec![]
            }
        );
        assert_eq!(surplus_by_flow(&empty).value, None);
    }

    #[test]
    fn hall_violation_is_negative() {
        let b = Bigraph::new(3, 2, &[(0, 0), (1, 0), (2, 1)]).unwrap();
        let s = both_routes(&b);
        assert_eq!(s.value, Some(-1));
    }

    #[test]
    fn tight_set_examples() {
        let single = Bigraph::new(1, 1, &[(0, 0)]).unwrap();
        let m = bipartite_max_matching(&single);
        assert_eq!(find_tight_set(&single, &m), Ok(Some(vec![0])));

        let k13 = Bigraph::complete(1, 3);
        let m = bipartite_max_matching(&k13);
        assert_eq!(find_tight_set(&k13, &m), Ok(None));

        let b = Bigraph::new(2, 2, &[(0, 0), (1, 1), (1, 0)]).unwrap();
        let m = BipartiteMatching::from_edges(&b, &[(0, 0), (1, 1)]).unwrap();
        assert_eq!(find_tight_set(&b, &m), Ok(Some(vec![0])));
    }

    #[test]
    fn near_tight_examples() {
        let b = Bigraph::new(1, 2, &[(0, 0), (0, 1)]).unwrap();
        let m = BipartiteMatching::from_edges(&b, &[(0, 0)]).unwrap();
        assert_eq!(
            find_near_tight_set(&b, &m),
            Ok(Some(NearTight {
                set: vec![0],
                i_star: 1
            }))
        );

        let k13 = Bigraph::complete(1, 3);
        let m = bipartite_max_matching(&k13);
        assert_eq!(find_near_tight_set(&k13, &m), Ok(None));

        let k23 = Bigraph::complete(2, 3);
        let m = bipartite_max_matching(&k23);
        let found = find_near_tight_set(&k23, &m).unwrap().unwrap();
        assert_eq!(found.set, vec![0, 1]);
        assert!(m.right_mate(found.i_star).is_none());
    }

    #[test]
    fn closures_require_saturated_left() {
        let b = Bigraph::new(2, 1, &[(0, 0), (1, 0)]).unwrap();
        let m = bipartite_max_matching(&b);
        assert_eq!(find_tight_set(&b, &m), Err(BipartiteError::LeftNotSaturated(1)));
        assert_eq!(find_near_tight_set(&b, &m), Err(BipartiteError::LeftNotSaturated(1)));
    }
}
