//! Exhaustive references: EF/PEF existence over all assignments, maximum matchings,
//! missed-vertex sets and cliques.
//!
//! Assignments are enumerated in lexicographic order of their sorted groups: the
//! choice for resource 0 varies slowest, combinations taken in lexicographic order of
//! the agents still free. Work can be split into rank ranges; the first witness in
//! enumeration order is returned either way.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use thiserror::Error;

use crate::fairness::{EnvyEngine, Notion};
use crate::matching::{Graph, Matching};
use crate::model::{Assignment, Instance};

/// Default cap on the number of assignments an enumeration may visit.
pub const DEFAULT_LIMIT: u64 = 10_000_000;
/// Largest graph the brute-force matching references accept.
pub const MAX_MATCHING_VERTICES: usize = 16;
/// Largest graph [`brute_clique`] accepts.
pub const MAX_CLIQUE_VERTICES: usize = 20;

const CHUNK: u64 = 1024;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{count} assignments exceed the enumeration limit {limit}")]
    LimitExceeded { count: BigUint, limit: u64 },
    #[error("graph has {vertices} vertices, brute force allows at most {max}")]
    TooLarge { vertices: usize, max: usize },
}

/// How the enumeration is scheduled. Results do not depend on the choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    Sequential,
    /// Rank chunks on the rayon pool; same as `Sequential` without the `parallel` feature.
    #[default]
    Parallel,
}

/// `n! / prod_j c_j!`.
pub fn assignment_count(capacities: &[usize]) -> BigUint {
    let mut count = BigUint::one();
    let mut placed = 0u64;
    for &c in capacities {
        for t in 1..=c as u64 {
            placed += 1;
            count = count * placed / t;
        }
    }
    count
}

fn checked_count(capacities: &[usize], limit: u64) -> Result<u64, OracleError> {
    let count = assignment_count(capacities);
    match count.to_u64() {
        Some(c) if c <= limit => Ok(c),
        _ => Err(OracleError::LimitExceeded { count, limit }),
    }
}

fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// Cursor over assignments in enumeration order.
#[derive(Debug, Clone)]
struct Cursor {
    caps: Vec<usize>,
    /// `combos[j]` indexes into the agents left free by groups `0..j`.
    combos: Vec<Vec<usize>>,
    groups: Vec<Vec<usize>>,
    labels: Vec<usize>,
}

impl Cursor {
    fn at_rank(caps: &[usize], mut rank: u64) -> Self {
        let n: usize = caps.iter().sum();
        let mut combos = Vec::with_capacity(caps.len());
        let mut free = n;
        for (j, &c) in caps.iter().enumerate() {
            let rest = assignment_count(&caps[j + 1..])
                .to_u64()
                .expect("sub-count below the checked total");
            let q = rank / rest;
            rank %= rest;
            combos.push(unrank_combination(free, c, q));
            free -= c;
        }
        let mut cursor = Cursor {
            caps: caps.to_vec(),
            combos,
            groups: vec![Vec::new(); caps.len()],
            labels: vec![0; n],
        };
        cursor.rebuild_from(0);
        cursor
    }

    fn rebuild_from(&mut self, first: usize) {
        let n = self.labels.len();
        let mut taken = vec![false; n];
        for group in &self.groups[..first] {
            for &a in group {
                taken[a] = true;
            }
        }
        for j in first..self.caps.len() {
            let free: Vec<usize> = (0..n).filter(|&a| !taken[a]).collect();
            let group: Vec<usize> = self.combos[j].iter().map(|&p| free[p]).collect();
            for &a in &group {
                taken[a] = true;
                self.labels[a] = j;
            }
            self.groups[j] = group;
        }
    }

    /// Moves to the next assignment; `false` after the last one.
    fn advance(&mut self) -> bool {
        let n = self.labels.len();
        let mut free = n;
        let pool: Vec<usize> = self
            .caps
            .iter()
            .map(|&c| {
                let p = free;
                free -= c;
                p
            })
            .collect();
        for j in (0..self.caps.len()).rev() {
            if next_combination(&mut self.combos[j], pool[j]) {
                for k in j + 1..self.caps.len() {
                    self.combos[k] = (0..self.caps[k]).collect();
                }
                self.rebuild_from(j);
                return true;
            }
        }
        false
    }

    fn assignment(&self) -> Assignment {
        Assignment::new(&self.caps, self.groups.clone()).expect("cursor yields valid assignments")
    }
}

fn unrank_combination(n: usize, k: usize, mut q: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut x = 0;
    for i in 0..k {
        loop {
            let with_x = binomial(n - x - 1, k - i - 1);
            if q < with_x {
                break;
            }
            q -= with_x;
            x += 1;
        }
        out.push(x);
        x += 1;
    }
    out
}

fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    for i in (0..k).rev() {
        if combo[i] < n - k + i {
            combo[i] += 1;
            for t in i + 1..k {
                combo[t] = combo[t - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Every assignment of `inst` in enumeration order, refusing above `limit`.
pub struct Assignments {
    cursor: Option<Cursor>,
    total: u64,
}

impl Assignments {
    pub fn total(&self) -> u64 {
        self.total
    }
}

impl Iterator for Assignments {
    type Item = Assignment;

    fn next(&mut self) -> Option<Assignment> {
        let cursor = self.cursor.as_mut()?;
        let out = cursor.assignment();
        if !cursor.advance() {
            self.cursor = None;
        }
        Some(out)
    }
}

pub fn enumerate_assignments(inst: &Instance, limit: u64) -> Result<Assignments, OracleError> {
    let total = checked_count(inst.capacities(), limit)?;
    Ok(Assignments {
        cursor: Some(Cursor::at_rank(inst.capacities(), 0)),
        total,
    })
}

/// Scans ranks `[start, end)` and returns the first whose groups satisfy `pred`.
fn scan_range<F>(caps: &[usize], start: u64, end: u64, pred: &F) -> Option<Assignment>
where
    F: Fn(&[Vec<usize>], &[usize]) -> bool,
{
    let mut cursor = Cursor::at_rank(caps, start);
    for rank in start..end {
        if pred(&cursor.groups, &cursor.labels) {
            return Some(cursor.assignment());
        }
        if rank + 1 < end {
            cursor.advance();
        }
    }
    None
}

/// First assignment in enumeration order whose `(groups, labels)` satisfy `pred`.
pub fn find_first<F>(
    inst: &Instance,
    limit: u64,
    strategy: Strategy,
    pred: F,
) -> Result<Option<Assignment>, OracleError>
where
    F: Fn(&[Vec<usize>], &[usize]) -> bool + Sync,
{
    let total = checked_count(inst.capacities(), limit)?;
    let caps = inst.capacities();
    let chunks = total.div_ceil(CHUNK);
    let run_chunk = |c: u64| scan_range(caps, c * CHUNK, ((c + 1) * CHUNK).min(total), &pred);
    Ok(match strategy {
        #[cfg(feature = "parallel")]
        Strategy::Parallel if chunks > 1 => {
            use rayon::prelude::*;
            (0..chunks).into_par_iter().find_map_first(run_chunk)
        }
        _ => (0..chunks).find_map(run_chunk),
    })
}

/// Every assignment satisfying `pred`, in enumeration order.
pub fn find_all<F>(inst: &Instance, limit: u64, strategy: Strategy, pred: F) -> Result<Vec<Assignment>, OracleError>
where
    F: Fn(&[Vec<usize>], &[usize]) -> bool + Sync,
{
    let total = checked_count(inst.capacities(), limit)?;
    let caps = inst.capacities();
    let chunks = total.div_ceil(CHUNK);
    let run_chunk = |c: u64| {
        let (start, end) = (c * CHUNK, ((c + 1) * CHUNK).min(total));
        let mut cursor = Cursor::at_rank(caps, start);
        let mut found = Vec::new();
        for rank in start..end {
            if pred(&cursor.groups, &cursor.labels) {
                found.push(cursor.assignment());
            }
            if rank + 1 < end {
                cursor.advance();
            }
        }
        found
    };
    let per_chunk: Vec<Vec<Assignment>> = match strategy {
        #[cfg(feature = "parallel")]
        Strategy::Parallel if chunks > 1 => {
            use rayon::prelude::*;
            (0..chunks).into_par_iter().map(run_chunk).collect()
        }
        _ => (0..chunks).map(run_chunk).collect(),
    };
    Ok(per_chunk.into_iter().flatten().collect())
}

type Predicate = Box<dyn Fn(&[Vec<usize>], &[usize]) -> bool + Sync>;

fn notion_predicate(inst: &Instance, notion: Notion) -> Predicate {
    match EnvyEngine::scaled(inst) {
        Some(engine) => Box::new(move |g: &[Vec<usize>], l: &[usize]| engine.holds(g, l, notion)),
        None => {
            let engine = EnvyEngine::exact(inst);
            Box::new(move |g: &[Vec<usize>], l: &[usize]| engine.holds(g, l, notion))
        }
    }
}

/// First assignment satisfying `notion`, or `None` when none exists.
pub fn decide(
    inst: &Instance,
    notion: Notion,
    limit: u64,
    strategy: Strategy,
) -> Result<Option<Assignment>, OracleError> {
    let pred = notion_predicate(inst, notion);
    find_first(inst, limit, strategy, |g, l| pred(g, l))
}

pub fn decide_ef(inst: &Instance) -> Result<Option<Assignment>, OracleError> {
    decide(inst, Notion::Ef, DEFAULT_LIMIT, Strategy::default())
}

pub fn decide_pef(inst: &Instance) -> Result<Option<Assignment>, OracleError> {
    decide(inst, Notion::Pef, DEFAULT_LIMIT, Strategy::default())
}

/// Every assignment satisfying `notion`, in enumeration order.
pub fn all_witnesses(inst: &Instance, notion: Notion, limit: u64) -> Result<Vec<Assignment>, OracleError> {
    let pred = notion_predicate(inst, notion);
    find_all(inst, limit, Strategy::default(), |g, l| pred(g, l))
}

fn ensure_size(g: &Graph, max: usize) -> Result<(), OracleError> {
    let vertices = g.vertex_count();
    if vertices > max {
        Err(OracleError::TooLarge { vertices, max })
    } else {
        Ok(())
    }
}

/// Branch on the lowest free vertex: leave it exposed or match it to a later neighbour.
fn best_matching(
    g: &Graph,
    mate: &mut Vec<Option<usize>>,
    v: usize,
    size: usize,
    best: &mut (usize, Vec<Option<usize>>),
) {
    let n = g.vertex_count();
    let v = (v..n).find(|&u| mate[u].is_none()).unwrap_or(n);
    if !best.1.is_empty() && size + (n - v) / 2 <= best.0 {
        return;
    }
    if v >= n {
        if size > best.0 || best.1.is_empty() {
            *best = (size, mate.clone());
        }
        return;
    }
    for &w in g.neighbors(v) {
        if w > v && mate[w].is_none() {
            mate[v] = Some(w);
            mate[w] = Some(v);
            best_matching(g, mate, v + 1, size + 1, best);
            mate[v] = None;
            mate[w] = None;
        }
    }
    // Leave v exposed, marking it so later steps skip it.
    mate[v] = Some(v);
    best_matching(g, mate, v + 1, size, best);
    mate[v] = None;
}

fn brute_matching_of(g: &Graph) -> (usize, Vec<Option<usize>>) {
    let mut mate = vec![None; g.vertex_count()];
    let mut best = (0, Vec::new());
    best_matching(g, &mut mate, 0, 0, &mut best);
    let mates = best.1.iter().enumerate().map(|(v, m)| m.filter(|&w| w != v)).collect();
    (best.0, mates)
}

/// Maximum matching by exhaustive branching.
pub fn brute_max_matching(g: &Graph) -> Result<Matching, OracleError> {
    ensure_size(g, MAX_MATCHING_VERTICES)?;
    let (_, mates) = brute_matching_of(g);
    let edges: Vec<(usize, usize)> = mates
        .iter()
        .enumerate()
        .filter_map(|(v, m)| m.filter(|&w| v < w).map(|w| (v, w)))
        .collect();
    Ok(Matching::from_edges(g, &edges).expect("branching builds a matching"))
}

/// Vertices some maximum matching leaves exposed: those whose deletion keeps the optimum.
pub fn brute_missed_set(g: &Graph) -> Result<Vec<usize>, OracleError> {
    ensure_size(g, MAX_MATCHING_VERTICES)?;
    let n = g.vertex_count();
    let nu = brute_matching_of(g).0;
    Ok((0..n)
        .filter(|&v| {
            let edges: Vec<(usize, usize)> = g.edges().into_iter().filter(|&(a, b)| a != v && b != v).collect();
            let without = Graph::new(n, &edges).expect("subgraph of a simple graph");
            brute_matching_of(&without).0 == nu
        })
        .collect())
}

/// Some `k`-clique, scanning vertex sets in lexicographic order.
pub fn brute_clique(g: &Graph, k: usize) -> Result<Option<Vec<usize>>, OracleError> {
    ensure_size(g, MAX_CLIQUE_VERTICES)?;
    let n = g.vertex_count();
    if k > n {
        return Ok(None);
    }
    let mut combo: Vec<usize> = (0..k).collect();
    loop {
        let clique = combo
            .iter()
            .enumerate()
            .all(|(x, &u)| combo[x + 1..].iter().all(|&w| g.has_edge(u, w)));
        if clique {
            return Ok(Some(combo));
        }
        if !next_combination(&mut combo, n) {
            return Ok(None);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::Rational;

    fn zero_instance(caps: Vec<usize>) -> Instance {
        let n: usize = caps.iter().sum();
        let m = caps.len();
        Instance::new(
            caps,
            vec![vec![Rational::zero(); m]; n],
            vec![vec![Rational::zero(); n]; n],
        )
        .unwrap()
    }

    #[test]
    fn counts() {
        assert_eq!(assignment_count(&[5, 5]), BigUint::from(252u32));
        assert_eq!(assignment_count(&[3, 3, 3]), BigUint::from(1680u32));
        assert_eq!(assignment_count(&[1, 1]), BigUint::from(2u32));
    }

    #[test]
    fn enumeration_is_lexicographic_and_complete() {
        let inst = zero_instance(vec![1, 2, 1]);
        let all: Vec<Vec<Vec<usize>>> = enumerate_assignments(&inst, DEFAULT_LIMIT)
            .unwrap()
            .map(|x| x.groups().to_vec())
            .collect();
        assert_eq!(all.len(), 12);
        assert_eq!(all[0], vec![vec![0], vec![1, 2], vec![3]]);
        assert_eq!(all[1], vec![vec![0], vec![1, 3], vec![2]]);
        assert_eq!(all[11], vec![vec![3], vec![1, 2], vec![0]]);
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(sorted, all);
        sorted.dedup();
        assert_eq!(sorted.len(), 12);
    }

    #[test]
    fn unranking_matches_iteration() {
        let caps = [2, 3, 2];
        let mut cursor = Cursor::at_rank(&caps, 0);
        let total = assignment_count(&caps).to_u64().unwrap();
        for rank in 0..total {
            let direct = Cursor::at_rank(&caps, rank);
            assert_eq!(direct.groups, cursor.groups, "rank {rank}");
            assert_eq!(direct.labels, cursor.labels);
            assert_eq!(cursor.advance(), rank + 1 < total);
        }
    }

    #[test]
    fn limit_refusal_reports_exact_count() {
        let inst = zero_instance(vec![5, 5]);
        assert_eq!(
            decide(&inst, Notion::Ef, 100, Strategy::Sequential).unwrap_err(),
            OracleError::LimitExceeded {
                count: BigUint::from(252u32),
                limit: 100
            }
        );
    }

    #[test]
    fn zero_instance_first_assignment_is_witness() {
        let inst = zero_instance(vec![2, 2]);
        let x = decide_ef(&inst).unwrap().unwrap();
        assert_eq!(x.groups(), &[vec![0, 1], vec![2, 3]]);
    }

    #[test]
    fn strategies_agree() {
        let inst = zero_instance(vec![3, 3, 3]);
        let pred = |g: &[Vec<usize>], _: &[usize]| g[0] == vec![2, 5, 8] && g[1][0] == 3;
        let seq = find_first(&inst, DEFAULT_LIMIT, Strategy::Sequential, pred).unwrap();
        let par = find_first(&inst, DEFAULT_LIMIT, Strategy::Parallel, pred).unwrap();
        assert_eq!(seq, par);
        assert_eq!(seq.unwrap().groups(), &[vec![2, 5, 8], vec![3, 4, 6], vec![0, 1, 7]]);
        let all = find_all(&inst, DEFAULT_LIMIT, Strategy::Parallel, pred).unwrap();
        assert_eq!(all.len(), 3);
    }

    #[test]
    fn brute_matching_examples() {
        let k3 = Graph::complete(3);
        assert_eq!(brute_max_matching(&k3).unwrap().size(), 1);
        assert_eq!(brute_missed_set(&k3).unwrap(), vec![0, 1, 2]);
        let p3 = Graph::path(3);
        assert_eq!(brute_max_matching(&p3).unwrap().size(), 1);
        assert_eq!(brute_missed_set(&p3).unwrap(), vec![0, 2]);
        let empty = Graph::empty(4);
        assert_eq!(brute_max_matching(&empty).unwrap().size(), 0);
        assert_eq!(brute_missed_set(&empty).unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(brute_max_matching(&Graph::cycle(9)).unwrap().size(), 4);
        assert!(matches!(
            brute_max_matching(&Graph::empty(17)),
            Err(OracleError::TooLarge { vertices: 17, max: 16 })
        ));
    }

    #[test]
    fn brute_clique_examples() {
        assert!(brute_clique(&Graph::complete(4), 3).unwrap().is_some());
        assert_eq!(brute_clique(&Graph::cycle(4), 3).unwrap(), None);
        assert_eq!(brute_clique(&Graph::empty(3), 1).unwrap(), Some(vec![0]));
        assert_eq!(brute_clique(&Graph::complete(2), 3).unwrap(), None);
    }
}
