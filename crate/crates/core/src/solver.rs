//! Pareto-envy-free assignments for dorm sharing with capacity 2.
//!
//! Step 1 computes the Gallai-Edmonds decomposition and a maximum matching. Matched
//! pairs inside even components take the lowest free dorms; pairs inside each odd
//! component take the dorms least preferred by that component's leftover agent, who
//! joins `L`. The remaining agents of the Tutte set `A` and of `L` are then placed
//! round by round on the bipartite graph `G*` between them.

use std::cmp::Reverse;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matching::{
    bipartite_max_matching, find_near_tight_set, find_tight_set, gallai_edmonds_with_matching, surplus_by_flow,
    Bigraph, BipartiteMatching,
};
use crate::model::{Assignment, Instance};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pair {
    pub agents: [usize; 2],
    pub dorm: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OddComponentRecord {
    pub vertices: Vec<usize>,
    /// The agent left without a partner inside the component; it joins `L`.
    pub leftover: usize,
    pub pairs: Vec<Pair>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: usize,
    pub case: u8,
    /// `min |N(S)| - |S|` on `G*` when the round starts; `None` when `A` is exhausted.
    pub surplus_at_start: Option<i64>,
    pub pairs: Vec<Pair>,
    /// `S` for cases 2 and 3.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<usize>>,
    /// The agent of `N(S)` left unmatched in case 3, whose least preferred dorms are used.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub designated: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SolveTrace {
    pub tutte_set: Vec<usize>,
    pub matching: Vec<(usize, usize)>,
    pub unmatched: Vec<usize>,
    pub even_pairs: Vec<Pair>,
    pub odd_components: Vec<OddComponentRecord>,
    pub rounds: Vec<RoundRecord>,
}

impl SolveTrace {
    /// Every pair placed, in placement order.
    pub fn all_pairs(&self) -> impl Iterator<Item = &Pair> {
        self.even_pairs
            .iter()
            .chain(self.odd_components.iter().flat_map(|c| &c.pairs))
            .chain(self.rounds.iter().flat_map(|r| &r.pairs))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("instance is not dorm-sharing (uniform capacity, symmetric 0/1 externalities)")]
    NotDormSharing,
    #[error("solver needs capacity 2 for every dorm, found {0}")]
    Capacity(usize),
    #[error("internal invariant breached: {message}")]
    InvariantBreach { message: String, trace: Box<SolveTrace> },
}

/// Runs the algorithm and returns a PEF assignment with its trace.
pub fn solve_pef_cap2(inst: &Instance) -> Result<(Assignment, SolveTrace), SolverError> {
    let profile = inst.profile();
    let graph = profile.externality_graph.as_ref().ok_or(SolverError::NotDormSharing)?;
    match profile.uniform_capacity {
        Some(2) => {}
        Some(c) => return Err(SolverError::Capacity(c)),
        None => return Err(SolverError::NotDormSharing),
    }
    let mut run = Run::new(inst);
    let outcome = run.solve(graph);
    match outcome {
        Ok(()) => {
            let groups = run
                .groups
                .into_iter()
                .map(|g| g.expect("every dorm filled"))
                .map(|[a, b]| vec![a, b])
                .collect();
            let x = Assignment::for_instance(inst, groups).map_err(|e| SolverError::InvariantBreach {
                message: e.to_string(),
                trace: Box::new(run.trace.clone()),
            })?;
            Ok((x, run.trace))
        }
        Err(message) => Err(SolverError::InvariantBreach {
            message,
            trace: Box::new(run.trace),
        }),
    }
}

struct Run<'a> {
    inst: &'a Instance,
    groups: Vec<Option<[usize; 2]>>,
    trace: SolveTrace,
}

impl<'a> Run<'a> {
    fn new(inst: &'a Instance) -> Self {
        Run {
            inst,
            groups: vec![None; inst.resource_count()],
            trace: SolveTrace::default(),
        }
    }

    fn free_dorms(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.groups.len()).filter(|&d| self.groups[d].is_none())
    }

    fn lowest_free(&self) -> Result<usize, String> {
        self.free_dorms().next().ok_or_else(|| "no free dorm left".to_string())
    }

    /// Free dorms from most to least preferred: descending value, lower index first.
    fn preference(&self, agent: usize) -> Vec<usize> {
        let mut dorms: Vec<usize> = self.free_dorms().collect();
        dorms.sort_by_key(|&d| (Reverse(self.inst.value(agent, d).clone()), d));
        dorms
    }

    /// The `k` least preferred free dorms of `agent`, least preferred first.
    fn least_preferred(&self, agent: usize, k: usize) -> Result<Vec<usize>, String> {
        let pref = self.preference(agent);
        if pref.len() < k {
            return Err(format!("agent {agent} needs {k} free dorms, {} left", pref.len()));
        }
        Ok(pref.into_iter().rev().take(k).collect())
    }

    fn place(&mut self, a: usize, b: usize, dorm: usize) -> Pair {
        let agents = if a < b { [a, b] } else { [b, a] };
        self.groups[dorm] = Some(agents);
        Pair { agents, dorm }
    }

    fn solve(&mut self, graph: &crate::matching::Graph) -> Result<(), String> {
        let (ge, m) = gallai_edmonds_with_matching(graph);
        self.trace.tutte_set = ge.a.clone();
        self.trace.matching = m.edges();
        let mut in_a = vec![false; graph.vertex_count()];
        for &v in &ge.a {
            in_a[v] = true;
        }

        for comp in ge.even_components() {
            for &u in &comp.vertices {
                match m.mate(u) {
                    Some(w) if !in_a[w] => {
                        if u < w {
                            let dorm = self.lowest_free()?;
                            let pair = self.place(u, w, dorm);
                            self.trace.even_pairs.push(pair);
                        }
                    }
                    _ => return Err(format!("even component vertex {u} is not matched inside it")),
                }
            }
        }

        let mut l_set = Vec::new();
        for comp in ge.odd_components() {
            let leftovers: Vec<usize> = comp
                .vertices
                .iter()
                .copied()
                .filter(|&u| m.mate(u).is_none_or(|w| in_a[w]))
                .collect();
            let &[leftover] = leftovers.as_slice() else {
                return Err(format!(
                    "odd component {:?} has {} vertices without an inside partner",
                    comp.vertices,
                    leftovers.len()
                ));
            };
            let inner: Vec<(usize, usize)> = comp
                .vertices
                .iter()
                .filter_map(|&u| m.mate(u).filter(|&w| u < w && !in_a[w]).map(|w| (u, w)))
                .collect();
            let dorms = self.least_preferred(leftover, inner.len())?;
            let pairs = inner
                .into_iter()
                .zip(dorms)
                .map(|((u, w), d)| self.place(u, w, d))
                .collect();
            self.trace.odd_components.push(OddComponentRecord {
                vertices: comp.vertices.clone(),
                leftover,
                pairs,
            });
            l_set.push(leftover);
        }
        l_set.sort_unstable();
        self.trace.unmatched = l_set.clone();

        self.rounds(graph, ge.a.clone(), l_set)
    }

    fn rounds(
        &mut self,
        graph: &crate::matching::Graph,
        mut a_rem: Vec<usize>,
        mut l_rem: Vec<usize>,
    ) -> Result<(), String> {
        let mut round = 0;
        while !a_rem.is_empty() || !l_rem.is_empty() {
            round += 1;
            let edges: Vec<(usize, usize)> = a_rem
                .iter()
                .enumerate()
                .flat_map(|(ai, &a)| {
                    l_rem
                        .iter()
                        .enumerate()
                        .filter(move |&(_, &l)| graph.has_edge(a, l))
                        .map(move |(li, _)| (ai, li))
                })
                .collect();
            let b = Bigraph::new(a_rem.len(), l_rem.len(), &edges).expect("edges built in range");
            let surplus = surplus_by_flow(&b).value;
            if surplus.is_some_and(|s| s < 0) {
                return Err(format!(
                    "round {round}: Hall condition fails on G* (surplus {})",
                    surplus.unwrap_or_default()
                ));
            }
            let record = self.one_round(round, &b, surplus, &a_rem, &l_rem)?;
            let placed: Vec<usize> = record.pairs.iter().flat_map(|p| p.agents).collect();
            a_rem.retain(|v| !placed.contains(v));
            l_rem.retain(|v| !placed.contains(v));
            self.trace.rounds.push(record);
        }
        Ok(())
    }

    fn one_round(
        &mut self,
        round: usize,
        b: &Bigraph,
        surplus: Option<i64>,
        a_rem: &[usize],
        l_rem: &[usize],
    ) -> Result<RoundRecord, String> {
        let record = |case, pairs, witness, designated| RoundRecord {
            round,
            case,
            surplus_at_start: surplus,
            pairs,
            witness,
            designated,
        };

        // Case 1: two agents of L without any G* edge.
        let isolated: Vec<usize> = (0..l_rem.len())
            .filter(|&li| b.right_neighbors(li).is_empty())
            .take(2)
            .collect();
        if let [x, y] = isolated[..] {
            let dorm = self.lowest_free()?;
            let pair = self.place(l_rem[x], l_rem[y], dorm);
            return Ok(record(1, vec![pair], None, None));
        }

        let m: BipartiteMatching = bipartite_max_matching(b);
        if m.size() != a_rem.len() {
            return Err(format!("round {round}: G* matching does not cover A"));
        }

        // Case 2: a tight set S, placed along M restricted to S.
        let tight = find_tight_set(b, &m).map_err(|e| e.to_string())?;
        if let Some(set) = tight {
            let mut pairs = Vec::with_capacity(set.len());
            for &ai in &set {
                let li = m.left_mate(ai).expect("left side saturated");
                let dorm = self.lowest_free()?;
                pairs.push(self.place(a_rem[ai], l_rem[li], dorm));
            }
            let witness = set.iter().map(|&ai| a_rem[ai]).collect();
            return Ok(record(2, pairs, Some(witness), None));
        }
        if surplus == Some(0) {
            return Err(format!("round {round}: surplus 0 but no tight set found"));
        }

        // Case 3: |S| = |N(S)| - 1; pairs take i*'s least preferred dorms.
        let near = find_near_tight_set(b, &m).map_err(|e| e.to_string())?;
        if let Some(near) = near {
            let designated = l_rem[near.i_star];
            let dorms = self.least_preferred(designated, near.set.len())?;
            let mut pairs = Vec::with_capacity(near.set.len());
            for (&ai, dorm) in near.set.iter().zip(dorms) {
                let li = m.left_mate(ai).expect("left side saturated");
                pairs.push(self.place(a_rem[ai], l_rem[li], dorm));
            }
            let witness = near.set.iter().map(|&ai| a_rem[ai]).collect();
            return Ok(record(3, pairs, Some(witness), Some(designated)));
        }
        if surplus == Some(1) {
            return Err(format!("round {round}: surplus 1 but no near-tight set found"));
        }

        // Case 4: two agents of L with the same favourite free dorm.
        let top: Vec<usize> = l_rem.iter().map(|&l| self.preference(l)[0]).collect();
        for x in 0..l_rem.len() {
            for y in x + 1..l_rem.len() {
                if top[x] == top[y] {
                    let pair = self.place(l_rem[x], l_rem[y], top[x]);
                    return Ok(record(4, vec![pair], None, None));
                }
            }
        }
        Err(format!("round {round}: no case applies"))
    }
}
