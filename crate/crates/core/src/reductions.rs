//! Clique instances and their reductions to EF and PEF existence on two resources.

use thiserror::Error;

use crate::matching::Graph;
use crate::model::Instance;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("clique size k={k} must lie in 1..={vertices}")]
    InvalidK { k: usize, vertices: usize },
    #[error("reduction needs k > |V|/2 (k={k}, |V|={vertices}); pad the instance first")]
    NeedsPadding { k: usize, vertices: usize },
}

/// Does `graph` contain a clique on `k` vertices?
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliqueInstance {
    graph: Graph,
    k: usize,
}

impl CliqueInstance {
    pub fn new(graph: Graph, k: usize) -> Result<Self, ReductionError> {
        let vertices = graph.vertex_count();
        if k == 0 || k > vertices {
            return Err(ReductionError::InvalidK { k, vertices });
        }
        Ok(CliqueInstance { graph, k })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.graph.degree(v)
    }

    /// Whether the reductions accept this instance as is.
    pub fn is_large_k(&self) -> bool {
        2 * self.k > self.vertex_count()
    }

    fn require_large_k(&self) -> Result<(), ReductionError> {
        if self.is_large_k() {
            Ok(())
        } else {
            Err(ReductionError::NeedsPadding {
                k: self.k,
                vertices: self.vertex_count(),
            })
        }
    }
}

/// Ensures `k > |V|/2` by adding `|V|` dummy vertices that form a clique and are
/// adjacent to every original vertex, with target `k + |V|`. The maximum clique grows
/// by exactly `|V|`, so the answer is unchanged.
pub fn pad_clique(ci: &CliqueInstance) -> CliqueInstance {
    if ci.is_large_k() {
        return ci.clone();
    }
    let v = ci.vertex_count();
    let mut edges = ci.graph.edges();
    for d in v..2 * v {
        for u in 0..d {
            edges.push((u, d));
        }
    }
    let graph = Graph::new(2 * v, &edges).expect("padding adds only new edges");
    CliqueInstance { graph, k: ci.k + v }
}

fn int(x: usize) -> Rational {
    Rational::from_integer(x as i64)
}

/// `4k` agents on two resources of capacity `2k`, with an EF assignment iff the graph
/// has a `k`-clique.
///
/// Agent `i < |V|` is the vertex agent `a_i`: value `2k - d_i - 1` for resource 0 and
/// externality 1 to graph neighbours. Agent `|V| + i` is its twin `a'_i`; the two have
/// externality 1 to each other, so a clique agent on resource 1 collects `k` from its
/// twin and `k - 1` friends. The last `4k - 2|V|` agents value resource 0 at 1.
pub fn reduce_clique_to_ef(ci: &CliqueInstance) -> Result<Instance, ReductionError> {
    ci.require_large_k()?;
    let v = ci.vertex_count();
    let k = ci.k;
    let n = 4 * k;
    let zero = Rational::zero();
    let mut values = vec![vec![zero.clone(), zero.clone()]; n];
    let mut ext = vec![vec![zero; n]; n];
    for i in 0..v {
        values[i][0] = int(2 * k - ci.degree(i) - 1);
        for &j in ci.graph.neighbors(i) {
            ext[i][j] = Rational::one();
        }
        ext[i][v + i] = Rational::one();
        ext[v + i][i] = Rational::one();
    }
    for row in values.iter_mut().skip(2 * v) {
        row[0] = Rational::one();
    }
    let inst = Instance::new(vec![2 * k, 2 * k], values, ext).expect("construction satisfies the model");
    debug_assert_eq!(inst.agent_count(), 4 * k);
    Ok(inst)
}

/// `2k + |V|` agents on capacities `[k + |V|, k]`, with a PEF assignment iff the graph
/// has a `k`-clique.
///
/// Every agent values resource 0 at 1. Agent `i < |V|` is `a_i`, with externality 1 to
/// graph neighbours and to the first `2k - d_i - 2` agents of the block `N_1`, which
/// holds the last `2k` agents; members of `N_1` have externality 1 to each other.
///
/// With `2k - d_i - 2` a clique agent on resource 1 (external `k - 1`) gains exactly
/// `k - 1` by swapping to resource 0, so it does not Pareto-envy; one more `N_1` friend
/// would make every clique placement fail.
pub fn reduce_clique_to_pef(ci: &CliqueInstance) -> Result<Instance, ReductionError> {
    ci.require_large_k()?;
    let v = ci.vertex_count();
    let k = ci.k;
    let n = 2 * k + v;
    let zero = Rational::zero();
    let values = vec![vec![Rational::one(), zero.clone()]; n];
    let mut ext = vec![vec![zero; n]; n];
    for i in 0..v {
        for &j in ci.graph.neighbors(i) {
            ext[i][j] = Rational::one();
        }
        for t in 0..2 * k - ci.degree(i) - 2 {
            ext[i][v + t] = Rational::one();
        }
    }
    for a in v..n {
        for b in v..n {
            if a != b {
                ext[a][b] = Rational::one();
            }
        }
    }
    let inst = Instance::new(vec![k + v, k], values, ext).expect("construction satisfies the model");
    debug_assert_eq!(inst.agent_count(), 2 * k + v);
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{brute_clique, decide_ef, decide_pef};

    fn ci(g: Graph, k: usize) -> CliqueInstance {
        CliqueInstance::new(g, k).unwrap()
    }

    #[test]
    fn rejects_bad_k() {
        assert_eq!(
            CliqueInstance::new(Graph::empty(3), 0),
            Err(ReductionError::InvalidK { k: 0, vertices: 3 })
        );
        assert!(CliqueInstance::new(Graph::empty(3), 4).is_err());
        assert_eq!(
            reduce_clique_to_ef(&ci(Graph::cycle(4), 2)),
            Err(ReductionError::NeedsPadding { k: 2, vertices: 4 })
        );
    }

    #[test]
    fn padding_examples() {
        let padded = pad_clique(&ci(Graph::cycle(4), 2));
        assert_eq!(padded.vertex_count(), 8);
        assert_eq!(padded.k(), 6);
        assert!(brute_clique(padded.graph(), 6).unwrap().is_some());
        assert!(brute_clique(padded.graph(), 7).unwrap().is_none());
        let k4 = ci(Graph::complete(4), 3);
        assert_eq!(pad_clique(&k4), k4);
        let single = ci(Graph::empty(1), 1);
        assert_eq!(pad_clique(&single), single);
    }

    #[test]
    fn ef_reduction_examples() {
        let yes = reduce_clique_to_ef(&ci(Graph::complete(4), 3)).unwrap();
        assert_eq!(yes.agent_count(), 12);
        assert_eq!(yes.capacities(), &[6, 6]);
        assert!(decide_ef(&yes).unwrap().is_some());
        let no = reduce_clique_to_ef(&ci(Graph::empty(4), 3)).unwrap();
        assert!(decide_ef(&no).unwrap().is_none());
        let k2 = reduce_clique_to_ef(&ci(Graph::complete(2), 2)).unwrap();
        assert_eq!(k2.agent_count(), 8);
        assert!(decide_ef(&k2).unwrap().is_some());
    }

    #[test]
    fn pef_reduction_examples() {
        let yes = reduce_clique_to_pef(&ci(Graph::complete(4), 3)).unwrap();
        assert_eq!(yes.agent_count(), 10);
        assert_eq!(yes.capacities(), &[7, 3]);
        assert!(decide_pef(&yes).unwrap().is_some());
        let no = reduce_clique_to_pef(&ci(Graph::empty(4), 3)).unwrap();
        assert!(decide_pef(&no).unwrap().is_none());
        let single = reduce_clique_to_pef(&ci(Graph::empty(1), 1)).unwrap();
        assert!(decide_pef(&single).unwrap().is_some());
    }
}
