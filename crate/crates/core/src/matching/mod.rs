//! Graph matching machinery: blossom maximum matching, the Gallai-Edmonds
//! decomposition, and the bipartite Hall-surplus tools used by the capacity-2 solver.

mod bipartite;
mod blossom;
mod gallai_edmonds;
mod graph;

pub use bipartite::{
    bipartite_max_matching, find_near_tight_set, find_tight_set, surplus, surplus_by_flow, surplus_exhaustive, Bigraph,
    BipartiteError, BipartiteMatching, NearTight, Surplus, EXHAUSTIVE_SURPLUS_LIMIT,
};
pub use blossom::max_matching;
pub use gallai_edmonds::{
    gallai_edmonds, gallai_edmonds_with_matching, verify_tutte, Component, GeDecomposition, TutteError,
};
pub use graph::{Graph, GraphError, GraphFile, Matching};
