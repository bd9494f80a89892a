//! Gallai-Edmonds decomposition `(D, A, C)` and Tutte-set verification.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::blossom::BlossomSearch;
use super::graph::{Graph, GraphError, Matching};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub vertices: Vec<usize>,
    pub odd: bool,
}

/// `D` = vertices missed by some maximum matching, `A` = neighbours of `D` outside `D`
/// (the Tutte set), `C` = everything else. `components` lists the connected components
/// of `G \ A` by smallest vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeDecomposition {
    pub d: Vec<usize>,
    pub a: Vec<usize>,
    pub c: Vec<usize>,
    pub components: Vec<Component>,
}

impl GeDecomposition {
    pub fn tutte_set(&self) -> &[usize] {
        &self.a
    }

    pub fn odd_components(&self) -> impl Iterator<Item = &Component> {
        self.components.iter().filter(|c| c.odd)
    }

    pub fn even_components(&self) -> impl Iterator<Item = &Component> {
        self.components.iter().filter(|c| !c.odd)
    }

    /// `odd components of G \ A` minus `|A|`; equals the number of vertices any maximum
    /// matching leaves uncovered.
    pub fn deficiency(&self) -> isize {
        self.odd_components().count() as isize - self.a.len() as isize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TutteError {
    #[error("matching has {found} edges but the maximum is {maximum}")]
    NotMaximum { found: usize, maximum: usize },
    #[error("matching does not fit the graph: {0}")]
    Invalid(#[from] GraphError),
}

/// Decomposition together with the maximum matching it was derived from.
pub fn gallai_edmonds_with_matching(g: &Graph) -> (GeDecomposition, Matching) {
    let n = g.vertex_count();
    let mut search = BlossomSearch::new(g);
    search.run();
    let in_d: Vec<bool> = (0..n).map(|v| search.missed_by_some_maximum(v)).collect();
    let matching = search.matching();

    let mut in_a = vec![false; n];
    for v in (0..n).filter(|&v| in_d[v]) {
        for &w in g.neighbors(v) {
            if !in_d[w] {
                in_a[w] = true;
            }
        }
    }
    let d: Vec<usize> = (0..n).filter(|&v| in_d[v]).collect();
    let a: Vec<usize> = (0..n).filter(|&v| in_a[v]).collect();
    let c: Vec<usize> = (0..n).filter(|&v| !in_d[v] && !in_a[v]).collect();
    let components = g
        .components_without(&in_a)
        .into_iter()
        .map(|vertices| Component {
            odd: vertices.len() % 2 == 1,
            vertices,
        })
        .collect();
    (GeDecomposition { d, a, c, components }, matching)
}

pub fn gallai_edmonds(g: &Graph) -> GeDecomposition {
    gallai_edmonds_with_matching(g).0
}

/// Checks that `m` splits along `decomp`: a near-perfect matching inside every odd
/// component of `G \ A`, a perfect matching inside every even component, and each
/// vertex of `A` matched into a distinct odd component.
pub fn verify_tutte(g: &Graph, decomp: &GeDecomposition, m: &Matching) -> Result<bool, TutteError> {
    let n = g.vertex_count();
    let m = Matching::from_edges(g, &m.edges())?;
    let maximum = super::blossom::max_matching(g).size();
    if m.size() != maximum {
        return Err(TutteError::NotMaximum {
            found: m.size(),
            maximum,
        });
    }

    const IN_A: usize = usize::MAX;
    let mut comp_of = vec![IN_A; n];
    for (idx, comp) in decomp.components.iter().enumerate() {
        for &v in &comp.vertices {
            comp_of[v] = idx;
        }
    }
    // Components and A must cover every vertex exactly once.
    let covered = decomp.components.iter().map(|c| c.vertices.len()).sum::<usize>() + decomp.a.len();
    if covered != n || decomp.a.iter().any(|&v| comp_of[v] != IN_A) {
        return Ok(false);
    }

    let mut internal_cover = vec![0usize; decomp.components.len()];
    let mut a_hits = vec![0usize; decomp.components.len()];
    for (u, v) in m.edges() {
        match (comp_of[u], comp_of[v]) {
            (IN_A, IN_A) => return Ok(false),
            (IN_A, c) | (c, IN_A) => {
                if !decomp.components[c].odd {
                    return Ok(false);
                }
                a_hits[c] += 1;
            }
            (cu, cv) if cu == cv => internal_cover[cu] += 2,
            _ => return Ok(false),
        }
    }
    if decomp.a.iter().any(|&v| !m.is_matched(v)) {
        return Ok(false);
    }
    for (idx, comp) in decomp.components.iter().enumerate() {
        let size = comp.vertices.len();
        let ok = if comp.odd {
            internal_cover[idx] == size - 1 && a_hits[idx] <= 1
        } else {
            internal_cover[idx] == size
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::max_matching;

    #[test]
    fn path_on_three_vertices() {
        let g = Graph::path(3);
        let ge = gallai_edmonds(&g);
        assert_eq!(ge.d, vec![0, 2]);
        assert_eq!(ge.a, vec![1]);
        assert!(ge.c.is_empty());
        assert_eq!(ge.components.len(), 2);
        assert!(ge.components.iter().all(|c| c.odd && c.vertices.len() == 1));
        let m = Matching::from_edges(&g, &[(0, 1)]).unwrap();
        assert_eq!(verify_tutte(&g, &ge, &m), Ok(true));
    }

    #[test]
    fn triangle() {
        let g = Graph::complete(3);
        let ge = gallai_edmonds(&g);
        assert_eq!(ge.d, vec![0, 1, 2]);
        assert!(ge.a.is_empty() && ge.c.is_empty());
        assert_eq!(
            ge.components,
            vec![Component {
                vertices: vec![0, 1, 2],
                odd: true
            }]
        );
        for e in [(0, 1), (0, 2), (1, 2)] {
            let m = Matching::from_edges(&g, &[e]).unwrap();
            assert_eq!(verify_tutte(&g, &ge, &m), Ok(true));
        }
    }

    #[test]
    fn single_edge() {
        let g = Graph::path(2);
        let ge = gallai_edmonds(&g);
        assert!(ge.d.is_empty() && ge.a.is_empty());
        assert_eq!(ge.c, vec![0, 1]);
        assert_eq!(ge.components.len(), 1);
        assert!(!ge.components[0].odd);
        assert_eq!(verify_tutte(&g, &ge, &max_matching(&g)), Ok(true));
    }

    #[test]
    fn rejects_non_maximum_matching() {
        let g = Graph::path(4);
        let ge = gallai_edmonds(&g);
        let m = Matching::from_edges(&g, &[(1, 2)]).unwrap();
        assert_eq!(
            verify_tutte(&g, &ge, &m),
            Err(TutteError::NotMaximum { found: 1, maximum: 2 })
        );
    }

    #[test]
    fn wrong_tutte_set_is_rejected() {
        // A star has no perfect matching, so calling it one even component must fail.
        let star = Graph::new(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let bogus = GeDecomposition {
            d: vec![0, 1, 2, 3],
            a: vec![],
            c: vec![],
            components: vec![Component {
                vertices: vec![0, 1, 2, 3],
                odd: false,
            }],
        };
        assert_eq!(verify_tutte(&star, &bogus, &max_matching(&star)), Ok(false));
        let ge = gallai_edmonds(&star);
        assert_eq!(verify_tutte(&star, &ge, &max_matching(&star)), Ok(true));
    }

    #[test]
    fn berge_tutte_on_star() {
        let star = Graph::new(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let ge = gallai_edmonds(&star);
        assert_eq!(ge.a, vec![0]);
        let unmatched = 5 - 2 * max_matching(&star).size();
        assert_eq!(ge.deficiency(), unmatched as isize);
    }
}
