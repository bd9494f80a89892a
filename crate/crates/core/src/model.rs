//! Instances, assignments and their JSON file formats.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matching::{Graph, GraphError, GraphFile};
use crate::rational::{denominator_lcm, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("capacity sum {sum} \u{2260} n={n}")]
    CapacitySum { sum: usize, n: usize },
    #[error("resource {0} has zero capacity")]
    ZeroCapacity(usize),
    #[error("instance needs at least one agent and one resource")]
    Empty,
    #[error("negative value v[{agent}][{resource}] = {value}")]
    NegativeValue {
        agent: usize,
        resource: usize,
        value: Rational,
    },
    #[error("negative externality e[{agent}][{other}] = {value}")]
    NegativeExternality {
        agent: usize,
        other: usize,
        value: Rational,
    },
    #[error("self-externality e[{agent}][{agent}] = {value} must be 0")]
    SelfExternality { agent: usize, value: Rational },
    #[error("exactly one of \"externalities\" and \"graph\" must be given")]
    ExternalitySource,
    #[error("externality graph: {0}")]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AssignmentError {
    #[error("assignment has {found} groups but the instance has {expected} resources")]
    GroupCount { found: usize, expected: usize },
    #[error("resource {resource} holds {found} agents but has capacity {capacity}")]
    Capacity {
        resource: usize,
        found: usize,
        capacity: usize,
    },
    #[error("agent {0} is out of range")]
    AgentOutOfRange(usize),
    #[error("agent {0} appears more than once")]
    DuplicateAgent(usize),
}

/// Derived structure: uniform capacity and, when externalities are symmetric 0/1, the
/// friendship graph. The instance is dorm-sharing when both are present.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DormProfile {
    pub uniform_capacity: Option<usize>,
    pub externality_graph: Option<Graph>,
}

impl DormProfile {
    pub fn is_dorm_sharing(&self) -> bool {
        self.uniform_capacity.is_some() && self.externality_graph.is_some()
    }

    fn derive(capacities: &[usize], externalities: &[Vec<Rational>]) -> Self {
        let uniform_capacity = capacities
            .first()
            .copied()
            .filter(|&c| capacities.iter().all(|&x| x == c));
        let n = externalities.len();
        let one = Rational::one();
        let binary_symmetric = (0..n).all(|i| {
            (0..n).all(|j| {
                let e = &externalities[i][j];
                (e.is_zero() || *e == one) && *e == externalities[j][i]
            })
        });
        let externality_graph = binary_symmetric.then(|| {
            let edges: Vec<_> = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .filter(|&(i, j)| !externalities[i][j].is_zero())
                .collect();
            Graph::new(n, &edges).expect("symmetric 0/1 matrix with zero diagonal is a simple graph")
        });
        DormProfile {
            uniform_capacity,
            externality_graph,
        }
    }
}

/// A validated resource-sharing instance: `n` agents, `m` resources with capacities
/// summing to `n`, internal values `v[i][j] >= 0` and externalities `e[i][l] >= 0`
/// with a zero diagonal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    capacities: Vec<usize>,
    values: Vec<Vec<Rational>>,
    externalities: Vec<Vec<Rational>>,
    profile: DormProfile,
}

impl Instance {
    pub fn new(
        capacities: Vec<usize>,
        values: Vec<Vec<Rational>>,
        externalities: Vec<Vec<Rational>>,
    ) -> Result<Self, InstanceError> {
        let n = values.len();
        let m = capacities.len();
        if n == 0 || m == 0 {
            return Err(InstanceError::Empty);
        }
        if let Some(i) = values.iter().position(|row| row.len() != m) {
            return Err(InstanceError::Dimension(format!(
                "values row {i} has {} entries, expected m={m}",
                values[i].len()
            )));
        }
        if externalities.len() != n {
            return Err(InstanceError::Dimension(format!(
                "externalities has {} rows, expected n={n}",
                externalities.len()
            )));
        }
        if let Some(i) = externalities.iter().position(|row| row.len() != n) {
            return Err(InstanceError::Dimension(format!(
                "externalities row {i} has {} entries, expected n={n}",
                externalities[i].len()
            )));
        }
        if let Some(j) = capacities.iter().position(|&c| c == 0) {
            return Err(InstanceError::ZeroCapacity(j));
        }
        let sum: usize = capacities.iter().sum();
        if sum != n {
            return Err(InstanceError::CapacitySum { sum, n });
        }
        for (i, row) in values.iter().enumerate() {
            if let Some(j) = row.iter().position(Rational::is_negative) {
                return Err(InstanceError::NegativeValue {
                    agent: i,
                    resource: j,
                    value: row[j].clone(),
                });
            }
        }
        for (i, row) in externalities.iter().enumerate() {
            if !row[i].is_zero() {
                return Err(InstanceError::SelfExternality {
                    agent: i,
                    value: row[i].clone(),
                });
            }
            if let Some(l) = row.iter().position(Rational::is_negative) {
                return Err(InstanceError::NegativeExternality {
                    agent: i,
                    other: l,
                    value: row[l].clone(),
                });
            }
        }
        let profile = DormProfile::derive(&capacities, &externalities);
        Ok(Instance {
            capacities,
            values,
            externalities,
            profile,
        })
    }

    /// Instance whose externalities are the 0/1 adjacency matrix of `graph`.
    pub fn with_graph(
        capacities: Vec<usize>,
        values: Vec<Vec<Rational>>,
        graph: &Graph,
    ) -> Result<Self, InstanceError> {
        let n = graph.vertex_count();
        let mut ext = vec![vec![Rational::zero(); n]; n];
        for (u, v) in graph.edges() {
            ext[u][v] = Rational::one();
            ext[v][u] = Rational::one();
        }
        Instance::new(capacities, values, ext)
    }

    pub fn agent_count(&self) -> usize {
        self.values.len()
    }

    pub fn resource_count(&self) -> usize {
        self.capacities.len()
    }

    pub fn capacities(&self) -> &[usize] {
        &self.capacities
    }

    pub fn value(&self, agent: usize, resource: usize) -> &Rational {
        &self.values[agent][resource]
    }

    pub fn externality(&self, agent: usize, other: usize) -> &Rational {
        &self.externalities[agent][other]
    }

    pub fn values(&self) -> &[Vec<Rational>] {
        &self.values
    }

    pub fn externalities(&self) -> &[Vec<Rational>] {
        &self.externalities
    }

    pub fn profile(&self) -> &DormProfile {
        &self.profile
    }

    pub fn externality_graph(&self) -> Option<&Graph> {
        self.profile.externality_graph.as_ref()
    }

    /// Each agent's row of values and externalities scaled by the row's denominator LCM,
    /// as `i128`. Comparisons made by one agent are unchanged by positive scaling, so
    /// envy checks can run on this view. `None` if some entry does not fit.
    #[allow(clippy::type_complexity)]
    pub fn integer_rows(&self) -> Option<(Vec<Vec<i128>>, Vec<Vec<i128>>)> {
        let mut values = Vec::with_capacity(self.agent_count());
        let mut ext = Vec::with_capacity(self.agent_count());
        for i in 0..self.agent_count() {
            let scale = denominator_lcm(self.values[i].iter().chain(&self.externalities[i]));
            let conv = |r: &Rational| -> Option<i128> {
                let scaled: BigInt = r.numer() * (&scale / r.denom());
                scaled.to_i128()
            };
            values.push(self.values[i].iter().map(conv).collect::<Option<Vec<_>>>()?);
            ext.push(self.externalities[i].iter().map(conv).collect::<Option<Vec<_>>>()?);
        }
        // Sums of up to n entries must not overflow either.
        let n = self.agent_count() as i128 + self.resource_count() as i128;
        let bound = i128::MAX / n.max(1);
        let fits = values.iter().chain(&ext).all(|row| row.iter().all(|&x| x <= bound));
        fits.then_some((values, ext))
    }
}

/// A full assignment: `groups[j]` lists the agents on resource `j` (sorted), filling
/// every resource exactly to capacity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    groups: Vec<Vec<usize>>,
    resource_of: Vec<usize>,
}

impl Assignment {
    pub fn new(capacities: &[usize], groups: Vec<Vec<usize>>) -> Result<Self, AssignmentError> {
        if groups.len() != capacities.len() {
            return Err(AssignmentError::GroupCount {
                found: groups.len(),
                expected: capacities.len(),
            });
        }
        let n: usize = capacities.iter().sum();
        let mut resource_of = vec![usize::MAX; n];
        let mut groups = groups;
        for (j, group) in groups.iter_mut().enumerate() {
            group.sort_unstable();
            for &i in group.iter() {
                if i >= n {
                    return Err(AssignmentError::AgentOutOfRange(i));
                }
                if resource_of[i] != usize::MAX {
                    return Err(AssignmentError::DuplicateAgent(i));
                }
                resource_of[i] = j;
            }
            if group.len() != capacities[j] {
                return Err(AssignmentError::Capacity {
                    resource: j,
                    found: group.len(),
                    capacity: capacities[j],
                });
            }
        }
        Ok(Assignment { groups, resource_of })
    }

    pub fn for_instance(inst: &Instance, groups: Vec<Vec<usize>>) -> Result<Self, AssignmentError> {
        Assignment::new(inst.capacities(), groups)
    }

    /// Builds from a per-agent resource label vector.
    pub fn from_labels(capacities: &[usize], labels: &[usize]) -> Result<Self, AssignmentError> {
        let mut groups = vec![Vec::new(); capacities.len()];
        for (i, &j) in labels.iter().enumerate() {
            if j >= capacities.len() {
                return Err(AssignmentError::GroupCount {
                    found: j + 1,
                    expected: capacities.len(),
                });
            }
            groups[j].push(i);
        }
        Assignment::new(capacities, groups)
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn agent_count(&self) -> usize {
        self.resource_of.len()
    }

    /// `r_i(X)`.
    pub fn resource_of(&self, agent: usize) -> usize {
        self.resource_of[agent]
    }

    pub fn labels(&self) -> &[usize] {
        &self.resource_of
    }

    /// `S_i(X)`: the agents sharing `agent`'s resource.
    pub fn mates(&self, agent: usize) -> impl Iterator<Item = usize> + '_ {
        self.groups[self.resource_of[agent]]
            .iter()
            .copied()
            .filter(move |&l| l != agent)
    }

    /// `X^{i<->j}`: agents `i` and `j` trade places. Same-resource swaps return `X`.
    pub fn swap(&self, i: usize, j: usize) -> Result<Assignment, AssignmentError> {
        let n = self.agent_count();
        for a in [i, j] {
            if a >= n {
                return Err(AssignmentError::AgentOutOfRange(a));
            }
        }
        let (ri, rj) = (self.resource_of[i], self.resource_of[j]);
        let mut out = self.clone();
        if ri == rj {
            return Ok(out);
        }
        let replace = |group: &mut Vec<usize>, from: usize, to: usize| {
            let pos = group.iter().position(|&x| x == from).expect("agent in its group");
            group[pos] = to;
            group.sort_unstable();
        };
        replace(&mut out.groups[ri], i, j);
        replace(&mut out.groups[rj], j, i);
        out.resource_of[i] = rj;
        out.resource_of[j] = ri;
        Ok(out)
    }
}

/// Raw instance as read from JSON, before validation.
///
/// `{ "n", "m", "capacities", "values", "externalities" | "graph" }`; rationals are
/// integers or `"p/q"` strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub n: usize,
    pub m: usize,
    pub capacities: Vec<usize>,
    pub values: Vec<Vec<Rational>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub externalities: Option<Vec<Vec<Rational>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphEdges>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphEdges {
    pub edges: Vec<[usize; 2]>,
}

/// Checks the raw data against the model and derives the dorm profile.
pub fn validate_instance(raw: &InstanceFile) -> Result<Instance, InstanceError> {
    if raw.capacities.len() != raw.m {
        return Err(InstanceError::Dimension(format!(
            "capacities has {} entries, expected m={}",
            raw.capacities.len(),
            raw.m
        )));
    }
    if raw.values.len() != raw.n {
        return Err(InstanceError::Dimension(format!(
            "values has {} rows, expected n={}",
            raw.values.len(),
            raw.n
        )));
    }
    match (&raw.externalities, &raw.graph) {
        (Some(ext), None) => Instance::new(raw.capacities.clone(), raw.values.clone(), ext.clone()),
        (None, Some(graph)) => {
            let file = GraphFile {
                n: raw.n,
                edges: graph.edges.clone(),
            };
            let g = Graph::try_from(&file)?;
            Instance::with_graph(raw.capacities.clone(), raw.values.clone(), &g)
        }
        _ => Err(InstanceError::ExternalitySource),
    }
}

impl From<&Instance> for InstanceFile {
    /// Uses the compact graph form whenever externalities are symmetric 0/1.
    fn from(inst: &Instance) -> Self {
        let (externalities, graph) = match inst.externality_graph() {
            Some(g) => (
                None,
                Some(GraphEdges {
                    edges: g.edges().into_iter().map(|(u, v)| [u, v]).collect(),
                }),
            ),
            None => (Some(inst.externalities.clone()), None),
        };
        InstanceFile {
            n: inst.agent_count(),
            m: inst.resource_count(),
            capacities: inst.capacities.clone(),
            values: inst.values.clone(),
            externalities,
            graph,
            meta: None,
        }
    }
}

/// `{ "assignment": [[agents on resource 0], [agents on resource 1], ...] }`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssignmentFile {
    pub assignment: Vec<Vec<usize>>,
}

impl From<&Assignment> for AssignmentFile {
    fn from(x: &Assignment) -> Self {
        AssignmentFile {
            assignment: x.groups.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zeros(rows: usize, cols: usize) -> Vec<Vec<Rational>> {
        vec![vec![Rational::zero(); cols]; rows]
    }

    #[test]
    fn all_zero_instance_is_valid() {
        let inst = Instance::new(vec![2, 2], zeros(4, 2), zeros(4, 4)).unwrap();
        assert!(inst.profile().is_dorm_sharing());
        assert_eq!(inst.externality_graph().unwrap().edge_count(), 0);
    }

    #[test]
    fn capacity_sum_error() {
        let err = Instance::new(vec![1, 2], zeros(4, 2), zeros(4, 4)).unwrap_err();
        assert_eq!(err, InstanceError::CapacitySum { sum: 3, n: 4 });
        assert_eq!(err.to_string(), "capacity sum 3 \u{2260} n=4");
    }

    #[test]
    fn distinct_validation_errors() {
        let mut v = zeros(2, 2);
        v[1][0] = Rational::from_integer(-1);
        assert!(matches!(
            Instance::new(vec![1, 1], v, zeros(2, 2)),
            Err(InstanceError::NegativeValue {
                agent: 1,
                resource: 0,
                ..
            })
        ));
        let mut e = zeros(2, 2);
        e[0][0] = Rational::one();
        assert!(matches!(
            Instance::new(vec![1, 1], zeros(2, 2), e),
            Err(InstanceError::SelfExternality { agent: 0, .. })
        ));
        let mut e = zeros(2, 2);
        e[0][1] = Rational::new(-1, 2);
        assert!(matches!(
            Instance::new(vec![1, 1], zeros(2, 2), e),
            Err(InstanceError::NegativeExternality { agent: 0, other: 1, .. })
        ));
        assert!(matches!(
            Instance::new(vec![1, 1], zeros(2, 3), zeros(2, 2)),
            Err(InstanceError::Dimension(_))
        ));
        assert_eq!(
            Instance::new(vec![2, 0], zeros(2, 2), zeros(2, 2)),
            Err(InstanceError::ZeroCapacity(1))
        );
    }

    #[test]
    fn asymmetric_externalities_are_not_dorm_sharing() {
        let mut e = zeros(2, 2);
        e[0][1] = Rational::one();
        let inst = Instance::new(vec![1, 1], zeros(2, 2), e).unwrap();
        assert!(inst.externality_graph().is_none());
        assert!(!inst.profile().is_dorm_sharing());
        assert_eq!(inst.profile().uniform_capacity, Some(1));
    }

    #[test]
    fn parses_graph_form() {
        let json = r#"{"n":4,"m":2,"capacities":[2,2],
            "values":[[1,0],["1/2",0],[0,1],[0,"3/4"]],
            "graph":{"edges":[[0,1],[2,3]]}}"#;
        let raw: InstanceFile = serde_json::from_str(json).unwrap();
        let inst = validate_instance(&raw).unwrap();
        assert_eq!(inst.externality(1, 0), &Rational::one());
        assert_eq!(inst.value(3, 1), &Rational::new(3, 4));
        let back = InstanceFile::from(&inst);
        assert_eq!(validate_instance(&back).unwrap(), inst);
    }

    #[test]
    fn rejects_both_or_neither_externality_forms() {
        let raw = InstanceFile {
            n: 2,
            m: 1,
            capacities: vec![2],
            values: zeros(2, 1),
            externalities: None,
            graph: None,
            meta: None,
        };
        assert_eq!(validate_instance(&raw), Err(InstanceError::ExternalitySource));
    }

    #[test]
    fn assignment_validation_and_swap() {
        let caps = [2, 2];
        let x = Assignment::new(&caps, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let y = x.swap(0, 2).unwrap();
        assert_eq!(y.groups(), &[vec![1, 2], vec![0, 3]]);
        assert_eq!(y.swap(0, 2).unwrap(), x);
        assert_eq!(x.swap(1, 1).unwrap(), x);
        assert_eq!(x.swap(0, 1).unwrap(), x);
        assert_eq!(x.swap(0, 9), Err(AssignmentError::AgentOutOfRange(9)));
        assert!(matches!(
            Assignment::new(&caps, vec![vec![0], vec![1, 2, 3]]),
            Err(AssignmentError::Capacity { resource: 0, .. })
        ));
        assert_eq!(
            Assignment::new(&caps, vec![vec![0, 0], vec![2, 3]]),
            Err(AssignmentError::DuplicateAgent(0))
        );
    }

    #[test]
    fn integer_rows_scale_per_agent() {
        let v = vec![
            vec![Rational::new(1, 2), Rational::new(1, 3)],
            vec![Rational::one(), Rational::zero()],
        ];
        let mut e = zeros(2, 2);
        e[0][1] = Rational::new(1, 4);
        let inst = Instance::new(vec![1, 1], v, e).unwrap();
        let (vals, ext) = inst.integer_rows().unwrap();
        assert_eq!(vals[0], vec![6, 4]);
        assert_eq!(ext[0], vec![0, 3]);
        assert_eq!(vals[1], vec![1, 0]);
    }
}
