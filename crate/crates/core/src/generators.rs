//! Canned instances with their reference assignments, and seeded random instances.
//!
//! Canned instances use 0-based agents and resources: the text's agent `p` is index
//! `p - 1`.

use std::fmt;
use std::str::FromStr;

use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use thiserror::Error;

use crate::matching::Graph;
use crate::model::{Assignment, Instance};
use crate::rational::Rational;

/// Name of the pseudorandom scheme behind every seeded generator. Changing how seeds
/// map to instances must bump the version.
pub const RANDOM_SCHEME: &str = "chacha8-seed_from_u64/v1";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeneratorError {
    #[error("unknown instance name {0:?}")]
    UnknownName(String),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NamedInstance {
    /// Two dorms of capacity 5 with no PEF assignment.
    NoPefCap5,
    /// Three dorms of capacity 3 with no PEF assignment.
    NoPefCap3,
    /// A PEF assignment that fails the Pareto-PROP conditions for agent 4 (index 3).
    PefNotPprop,
}

impl NamedInstance {
    pub const ALL: [NamedInstance; 3] = [
        NamedInstance::NoPefCap5,
        NamedInstance::NoPefCap3,
        NamedInstance::PefNotPprop,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NamedInstance::NoPefCap5 => "no-pef-cap5",
            NamedInstance::NoPefCap3 => "no-pef-cap3",
            NamedInstance::PefNotPprop => "pef-not-pprop",
        }
    }
}

impl fmt::Display for NamedInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NamedInstance {
    type Err = GeneratorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        NamedInstance::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| GeneratorError::UnknownName(s.to_string()))
    }
}

fn ints<R: AsRef<[i64]>>(rows: &[R]) -> Vec<Vec<Rational>> {
    rows.iter()
        .map(|row| row.as_ref().iter().map(|&x| Rational::from_integer(x)).collect())
        .collect()
}

fn canned(n: usize, caps: Vec<usize>, edges: &[(usize, usize)], values: Vec<Vec<Rational>>) -> Instance {
    let g = Graph::new(n, edges).expect("canned graph is simple");
    Instance::with_graph(caps, values, &g).expect("canned instance is valid")
}

/// The named instance and, where one is analysed, its reference assignment.
pub fn named_instance(which: NamedInstance) -> (Instance, Option<Assignment>) {
    match which {
        NamedInstance::NoPefCap5 => {
            let mut edges: Vec<(usize, usize)> = (0..5).flat_map(|a| (a + 1..5).map(move |b| (a, b))).collect();
            edges.extend((0..5).map(|i| (i, i + 5)));
            let rows: Vec<[i64; 2]> = (0..10).map(|i| if i < 7 { [1, 0] } else { [0, 1] }).collect();
            let values = ints(&rows);
            (canned(10, vec![5, 5], &edges, values), None)
        }
        NamedInstance::NoPefCap3 => {
            let edges = [(0, 1), (2, 3), (4, 5), (6, 7)];
            let values = ints(&[[1, 2, 3]; 9]);
            (canned(9, vec![3, 3, 3], &edges, values), None)
        }
        NamedInstance::PefNotPprop => {
            let mut edges: Vec<(usize, usize)> = (0..4).flat_map(|a| (a + 1..4).map(move |b| (a, b))).collect();
            edges.extend([(4, 5), (6, 7), (6, 8), (7, 8)]);
            let values = ints(&[[1, 2, 3]; 9]);
            let inst = canned(9, vec![3, 3, 3], &edges, values);
            let x = Assignment::for_instance(&inst, vec![vec![0, 1, 2], vec![3, 4, 5], vec![6, 7, 8]])
                .expect("reference assignment fits");
            (inst, Some(x))
        }
    }
}

/// Families whose reference assignment sits on or near a proportionality bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TightKind {
    /// `c = [1, 3]`, agent 0 values agent 3 at `T`; EF yet agent 0 gets nothing.
    EfNotProp,
    /// One resource of capacity `(c-1)m^2 + 1`, the rest capacity `c`.
    Prop4Tight,
    /// `m` resources of capacity `c`.
    Prop5Tight,
}

impl TightKind {
    pub const ALL: [TightKind; 3] = [TightKind::EfNotProp, TightKind::Prop4Tight, TightKind::Prop5Tight];

    pub fn name(self) -> &'static str {
        match self {
            TightKind::EfNotProp => "ef-not-prop",
            TightKind::Prop4Tight => "prop4-tight",
            TightKind::Prop5Tight => "prop5-tight",
        }
    }
}

impl fmt::Display for TightKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TightKind {
    type Err = GeneratorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TightKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| GeneratorError::UnknownName(s.to_string()))
    }
}

/// Consecutive blocks: resource `j` gets the next `c_j` agents.
fn block_assignment(caps: &[usize]) -> Vec<Vec<usize>> {
    let mut next = 0;
    caps.iter()
        .map(|&c| {
            let group = (next..next + c).collect();
            next += c;
            group
        })
        .collect()
}

/// The family member and the assignment analysed for it. Agent 0 is the one measured;
/// it is the only agent with nonzero data, so the assignment is EF for everyone else.
/// `c` and `m` are ignored for `EfNotProp`; `t` is used only there.
pub fn tight_instance(
    kind: TightKind,
    c: usize,
    m: usize,
    t: &Rational,
) -> Result<(Instance, Assignment), GeneratorError> {
    let caps = match kind {
        TightKind::EfNotProp => {
            if !t.is_positive() {
                return Err(GeneratorError::OutOfRange(format!("T must be positive, got {t}")));
            }
            vec![1, 3]
        }
        TightKind::Prop4Tight | TightKind::Prop5Tight => {
            if c < 2 || m < 2 {
                return Err(GeneratorError::OutOfRange(format!(
                    "{kind} needs c >= 2 and m >= 2, got c={c}, m={m}"
                )));
            }
            if kind == TightKind::Prop4Tight {
                let mut caps = vec![(c - 1) * m * m + 1];
                caps.extend(std::iter::repeat_n(c, m - 1));
                caps
            } else {
                vec![c; m]
            }
        }
    };
    let n: usize = caps.iter().sum();
    let groups = block_assignment(&caps);
    let zero = Rational::zero();
    let mut values = vec![vec![zero.clone(); caps.len()]; n];
    let mut ext = vec![vec![zero; n]; n];
    let first = &groups[0];
    match kind {
        TightKind::EfNotProp => {
            // Agent 3 sits alone on resource 0, so the blocks are reversed.
            ext[0][3] = t.clone();
            let inst = Instance::new(caps.clone(), values, ext).expect("family instance is valid");
            let x = Assignment::for_instance(&inst, vec![vec![3], vec![0, 1, 2]]).expect("fits");
            return Ok((inst, x));
        }
        TightKind::Prop4Tight => {
            let m2 = Rational::from_integer((m * m) as i64);
            for l in 1..n {
                ext[0][l] = if first.contains(&l) {
                    Rational::one()
                } else {
                    m2.clone()
                };
            }
        }
        TightKind::Prop5Tight => {
            values[0][0] = Rational::from_integer(c as i64 - 1);
            for l in 1..n {
                if !first.contains(&l) {
                    ext[0][l] = Rational::one();
                }
            }
        }
    }
    let inst = Instance::new(caps, values, ext).expect("family instance is valid");
    let x = Assignment::for_instance(&inst, groups).expect("blocks fill capacities");
    Ok((inst, x))
}

fn probability_parts(p: &Rational) -> Result<(u64, u64), GeneratorError> {
    if p.is_negative() || *p > Rational::one() {
        return Err(GeneratorError::OutOfRange(format!(
            "edge probability {p} outside [0, 1]"
        )));
    }
    let num = p.numer().to_u64();
    let den = p.denom().to_u64();
    match (num, den) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(GeneratorError::OutOfRange(format!(
            "edge probability {p} is too fine-grained"
        ))),
    }
}

/// Dorm-sharing instance with `n = c * m` agents. Each pair `i < j`, in lexicographic
/// order, is an edge when a draw from `0..q` falls below `p` (for `edge_prob = p/q`);
/// then each `v_ij` is drawn uniformly from `0..=value_max`, row by row.
pub fn random_dorm(
    seed: u64,
    m: usize,
    c: usize,
    edge_prob: &Rational,
    value_max: u64,
) -> Result<Instance, GeneratorError> {
    if m == 0 || c == 0 {
        return Err(GeneratorError::OutOfRange(format!(
            "need m >= 1 and c >= 1, got m={m}, c={c}"
        )));
    }
    let (num, den) = probability_parts(edge_prob)?;
    let n = c * m;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_range(0..den) < num {
                edges.push((i, j));
            }
        }
    }
    let values = (0..n)
        .map(|_| {
            (0..m)
                .map(|_| Rational::from_integer(rng.gen_range(0..=value_max) as i64))
                .collect()
        })
        .collect();
    let g = Graph::new(n, &edges).expect("pairs are distinct");
    Ok(Instance::with_graph(vec![c; m], values, &g).expect("generated instance is valid"))
}

/// Metadata recorded next to a generated instance.
pub fn random_dorm_meta(seed: u64, m: usize, c: usize, edge_prob: &Rational, value_max: u64) -> serde_json::Value {
    json!({
        "generator": "random-dorm",
        "scheme": RANDOM_SCHEME,
        "seed": seed,
        "m": m,
        "c": c,
        "p": edge_prob,
        "value_max": value_max,
    })
}

/// General instance on the given capacities: each `v_ij` and each off-diagonal `e_il`
/// is `k / denom` with `k` uniform in `0..=max_numer`, drawn values first.
pub fn random_instance(
    seed: u64,
    capacities: &[usize],
    max_numer: u64,
    denom: u64,
) -> Result<Instance, GeneratorError> {
    if denom == 0 || capacities.is_empty() || capacities.contains(&0) {
        return Err(GeneratorError::OutOfRange(
            "need positive capacities and a positive denominator".to_string(),
        ));
    }
    let n: usize = capacities.iter().sum();
    let m = capacities.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| Rational::new(rng.gen_range(0..=max_numer) as i64, denom as i64);
    let values = (0..n).map(|_| (0..m).map(|_| draw(&mut rng)).collect()).collect();
    let ext = (0..n)
        .map(|i| {
            (0..n)
                .map(|l| if l == i { Rational::zero() } else { draw(&mut rng) })
                .collect()
        })
        .collect();
    Instance::new(capacities.to_vec(), values, ext).map_err(|e| GeneratorError::OutOfRange(e.to_string()))
}

/// Uniformly random assignment: shuffle the agents, then cut into capacity blocks.
pub fn random_assignment(seed: u64, capacities: &[usize]) -> Assignment {
    let n: usize = capacities.iter().sum();
    let mut agents: Vec<usize> = (0..n).collect();
    agents.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let groups = block_assignment(capacities)
        .into_iter()
        .map(|block| block.into_iter().map(|p| agents[p]).collect())
        .collect();
    Assignment::new(capacities, groups).expect("blocks fill capacities")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canned_fingerprints() {
        let (a, x) = named_instance(NamedInstance::NoPefCap5);
        assert_eq!((a.agent_count(), a.capacities()), (10, &[5, 5][..]));
        assert_eq!(a.externality_graph().unwrap().edge_count(), 15);
        assert!(a.profile().is_dorm_sharing() && x.is_none());
        assert_eq!(a.value(6, 0), &Rational::one());
        assert_eq!(a.value(7, 1), &Rational::one());

        let (b, _) = named_instance(NamedInstance::NoPefCap3);
        assert_eq!((b.agent_count(), b.capacities()), (9, &[3, 3, 3][..]));
        let g = b.externality_graph().unwrap();
        assert_eq!(g.edge_count(), 4);
        assert_eq!(g.degree(8), 0);
        assert_eq!(b.value(4, 2), &Rational::from_integer(3));

        let (c, x) = named_instance(NamedInstance::PefNotPprop);
        assert_eq!(c.externality_graph().unwrap().edge_count(), 10);
        assert_eq!(x.unwrap().groups()[1], vec![3, 4, 5]);
    }

    #[test]
    fn names_round_trip() {
        for p in NamedInstance::ALL {
            assert_eq!(p.name().parse::<NamedInstance>().unwrap(), p);
        }
        for k in TightKind::ALL {
            assert_eq!(k.name().parse::<TightKind>().unwrap(), k);
        }
        assert!(matches!(
            "example-9".parse::<NamedInstance>(),
            Err(GeneratorError::UnknownName(_))
        ));
    }

    #[test]
    fn tight_family_shapes() {
        let t = Rational::from_integer(3);
        let (inst, _) = tight_instance(TightKind::Prop4Tight, 2, 2, &t).unwrap();
        assert_eq!(inst.capacities(), &[5, 2]);
        let (inst, _) = tight_instance(TightKind::Prop5Tight, 2, 3, &t).unwrap();
        assert_eq!(inst.capacities(), &[2, 2, 2]);
        assert!(tight_instance(TightKind::Prop5Tight, 1, 3, &t).is_err());
        assert!(tight_instance(TightKind::EfNotProp, 0, 0, &Rational::zero()).is_err());
    }

    #[test]
    fn random_dorm_extremes_and_determinism() {
        let zero = random_dorm(1, 2, 2, &Rational::zero(), 5).unwrap();
        assert_eq!(zero.externality_graph().unwrap().edge_count(), 0);
        let full = random_dorm(1, 2, 2, &Rational::one(), 5).unwrap();
        assert_eq!(full.externality_graph().unwrap().edge_count(), 6);
        let half = Rational::new(1, 2);
        assert_eq!(
            random_dorm(7, 3, 2, &half, 9).unwrap(),
            random_dorm(7, 3, 2, &half, 9).unwrap()
        );
        assert!(random_dorm(1, 2, 2, &Rational::new(3, 2), 5).is_err());
        assert!(random_dorm(1, 0, 2, &half, 5).is_err());
    }

    #[test]
    fn random_assignment_is_valid_and_seeded() {
        let caps = [2, 3, 1];
        let x = random_assignment(3, &caps);
        assert_eq!(x, random_assignment(3, &caps));
        assert_eq!(x.groups().iter().map(Vec::len).collect::<Vec<_>>(), vec![2, 3, 1]);
    }
}
