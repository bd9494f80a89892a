//! Envy-freeness, Pareto-envy-freeness, proportionality and the Pareto-PROP conditions.

use std::fmt;
use std::ops::{Add, Sub};

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Assignment, Instance};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FairnessError {
    #[error("proportional share needs at least two agents")]
    Degenerate,
    #[error("instance is not dorm-sharing (uniform capacity, symmetric 0/1 externalities)")]
    NotDormSharing,
    #[error("assignment does not fit the instance: {0}")]
    Mismatch(String),
    #[error("agent {0} is out of range")]
    AgentOutOfRange(usize),
}

/// The two swap-based notions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Notion {
    Ef,
    Pef,
}

impl fmt::Display for Notion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Notion::Ef => "EF",
            Notion::Pef => "PEF",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Utility {
    pub internal: Rational,
    pub external: Rational,
    pub total: Rational,
}

pub(crate) fn ensure_fits(inst: &Instance, x: &Assignment) -> Result<(), FairnessError> {
    let caps = inst.capacities();
    if x.groups().len() != caps.len() {
        return Err(FairnessError::Mismatch(format!(
            "{} groups for {} resources",
            x.groups().len(),
            caps.len()
        )));
    }
    if let Some(j) = (0..caps.len()).find(|&j| x.groups()[j].len() != caps[j]) {
        return Err(FairnessError::Mismatch(format!(
            "resource {j} holds {} agents, capacity {}",
            x.groups()[j].len(),
            caps[j]
        )));
    }
    Ok(())
}

/// `(v_i(X), e_i(X), u_i(X))`.
pub fn utility(inst: &Instance, x: &Assignment, i: usize) -> Result<Utility, FairnessError> {
    ensure_fits(inst, x)?;
    if i >= inst.agent_count() {
        return Err(FairnessError::AgentOutOfRange(i));
    }
    Ok(utility_unchecked(inst, x, i))
}

fn utility_unchecked(inst: &Instance, x: &Assignment, i: usize) -> Utility {
    let internal = inst.value(i, x.resource_of(i)).clone();
    let external: Rational = x.mates(i).map(|l| inst.externality(i, l)).sum();
    let total = &internal + &external;
    Utility {
        internal,
        external,
        total,
    }
}

/// Number type the envy engine runs on: exact rationals, or per-agent scaled integers.
pub(crate) trait Scalar: Clone + Ord + Zero + Add<Output = Self> + Sub<Output = Self> {}

impl Scalar for i128 {}
impl Scalar for Rational {}

/// Swap-envy evaluation with per-agent group sums, `O(n)` per agent.
///
/// For `i` on `r` and `j` on `s != r`, after the swap `i` gets `v_is` internally and
/// `E_i(s) - e_ij` externally, where `E_i(s)` sums `e_il` over the current group `s`.
pub(crate) struct EnvyEngine<T> {
    values: Vec<Vec<T>>,
    ext: Vec<Vec<T>>,
}

impl EnvyEngine<Rational> {
    pub(crate) fn exact(inst: &Instance) -> Self {
        EnvyEngine {
            values: inst.values().to_vec(),
            ext: inst.externalities().to_vec(),
        }
    }
}

impl EnvyEngine<i128> {
    pub(crate) fn scaled(inst: &Instance) -> Option<Self> {
        inst.integer_rows().map(|(values, ext)| EnvyEngine { values, ext })
    }
}

impl<T: Scalar> EnvyEngine<T> {
    /// Calls `visit(i, j)` for every violating pair in lexicographic order until it
    /// returns `false`.
    pub(crate) fn scan(
        &self,
        groups: &[Vec<usize>],
        labels: &[usize],
        notion: Notion,
        mut visit: impl FnMut(usize, usize) -> bool,
    ) {
        let mut group_ext = vec![T::zero(); groups.len()];
        for (i, &r) in labels.iter().enumerate() {
            let row = &self.ext[i];
            for (sum, group) in group_ext.iter_mut().zip(groups) {
                *sum = group.iter().fold(T::zero(), |acc, &l| acc + row[l].clone());
            }
            let own_v = &self.values[i][r];
            let own_e = &group_ext[r];
            let own_u = own_v.clone() + own_e.clone();
            for (j, &s) in labels.iter().enumerate() {
                if s == r {
                    continue;
                }
                let v = &self.values[i][s];
                let e = group_ext[s].clone() - row[j].clone();
                let violated = match notion {
                    Notion::Ef => v.clone() + e > own_u,
                    Notion::Pef => v > own_v && e > *own_e,
                };
                if violated && !visit(i, j) {
                    return;
                }
            }
        }
    }

    pub(crate) fn holds(&self, groups: &[Vec<usize>], labels: &[usize], notion: Notion) -> bool {
        let mut ok = true;
        self.scan(groups, labels, notion, |_, _| {
            ok = false;
            false
        });
        ok
    }

    fn violations(&self, x: &Assignment, notion: Notion) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        self.scan(x.groups(), x.labels(), notion, |i, j| {
            out.push((i, j));
            true
        });
        out
    }
}

/// `u_i(X) / PROP_i`, or `Satisfied` when `PROP_i = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PropRatio {
    Satisfied,
    Ratio(Rational),
}

impl PropRatio {
    /// The ratio with `Satisfied` read as 1.
    pub fn effective(&self) -> Rational {
        match self {
            PropRatio::Satisfied => Rational::one(),
            PropRatio::Ratio(r) => r.clone(),
        }
    }
}

impl fmt::Display for PropRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropRatio::Satisfied => f.write_str("satisfied"),
            PropRatio::Ratio(r) => write!(f, "{r}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentReport {
    pub internal: Rational,
    pub external: Rational,
    pub utility: Rational,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prop_share: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prop_ratio: Option<PropRatio>,
}

/// Per-agent utilities, EF and PEF violating pairs `(i, j)` meaning `i` envies `j`,
/// and the PROP shares with the minimum ratio `alpha` when `n >= 2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FairnessReport {
    pub agents: Vec<AgentReport>,
    pub ef_violations: Vec<(usize, usize)>,
    pub pef_violations: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_prop_ratio: Option<Rational>,
}

impl FairnessReport {
    pub fn is_ef(&self) -> bool {
        self.ef_violations.is_empty()
    }

    pub fn is_pef(&self) -> bool {
        self.pef_violations.is_empty()
    }

    /// `None` when PROP is undefined (a single agent).
    pub fn is_prop(&self) -> Option<bool> {
        self.min_prop_ratio.as_ref().map(|a| *a >= Rational::one())
    }
}

/// Full report for `X`: utilities, both violation lists and PROP data.
pub fn fairness_report(inst: &Instance, x: &Assignment) -> Result<FairnessReport, FairnessError> {
    ensure_fits(inst, x)?;
    let engine = EnvyEngine::exact(inst);
    let ef_violations = engine.violations(x, Notion::Ef);
    let pef_violations = engine.violations(x, Notion::Pef);
    let n = inst.agent_count();
    let mut agents = Vec::with_capacity(n);
    let mut min_prop_ratio: Option<Rational> = None;
    for i in 0..n {
        let u = utility_unchecked(inst, x, i);
        let (prop_share, prop_ratio) = match prop_share(inst, i) {
            Ok(share) => {
                let ratio = ratio_of(&u.total, &share);
                let eff = ratio.effective();
                if min_prop_ratio.as_ref().is_none_or(|a| eff < *a) {
                    min_prop_ratio = Some(eff);
                }
                (Some(share), Some(ratio))
            }
            Err(_) => (None, None),
        };
        agents.push(AgentReport {
            internal: u.internal,
            external: u.external,
            utility: u.total,
            prop_share,
            prop_ratio,
        });
    }
    Ok(FairnessReport {
        agents,
        ef_violations,
        pef_violations,
        min_prop_ratio,
    })
}

fn ratio_of(utility: &Rational, share: &Rational) -> PropRatio {
    match share.recip() {
        None => PropRatio::Satisfied,
        Some(inv) => PropRatio::Ratio(utility * &inv),
    }
}

/// Report whose `ef_violations` lists every `(i, j)` with `u_i(X^{i<->j}) > u_i(X)`.
pub fn check_ef(inst: &Instance, x: &Assignment) -> Result<FairnessReport, FairnessError> {
    fairness_report(inst, x)
}

/// Report whose `pef_violations` lists every `(i, j)` where the swap strictly raises
/// both `v_i` and `e_i`.
pub fn check_pef(inst: &Instance, x: &Assignment) -> Result<FairnessReport, FairnessError> {
    fairness_report(inst, x)
}

/// Report with PROP shares and ratios; fails for a single agent.
pub fn check_prop(inst: &Instance, x: &Assignment) -> Result<FairnessReport, FairnessError> {
    if inst.agent_count() < 2 {
        return Err(FairnessError::Degenerate);
    }
    fairness_report(inst, x)
}

/// Quick yes/no for one notion, stopping at the first violation.
pub fn satisfies(inst: &Instance, x: &Assignment, notion: Notion) -> Result<bool, FairnessError> {
    ensure_fits(inst, x)?;
    Ok(match EnvyEngine::scaled(inst) {
        Some(engine) => engine.holds(x.groups(), x.labels(), notion),
        None => EnvyEngine::exact(inst).holds(x.groups(), x.labels(), notion),
    })
}

/// `PROP_i = (1/m) sum_j v_ij + (n/m - 1) (1/(n-1)) sum_l e_il`.
pub fn prop_share(inst: &Instance, i: usize) -> Result<Rational, FairnessError> {
    let n = inst.agent_count();
    let m = inst.resource_count();
    if n < 2 {
        return Err(FairnessError::Degenerate);
    }
    if i >= n {
        return Err(FairnessError::AgentOutOfRange(i));
    }
    let (n_r, m_r) = (Rational::from_integer(n as i64), Rational::from_integer(m as i64));
    let v_sum: Rational = inst.values()[i].iter().sum();
    let e_sum: Rational = inst.externalities()[i].iter().sum();
    let v_part = v_sum / &m_r;
    let e_part = (&n_r / &m_r - Rational::one()) * e_sum / Rational::from_integer(n as i64 - 1);
    Ok(v_part + e_part)
}

/// Both Pareto-PROP conditions for one agent, with the quantities they compare.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParetoProp {
    pub cond1: bool,
    pub cond2: bool,
    /// `|{j : v_{i r_i(X)} >= v_ij}|`, own resource included.
    pub weakly_worse_count: usize,
    pub external: Rational,
    /// `nearest_int((c-1)/(n-1) * sum_l e_il)`.
    pub threshold: Rational,
}

impl ParetoProp {
    pub fn holds(&self) -> bool {
        self.cond1 || self.cond2
    }
}

/// Condition 1: `2 * count >= m`. Condition 2: `e_i(X) >= nearest_int((c-1)/(n-1) * sum_l e_il)`.
pub fn check_pareto_prop(inst: &Instance, x: &Assignment, i: usize) -> Result<ParetoProp, FairnessError> {
    if !inst.profile().is_dorm_sharing() {
        return Err(FairnessError::NotDormSharing);
    }
    ensure_fits(inst, x)?;
    let n = inst.agent_count();
    if n < 2 {
        return Err(FairnessError::Degenerate);
    }
    if i >= n {
        return Err(FairnessError::AgentOutOfRange(i));
    }
    let c = inst
        .profile()
        .uniform_capacity
        .expect("dorm-sharing has uniform capacity");
    let row = &inst.values()[i];
    let own = &row[x.resource_of(i)];
    let weakly_worse_count = row.iter().filter(|v| own >= *v).count();
    let cond1 = 2 * weakly_worse_count >= inst.resource_count();
    let e_sum: Rational = inst.externalities()[i].iter().sum();
    let threshold = Rational::from_bigint((Rational::new(c as i64 - 1, n as i64 - 1) * e_sum).nearest_int());
    let external: Rational = x.mates(i).map(|l| inst.externality(i, l)).sum();
    let cond2 = external >= threshold;
    Ok(ParetoProp {
        cond1,
        cond2,
        weakly_worse_count,
        external,
        threshold,
    })
}
