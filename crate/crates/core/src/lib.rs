//! Fair resource sharing with externalities: exact fairness checks, a Pareto-envy-free
//! solver for capacity-2 dorm sharing, brute-force oracles and hardness constructions.

#![allow(clippy::needless_range_loop)]

pub mod fairness;
pub mod generators;
pub mod matching;
pub mod model;
pub mod oracle;
pub mod rational;
pub mod reductions;
pub mod solver;

pub use fairness::{
    check_ef, check_pareto_prop, check_pef, check_prop, fairness_report, prop_share, satisfies, utility, FairnessError,
    FairnessReport, Notion, ParetoProp, PropRatio, Utility,
};
pub use generators::{named_instance, random_dorm, tight_instance, GeneratorError, NamedInstance, TightKind};
pub use model::{
    validate_instance, Assignment, AssignmentError, AssignmentFile, DormProfile, Instance, InstanceError, InstanceFile,
};
pub use oracle::{decide, decide_ef, decide_pef, OracleError, Strategy, DEFAULT_LIMIT};
pub use rational::{nearest_int, Rational};
pub use reductions::{pad_clique, reduce_clique_to_ef, reduce_clique_to_pef, CliqueInstance, ReductionError};
pub use solver::{solve_pef_cap2, Pair, RoundRecord, SolveTrace, SolverError};
