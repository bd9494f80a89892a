mod common;

use sharefair::{check_pef, random_dorm, solve_pef_cap2, Rational};

#[test]
fn solver_fills_every_dorm_and_keeps_hall() {
    for seed in 0..300u64 {
        let m = 2 + (seed % 12) as usize;
        let p = Rational::new(1 + (seed % 4) as i64, 6);
        let inst = random_dorm(seed, m, 2, &p, 4).unwrap();
        let (x, trace) = solve_pef_cap2(&inst).unwrap();
        assert!(x.groups().iter().all(|g| g.len() == 2), "seed {seed}");
        let mut dorms: Vec<usize> = trace.all_pairs().map(|p| p.dorm).collect();
        dorms.sort_unstable();
        assert_eq!(dorms, (0..m).collect::<Vec<_>>(), "seed {seed}");
        let mut agents: Vec<usize> = trace.all_pairs().flat_map(|p| p.agents).collect();
        agents.sort_unstable();
        assert_eq!(agents, (0..2 * m).collect::<Vec<_>>(), "seed {seed}");
        for (k, round) in trace.rounds.iter().enumerate() {
            assert_eq!(round.round, k + 1);
            assert!((1..=4).contains(&round.case));
            assert!(round.surplus_at_start.is_none_or(|s| s >= 0), "seed {seed}");
        }
        for pair in trace.all_pairs() {
            assert_eq!(x.resource_of(pair.agents[0]), pair.dorm);
            assert_eq!(x.resource_of(pair.agents[1]), pair.dorm);
        }
        assert!(check_pef(&inst, &x).unwrap().pef_violations.is_empty(), "seed {seed}");
    }
}

#[test]
fn solver_is_deterministic() {
    let inst = random_dorm(99, 9, 2, &Rational::new(1, 3), 3).unwrap();
    let (x1, t1) = solve_pef_cap2(&inst).unwrap();
    let (x2, t2) = solve_pef_cap2(&inst).unwrap();
    assert_eq!(x1, x2);
    assert_eq!(t1, t2);
}
