use proptest::prelude::*;
use sharefair::{fairness_report, prop_share, utility, Assignment, Instance, Rational};

fn r(n: i64) -> Rational {
    Rational::from_integer(n)
}

/// Capacities, value rows, externality rows and an agent order.
type Parts = (Vec<usize>, Vec<Vec<i64>>, Vec<Vec<i64>>, Vec<usize>);

/// Small non-negative integers throughout.
fn instance_parts() -> impl Strategy<Value = Parts> {
    prop::collection::vec(1usize..=3, 1..=3).prop_flat_map(|caps| {
        let n: usize = caps.iter().sum();
        let m = caps.len();
        (
            Just(caps),
            prop::collection::vec(prop::collection::vec(0i64..5, m), n),
            prop::collection::vec(prop::collection::vec(0i64..4, n), n),
            Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
        )
    })
}

fn build(caps: &[usize], v: &[Vec<i64>], e: &[Vec<i64>], scale: i64) -> Instance {
    let values = v
        .iter()
        .map(|row| row.iter().map(|&x| r(x * scale)).collect())
        .collect();
    let ext = e
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(l, &x)| if i == l { r(0) } else { r(x * scale) })
                .collect()
        })
        .collect();
    Instance::new(caps.to_vec(), values, ext).unwrap()
}

fn blocks(caps: &[usize], order: &[usize]) -> Assignment {
    let mut groups = Vec::new();
    let mut at = 0;
    for &c in caps {
        groups.push(order[at..at + c].to_vec());
        at += c;
    }
    Assignment::new(caps, groups).unwrap()
}

proptest! {
    #[test]
    fn scaling_preserves_verdicts((caps, v, e, order) in instance_parts(), scale in 1i64..7) {
        let x = blocks(&caps, &order);
        let base = fairness_report(&build(&caps, &v, &e, 1), &x).unwrap();
        let scaled = fairness_report(&build(&caps, &v, &e, scale), &x).unwrap();
        prop_assert_eq!(&base.ef_violations, &scaled.ef_violations);
        prop_assert_eq!(&base.pef_violations, &scaled.pef_violations);
        prop_assert_eq!(base.min_prop_ratio, scaled.min_prop_ratio);
    }

    #[test]
    fn utility_is_value_plus_externality((caps, v, e, order) in instance_parts()) {
        let inst = build(&caps, &v, &e, 1);
        let x = blocks(&caps, &order);
        for i in 0..inst.agent_count() {
            let u = utility(&inst, &x, i).unwrap();
            prop_assert_eq!(&u.internal, inst.value(i, x.resource_of(i)));
            let ext = x.mates(i).fold(r(0), |acc, l| acc + inst.externality(i, l).clone());
            prop_assert_eq!(&u.external, &ext);
            prop_assert_eq!(u.total, u.internal + u.external);
        }
    }

    #[test]
    fn prop_share_is_mean_value_without_externalities((caps, v, _e, _o) in instance_parts()) {
        let n: usize = caps.iter().sum();
        prop_assume!(n >= 2);
        let inst = build(&caps, &v, &vec![vec![0; n]; n], 1);
        for (i, row) in v.iter().enumerate() {
            let mean = Rational::new(row.iter().sum::<i64>(), caps.len() as i64);
            prop_assert_eq!(prop_share(&inst, i).unwrap(), mean);
        }
    }
}
