mod common;

use rand::Rng;
use sharefair::matching::{
    bipartite_max_matching, find_near_tight_set, find_tight_set, surplus, surplus_by_flow, surplus_exhaustive, Bigraph,
};

fn random_bigraph(seed: u64) -> Bigraph {
    let mut rng = common::rng(seed);
    let left = rng.gen_range(1..=8);
    let right = rng.gen_range(left..=left + 4);
    let den = rng.gen_range(2..=5);
    let mut edges = Vec::new();
    for a in 0..left {
        for b in 0..right {
            if rng.gen_range(0..den) == 0 {
                edges.push((a, b));
            }
        }
    }
    Bigraph::new(left, right, &edges).unwrap()
}

#[test]
fn surplus_routes_agree() {
    for seed in 0..2000 {
        let b = random_bigraph(seed);
        let ex = surplus_exhaustive(&b);
        let fl = surplus_by_flow(&b);
        assert_eq!(ex.value, fl.value, "seed {seed}");
        assert_eq!(surplus(&b), ex, "seed {seed}");
        let v = fl.value.unwrap();
        assert!(!fl.witness.is_empty());
        assert_eq!(
            b.neighborhood_size(&fl.witness) as i64 - fl.witness.len() as i64,
            v,
            "seed {seed}"
        );
    }
}

#[test]
fn tight_sets_track_surplus() {
    let (mut zero, mut one) = (0, 0);
    for seed in 0..3000 {
        let b = random_bigraph(seed);
        let m = bipartite_max_matching(&b);
        if m.size() < b.left_count() {
            assert!(surplus_exhaustive(&b).value.unwrap() < 0);
            assert!(find_tight_set(&b, &m).is_err());
            continue;
        }
        let s = surplus_exhaustive(&b).value.unwrap();
        let tight = find_tight_set(&b, &m).unwrap();
        assert_eq!(tight.is_some(), s == 0, "seed {seed}: surplus {s}");
        if let Some(set) = tight {
            assert_eq!(b.neighborhood_size(&set), set.len());
            zero += 1;
        }
        // The near-tight search is only meaningful once no tight set exists.
        if s >= 1 {
            let near = find_near_tight_set(&b, &m).unwrap();
            assert_eq!(near.is_some(), s == 1, "seed {seed}: surplus {s}");
            if let Some(nt) = near {
                assert_eq!(b.neighborhood_size(&nt.set), nt.set.len() + 1);
                assert!(b.left_neighbors(nt.set[0]).len() <= b.right_count());
                assert!(nt.set.iter().all(|&a| m.left_mate(a) != Some(nt.i_star)));
                assert!(nt.set.iter().any(|&a| b.left_neighbors(a).contains(&nt.i_star)));
                one += 1;
            }
        }
    }
    assert!(zero > 100 && one > 100, "too few hits: {zero} tight, {one} near-tight");
}
