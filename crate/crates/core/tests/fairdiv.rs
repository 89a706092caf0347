mod common;

use std::collections::BTreeSet;

use common::*;
use proptest::prelude::*;
use topofair::fairdiv::*;
use topofair::rational::{frac, int, one, zero, Rational};

fn eps6() -> Rational {
    frac(1, 1_000_000)
}

fn check_division(lengths: &[Rational], n: usize) {
    assert_eq!(lengths.len(), n);
    assert!(lengths.iter().all(|x| *x >= zero()));
    assert_eq!(lengths.iter().sum::<Rational>(), one());
}

#[test]
fn identical_uniform_players() {
    let vals = vec![Valuation::uniform(); 3];
    let out = cake_divide(&vals, CakeMode::EnvyFree, 3, &eps6(), Schedule::default()).unwrap();
    assert_eq!(out.status, Status::Certified);
    let cuts = out.cuts();
    for (c, t) in cuts[1..3].iter().zip([frac(1, 3), frac(2, 3)]) {
        assert!((c - &t) <= eps6() && (&t - c) <= eps6());
    }
}

#[test]
fn random_envy_free_triples() {
    for seed in 0..20 {
        let vals = random_vals(seed, 3);
        let out = cake_divide(&vals, CakeMode::EnvyFree, 3, &eps6(), Schedule::default()).unwrap();
        assert_eq!(out.status, Status::Certified, "seed {seed}");
        check_division(&out.division, 3);
        let m = &out.scenarios[0].matching;
        let players: BTreeSet<usize> = m.iter().map(|p| p.0).collect();
        let pieces: BTreeSet<usize> = m.iter().map(|p| p.1).collect();
        assert_eq!((players.len(), pieces.len()), (3, 3));
        let envy = cake_envy(&vals, &out.division, m);
        assert!(envy <= eps6());
        assert_eq!(Some(envy.clone()), out.envy_gap);
        assert!(best_matching_envy(&vals, &out.division, &[0, 1, 2], &[0, 1, 2]) <= envy);
    }
}

#[test]
fn survivor_single_departures() {
    for seed in 100..106 {
        let vals = random_vals(seed, 3);
        let out = cake_divide(&vals, CakeMode::Survivor, 2, &eps6(), Schedule::default()).unwrap();
        assert_eq!(out.status, Status::Certified, "seed {seed}");
        check_division(&out.division, 2);
        let removed: BTreeSet<Vec<usize>> = out.scenarios.iter().map(|s| s.removed_players.clone()).collect();
        assert_eq!(removed, BTreeSet::from([vec![0], vec![1], vec![2]]));
        for s in &out.scenarios {
            let stay: Vec<usize> = (0..3).filter(|i| !s.removed_players.contains(i)).collect();
            let assigned: Vec<usize> = s.matching.iter().map(|p| p.0).collect();
            assert_eq!(assigned.iter().copied().collect::<BTreeSet<_>>(), stay.iter().copied().collect());
            let envy = cake_envy(&vals, &out.division, &s.matching);
            assert!(envy <= eps6());
            // brute force over the two ways to hand out the two pieces
            assert!(best_matching_envy(&vals, &out.division, &stay, &[0, 1]) <= eps6());
        }
    }
}

#[test]
fn secretive_single_removed_piece() {
    for seed in 200..206 {
        let vals = random_vals(seed, 3);
        let out = cake_divide(&vals, CakeMode::Secretive, 2, &eps6(), Schedule::default()).unwrap();
        assert_eq!(out.status, Status::Certified, "seed {seed}");
        check_division(&out.division, 3);
        assert_eq!(out.scenarios.len(), 3);
        for s in &out.scenarios {
            assert_eq!(s.removed_pieces.len(), 1);
            let left: Vec<usize> = (0..3).filter(|j| !s.removed_pieces.contains(j)).collect();
            assert!(s.matching.iter().all(|p| p.0 < 2 && left.contains(&p.1)));
            assert_eq!(s.matching.len(), 2);
            assert!(cake_envy(&vals, &out.division, &s.matching) <= eps6());
            // the two secretive-free players against the two remaining pieces
            let brute = perms(2)
                .into_iter()
                .map(|p| {
                    let m: Vec<(usize, usize)> = (0..2).map(|i| (i, left[p[i]])).collect();
                    cake_envy(&vals, &out.division, &m)
                })
                .min()
                .unwrap();
            assert!(brute <= eps6());
        }
    }
}

#[test]
fn secretive_with_all_players_is_envy_free() {
    let vals = random_vals(7, 3);
    let a = cake_divide(&vals, CakeMode::Secretive, 3, &eps6(), Schedule::default()).unwrap();
    let b = cake_divide(&vals, CakeMode::EnvyFree, 3, &eps6(), Schedule::default()).unwrap();
    assert_eq!(a.scenarios.len(), 1);
    assert!(a.scenarios[0].removed_pieces.is_empty());
    assert_eq!(a.division, b.division);
    assert_eq!(a.certificate, b.certificate);
}

#[test]
fn bad_parameters() {
    let vals = random_vals(1, 3);
    assert!(cake_divide(&vals, CakeMode::Survivor, 0, &eps6(), Schedule::default()).is_err());
    assert!(cake_divide(&vals, CakeMode::Secretive, 4, &eps6(), Schedule::default()).is_err());
    assert!(cake_divide(&[], CakeMode::EnvyFree, 1, &eps6(), Schedule::default()).is_err());
}

fn rent_envy(values: &[Vec<Rational>], prices: &[Rational], matching: &[(usize, usize)]) -> Rational {
    let mut worst = zero();
    for &(i, j) in matching {
        let own = &values[i][j] - &prices[j];
        for (v, p) in values[i].iter().zip(prices) {
            let d = v - p - &own;
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

fn random_rent(seed: u64) -> Vec<Vec<Rational>> {
    use rand::Rng;
    let mut r = rng(seed);
    (0..3).map(|_| (0..2).map(|_| int(r.gen_range(0..1200))).collect()).collect()
}

#[test]
fn rent_survivor_three_roommates() {
    let total = int(1200);
    for seed in 0..6 {
        let values = random_rent(seed);
        let out = rent_divide(&values, &total, &eps6(), Schedule::default()).unwrap();
        assert_eq!(out.status, Status::Certified, "seed {seed}");
        assert_eq!(out.division.iter().sum::<Rational>(), total);
        assert_eq!(out.scenarios.len(), 3);
        for s in &out.scenarios {
            let stay: Vec<usize> = (0..3).filter(|i| !s.removed_players.contains(i)).collect();
            assert!(rent_envy(&values, &out.division, &s.matching) <= eps6());
            let brute = perms(2)
                .into_iter()
                .map(|p| {
                    let m: Vec<(usize, usize)> = (0..2).map(|x| (stay[x], p[x])).collect();
                    rent_envy(&values, &out.division, &m)
                })
                .min()
                .unwrap();
            assert!(brute <= eps6());
        }
    }
}

#[test]
fn rent_scales_with_the_total() {
    let values = random_rent(3);
    let a = rent_divide(&values, &int(1200), &eps6(), Schedule::default()).unwrap();
    let c = int(3);
    let scaled: Vec<Vec<Rational>> = values.iter().map(|r| r.iter().map(|x| x * &c).collect()).collect();
    let b = rent_divide(&scaled, &int(3600), &eps6(), Schedule::default()).unwrap();
    let prices: Vec<Rational> = a.division.iter().map(|x| x * &c).collect();
    assert_eq!(b.division, prices);
    let ma: Vec<_> = a.scenarios.iter().map(|s| &s.matching).collect();
    let mb: Vec<_> = b.scenarios.iter().map(|s| &s.matching).collect();
    assert_eq!(ma, mb);
}

#[test]
fn rent_two_roommates() {
    let out = rent_divide(&[vec![int(3)], vec![int(5)]], &int(10), &eps6(), Schedule::default()).unwrap();
    assert_eq!(out.division, vec![int(10)]);
}

#[test]
fn wages_three_workers_two_factories() {
    let budget = int(90);
    for seed in 0..5 {
        use rand::Rng;
        let mut r = rng(seed);
        let weights: Vec<Vec<Rational>> = (0..3).map(|_| (0..2).map(|_| int(r.gen_range(1..20))).collect()).collect();
        let prob = WageProblem {
            quotas: vec![2, 1],
            budget: budget.clone(),
            utilities: weights.iter().cloned().map(WageUtility::Linear).collect(),
        };
        let out = worker_wages(&prob, &eps6(), Schedule::default()).unwrap();
        assert_eq!(out.status, Status::Certified, "seed {seed}");
        let x = &out.division;
        assert_eq!(&x[0] * int(2) + &x[1], budget);
        let m = &out.scenarios[0].matching;
        assert_eq!(m.len(), 3);
        assert_eq!(m.iter().map(|p| p.0).collect::<BTreeSet<_>>().len(), 3);
        assert_eq!(m.iter().filter(|p| p.1 == 0).count(), 2);
        assert_eq!(m.iter().filter(|p| p.1 == 1).count(), 1);
        for &(i, j) in m {
            let own = &weights[i][j] * &x[j];
            let best = (0..2).map(|f| &weights[i][f] * &x[f]).max().unwrap();
            assert!(best - own <= eps6());
        }
    }
}

#[test]
fn wages_single_factory() {
    let prob = WageProblem { quotas: vec![3], budget: int(12), utilities: vec![WageUtility::Linear(vec![one()]); 3] };
    let out = worker_wages(&prob, &eps6(), Schedule::default()).unwrap();
    assert_eq!(out.division, vec![int(4)]);
}

#[test]
fn valuation_json_round_trip() {
    let v: Valuation = serde_json::from_str(r#"{"breakpoints":[0,"1/2",1],"densities":[2,0]}"#).unwrap();
    assert_eq!(v.value(&zero(), &one()), one());
    let back: Valuation = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(back, v);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn identical_players_get_equal_values(seed in 0u64..5_000) {
        let v = random_vals(seed, 1).remove(0);
        let vals = vec![v.clone(); 3];
        let out = cake_divide(&vals, CakeMode::EnvyFree, 3, &eps6(), Schedule::default()).unwrap();
        let values: Vec<Rational> = (0..3).map(|j| piece_value(&v, &out.division, j)).collect();
        let hi = values.iter().max().unwrap();
        let lo = values.iter().min().unwrap();
        prop_assert!(hi - lo <= eps6());
    }

    #[test]
    fn two_player_outcomes_verify(seed in 0u64..5_000) {
        let vals = random_vals(seed, 2);
        let out = cake_divide(&vals, CakeMode::EnvyFree, 2, &eps6(), Schedule::default()).unwrap();
        prop_assert_eq!(out.status, Status::Certified);
        prop_assert!(cake_envy(&vals, &out.division, &out.scenarios[0].matching) <= eps6());
    }
}
