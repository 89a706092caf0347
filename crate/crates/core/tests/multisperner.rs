use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use topofair::complexes::{kuhn_triangulation, staircase_product, Triangulation};
use topofair::labelings::{random_sperner, SpernerLabeling};
use topofair::multisperner::*;
use topofair::rational::frac;

fn labels_on(simplex: &[usize], lab: &SpernerLabeling) -> BTreeSet<usize> {
    simplex.iter().map(|&v| lab.get(v).unwrap()).collect()
}

fn distinct_ok(simplex: &[usize], labs: &[SpernerLabeling], k: &[usize], n: usize) -> bool {
    let sets: Vec<_> = labs.iter().map(|l| labels_on(simplex, l)).collect();
    sets.iter().zip(k).all(|(s, &ki)| s.len() >= ki) && (1..=n).all(|j| sets.iter().any(|s| s.contains(&j)))
}

fn popular_ok(simplex: &[usize], labs: &[SpernerLabeling], l: &[usize]) -> bool {
    l.iter()
        .enumerate()
        .all(|(j, &lj)| labs.iter().filter(|lab| labels_on(simplex, lab).contains(&(j + 1))).count() >= lj)
}

fn random_labs(t: &Triangulation, m: usize, seed: u64) -> Vec<SpernerLabeling> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..m).map(|_| random_sperner(t, &mut rng).unwrap()).collect()
}

#[test]
fn figure_like_instance() {
    // Kuhn(3, 2): the middle triangle is spanned by the three edge midpoints.
    let t = kuhn_triangulation(3, 2).unwrap();
    let corner = |j: usize| t.vertices.iter().position(|c| c[j] == frac(1, 1)).unwrap();
    let mid = |a: usize, b: usize| {
        t.vertices
            .iter()
            .position(|c| c[a] == frac(1, 2) && c[b] == frac(1, 2))
            .unwrap()
    };
    let mut l1 = vec![0; 6];
    let mut l2 = vec![0; 6];
    for j in 0..3 {
        l1[corner(j)] = j + 1;
        l2[corner(j)] = j + 1;
    }
    l1[mid(0, 1)] = 1;
    l1[mid(0, 2)] = 3;
    l1[mid(1, 2)] = 3;
    l2[mid(0, 1)] = 2;
    l2[mid(0, 2)] = 3;
    l2[mid(1, 2)] = 2;
    let labs = [SpernerLabeling::from_vec(3, &l1), SpernerLabeling::from_vec(3, &l2)];
    let out = solve_distinct_labels(&t, &labs, &[2, 2]).unwrap();
    assert!(distinct_ok(&out.simplex, &labs, &[2, 2], 3));
    assert_eq!(out.certificate.weights.len(), 4);
    let pop = solve_popular_labels(&t, &labs, &[1, 1, 2]).unwrap();
    assert!(popular_ok(&pop.simplex, &labs, &[1, 1, 2]));
    assert!(pop.counts[2] >= 2);
}

#[test]
fn classical_sperner_when_m_is_one() {
    let t = kuhn_triangulation(3, 5).unwrap();
    for seed in 0..10 {
        let labs = random_labs(&t, 1, seed);
        let out = solve_distinct_labels(&t, &labs, &[3]).unwrap();
        assert_eq!(labels_on(&out.simplex, &labs[0]).len(), 3);
        let pop = solve_popular_labels(&t, &labs, &[1, 1, 1]).unwrap();
        assert_eq!(labels_on(&pop.simplex, &labs[0]).len(), 3);
    }
}

#[test]
fn lambda_image_lands_in_the_minimal_face() {
    let t = kuhn_triangulation(3, 4).unwrap();
    let tbar = staircase_product(&t, 2).unwrap();
    let nv = t.num_vertices();
    for seed in 0..100 {
        let labs = random_labs(&t, 2, seed);
        for id in 0..tbar.num_vertices() {
            let (i, v) = (id / nv, id % nv);
            let (ii, j) = lambda_image(&labs, i, v).unwrap();
            // the image (u_i, v_j) lies in the minimal face of the product
            // containing (u_i, v): same block index, positive j-th coordinate
            assert_eq!(ii, i);
            assert!(tbar.vertices[id][2 + j - 1] > frac(0, 1));
        }
    }
}

#[test]
fn bad_parameters_are_rejected() {
    let t = kuhn_triangulation(3, 2).unwrap();
    let labs = random_labs(&t, 2, 0);
    assert!(solve_distinct_labels(&t, &labs, &[2, 1]).is_err());
    assert!(solve_distinct_labels(&t, &labs, &[4, 0]).is_err());
    assert!(solve_popular_labels(&t, &labs, &[1, 1, 1]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn certificates_are_exact_and_small(seed in any::<u64>(), res in 2usize..6, m in 1usize..4) {
        let t = kuhn_triangulation(3, res).unwrap();
        let labs = random_labs(&t, m, seed);
        let p = TargetPoint::uniform(m, 3);
        let c = find_covering_simplex_streaming(&t, &labs, &p).unwrap();
        prop_assert!(c.check_marginals(&p));
        prop_assert!(c.weights.len() < m + 3);
        let images: BTreeSet<(usize, usize)> = c.weights.iter().map(|e| (e.labeling, e.label)).collect();
        prop_assert_eq!(images.len(), c.sigma_bar.len());
        // every image vertex comes from a vertex of the face
        for &(i, v) in &c.pairs {
            prop_assert!(images.contains(&(i, labs[i].get(v).unwrap())));
        }
    }

    #[test]
    fn distinct_and_popular_match_exhaustive_scan(seed in any::<u64>(), res in 2usize..6) {
        let t = kuhn_triangulation(3, res).unwrap();
        let labs = random_labs(&t, 2, seed);
        let out = solve_distinct_labels(&t, &labs, &[2, 2]).unwrap();
        prop_assert!(distinct_ok(&out.simplex, &labs, &[2, 2], 3));
        prop_assert!(t.simplices.iter().any(|s| distinct_ok(s, &labs, &[2, 2], 3)));
        for i in 0..2 {
            prop_assert_eq!(out.certificate.degree_left(i), 2);
        }
        for l in [[1, 1, 2], [2, 1, 1], [1, 2, 1]] {
            let pop = solve_popular_labels(&t, &labs, &l).unwrap();
            prop_assert!(popular_ok(&pop.simplex, &labs, &l));
            prop_assert!(t.simplices.iter().any(|s| popular_ok(s, &labs, &l)));
            for (j, &lj) in l.iter().enumerate() {
                prop_assert_eq!(pop.certificate.degree_right(j + 1), lj);
            }
        }
    }

    #[test]
    fn signed_counts_hold(seed in any::<u64>(), res in 1usize..6) {
        let t = kuhn_triangulation(3, res).unwrap();
        let labs = random_labs(&t, 3, seed);
        prop_assert_eq!(oriented_sperner_count(&t, &labs[0]).unwrap().diff().abs(), 1);
        prop_assert_eq!(bapat_signed_count(&t, &labs).unwrap().diff().abs(), 6);
        // all labelings equal: n! times the oriented count
        let same = vec![labs[0].clone(); 3];
        let o = oriented_sperner_count(&t, &labs[0]).unwrap().diff();
        prop_assert_eq!(bapat_signed_count(&t, &same).unwrap().diff(), 6 * o);
    }

    #[test]
    fn signed_counts_ignore_vertex_numbering(seed in any::<u64>(), res in 1usize..5) {
        let t = kuhn_triangulation(3, res).unwrap();
        let labs = random_labs(&t, 3, seed);
        // reverse the vertex ids
        let nv = t.num_vertices();
        let mut r = t.clone();
        r.vertices.reverse();
        for s in r.simplices.iter_mut() {
            for v in s.iter_mut() {
                *v = nv - 1 - *v;
            }
            s.sort_unstable();
        }
        let rl: Vec<SpernerLabeling> = labs
            .iter()
            .map(|l| SpernerLabeling::from_vec(3, &(0..nv).map(|v| l.get(nv - 1 - v).unwrap()).collect::<Vec<_>>()))
            .collect();
        prop_assert_eq!(oriented_sperner_count(&t, &labs[0]).unwrap(), oriented_sperner_count(&r, &rl[0]).unwrap());
        prop_assert_eq!(bapat_signed_count(&t, &labs).unwrap(), bapat_signed_count(&r, &rl).unwrap());
    }
}
