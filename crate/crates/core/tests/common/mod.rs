#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use topofair::complexes::{cross_polytope_sphere, Triangulation};
use topofair::fairdiv::Valuation;
use topofair::fan::{ColorfulOutcome, DualFan, Graph, MultiFan, SplitOutcome, Verdict, Z2Complex};
use topofair::labelings::FanLabeling;
use topofair::rational::{one, zero, Rational};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn sphere(n: usize, r: usize) -> (Triangulation, Z2Complex) {
    let t = cross_polytope_sphere(n, r).unwrap();
    let k = Z2Complex::from_triangulation(&t, n - 1).unwrap();
    (t, k)
}

/// Every face of every maximal simplex, deduplicated.
pub fn all_faces(k: &Z2Complex) -> BTreeSet<Vec<usize>> {
    let mut out = BTreeSet::new();
    for s in &k.simplices {
        for mask in 1u32..(1 << s.len()) {
            out.insert((0..s.len()).filter(|&b| mask >> b & 1 == 1).map(|b| s[b]).collect::<Vec<_>>());
        }
    }
    out
}

/// Sign of the label of smallest magnitude if the labels on `face` strictly
/// alternate, sorted by magnitude.
pub fn alternates(face: &[usize], lab: &[i64]) -> Option<i64> {
    let mut ls: Vec<i64> = face.iter().map(|&v| lab[v]).collect();
    ls.sort_by_key(|l| l.abs());
    for w in ls.windows(2) {
        if w[0].abs() == w[1].abs() || w[0].signum() == w[1].signum() {
            return None;
        }
    }
    Some(ls[0].signum())
}

/// Size of the largest alternating subset of the labels on `face`, by
/// trying every subset.
pub fn alt_brute(face: &[usize], lab: &[i64]) -> (usize, i64) {
    let mut best = (0, 1);
    for mask in 1u32..(1 << face.len()) {
        let sub: Vec<usize> = (0..face.len()).filter(|&b| mask >> b & 1 == 1).map(|b| face[b]).collect();
        if let Some(s) = alternates(&sub, lab) {
            if sub.len() > best.0 || (sub.len() == best.0 && s > best.1) {
                best = (sub.len(), s);
            }
        }
    }
    best
}

pub fn is_face(k: &Z2Complex, face: &[usize]) -> bool {
    k.simplices.iter().any(|s| face.iter().all(|v| s.contains(v)))
}

pub fn dense(k: &Z2Complex, lab: &FanLabeling) -> Vec<i64> {
    lab.dense(k.num_vertices()).unwrap()
}

/// Antisymmetry and the adjacency condition for a labeling given on the
/// vertices directly.
pub fn is_fan(k: &Z2Complex, lab: &[i64]) -> bool {
    (0..k.num_vertices()).all(|v| lab[v] != 0 && lab[k.involution[v]] == -lab[v])
        && k.simplices.iter().all(|s| s.iter().all(|&u| s.iter().all(|&w| lab[u] + lab[w] != 0)))
}

/// The circle with two labelings whose `±2` sit on different axes: `λ_1` is
/// `±2` at `(±1, 0)` and `sign(y)` elsewhere; `λ_2` is `±2` at `(0, ±1)` and
/// `sign(x)` elsewhere.
pub fn crossed_circle() -> (Triangulation, Z2Complex, Vec<FanLabeling>) {
    let (t, k) = sphere(2, 4);
    let sgn = |x: &num_rational::BigRational| {
        use num_traits::Signed;
        if x.is_positive() {
            1
        } else {
            -1
        }
    };
    let mut l1 = Vec::new();
    let mut l2 = Vec::new();
    for c in &t.vertices {
        use num_traits::Zero;
        let (x, y) = (&c[0], &c[1]);
        l1.push(if y.is_zero() { 2 * sgn(x) } else { sgn(y) });
        l2.push(if x.is_zero() { 2 * sgn(y) } else { sgn(x) });
    }
    (t, k, vec![FanLabeling::from_vec(2, &l1), FanLabeling::from_vec(2, &l2)])
}

/// `left × right` is complete in `g`, the sides are disjoint, and `c` is
/// injective on their union.
pub fn colorful_complete(g: &Graph, c: &[usize], left: &[usize], right: &[usize]) -> bool {
    let adj = g.adjacency().unwrap();
    let all: Vec<usize> = left.iter().chain(right).copied().collect();
    let colors: BTreeSet<usize> = all.iter().map(|&v| c[v]).collect();
    let verts: BTreeSet<usize> = all.iter().copied().collect();
    colors.len() == all.len() && verts.len() == all.len() && left.iter().all(|&a| right.iter().all(|&b| adj[a][b]))
}

/// All permutations of `0..n`.
pub fn perms(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in perms(n - 1) {
        for at in 0..=p.len() {
            let mut q = p.clone();
            q.insert(at, n - 1);
            out.push(q);
        }
    }
    out
}

/// Independent recomputation of μ from brute-force alternation numbers.
pub fn mu_brute(face: &[usize], labs: &[Vec<i64>], d: &[usize]) -> i64 {
    let mut base = 0;
    for (i, lab) in labs.iter().enumerate() {
        let (alt, sign) = alt_brute(face, lab);
        if alt <= d[i] || i + 1 == labs.len() {
            return sign * (base + alt) as i64;
        }
        base += d[i];
    }
    unreachable!()
}

pub fn mu_is_fan(k: &Z2Complex, mu: impl Fn(&[usize]) -> i64) -> bool {
    for s in &k.simplices {
        let faces: Vec<Vec<usize>> =
            (1u32..(1 << s.len())).map(|m| (0..s.len()).filter(|&b| m >> b & 1 == 1).map(|b| s[b]).collect()).collect();
        for f in &faces {
            let anti: Vec<usize> = {
                let mut a: Vec<usize> = f.iter().map(|&v| k.involution[v]).collect();
                a.sort();
                a
            };
            if mu(f) == 0 || mu(&anti) != -mu(f) {
                return false;
            }
            for g in &faces {
                if g.len() > f.len() && f.iter().all(|v| g.contains(v)) && mu(f) + mu(g) == 0 {
                    return false;
                }
            }
        }
    }
    true
}

pub fn check_multi(k: &Z2Complex, out: &MultiFan, labs: &[Vec<i64>], d: &[usize]) {
    assert!(k.simplices.contains(&out.simplex));
    for (i, lab) in labs.iter().enumerate() {
        assert!(alt_brute(&out.simplex, lab).0 > d[i]);
        let f = &out.faces[i];
        assert_eq!(f.vertices.len(), d[i] + 1);
        assert!(f.vertices.iter().all(|v| out.simplex.contains(v)));
        assert!(alternates(&f.vertices, lab).is_some());
        assert_eq!(f.labels, f.vertices.iter().map(|&v| lab[v]).collect::<Vec<_>>());
    }
    // the chain alternates with growing |μ|, starting negative
    let w = &out.witness;
    assert_eq!(w.chain.len(), k.declared_index + 1);
    assert!(w.mu_values[0] < 0);
    for (t, f) in w.chain.iter().enumerate() {
        assert_eq!(w.mu_values[t], mu_brute(f, labs, d));
        if t > 0 {
            assert!(w.chain[t - 1].iter().all(|v| f.contains(v)));
            assert!(w.mu_values[t].abs() > w.mu_values[t - 1].abs());
            assert!(w.mu_values[t].signum() != w.mu_values[t - 1].signum());
        }
    }
    assert!(w.mu_values.last().unwrap().unsigned_abs() as usize > k.declared_index);
}

pub fn check_dual(k: &Z2Complex, out: &DualFan, labs: &[Vec<i64>], ell: &[usize]) {
    let n = k.declared_index + 1;
    assert_eq!(out.simplex.len(), n);
    assert_eq!(out.simplex.iter().collect::<BTreeSet<_>>().len(), n);
    assert!(is_face(k, &out.simplex));
    let r = label_presence_brute(&out.simplex, labs, ell.len());
    for t in 0..n {
        let want = if t % 2 == 0 { -(out.j[t] as i64) } else { out.j[t] as i64 };
        assert_eq!(labs[out.i[t]][out.simplex[t]], want);
        if t > 0 {
            assert!(out.j[t] >= out.j[t - 1]);
            if out.j[t] == out.j[t - 1] {
                assert!(out.i[t] > out.i[t - 1]);
            }
        }
        assert!(r[out.j[t]] >= ell[out.j[t] - 1]);
    }
}

pub fn label_presence_brute(face: &[usize], labs: &[Vec<i64>], big_n: usize) -> Vec<usize> {
    (0..=big_n)
        .map(|j| labs.iter().filter(|lab| j > 0 && face.iter().any(|&v| lab[v].unsigned_abs() as usize == j)).count())
        .collect()
}

/// Every simplex/bijection pair for `gale_fan` found by brute force.
pub fn gale_ok(k: &Z2Complex, simplex: &[usize], pi: &[usize], labs: &[Vec<i64>], alpha: &[i32]) -> bool {
    is_face(k, simplex)
        && pi.iter().collect::<BTreeSet<_>>().len() == pi.len()
        && alpha
            .iter()
            .enumerate()
            .all(|(j, &a)| simplex.iter().any(|&v| labs[pi[j]][v] == a as i64 * (j as i64 + 1)))
}

/// Every `(face, assignment)` with `0 < −λ_{π(v_1)}(v_1) < λ_{π(v_2)}(v_2) < …`.
pub fn balanced_brute(k: &Z2Complex, labs: &[Vec<i64>], coloring: &[usize]) -> BTreeSet<BTreeSet<(usize, usize)>> {
    let n = labs.len();
    let mut out = BTreeSet::new();
    for f in all_faces(k).into_iter().filter(|f| f.len() == n) {
        for p in perms(n) {
            let mut ls: Vec<i64> = f.iter().zip(&p).map(|(&v, &i)| labs[i][v]).collect();
            ls.sort_by_key(|l| l.abs());
            let colors: BTreeSet<usize> = f.iter().map(|&v| coloring[v]).collect();
            let ok = ls[0] < 0
                && ls.windows(2).all(|w| w[0].abs() < w[1].abs() && w[0].signum() != w[1].signum())
                && colors.len() == n;
            if ok {
                out.insert(f.iter().copied().zip(p.iter().copied()).collect());
            }
        }
    }
    out
}

pub fn check_colorful(g: &Graph, colorings: &[Vec<usize>], d: &[usize], out: &ColorfulOutcome) {
    let (a, b) = &out.top;
    let adj = g.adjacency().unwrap();
    assert!(a.iter().all(|&x| b.iter().all(|&y| adj[x][y])));
    assert_eq!(out.witnesses.len(), d.len());
    for w in &out.witnesses {
        let c = &colorings[w.coloring];
        assert!(colorful_complete(g, c, &w.left, &w.right));
        let di = d[w.coloring];
        let mut sizes = [w.left.len(), w.right.len()];
        sizes.sort();
        assert_eq!(sizes, [di / 2 + 1, di.div_ceil(2) + 1]);
        let inside = |x: &[usize], y: &[usize]| x.iter().all(|v| a.contains(v)) && y.iter().all(|v| b.contains(v));
        assert!(inside(&w.left, &w.right) || inside(&w.right, &w.left));
    }
}

/// Whether `g` has any colorful complete bipartite `p × q` under `c`.
pub fn colorful_exists(g: &Graph, c: &[usize], p: usize, q: usize) -> bool {
    let n = g.vertices;
    let side = |mask: u32| (0..n).filter(|&v| mask >> v & 1 == 1).collect::<Vec<_>>();
    (1u32..(1 << n)).any(|x| {
        (1u32..(1 << n)).any(|y| {
            x & y == 0
                && x.count_ones() as usize == p
                && y.count_ones() as usize == q
                && colorful_complete(g, c, &side(x), &side(y))
        })
    })
}

pub fn check_split(out: &SplitOutcome, fams: &[Vec<Valuation>], n: usize, k: &[usize], eps: &Rational) {
    assert_eq!(out.intervals.len(), n);
    let mut at = zero();
    for iv in &out.intervals {
        assert!(iv[0] <= iv[1]);
        if iv[0] < iv[1] {
            assert_eq!(iv[0], at);
            at = iv[1].clone();
        }
    }
    assert_eq!(at, one());
    for (i, fam) in fams.iter().enumerate() {
        let disc: Vec<Rational> = fam
            .iter()
            .map(|v| {
                let odd: Rational = out.intervals.iter().step_by(2).map(|iv| v.value(&iv[0], &iv[1])).sum();
                let even: Rational = out.intervals.iter().skip(1).step_by(2).map(|iv| v.value(&iv[0], &iv[1])).sum();
                odd - even
            })
            .collect();
        assert_eq!(disc, out.discrepancies[i]);
        let max = disc.iter().map(|x| if *x < zero() { -x.clone() } else { x.clone() }).max().unwrap();
        match &out.verdicts[i] {
            Verdict::Splitting { max_discrepancy } => {
                assert_eq!(*max_discrepancy, max);
                assert!(max <= *eps);
            }
            Verdict::Extremal { measures, signs, gamma } => {
                assert_eq!(*gamma, max);
                assert!(measures.len() >= k[i]);
                for (&a, &s) in measures.iter().zip(signs) {
                    let x = &disc[a] * Rational::from_integer(s.into());
                    assert!(x >= &max - eps);
                }
                let plus = signs.iter().filter(|&&s| s > 0).count();
                assert!(plus >= k[i] / 2 && signs.len() - plus >= k[i] / 2);
            }
            Verdict::Unverified { .. } => panic!("unverified verdict in a certified outcome"),
        }
    }
}

/// Value of piece `j` under `v`, recomputed from the cut positions.
pub fn piece_value(v: &Valuation, lengths: &[Rational], j: usize) -> Rational {
    let lo: Rational = lengths[..j].iter().sum();
    let hi = &lo + &lengths[j];
    v.value(&lo, &hi)
}

/// Largest envy of a matched player towards any piece.
pub fn cake_envy(vals: &[Valuation], lengths: &[Rational], matching: &[(usize, usize)]) -> Rational {
    let mut worst = zero();
    for &(i, j) in matching {
        let own = piece_value(&vals[i], lengths, j);
        for k in 0..lengths.len() {
            let d = piece_value(&vals[i], lengths, k) - &own;
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

/// Smallest envy over every bijection between `players` and `pieces`.
pub fn best_matching_envy(vals: &[Valuation], lengths: &[Rational], players: &[usize], pieces: &[usize]) -> Rational {
    assert_eq!(players.len(), pieces.len());
    perms(players.len())
        .into_iter()
        .map(|p| {
            let m: Vec<(usize, usize)> = players.iter().zip(&p).map(|(&i, &x)| (i, pieces[x])).collect();
            cake_envy(vals, lengths, &m)
        })
        .min()
        .unwrap()
}

pub fn random_vals(seed: u64, k: usize) -> Vec<Valuation> {
    let mut r = rng(seed);
    (0..k).map(|_| Valuation::random(&mut r, 6)).collect()
}
