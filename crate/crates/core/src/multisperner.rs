//! Covering simplices of the product `Δ^{m-1} × Δ^{n-1}` under the map
//! `(u_i, v) ↦ (u_i, v_{λ_i(v)})`, their edge-weight certificates, and the
//! signed Sperner counts.
//!
//! Vertex `(u_i, v)` of the product triangulation has id `i·|V(T)| + v`.
//! Labels are 1-based, labeling indices `i` are 0-based.

use std::collections::{BTreeSet, HashMap};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::complexes::{orientation_sign, permutations, staircase_cells, Domain, Triangulation};
use crate::error::{invalid, structural, Result};
use crate::labelings::SpernerLabeling;
use crate::linalg::{solve, Solution};
use crate::matching::BipartiteGraph;
use crate::rational::{frac, one, Rational};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetPoint {
    #[serde(with = "crate::rational::serde_vec")]
    pub a: Vec<Rational>,
    #[serde(with = "crate::rational::serde_vec")]
    pub b: Vec<Rational>,
}

impl TargetPoint {
    pub fn new(a: Vec<Rational>, b: Vec<Rational>) -> Result<Self> {
        for (name, block) in [("a", &a), ("b", &b)] {
            if block.is_empty() || block.iter().any(Signed::is_negative) || block.iter().sum::<Rational>() != one() {
                return Err(invalid(format!("target block {name} is not a point of a simplex")));
            }
        }
        Ok(TargetPoint { a, b })
    }

    /// `a = (1/m, ..., 1/m)`, `b = (1/n, ..., 1/n)`.
    pub fn uniform(m: usize, n: usize) -> Self {
        TargetPoint { a: vec![frac(1, m as i64); m], b: vec![frac(1, n as i64); n] }
    }

    pub fn m(&self) -> usize {
        self.a.len()
    }

    pub fn n(&self) -> usize {
        self.b.len()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedEdge {
    pub labeling: usize,
    pub label: usize,
    #[serde(with = "crate::rational::serde_q")]
    pub weight: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoveringCertificate {
    pub m: usize,
    pub n: usize,
    /// Face of the product triangulation, ids `i·|V(T)| + v`.
    pub sigma_bar: Vec<usize>,
    /// The same face as `(i, v)` pairs.
    pub pairs: Vec<(usize, usize)>,
    /// Projection to `T`.
    pub sigma: Vec<usize>,
    /// One edge per vertex of `sigma_bar`, ordered by `(labeling, label)`.
    pub weights: Vec<WeightedEdge>,
}

impl CoveringCertificate {
    /// `G(σ̄)` with labelings on the left and labels (0-based) on the right.
    pub fn graph(&self) -> BipartiteGraph {
        BipartiteGraph::new(self.m, self.n, self.weights.iter().map(|e| (e.labeling, e.label - 1)).collect())
    }

    pub fn degree_left(&self, i: usize) -> usize {
        self.weights.iter().filter(|e| e.labeling == i).count()
    }

    pub fn degree_right(&self, label: usize) -> usize {
        self.weights.iter().filter(|e| e.label == label).count()
    }

    /// Both marginal identities, checked exactly.
    pub fn check_marginals(&self, p: &TargetPoint) -> bool {
        let mut row = vec![Rational::zero(); self.m];
        let mut col = vec![Rational::zero(); self.n];
        for e in &self.weights {
            if e.weight.is_negative() {
                return false;
            }
            row[e.labeling] += &e.weight;
            col[e.label - 1] += &e.weight;
        }
        row == p.a && col == p.b
    }
}

/// Exact feasibility of "p is a convex combination of the image vertices",
/// keyed by the set of images `(i, j)` encoded as bits `i·n + j`.
pub(crate) struct CoverOracle {
    m: usize,
    n: usize,
    target: TargetPoint,
    cache: HashMap<u64, Option<Vec<Rational>>>,
}

impl CoverOracle {
    pub(crate) fn new(target: TargetPoint) -> Result<Self> {
        let (m, n) = (target.m(), target.n());
        if m * n > 64 {
            return Err(invalid("m·n must be at most 64"));
        }
        Ok(CoverOracle { m, n, target, cache: HashMap::new() })
    }

    /// Weights in increasing bit order when the images are affinely
    /// independent and cover the target; `None` otherwise. Dependent image
    /// sets are never minimal (a smaller face covers the same point), so they
    /// are skipped.
    pub(crate) fn weights(&mut self, mask: u64) -> Option<&Vec<Rational>> {
        if !self.cache.contains_key(&mask) {
            let w = self.solve(mask);
            self.cache.insert(mask, w);
        }
        self.cache[&mask].as_ref()
    }

    fn solve(&self, mask: u64) -> Option<Vec<Rational>> {
        let (m, n) = (self.m, self.n);
        let edges: Vec<(usize, usize)> =
            (0..m * n).filter(|&e| mask >> e & 1 == 1).map(|e| (e / n, e % n)).collect();
        // a forest has at most m + n - 1 edges
        if edges.len() > m + n - 1 {
            return None;
        }
        let mut rows = Vec::with_capacity(m + n);
        let mut rhs = Vec::with_capacity(m + n);
        for i in 0..m {
            rows.push(edges.iter().map(|&(a, _)| if a == i { one() } else { Rational::zero() }).collect());
            rhs.push(self.target.a[i].clone());
        }
        for j in 0..n {
            rows.push(edges.iter().map(|&(_, b)| if b == j { one() } else { Rational::zero() }).collect());
            rhs.push(self.target.b[j].clone());
        }
        match solve(&rows, &rhs) {
            Solution::Unique(x) if x.iter().all(|w| !w.is_negative()) => Some(x),
            _ => None,
        }
    }
}

/// Running minimum over covering faces: fewest vertices, then smallest
/// sorted id tuple.
#[derive(Default)]
pub(crate) struct Best {
    pub(crate) ids: Option<Vec<usize>>,
    pub(crate) mask: u64,
}

impl Best {
    fn offer(&mut self, ids: &[usize], mask: u64) {
        let better = match &self.ids {
            None => true,
            Some(cur) => (ids.len(), ids) < (cur.len(), cur.as_slice()),
        };
        if better {
            self.ids = Some(ids.to_vec());
            self.mask = mask;
        }
    }

    fn bound(&self) -> usize {
        self.ids.as_ref().map_or(usize::MAX, Vec::len)
    }
}

/// Offers every face of the product simplex `simplex` (sorted ids) whose
/// images are pairwise distinct and cover the target.
pub(crate) fn scan_simplex(
    simplex: &[usize],
    nv: usize,
    n: usize,
    image: &dyn Fn(usize, usize) -> usize,
    oracle: &mut CoverOracle,
    best: &mut Best,
) {
    let bits: Vec<u64> = simplex
        .iter()
        .map(|&id| {
            let (i, v) = (id / nv, id % nv);
            1u64 << (i * n + image(i, v))
        })
        .collect();
    let mut chosen = Vec::with_capacity(simplex.len());
    fn rec(
        start: usize,
        mask: u64,
        simplex: &[usize],
        bits: &[u64],
        chosen: &mut Vec<usize>,
        oracle: &mut CoverOracle,
        best: &mut Best,
    ) {
        if !chosen.is_empty() && oracle.weights(mask).is_some() {
            best.offer(chosen, mask);
            // supersets are larger faces
            return;
        }
        if chosen.len() + 1 > best.bound() {
            return;
        }
        for k in start..simplex.len() {
            if mask & bits[k] != 0 {
                continue;
            }
            chosen.push(simplex[k]);
            rec(k + 1, mask | bits[k], simplex, bits, chosen, oracle, best);
            chosen.pop();
        }
    }
    rec(0, 0, simplex, &bits, &mut chosen, oracle, best);
}

pub(crate) fn certificate(
    ids: &[usize],
    mask: u64,
    nv: usize,
    m: usize,
    n: usize,
    oracle: &mut CoverOracle,
) -> CoveringCertificate {
    let w = oracle.weights(mask).expect("offered faces are feasible").clone();
    let edges: Vec<usize> = (0..m * n).filter(|&e| mask >> e & 1 == 1).collect();
    let weights = edges
        .iter()
        .zip(w)
        .map(|(&e, weight)| WeightedEdge { labeling: e / n, label: e % n + 1, weight })
        .collect();
    let pairs: Vec<(usize, usize)> = ids.iter().map(|&id| (id / nv, id % nv)).collect();
    let sigma: BTreeSet<usize> = pairs.iter().map(|&(_, v)| v).collect();
    CoveringCertificate {
        m,
        n,
        sigma_bar: ids.to_vec(),
        pairs,
        sigma: sigma.into_iter().collect(),
        weights,
    }
}

fn check_labelings(t: &Triangulation, labs: &[SpernerLabeling]) -> Result<(usize, Vec<Vec<usize>>)> {
    let Domain::Simplex { n } = t.domain else {
        return Err(invalid("Sperner labelings live on simplex domains"));
    };
    if labs.is_empty() {
        return Err(invalid("at least one labeling is required"));
    }
    let mut dense = Vec::with_capacity(labs.len());
    for lab in labs {
        let v = crate::labelings::validate_sperner(t, lab)?;
        if let Some(first) = v.first() {
            return Err(invalid(format!("not a Sperner labeling: {first:?}")));
        }
        dense.push(lab.dense(t.num_vertices())?);
    }
    Ok((n, dense))
}

/// The vertex `(u_i, v_{λ_i(v)})` of the product, as `(i, label)`.
pub fn lambda_image(labs: &[SpernerLabeling], i: usize, v: usize) -> Result<(usize, usize)> {
    let lab = labs.get(i).ok_or_else(|| invalid(format!("no labeling {i}")))?;
    let l = lab.get(v).ok_or_else(|| invalid(format!("vertex {v} has no label")))?;
    Ok((i, l))
}

/// Scans a materialized product triangulation `tbar` (as built by
/// [`crate::complexes::staircase_product`] from `t`).
pub fn find_covering_simplex(
    t: &Triangulation,
    tbar: &Triangulation,
    labs: &[SpernerLabeling],
    p: &TargetPoint,
) -> Result<CoveringCertificate> {
    let (n, dense) = check_labelings(t, labs)?;
    let m = labs.len();
    if tbar.domain != (Domain::Product { m, n }) || tbar.num_vertices() != m * t.num_vertices() {
        return Err(invalid("product triangulation does not match the labelings"));
    }
    if p.m() != m || p.n() != n {
        return Err(invalid("target point has the wrong shape"));
    }
    let nv = t.num_vertices();
    let mut oracle = CoverOracle::new(p.clone())?;
    let mut best = Best::default();
    let image = |i: usize, v: usize| dense[i][v] - 1;
    for s in &tbar.simplices {
        scan_simplex(s, nv, n, &image, &mut oracle, &mut best);
    }
    let ids = best.ids.take().ok_or_else(|| structural("no face covers the target point"))?;
    Ok(certificate(&ids, best.mask, nv, m, n, &mut oracle))
}

/// Same scan as [`find_covering_simplex`] without materializing the product:
/// the staircase cells of each simplex of `t` are generated on the fly.
pub fn find_covering_simplex_streaming(
    t: &Triangulation,
    labs: &[SpernerLabeling],
    p: &TargetPoint,
) -> Result<CoveringCertificate> {
    let (n, dense) = check_labelings(t, labs)?;
    let m = labs.len();
    if p.m() != m || p.n() != n {
        return Err(invalid("target point has the wrong shape"));
    }
    let nv = t.num_vertices();
    let image = |i: usize, v: usize| dense[i][v] - 1;
    cover_cells(t.simplices.iter().map(Vec::as_slice), nv, m, p, &image)
}

pub(crate) fn cover_cells<'a>(
    cells: impl Iterator<Item = &'a [usize]>,
    nv: usize,
    m: usize,
    p: &TargetPoint,
    image: &dyn Fn(usize, usize) -> usize,
) -> Result<CoveringCertificate> {
    let n = p.n();
    let mut oracle = CoverOracle::new(p.clone())?;
    let mut best = Best::default();
    for sigma in cells {
        staircase_cells(sigma, m, nv, |s| scan_simplex(s, nv, n, image, &mut oracle, &mut best));
    }
    let ids = best.ids.take().ok_or_else(|| structural("no face covers the target point"))?;
    Ok(certificate(&ids, best.mask, nv, m, n, &mut oracle))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistinctLabels {
    pub simplex: Vec<usize>,
    /// Labels shown by each labeling on `simplex`.
    pub label_sets: Vec<Vec<usize>>,
    pub certificate: CoveringCertificate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PopularLabels {
    pub simplex: Vec<usize>,
    /// `counts[j-1]`: number of labelings using label `j` on `simplex`.
    pub counts: Vec<usize>,
    pub certificate: CoveringCertificate,
}

fn label_sets(simplex: &[usize], labs: &[SpernerLabeling]) -> Vec<Vec<usize>> {
    labs.iter()
        .map(|lab| {
            let s: BTreeSet<usize> = simplex.iter().filter_map(|&v| lab.get(v)).collect();
            s.into_iter().collect()
        })
        .collect()
}

/// A face of `t` on which labeling `i` shows at least `k[i]` labels and every
/// label is shown by some labeling. Requires `Σ k_i = m + n - 1`.
pub fn solve_distinct_labels(t: &Triangulation, labs: &[SpernerLabeling], k: &[usize]) -> Result<DistinctLabels> {
    let Domain::Simplex { n } = t.domain else {
        return Err(invalid("Sperner labelings live on simplex domains"));
    };
    let m = labs.len();
    if k.len() != m || k.contains(&0) || k.iter().sum::<usize>() != m + n - 1 {
        return Err(invalid("k must be positive integers summing to m + n - 1"));
    }
    let (mi, ni) = (m as i64, n as i64);
    let a = k.iter().map(|&ki| frac(ki as i64 - 1, ni) + frac(1, mi * ni)).collect();
    let b = vec![frac(1, ni); n];
    let p = TargetPoint::new(a, b)?;
    let cert = find_covering_simplex_streaming(t, labs, &p)?;
    for (i, &ki) in k.iter().enumerate() {
        if cert.degree_left(i) != ki {
            return Err(structural(format!("labeling {i} has degree {} instead of {ki}", cert.degree_left(i))));
        }
    }
    let simplex = cert.sigma.clone();
    Ok(DistinctLabels { label_sets: label_sets(&simplex, labs), simplex, certificate: cert })
}

/// A face of `t` on which label `j` is used by at least `l[j-1]` labelings.
/// Requires `Σ l_j = m + n - 1`.
pub fn solve_popular_labels(t: &Triangulation, labs: &[SpernerLabeling], l: &[usize]) -> Result<PopularLabels> {
    let Domain::Simplex { n } = t.domain else {
        return Err(invalid("Sperner labelings live on simplex domains"));
    };
    let m = labs.len();
    if l.len() != n || l.contains(&0) || l.iter().sum::<usize>() != m + n - 1 {
        return Err(invalid("l must be n positive integers summing to m + n - 1"));
    }
    let (mi, ni) = (m as i64, n as i64);
    let a = vec![frac(1, mi); m];
    let b = l.iter().map(|&lj| frac(lj as i64 - 1, mi) + frac(1, mi * ni)).collect();
    let p = TargetPoint::new(a, b)?;
    let cert = find_covering_simplex_streaming(t, labs, &p)?;
    for (j, &lj) in l.iter().enumerate() {
        if cert.degree_right(j + 1) != lj {
            return Err(structural(format!("label {} has degree {} instead of {lj}", j + 1, cert.degree_right(j + 1))));
        }
    }
    let simplex = cert.sigma.clone();
    let sets = label_sets(&simplex, labs);
    let counts = (1..=n).map(|j| sets.iter().filter(|s| s.contains(&j)).count()).collect();
    Ok(PopularLabels { simplex, counts, certificate: cert })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignedCount {
    pub positive: usize,
    pub negative: usize,
}

impl SignedCount {
    pub fn diff(&self) -> i64 {
        self.positive as i64 - self.negative as i64
    }

    fn add(&mut self, sign: i32) {
        if sign > 0 {
            self.positive += 1;
        } else {
            self.negative += 1;
        }
    }
}

/// Fully labeled simplices, each ordered by increasing label.
pub fn oriented_sperner_count(t: &Triangulation, lab: &SpernerLabeling) -> Result<SignedCount> {
    let (n, dense) = check_labelings(t, std::slice::from_ref(lab))?;
    let mut count = SignedCount::default();
    for s in &t.simplices {
        let mut order: Vec<(usize, usize)> = s.iter().map(|&v| (dense[0][v], v)).collect();
        order.sort_unstable();
        if order.iter().enumerate().all(|(j, &(l, _))| l == j + 1) && order.len() == n {
            let verts: Vec<usize> = order.iter().map(|&(_, v)| v).collect();
            count.add(orientation_sign(t, &verts)?);
        }
    }
    Ok(count)
}

/// Pairs `(σ, π)` with `π` a bijection from the vertices of `σ` to the
/// labelings such that the labels `λ_{π(v)}(v)` are pairwise distinct;
/// vertices ordered by that label.
pub fn bapat_signed_count(t: &Triangulation, labs: &[SpernerLabeling]) -> Result<SignedCount> {
    let (n, dense) = check_labelings(t, labs)?;
    if labs.len() != n {
        return Err(invalid("exactly n labelings are required"));
    }
    let perms = permutations(n);
    let mut count = SignedCount::default();
    for s in &t.simplices {
        for p in &perms {
            let mut order: Vec<(usize, usize)> = s.iter().zip(p).map(|(&v, &i)| (dense[i][v], v)).collect();
            order.sort_unstable();
            if order.windows(2).all(|w| w[0].0 != w[1].0) {
                let verts: Vec<usize> = order.iter().map(|&(_, v)| v).collect();
                count.add(orientation_sign(t, &verts)?);
            }
        }
    }
    Ok(count)
}

/// `n!` as a signed integer, for comparing against Bapat counts.
pub fn factorial(n: usize) -> i64 {
    (1..=n as i64).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexes::{kuhn_triangulation, staircase_product};

    fn identity(t: &Triangulation) -> SpernerLabeling {
        let n = t.domain.ambient();
        SpernerLabeling::from_vec(n, &(0..t.num_vertices()).map(|v| t.support(v)[0] + 1).collect::<Vec<_>>())
    }

    #[test]
    fn single_labeling_on_bare_simplex() {
        let t = kuhn_triangulation(3, 1).unwrap();
        let lab = identity(&t);
        let tbar = staircase_product(&t, 1).unwrap();
        let p = TargetPoint::uniform(1, 3);
        let c = find_covering_simplex(&t, &tbar, std::slice::from_ref(&lab), &p).unwrap();
        assert_eq!(c.sigma, vec![0, 1, 2]);
        assert!(c.weights.iter().all(|e| e.weight == frac(1, 3)));
        assert!(c.check_marginals(&p));
    }

    #[test]
    fn streaming_matches_materialized() {
        let t = kuhn_triangulation(3, 3).unwrap();
        let l1 = identity(&t);
        let l2 = SpernerLabeling::from_vec(
            3,
            &(0..t.num_vertices()).map(|v| *t.support(v).last().unwrap() + 1).collect::<Vec<_>>(),
        );
        let labs = [l1, l2];
        let tbar = staircase_product(&t, 2).unwrap();
        for p in [TargetPoint::uniform(2, 3), TargetPoint::new(vec![frac(1, 3), frac(2, 3)], vec![frac(1, 6), frac(1, 2), frac(1, 3)]).unwrap()] {
            let a = find_covering_simplex(&t, &tbar, &labs, &p).unwrap();
            let b = find_covering_simplex_streaming(&t, &labs, &p).unwrap();
            assert_eq!(a, b);
            assert!(a.check_marginals(&p));
            assert!(a.weights.len() < 2 + 3);
        }
    }

    #[test]
    fn classical_case_counts() {
        let t = kuhn_triangulation(2, 1).unwrap();
        let lab = identity(&t);
        let c = oriented_sperner_count(&t, &lab).unwrap();
        assert_eq!(c.diff().abs(), 1);
        let b = bapat_signed_count(&t, &[lab.clone(), lab]).unwrap();
        assert_eq!(b.diff().abs(), 2);
    }
}
