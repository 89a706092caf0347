use std::collections::BTreeSet;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{search_dense, Z2Complex};
use crate::complexes::{permutations, Triangulation};
use crate::error::{invalid, structural, Result};
use crate::labelings::{compatibility_violations, FanLabeling};
use crate::linalg::{LinearProgram, LpOutcome, Relation};
use crate::matching::{hall_matching, BipartiteGraph, Side};
use crate::rational::{frac, int, one, Rational};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GalePair {
    pub simplex: Vec<usize>,
    /// Barycentric coordinates of the covering point on `simplex`.
    #[serde(with = "crate::rational::serde_vec")]
    pub weights: Vec<Rational>,
    /// `pi[j]` is the labeling that takes the value `α_j·(j+1)` on `simplex`.
    pub pi: Vec<usize>,
    /// `z[i][j]`: coordinate `j` of labeling `i`'s map at the covering point.
    #[serde(with = "crate::rational::serde_vec_vec")]
    pub z: Vec<Vec<Rational>>,
}

fn check_family(k: &Z2Complex, labs: &[FanLabeling]) -> Result<Vec<Vec<i64>>> {
    let n = labs.len();
    let dense = labs.iter().map(|l| k.dense_fan(l)).collect::<Result<Vec<_>>>()?;
    if let Some(&(u, w, i, j)) = compatibility_violations(&k.neighbors(), &dense).first() {
        return Err(invalid(format!("labelings {i} and {j} cancel on the edge {u}-{w}; compatibility violated")));
    }
    if dense.iter().flatten().any(|l| l.unsigned_abs() as usize > n) {
        return Err(invalid(format!("labels must lie in ±1..±{n}")));
    }
    Ok(dense)
}

/// Simplex and bijection `π` with `α_j·j` a value of `λ_{π(j)}` on the simplex,
/// from the averaged map `L = (1/n) Σ L_i` covering `α/n`.
pub fn gale_fan(k: &Z2Complex, labs: &[FanLabeling], alpha: &[i32]) -> Result<GalePair> {
    let n = labs.len();
    if n == 0 || alpha.len() != n || alpha.iter().any(|a| a.abs() != 1) {
        return Err(invalid("alpha must be a ±1 vector with one entry per labeling"));
    }
    if k.declared_index + 1 != n {
        return Err(invalid(format!("need declared index {} for {n} labelings", n - 1)));
    }
    let dense = check_family(k, labs)?;
    for u in 0..k.num_vertices() {
        for i in 0..n {
            for j in i + 1..n {
                if dense[i][u] + dense[j][u] == 0 {
                    return Err(invalid(format!("labelings {i} and {j} cancel at vertex {u}")));
                }
            }
        }
    }
    // L_i(v) = ±e_{|λ_i(v)|}
    let image = |v: usize, j: usize| -> Rational {
        let mut s = 0i64;
        for lab in &dense {
            if lab[v].unsigned_abs() as usize == j + 1 {
                s += lab[v].signum();
            }
        }
        frac(s, n as i64)
    };
    for s in &k.simplices {
        let mut lp = LinearProgram::new(s.len());
        lp.add(vec![one(); s.len()], Relation::Eq, one());
        for (j, &a) in alpha.iter().enumerate() {
            lp.add(s.iter().map(|&v| image(v, j)).collect(), Relation::Eq, frac(a as i64, n as i64));
        }
        let LpOutcome::Optimal { x, .. } = lp.solve() else { continue };
        let z: Vec<Vec<Rational>> = dense
            .iter()
            .map(|lab| {
                (0..n)
                    .map(|j| {
                        s.iter()
                            .zip(&x)
                            .filter(|(&v, _)| lab[v].unsigned_abs() as usize == j + 1)
                            .map(|(&v, t)| t * int(lab[v].signum()))
                            .sum()
                    })
                    .collect()
            })
            .collect();
        let mut edges = Vec::new();
        for (i, row) in z.iter().enumerate() {
            for (j, zij) in row.iter().enumerate() {
                if !zij.is_zero() {
                    edges.push((i, j));
                }
            }
        }
        let g = BipartiteGraph::new(n, n, edges);
        let m = hall_matching(&g, Side::Right, &[]);
        let pairs = m.matching().ok_or_else(|| structural("Hall condition fails at the covering point"))?;
        let mut pi = vec![0; n];
        for &(i, j) in pairs {
            pi[j] = i;
        }
        return Ok(GalePair { simplex: s.clone(), weights: x, pi, z });
    }
    Err(structural("no simplex covers the target point; hypotheses violated"))
}

/// `c(v) = (number of nonzero coordinates) − 1`: the dimension of the face of
/// the cross-polytope whose barycenter is `v`, a balanced coloring of its
/// first barycentric subdivision.
pub fn dimension_coloring(t: &Triangulation) -> Vec<usize> {
    t.vertices.iter().map(|c| c.iter().filter(|x| !x.is_zero()).count() - 1).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalancedPair {
    /// `v_1, …, v_n` with `0 < −λ_{π(v_1)}(v_1) < λ_{π(v_2)}(v_2) < …`.
    pub simplex: Vec<usize>,
    /// `π(v_k)` for each vertex, in the same order.
    pub assignment: Vec<usize>,
    pub labels: Vec<i64>,
    /// The permutation `π'` with `π = π' ∘ c`.
    pub permutation: Vec<usize>,
}

/// One negative alternating pair per permutation `π'` of the labelings,
/// from the composite labeling `λ_{π'(c(v))}(v)`.
pub fn balanced_fan_pairs(k: &Z2Complex, coloring: &[usize], labs: &[FanLabeling]) -> Result<Vec<BalancedPair>> {
    let n = labs.len();
    if n == 0 || k.declared_index + 1 != n {
        return Err(invalid(format!("need declared index {} for {n} labelings", n.saturating_sub(1))));
    }
    if coloring.len() != k.num_vertices() || coloring.iter().any(|&c| c >= n) {
        return Err(invalid(format!("coloring must give every vertex a color in 0..{n}")));
    }
    for v in 0..k.num_vertices() {
        if coloring[k.involution[v]] != coloring[v] {
            return Err(invalid(format!("coloring differs on the orbit of {v}")));
        }
    }
    for s in &k.simplices {
        let colors: BTreeSet<usize> = s.iter().map(|&v| coloring[v]).collect();
        if s.len() != n || colors.len() != n {
            return Err(invalid(format!("simplex {s:?} is not colorful")));
        }
    }
    let dense = check_family(k, labs)?;
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for p in permutations(n) {
        let composite: Vec<i64> = (0..k.num_vertices()).map(|v| dense[p[coloring[v]]][v]).collect();
        let neighbors = k.neighbors();
        if (0..k.num_vertices()).any(|u| neighbors[u].iter().any(|&w| composite[u] + composite[w] == 0)) {
            return Err(invalid("composite labeling is not a Fan labeling; compatibility violated"));
        }
        let a = search_dense(k, &composite, n - 1)?;
        let assignment: Vec<usize> = a.vertices.iter().map(|&v| p[coloring[v]]).collect();
        let key: BTreeSet<(usize, usize)> = a.vertices.iter().copied().zip(assignment.iter().copied()).collect();
        if !seen.insert(key) {
            return Err(structural("two permutations produced the same pair"));
        }
        out.push(BalancedPair { simplex: a.vertices, assignment, labels: a.labels, permutation: p });
    }
    Ok(out)
}
