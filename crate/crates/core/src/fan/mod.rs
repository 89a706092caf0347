//! Fan-lemma solvers on free simplicial Z2-complexes: alternating simplex
//! search, the multilabeled versions driven by a μ labeling of the
//! barycentric subdivision, and their applications.
//!
//! Labelings are indexed from 0; labels are the nonzero integers themselves.

mod gale;
mod halving;
mod hom;

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::complexes::Triangulation;
use crate::error::{invalid, structural, Result};
use crate::labelings::{fan_violations, max_alternating_face, FanLabeling};
use crate::matching::{hall_matching, BipartiteGraph, Side};

pub use gale::{balanced_fan_pairs, dimension_coloring, gale_fan, BalancedPair, GalePair};
pub use halving::{consensus_halving, HalvingOptions, SplitOutcome, Verdict};
pub use hom::{colorful_bipartite, complete_graph_index, hom_complex, ColorfulOutcome, ColorfulWitness, Graph, HomComplex, HOM_SIZE_LIMIT};

/// A simplicial complex given by its maximal simplices, with a free
/// involution and a caller-asserted Z2-index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Z2Complex {
    pub simplices: Vec<Vec<usize>>,
    pub involution: Vec<usize>,
    pub declared_index: usize,
}

impl Z2Complex {
    pub fn new(mut simplices: Vec<Vec<usize>>, involution: Vec<usize>, declared_index: usize) -> Result<Self> {
        for s in simplices.iter_mut() {
            s.sort_unstable();
            s.dedup();
        }
        simplices.sort();
        simplices.dedup();
        let k = Z2Complex { simplices, involution, declared_index };
        k.validate()?;
        Ok(k)
    }

    pub fn from_triangulation(t: &Triangulation, declared_index: usize) -> Result<Self> {
        let inv = t.involution.clone().ok_or_else(|| invalid("triangulation has no involution"))?;
        Z2Complex::new(t.simplices.clone(), inv, declared_index)
    }

    fn validate(&self) -> Result<()> {
        let nv = self.involution.len();
        if self.simplices.is_empty() {
            return Err(invalid("complex has no simplices"));
        }
        for (v, &w) in self.involution.iter().enumerate() {
            if w >= nv || self.involution[w] != v || w == v {
                return Err(invalid(format!("involution is not free at vertex {v}")));
            }
        }
        let set: HashSet<&Vec<usize>> = self.simplices.iter().collect();
        for s in &self.simplices {
            if s.iter().any(|&v| v >= nv) {
                return Err(invalid(format!("simplex {s:?} names a missing vertex")));
            }
            if !set.contains(&self.antipode(s)) {
                return Err(invalid(format!("antipode of {s:?} is not a maximal simplex")));
            }
        }
        if self.declared_index > self.dim() {
            return Err(invalid(format!("declared index {} exceeds dimension {}", self.declared_index, self.dim())));
        }
        Ok(())
    }

    pub fn num_vertices(&self) -> usize {
        self.involution.len()
    }

    pub fn dim(&self) -> usize {
        self.simplices.iter().map(Vec::len).max().unwrap_or(1) - 1
    }

    pub fn antipode(&self, face: &[usize]) -> Vec<usize> {
        let mut f: Vec<usize> = face.iter().map(|&v| self.involution[v]).collect();
        f.sort_unstable();
        f
    }

    pub fn neighbors(&self) -> Vec<BTreeSet<usize>> {
        let mut out = vec![BTreeSet::new(); self.num_vertices()];
        for s in &self.simplices {
            for &u in s {
                for &v in s {
                    if u != v {
                        out[u].insert(v);
                    }
                }
            }
        }
        out
    }

    /// Every face with `size` vertices, sorted.
    pub fn faces_of_size(&self, size: usize) -> Vec<Vec<usize>> {
        let mut out = BTreeSet::new();
        for s in &self.simplices {
            for f in local_faces(s) {
                if f.len() == size {
                    out.insert(f);
                }
            }
        }
        out.into_iter().collect()
    }

    pub(crate) fn dense_fan(&self, lab: &FanLabeling) -> Result<Vec<i64>> {
        let v = fan_violations(&self.neighbors(), &self.involution, lab);
        if let Some(first) = v.first() {
            return Err(invalid(format!("not a Fan labeling: {first:?}")));
        }
        lab.dense(self.num_vertices())
    }
}

/// Nonempty faces of `s` ordered by size, then lexicographically.
fn local_faces(s: &[usize]) -> Vec<Vec<usize>> {
    let k = s.len();
    let mut out: Vec<Vec<usize>> = (1u32..1 << k)
        .map(|mask| (0..k).filter(|&b| mask >> b & 1 == 1).map(|b| s[b]).collect())
        .collect();
    out.sort_by(|a: &Vec<usize>, b| (a.len(), a).cmp(&(b.len(), b)));
    out
}

/// Vertices ordered by `|label|`, with their labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlternatingSimplex {
    pub vertices: Vec<usize>,
    pub labels: Vec<i64>,
    pub sign: i32,
}

/// `Some` when the labels of `face` strictly alternate, with every vertex
/// taking part.
pub fn alternation(face: &[usize], lab: &[i64]) -> Option<AlternatingSimplex> {
    let mut items: Vec<(usize, i64)> = face.iter().map(|&v| (v, lab[v])).collect();
    items.sort_by_key(|&(v, l)| (l.abs(), v));
    let ok = items
        .windows(2)
        .all(|w| w[0].1.abs() < w[1].1.abs() && (w[0].1 > 0) != (w[1].1 > 0));
    ok.then(|| AlternatingSimplex {
        vertices: items.iter().map(|x| x.0).collect(),
        labels: items.iter().map(|x| x.1).collect(),
        sign: items[0].1.signum() as i32,
    })
}

/// The first negative alternating `d`-simplex in sorted vertex order.
pub fn fan_search(k: &Z2Complex, lab: &FanLabeling, d: usize) -> Result<AlternatingSimplex> {
    if d > k.declared_index {
        return Err(invalid(format!("d = {d} exceeds the declared index {}", k.declared_index)));
    }
    let dense = k.dense_fan(lab)?;
    search_dense(k, &dense, d)
}

pub(crate) fn search_dense(k: &Z2Complex, dense: &[i64], d: usize) -> Result<AlternatingSimplex> {
    k.faces_of_size(d + 1)
        .iter()
        .filter_map(|f| alternation(f, dense))
        .find(|a| a.sign < 0)
        .ok_or_else(|| structural(format!("no alternating {d}-simplex; the declared index is wrong")))
}

/// A chain `σ_0 ⊂ σ_1 ⊂ …` of faces with the values of μ along it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MuChainWitness {
    pub chain: Vec<Vec<usize>>,
    pub mu_values: Vec<i64>,
}

/// Checks that `mu` is a Fan labeling of the barycentric subdivision:
/// antisymmetric under the involution and never cancelling along an
/// inclusion.
pub(crate) fn check_mu(k: &Z2Complex, mu: &dyn Fn(&[usize]) -> i64) -> Result<()> {
    for s in &k.simplices {
        let faces = local_faces(s);
        let vals: Vec<i64> = faces.iter().map(|f| mu(f)).collect();
        for (a, f) in faces.iter().enumerate() {
            if vals[a] == 0 {
                return Err(structural(format!("mu vanishes on {f:?}")));
            }
            if mu(&k.antipode(f)) != -vals[a] {
                return Err(structural(format!("mu is not antisymmetric at {f:?}")));
            }
            for (b, g) in faces.iter().enumerate().skip(a + 1) {
                if g.len() > f.len() && f.iter().all(|v| g.contains(v)) && vals[a] + vals[b] == 0 {
                    return Err(structural(format!("mu cancels along {f:?} < {g:?}")));
                }
            }
        }
    }
    Ok(())
}

/// Depth-first search for a chain of `len` faces inside one maximal simplex
/// with `1 <= -μ(σ_0) < μ(σ_1) < -μ(σ_2) < …`. Maximal simplices are tried in
/// sorted order and extensions by increasing `|μ|`, so the first chain found
/// is canonical.
pub(crate) fn chain_search(k: &Z2Complex, len: usize, mu: &dyn Fn(&[usize]) -> i64) -> Result<MuChainWitness> {
    chain_search_where(k, len, mu, &mut |_| true)
}

/// As `chain_search`, skipping chains rejected by `accept`.
pub(crate) fn chain_search_where(
    k: &Z2Complex,
    len: usize,
    mu: &dyn Fn(&[usize]) -> i64,
    accept: &mut dyn FnMut(&MuChainWitness) -> bool,
) -> Result<MuChainWitness> {
    let mut found = None;
    for s in &k.simplices {
        let faces = local_faces(s);
        let vals: Vec<i64> = faces.iter().map(|f| mu(f)).collect();
        let mut chain = Vec::with_capacity(len);
        let mut done = |chain: &[usize]| {
            let w = MuChainWitness {
                chain: chain.iter().map(|&a| faces[a].clone()).collect(),
                mu_values: chain.iter().map(|&a| vals[a]).collect(),
            };
            let ok = accept(&w);
            if ok {
                found = Some(w);
            }
            ok
        };
        if extend(&faces, &vals, len, &mut chain, &mut done) {
            return Ok(found.unwrap());
        }
    }
    Err(structural("no alternating chain for mu; the declared index is wrong"))
}

fn extend(
    faces: &[Vec<usize>],
    vals: &[i64],
    len: usize,
    chain: &mut Vec<usize>,
    done: &mut dyn FnMut(&[usize]) -> bool,
) -> bool {
    if chain.len() == len {
        return done(chain);
    }
    let mut cands: Vec<usize> = match chain.last() {
        None => (0..faces.len()).filter(|&a| vals[a] < 0).collect(),
        Some(&p) => (0..faces.len())
            .filter(|&a| {
                faces[a].len() > faces[p].len()
                    && faces[p].iter().all(|v| faces[a].contains(v))
                    && (vals[a] > 0) != (vals[p] > 0)
                    && vals[a].abs() > vals[p].abs()
            })
            .collect(),
    };
    cands.sort_by_key(|&a| (vals[a].abs(), a));
    for a in cands {
        chain.push(a);
        if extend(faces, vals, len, chain, done) {
            return true;
        }
        chain.pop();
    }
    false
}

fn alt_report(face: &[usize], lab: &[i64]) -> crate::labelings::AlternationReport {
    let pairs: Vec<(usize, i64)> = face.iter().map(|&v| (v, lab[v])).collect();
    max_alternating_face(&pairs)
}

/// `±[d_1 + … + d_{i*-1} + alt_{i*}(σ)]`, `i*` the first labeling without a
/// `d_i`-dimensional alternating face (the last one if there is none).
pub(crate) fn mu_multi(face: &[usize], labs: &[Vec<i64>], d: &[usize]) -> i64 {
    let mut base = 0;
    for (i, lab) in labs.iter().enumerate() {
        let rep = alt_report(face, lab);
        if rep.alt <= d[i] || i + 1 == labs.len() {
            return rep.sign as i64 * (base + rep.alt) as i64;
        }
        base += d[i];
    }
    unreachable!("at least one labeling")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlternatingFace {
    pub labeling: usize,
    pub vertices: Vec<usize>,
    pub labels: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiFan {
    pub simplex: Vec<usize>,
    /// One `d_i`-dimensional alternating face per labeling.
    pub faces: Vec<AlternatingFace>,
    pub witness: MuChainWitness,
}

/// A simplex carrying a `d_i`-dimensional alternating face for every `λ_i`,
/// where `Σ d_i` is the declared index.
pub fn multilabeled_fan(k: &Z2Complex, labs: &[FanLabeling], d: &[usize]) -> Result<MultiFan> {
    if labs.is_empty() || labs.len() != d.len() {
        return Err(invalid("need one dimension per labeling"));
    }
    if d.iter().sum::<usize>() != k.declared_index {
        return Err(invalid(format!("dimensions must sum to the declared index {}", k.declared_index)));
    }
    let dense = labs.iter().map(|l| k.dense_fan(l)).collect::<Result<Vec<_>>>()?;
    multi_dense(k, &dense, d)
}

pub(crate) fn multi_dense(k: &Z2Complex, dense: &[Vec<i64>], d: &[usize]) -> Result<MultiFan> {
    let mu = |f: &[usize]| mu_multi(f, dense, d);
    check_mu(k, &mu)?;
    let witness = chain_search(k, k.declared_index + 1, &mu)?;
    let top = witness.chain.last().unwrap().clone();
    let mut faces = Vec::with_capacity(dense.len());
    for (i, lab) in dense.iter().enumerate() {
        let rep = alt_report(&top, lab);
        if rep.alt < d[i] + 1 {
            return Err(structural(format!("top of the chain is not desirable for labeling {i}")));
        }
        let vertices = rep.witness[..d[i] + 1].to_vec();
        let labels = vertices.iter().map(|&v| lab[v]).collect();
        faces.push(AlternatingFace { labeling: i, vertices, labels });
    }
    Ok(MultiFan { simplex: top, faces, witness })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualFan {
    /// `v_1, …, v_n`.
    pub simplex: Vec<usize>,
    /// Label numbers `j_1 <= … <= j_n`.
    pub j: Vec<usize>,
    /// Labeling indices `i_1, …, i_n`.
    pub i: Vec<usize>,
    pub witness: MuChainWitness,
    /// False when no alternating chain gave distinct vertices and `simplex`
    /// comes from a direct scan; `witness` is then the first chain found.
    pub via_chain: bool,
}

/// `r_j(σ)`: number of labelings showing `+j` or `-j` on `face`, for
/// `j = 1..=big_n` (index 0 unused).
pub fn label_presence(face: &[usize], labs: &[Vec<i64>], big_n: usize) -> Vec<usize> {
    let mut r = vec![0; big_n + 1];
    for lab in labs {
        let present: BTreeSet<usize> = face.iter().map(|&v| lab[v].unsigned_abs() as usize).collect();
        for j in present {
            if j <= big_n {
                r[j] += 1;
            }
        }
    }
    r
}

fn star(face: &[usize], labs: &[Vec<i64>], ell: &[usize]) -> (usize, usize, i64) {
    let big_n = ell.len();
    let r = label_presence(face, labs, big_n);
    let j = (1..=big_n).rev().find(|&j| r[j] >= ell[j - 1]).expect("some r_j reaches its quota");
    let (i, sign) = (0..labs.len())
        .rev()
        .find_map(|i| face.iter().find(|&&v| labs[i][v].unsigned_abs() as usize == j).map(|&v| (i, labs[i][v].signum())))
        .expect("j* appears on the face");
    (j, i, sign)
}

/// `±[m·(j*−1) + i*]` with 1-based `i*`.
pub(crate) fn mu_dual(face: &[usize], labs: &[Vec<i64>], ell: &[usize]) -> i64 {
    let (j, i, sign) = star(face, labs, ell);
    sign * (labs.len() * (j - 1) + i + 1) as i64
}

/// Distinct vertices `v_k` of the top face with `λ_{i_k}(v_k) = (−1)^k j_k`,
/// `(j_k, i_k)` read off the chain.
fn dual_vertices(w: &MuChainWitness, dense: &[Vec<i64>], ell: &[usize]) -> Option<(Vec<usize>, Vec<usize>, Vec<usize>)> {
    let n = w.chain.len();
    let mut js = Vec::with_capacity(n);
    let mut is = Vec::with_capacity(n);
    for f in &w.chain {
        let (j, i, _) = star(f, dense, ell);
        js.push(j);
        is.push(i);
    }
    let top = w.chain.last().unwrap();
    let mut edges = Vec::new();
    for kk in 0..n {
        let want = if kk % 2 == 0 { -(js[kk] as i64) } else { js[kk] as i64 };
        for (p, &v) in top.iter().enumerate() {
            if dense[is[kk]][v] == want {
                edges.push((kk, p));
            }
        }
    }
    let g = BipartiteGraph::new(n, top.len(), edges);
    let matching = hall_matching(&g, Side::Left, &[]);
    let pairs = matching.matching()?;
    let mut simplex = vec![0; n];
    for &(kk, p) in pairs {
        simplex[kk] = top[p];
    }
    Some((simplex, js, is))
}

/// `n` distinct vertices of `s` satisfying the three conditions directly.
fn dual_scan(s: &[usize], dense: &[Vec<i64>], ell: &[usize], n: usize) -> Option<(Vec<usize>, Vec<usize>, Vec<usize>)> {
    let r = label_presence(s, dense, ell.len());
    let mut picked: Vec<(usize, usize, usize)> = Vec::with_capacity(n);
    fn rec(
        s: &[usize],
        dense: &[Vec<i64>],
        ell: &[usize],
        r: &[usize],
        n: usize,
        picked: &mut Vec<(usize, usize, usize)>,
    ) -> bool {
        let k = picked.len();
        if k == n {
            return true;
        }
        for &v in s {
            if picked.iter().any(|p| p.0 == v) {
                continue;
            }
            for (i, lab) in dense.iter().enumerate() {
                let l = lab[v];
                let j = l.unsigned_abs() as usize;
                let sign_ok = (l < 0) == k.is_multiple_of(2);
                let order_ok = picked.last().is_none_or(|&(_, pj, pi)| pj < j || (pj == j && pi < i));
                if sign_ok && order_ok && r[j] >= ell[j - 1] {
                    picked.push((v, j, i));
                    if rec(s, dense, ell, r, n, picked) {
                        return true;
                    }
                    picked.pop();
                }
            }
        }
        false
    }
    rec(s, dense, ell, &r, n, &mut picked).then(|| {
        (picked.iter().map(|p| p.0).collect(), picked.iter().map(|p| p.1).collect(), picked.iter().map(|p| p.2).collect())
    })
}

/// A simplex `⟨v_1..v_n⟩` with `λ_{i_k}(v_k) = (−1)^k j_k`, `j` nondecreasing,
/// `i` increasing along equal `j`, and `±j_k` present in at least `ℓ_{j_k}`
/// labelings.
pub fn multifan_dual(k: &Z2Complex, labs: &[FanLabeling], ell: &[usize]) -> Result<DualFan> {
    let m = labs.len();
    let big_n = ell.len();
    if m == 0 || big_n == 0 || ell.contains(&0) {
        return Err(invalid("need labelings and positive quotas"));
    }
    if ell.iter().sum::<usize>() != m + big_n - 1 {
        return Err(invalid(format!("quotas must sum to m + N - 1 = {}", m + big_n - 1)));
    }
    let dense = labs.iter().map(|l| k.dense_fan(l)).collect::<Result<Vec<_>>>()?;
    if dense.iter().flatten().any(|l| l.unsigned_abs() as usize > big_n) {
        return Err(invalid(format!("labels must lie in ±1..±{big_n}")));
    }
    let mu = |f: &[usize]| mu_dual(f, &dense, ell);
    check_mu(k, &mu)?;
    let n = k.declared_index + 1;
    let mut picked = None;
    let found = chain_search_where(k, n, &mu, &mut |w| {
        picked = dual_vertices(w, &dense, ell);
        picked.is_some()
    });
    let via_chain = found.is_ok();
    let (witness, (simplex, js, is)) = match found {
        Ok(w) => (w, picked.unwrap()),
        Err(_) => {
            // i*(σ_k) can be attained on an earlier vertex of the chain, so
            // no chain may give distinct v_k; scan the simplices directly
            let w = chain_search(k, n, &mu)?;
            let hit = k
                .simplices
                .iter()
                .find_map(|s| dual_scan(s, &dense, ell, n))
                .ok_or_else(|| structural("no simplex carries distinct vertices v_k"))?;
            (w, hit)
        }
    };
    Ok(DualFan { simplex, j: js, i: is, witness, via_chain })
}
