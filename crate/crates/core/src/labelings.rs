//! Sperner and Fan labelings: validation, alternating faces, random
//! generators.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::complexes::{Domain, Triangulation};
use crate::error::{invalid, structural, Result};

/// Labels in `1..=n`, one per vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpernerLabeling {
    pub n: usize,
    pub values: BTreeMap<usize, usize>,
}

/// Nonzero labels with `|label| <= bound`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanLabeling {
    #[serde(rename = "N")]
    pub bound: i64,
    pub values: BTreeMap<usize, i64>,
}

/// `{"kind": "sperner", "n", "values"}` or `{"kind": "fan", "N", "values"}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Labeling {
    Sperner(SpernerLabeling),
    Fan(FanLabeling),
}

// Internally tagged enums buffer their content, which loses the string to
// integer key conversion of maps; dispatch on the tag by hand instead.
impl<'de> Deserialize<'de> for Labeling {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let mut v = serde_json::Value::deserialize(d)?;
        let kind = v
            .as_object_mut()
            .and_then(|o| o.remove("kind"))
            .ok_or_else(|| D::Error::missing_field("kind"))?;
        match kind.as_str() {
            Some("sperner") => serde_json::from_value(v).map(Labeling::Sperner),
            Some("fan") => serde_json::from_value(v).map(Labeling::Fan),
            _ => return Err(D::Error::custom(format!("unknown labeling kind {kind}"))),
        }
        .map_err(D::Error::custom)
    }
}

impl SpernerLabeling {
    pub fn from_vec(n: usize, labels: &[usize]) -> Self {
        SpernerLabeling { n, values: labels.iter().copied().enumerate().collect() }
    }

    pub fn get(&self, v: usize) -> Option<usize> {
        self.values.get(&v).copied()
    }

    /// Labels as a dense vector over `0..num_vertices`.
    pub fn dense(&self, num_vertices: usize) -> Result<Vec<usize>> {
        (0..num_vertices)
            .map(|v| self.get(v).ok_or_else(|| invalid(format!("vertex {v} has no label"))))
            .collect()
    }
}

impl FanLabeling {
    pub fn from_vec(bound: i64, labels: &[i64]) -> Self {
        FanLabeling { bound, values: labels.iter().copied().enumerate().collect() }
    }

    pub fn get(&self, v: usize) -> Option<i64> {
        self.values.get(&v).copied()
    }

    pub fn dense(&self, num_vertices: usize) -> Result<Vec<i64>> {
        (0..num_vertices)
            .map(|v| self.get(v).ok_or_else(|| invalid(format!("vertex {v} has no label"))))
            .collect()
    }

    pub fn negated(&self) -> Self {
        FanLabeling { bound: self.bound, values: self.values.iter().map(|(&v, &l)| (v, -l)).collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SpernerViolation {
    Missing { vertex: usize },
    OutOfRange { vertex: usize, label: usize },
    /// The label names a coordinate that is zero at the vertex.
    ZeroCoordinate { vertex: usize, label: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FanViolation {
    Missing { vertex: usize },
    OutOfRange { vertex: usize, label: i64 },
    Adjacency { u: usize, v: usize },
    Antisymmetry { u: usize, v: usize },
}

pub fn validate_sperner(t: &Triangulation, lab: &SpernerLabeling) -> Result<Vec<SpernerViolation>> {
    let Domain::Simplex { n } = t.domain else {
        return Err(invalid("Sperner labelings live on simplex domains"));
    };
    if lab.n != n {
        return Err(invalid(format!("labeling has n = {}, triangulation has n = {n}", lab.n)));
    }
    let mut out = Vec::new();
    for v in 0..t.num_vertices() {
        match lab.get(v) {
            None => out.push(SpernerViolation::Missing { vertex: v }),
            Some(l) if l == 0 || l > n => out.push(SpernerViolation::OutOfRange { vertex: v, label: l }),
            Some(l) if t.vertices[v][l - 1].is_zero() => {
                out.push(SpernerViolation::ZeroCoordinate { vertex: v, label: l })
            }
            Some(_) => {}
        }
    }
    Ok(out)
}

/// Fan validation against an explicit adjacency structure; used directly by
/// complexes that are not geometric triangulations.
pub fn fan_violations(
    neighbors: &[BTreeSet<usize>],
    involution: &[usize],
    lab: &FanLabeling,
) -> Vec<FanViolation> {
    let mut out = Vec::new();
    for v in 0..neighbors.len() {
        match lab.get(v) {
            None => out.push(FanViolation::Missing { vertex: v }),
            Some(l) if l == 0 || l.abs() > lab.bound => {
                out.push(FanViolation::OutOfRange { vertex: v, label: l })
            }
            Some(_) => {}
        }
    }
    for (u, ns) in neighbors.iter().enumerate() {
        let Some(a) = lab.get(u) else { continue };
        for &v in ns.iter().filter(|&&v| v > u) {
            if lab.get(v) == Some(-a) {
                out.push(FanViolation::Adjacency { u, v });
            }
        }
        let w = involution[u];
        if u < w {
            if let Some(b) = lab.get(w) {
                if a + b != 0 {
                    out.push(FanViolation::Antisymmetry { u, v: w });
                }
            }
        }
    }
    out
}

pub fn validate_fan(t: &Triangulation, lab: &FanLabeling) -> Result<Vec<FanViolation>> {
    let inv = t.involution.as_ref().ok_or_else(|| invalid("Fan labelings need an involution"))?;
    Ok(fan_violations(&t.neighbors(), inv, lab))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlternationReport {
    pub alt: usize,
    pub sign: i32,
    pub witness: Vec<usize>,
}

/// Longest subsequence of `(vertex, label)` pairs with strictly increasing
/// `|label|` and alternating signs. Equal-`|label|` entries never share a
/// witness.
pub fn max_alternating_face(labels: &[(usize, i64)]) -> AlternationReport {
    if labels.is_empty() {
        return AlternationReport { alt: 0, sign: 0, witness: Vec::new() };
    }
    let mut items = labels.to_vec();
    items.sort_by_key(|&(v, l)| (l.abs(), v));
    let k = items.len();
    // best[i]: longest witness starting at i
    let mut best = vec![1usize; k];
    let mut next = vec![usize::MAX; k];
    for i in (0..k).rev() {
        for j in i + 1..k {
            let (_, a) = items[i];
            let (_, b) = items[j];
            if b.abs() > a.abs() && (a > 0) != (b > 0) && best[j] + 1 > best[i] {
                best[i] = best[j] + 1;
                next[i] = j;
            }
        }
    }
    let start = (0..k).max_by_key(|&i| (best[i], std::cmp::Reverse(i))).unwrap();
    let mut witness = Vec::with_capacity(best[start]);
    let mut i = start;
    while i != usize::MAX {
        witness.push(items[i].0);
        i = next[i];
    }
    AlternationReport { alt: best[start], sign: items[start].1.signum() as i32, witness }
}

/// Pairs `(u, u')` of adjacent vertices and labelings `(i, i')` with
/// `λ_i(u) + λ_{i'}(u') = 0`.
pub fn compatibility_violations(
    neighbors: &[BTreeSet<usize>],
    labs: &[Vec<i64>],
) -> Vec<(usize, usize, usize, usize)> {
    let mut out = Vec::new();
    for (u, ns) in neighbors.iter().enumerate() {
        for &w in ns {
            for (i, li) in labs.iter().enumerate() {
                for (j, lj) in labs.iter().enumerate() {
                    if li[u] + lj[w] == 0 {
                        out.push((u, w, i, j));
                    }
                }
            }
        }
    }
    out
}

pub fn validate_compatible(t: &Triangulation, labs: &[FanLabeling]) -> Result<bool> {
    let dense = labs
        .iter()
        .map(|l| l.dense(t.num_vertices()))
        .collect::<Result<Vec<_>>>()?;
    for l in labs {
        if !validate_fan(t, l)?.is_empty() {
            return Ok(false);
        }
    }
    Ok(compatibility_violations(&t.neighbors(), &dense).is_empty())
}

pub fn random_sperner<R: Rng + ?Sized>(t: &Triangulation, rng: &mut R) -> Result<SpernerLabeling> {
    let Domain::Simplex { n } = t.domain else {
        return Err(invalid("Sperner labelings live on simplex domains"));
    };
    let labels: Vec<usize> = (0..t.num_vertices())
        .map(|v| *t.support(v).choose(rng).expect("vertex with empty support") + 1)
        .collect();
    Ok(SpernerLabeling::from_vec(n, &labels))
}

const MAX_RESTARTS: usize = 10_000;

/// Assigns each orbit a tuple of `m` labels drawn uniformly from the values
/// not excluded by already-labeled neighbors; restarts on a dead end.
/// Across the tuple no two labels cancel, and adjacent vertices never carry
/// cancelling labels in any pair of labelings.
fn random_family<R: Rng + ?Sized>(
    neighbors: &[BTreeSet<usize>],
    inv: &[usize],
    bound: i64,
    m: usize,
    rng: &mut R,
) -> Result<Vec<Vec<i64>>> {
    let nv = neighbors.len();
    for v in 0..nv {
        if neighbors[v].contains(&inv[v]) {
            return Err(invalid(format!("vertex {v} is adjacent to its antipode")));
        }
    }
    let values: Vec<i64> = (1..=bound).flat_map(|j| [j, -j]).collect();
    let mut orbits: Vec<usize> = (0..nv).filter(|&v| v < inv[v]).collect();
    for _ in 0..MAX_RESTARTS {
        orbits.shuffle(rng);
        let mut labs: Vec<Vec<i64>> = vec![vec![0; nv]; m];
        let mut dead = false;
        for &v in &orbits {
            let w = inv[v];
            // labels at v that would cancel a labeled neighbor of v or of w
            let mut banned = BTreeSet::new();
            for lab in &labs {
                for &x in &neighbors[v] {
                    if lab[x] != 0 {
                        banned.insert(-lab[x]);
                    }
                }
                for &x in &neighbors[w] {
                    if lab[x] != 0 {
                        banned.insert(lab[x]);
                    }
                }
            }
            let mut chosen = Vec::with_capacity(m);
            for lab in labs.iter_mut() {
                let options: Vec<i64> = values
                    .iter()
                    .copied()
                    .filter(|l| !banned.contains(l) && !chosen.contains(&-l))
                    .collect();
                let Some(&l) = options.choose(rng) else {
                    dead = true;
                    break;
                };
                chosen.push(l);
                lab[v] = l;
                lab[w] = -l;
            }
            if dead {
                break;
            }
        }
        if !dead {
            return Ok(labs);
        }
    }
    Err(structural("random Fan labeling generator gave up; try a larger bound"))
}

pub fn random_fan<R: Rng + ?Sized>(t: &Triangulation, bound: i64, rng: &mut R) -> Result<FanLabeling> {
    let inv = t.involution.as_ref().ok_or_else(|| invalid("Fan labelings need an involution"))?;
    let labs = random_family(&t.neighbors(), inv, bound, 1, rng)?;
    Ok(FanLabeling::from_vec(bound, &labs[0]))
}

/// `m` pairwise compatible Fan labelings, with no two labels cancelling at
/// the same vertex.
pub fn random_compatible_family<R: Rng + ?Sized>(
    t: &Triangulation,
    bound: i64,
    m: usize,
    rng: &mut R,
) -> Result<Vec<FanLabeling>> {
    let inv = t.involution.as_ref().ok_or_else(|| invalid("Fan labelings need an involution"))?;
    let labs = random_family(&t.neighbors(), inv, bound, m, rng)?;
    Ok(labs.iter().map(|l| FanLabeling::from_vec(bound, l)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexes::{cross_polytope_sphere, kuhn_triangulation};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn alt_of(labels: &[i64]) -> AlternationReport {
        let pairs: Vec<(usize, i64)> = labels.iter().copied().enumerate().collect();
        max_alternating_face(&pairs)
    }

    #[test]
    fn alternation_examples() {
        assert_eq!((alt_of(&[1]).alt, alt_of(&[1]).sign), (1, 1));
        let r = alt_of(&[1, -7]);
        assert_eq!((r.alt, r.sign), (2, 1));
        let r = alt_of(&[1, 3, -4, 6]);
        assert_eq!((r.alt, r.sign), (3, 1));
        assert_eq!(r.witness.len(), 3);
        // equal magnitudes never alternate with each other
        assert_eq!(alt_of(&[2, -2]).alt, 1);
    }

    #[test]
    fn sperner_validation() {
        let t = kuhn_triangulation(3, 2).unwrap();
        let mut labels: Vec<usize> = (0..t.num_vertices()).map(|v| t.support(v)[0] + 1).collect();
        let lab = SpernerLabeling::from_vec(3, &labels);
        assert!(validate_sperner(&t, &lab).unwrap().is_empty());
        // midpoint of the edge between the first two corners
        let mid = t
            .vertices
            .iter()
            .position(|c| c[2].is_zero() && !c[0].is_zero() && !c[1].is_zero())
            .unwrap();
        labels[mid] = 3;
        let lab = SpernerLabeling::from_vec(3, &labels);
        assert_eq!(
            validate_sperner(&t, &lab).unwrap(),
            vec![SpernerViolation::ZeroCoordinate { vertex: mid, label: 3 }]
        );
        let mut partial = lab.clone();
        partial.values.remove(&0);
        assert!(validate_sperner(&t, &partial)
            .unwrap()
            .contains(&SpernerViolation::Missing { vertex: 0 }));
    }

    #[test]
    fn fan_validation_on_circle() {
        let s1 = cross_polytope_sphere(2, 0).unwrap();
        // ids: +e1=0, -e1=1, +e2=2, -e2=3; around the circle: +e1,+e2,-e1,-e2
        let lab = FanLabeling::from_vec(2, &[1, -1, 2, -2]);
        assert!(validate_fan(&s1, &lab).unwrap().is_empty());
        let bad = FanLabeling::from_vec(3, &[3, -3, -3, 3]);
        let v = validate_fan(&s1, &bad).unwrap();
        assert!(v.iter().any(|x| matches!(x, FanViolation::Adjacency { .. })));
        let asym = FanLabeling::from_vec(2, &[1, 1, 2, -2]);
        assert!(validate_fan(&s1, &asym)
            .unwrap()
            .contains(&FanViolation::Antisymmetry { u: 0, v: 1 }));
    }

    #[test]
    fn duplicated_labeling_is_compatible() {
        let t = cross_polytope_sphere(3, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let l = random_fan(&t, 4, &mut rng).unwrap();
        assert!(validate_compatible(&t, std::slice::from_ref(&l)).unwrap());
        assert!(validate_compatible(&t, &[l.clone(), l]).unwrap());
    }

    #[test]
    fn json_shapes() {
        let lab = Labeling::Fan(FanLabeling::from_vec(2, &[1, -1]));
        let s = serde_json::to_string(&lab).unwrap();
        assert_eq!(s, r#"{"kind":"fan","N":2,"values":{"0":1,"1":-1}}"#);
        let back: Labeling = serde_json::from_str(&s).unwrap();
        assert_eq!(back, lab);
        let sp: Labeling = serde_json::from_str(r#"{"kind":"sperner","n":3,"values":{"0":2}}"#).unwrap();
        assert!(matches!(sp, Labeling::Sperner(SpernerLabeling { n: 3, .. })));
    }
}
