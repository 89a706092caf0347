use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::{multi_dense, MultiFan, Z2Complex};
use crate::error::{invalid, structural, Result};

/// `{"vertices": n, "edges": [[u, v], ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Graph { vertices: n, edges }
    }

    pub fn adjacency(&self) -> Result<Vec<Vec<bool>>> {
        let mut adj = vec![vec![false; self.vertices]; self.vertices];
        for &(u, v) in &self.edges {
            if u >= self.vertices || v >= self.vertices || u == v {
                return Err(invalid(format!("bad edge ({u}, {v})")));
            }
            adj[u][v] = true;
            adj[v][u] = true;
        }
        Ok(adj)
    }
}

/// Largest number of poset elements `hom_complex` will build.
pub const HOM_SIZE_LIMIT: usize = 200;
const CHAIN_LIMIT: usize = 200_000;

/// The Z2-index of `Hom(K_2, K_n)`.
pub fn complete_graph_index(n: usize) -> usize {
    n.saturating_sub(2)
}

/// Order complex of the pairs `(A, B)` of disjoint nonempty vertex sets
/// inducing complete bipartite subgraphs; vertex `e` of the complex is
/// `elements[e]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomComplex {
    pub graph: Graph,
    pub elements: Vec<(Vec<usize>, Vec<usize>)>,
    pub complex: Z2Complex,
}

pub fn hom_complex(g: &Graph, declared_index: usize) -> Result<HomComplex> {
    let adj = g.adjacency()?;
    let n = g.vertices;
    // side[v]: 0 absent, 1 in A, 2 in B
    let mut elements = Vec::new();
    let mut side = vec![0u8; n];
    fn rec(
        v: usize,
        adj: &[Vec<bool>],
        side: &mut [u8],
        out: &mut Vec<(Vec<usize>, Vec<usize>)>,
    ) -> Result<()> {
        if v == side.len() {
            let a: Vec<usize> = (0..v).filter(|&x| side[x] == 1).collect();
            let b: Vec<usize> = (0..v).filter(|&x| side[x] == 2).collect();
            if !a.is_empty() && !b.is_empty() {
                out.push((a, b));
                if out.len() > HOM_SIZE_LIMIT {
                    return Err(invalid(format!("Hom complex has more than {HOM_SIZE_LIMIT} elements")));
                }
            }
            return Ok(());
        }
        for s in 0..3u8 {
            let ok = match s {
                0 => true,
                // every vertex on one side must see the whole other side
                _ => (0..v).all(|x| side[x] == 0 || side[x] == s || adj[v][x]),
            };
            if ok {
                side[v] = s;
                rec(v + 1, adj, side, out)?;
                side[v] = 0;
            }
        }
        Ok(())
    }
    if n > 24 {
        return Err(invalid(format!("Hom complex has more than {HOM_SIZE_LIMIT} elements")));
    }
    rec(0, &adj, &mut side, &mut elements)?;
    elements.sort_by(|x, y| (x.0.len() + x.1.len(), x).cmp(&(y.0.len() + y.1.len(), y)));
    if elements.is_empty() {
        return Err(invalid("graph has no edges"));
    }
    let index: HashMap<&(Vec<usize>, Vec<usize>), usize> = elements.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let involution: Vec<usize> = elements.iter().map(|(a, b)| index[&(b.clone(), a.clone())]).collect();
    // covers add exactly one vertex
    let contains = |x: &(Vec<usize>, Vec<usize>), y: &(Vec<usize>, Vec<usize>)| {
        x.0.iter().all(|v| y.0.contains(v)) && x.1.iter().all(|v| y.1.contains(v))
    };
    let size = |e: &(Vec<usize>, Vec<usize>)| e.0.len() + e.1.len();
    let up: Vec<Vec<usize>> = elements
        .iter()
        .map(|x| (0..elements.len()).filter(|&y| size(&elements[y]) == size(x) + 1 && contains(x, &elements[y])).collect())
        .collect();
    let mut chains = Vec::new();
    let mut cur = Vec::new();
    fn walk(e: usize, up: &[Vec<usize>], cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) -> Result<()> {
        cur.push(e);
        if up[e].is_empty() {
            out.push(cur.clone());
            if out.len() > CHAIN_LIMIT {
                return Err(invalid("Hom complex has too many maximal chains"));
            }
        }
        for &f in &up[e] {
            walk(f, up, cur, out)?;
        }
        cur.pop();
        Ok(())
    }
    for e in (0..elements.len()).filter(|&e| size(&elements[e]) == 2) {
        walk(e, &up, &mut cur, &mut chains)?;
    }
    let complex = Z2Complex::new(chains, involution, declared_index)?;
    Ok(HomComplex { graph: g.clone(), elements, complex })
}

/// A colorful complete bipartite subgraph `left × right` for one coloring.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColorfulWitness {
    pub coloring: usize,
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColorfulOutcome {
    /// The complete bipartite subgraph `(A, B)` containing every witness.
    pub top: (Vec<usize>, Vec<usize>),
    pub witnesses: Vec<ColorfulWitness>,
    pub multifan: MultiFan,
}

/// For proper colorings `c_1..c_m` (colors are positive integers) and
/// positive `d_i` summing to the declared index, one complete bipartite
/// subgraph containing a colorful `K_{⌈d_i/2⌉+1, ⌊d_i/2⌋+1}` for every `c_i`.
pub fn colorful_bipartite(
    g: &Graph,
    colorings: &[Vec<usize>],
    d: &[usize],
    declared_index: usize,
) -> Result<ColorfulOutcome> {
    if colorings.is_empty() || colorings.len() != d.len() || d.contains(&0) {
        return Err(invalid("need one positive d per coloring"));
    }
    if d.iter().sum::<usize>() != declared_index {
        return Err(invalid(format!("d must sum to the declared index {declared_index}")));
    }
    for (i, c) in colorings.iter().enumerate() {
        if c.len() != g.vertices || c.contains(&0) {
            return Err(invalid(format!("coloring {i} must give every vertex a positive color")));
        }
        if let Some(&(u, v)) = g.edges.iter().find(|&&(u, v)| c[u] == c[v]) {
            return Err(invalid(format!("coloring {i} is not proper on edge ({u}, {v})")));
        }
    }
    let hc = hom_complex(g, declared_index)?;
    let dense: Vec<Vec<i64>> = colorings
        .iter()
        .map(|c| {
            hc.elements
                .iter()
                .map(|(a, b)| {
                    let ma = a.iter().map(|&v| c[v]).max().unwrap();
                    let mb = b.iter().map(|&v| c[v]).max().unwrap();
                    if ma > mb {
                        -(ma as i64)
                    } else {
                        mb as i64
                    }
                })
                .collect()
        })
        .collect();
    let neighbors = hc.complex.neighbors();
    for (i, lab) in dense.iter().enumerate() {
        let fan = crate::labelings::FanLabeling::from_vec(*colorings[i].iter().max().unwrap() as i64, lab);
        if !crate::labelings::fan_violations(&neighbors, &hc.complex.involution, &fan).is_empty() {
            return Err(structural(format!("labeling from coloring {i} is not a Fan labeling")));
        }
    }
    let mf = multi_dense(&hc.complex, &dense, d)?;
    let top_e = &hc.elements[*mf.witness.chain.last().unwrap().last().unwrap()];
    let mut witnesses = Vec::with_capacity(d.len());
    for face in &mf.faces {
        let c = &colorings[face.labeling];
        let mut left = BTreeSet::new();
        let mut right = BTreeSet::new();
        let pick = |set: &[usize], color: usize| set.iter().copied().find(|&v| c[v] == color);
        for (&e, &l) in face.vertices.iter().zip(&face.labels) {
            let (a, b) = &hc.elements[e];
            let color = l.unsigned_abs() as usize;
            if l < 0 {
                left.insert(pick(a, color).ok_or_else(|| structural("label color missing"))?);
            } else {
                right.insert(pick(b, color).ok_or_else(|| structural("label color missing"))?);
            }
        }
        // the largest color on the side opposite to v_0 in the first element
        let (a0, b0) = &hc.elements[face.vertices[0]];
        let opposite = if face.labels[0] > 0 { a0 } else { b0 };
        let best = opposite.iter().map(|&v| c[v]).max().unwrap();
        let vbar = pick(opposite, best).unwrap();
        if face.labels[0] > 0 {
            left.insert(vbar);
        } else {
            right.insert(vbar);
        }
        witnesses.push(ColorfulWitness {
            coloring: face.labeling,
            left: left.into_iter().collect(),
            right: right.into_iter().collect(),
        });
    }
    Ok(ColorfulOutcome { top: top_e.clone(), witnesses, multifan: mf })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_graph_sizes() {
        for n in 2..=5 {
            let h = hom_complex(&Graph::complete(n), complete_graph_index(n)).unwrap();
            assert_eq!(h.elements.len(), 3usize.pow(n as u32) - 2 * 2usize.pow(n as u32) + 1);
            assert_eq!(h.complex.dim(), n - 2);
        }
        assert!(hom_complex(&Graph::complete(6), 4).is_err());
    }

    #[test]
    fn improper_coloring_rejected() {
        let g = Graph::complete(3);
        assert!(colorful_bipartite(&g, &[vec![1, 1, 2]], &[1], 1).is_err());
    }
}
