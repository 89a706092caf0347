//! Bipartite matchings with Hall-deficiency witnesses.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

/// Bipartite graph on `left × right`, edges as `(left, right)` pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipartiteGraph {
    pub left: usize,
    pub right: usize,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HallOutcome {
    /// `(left, right)` pairs covering every vertex of the covered side.
    Matching(Vec<(usize, usize)>),
    /// A set `S` on the covered side whose surviving neighborhood is smaller
    /// than `S`.
    Deficient { set: Vec<usize>, neighborhood: Vec<usize> },
}

impl HallOutcome {
    pub fn matching(&self) -> Option<&[(usize, usize)]> {
        match self {
            HallOutcome::Matching(m) => Some(m),
            HallOutcome::Deficient { .. } => None,
        }
    }
}

impl BipartiteGraph {
    pub fn new(left: usize, right: usize, edges: Vec<(usize, usize)>) -> Self {
        BipartiteGraph { left, right, edges }
    }

    fn oriented(&self, cover: Side) -> (usize, usize, Vec<Vec<usize>>) {
        let (x, y) = match cover {
            Side::Left => (self.left, self.right),
            Side::Right => (self.right, self.left),
        };
        let mut adj = vec![Vec::new(); x];
        for &(l, r) in &self.edges {
            let (a, b) = match cover {
                Side::Left => (l, r),
                Side::Right => (r, l),
            };
            adj[a].push(b);
        }
        for a in adj.iter_mut() {
            a.sort_unstable();
            a.dedup();
        }
        (x, y, adj)
    }
}

/// Matching covering every vertex on side `cover` after deleting `removed`
/// vertices from the opposite side. Augmenting paths are tried in index
/// order, so the result is deterministic.
pub fn hall_matching(g: &BipartiteGraph, cover: Side, removed: &[usize]) -> HallOutcome {
    let (x, y, adj) = g.oriented(cover);
    let mut alive = vec![true; y];
    for &r in removed {
        if r < y {
            alive[r] = false;
        }
    }
    let mut mate_x = vec![usize::MAX; x];
    let mut mate_y = vec![usize::MAX; y];
    for s in 0..x {
        let mut seen = vec![false; y];
        if !augment(s, &adj, &alive, &mut seen, &mut mate_x, &mut mate_y) {
            // vertices reachable from s by alternating paths violate Hall
            let mut in_set = vec![false; x];
            let mut nbhd = vec![false; y];
            let mut queue = VecDeque::from([s]);
            in_set[s] = true;
            while let Some(u) = queue.pop_front() {
                for &w in adj[u].iter().filter(|&&w| alive[w]) {
                    if !nbhd[w] {
                        nbhd[w] = true;
                        let z = mate_y[w];
                        if z != usize::MAX && !in_set[z] {
                            in_set[z] = true;
                            queue.push_back(z);
                        }
                    }
                }
            }
            return HallOutcome::Deficient {
                set: (0..x).filter(|&u| in_set[u]).collect(),
                neighborhood: (0..y).filter(|&w| nbhd[w]).collect(),
            };
        }
    }
    let pairs = (0..x)
        .map(|u| match cover {
            Side::Left => (u, mate_x[u]),
            Side::Right => (mate_x[u], u),
        })
        .collect::<Vec<_>>();
    let mut pairs = pairs;
    pairs.sort_unstable();
    HallOutcome::Matching(pairs)
}

fn augment(
    u: usize,
    adj: &[Vec<usize>],
    alive: &[bool],
    seen: &mut [bool],
    mate_x: &mut [usize],
    mate_y: &mut [usize],
) -> bool {
    for &w in &adj[u] {
        if !alive[w] || seen[w] {
            continue;
        }
        seen[w] = true;
        if mate_y[w] == usize::MAX || augment(mate_y[w], adj, alive, seen, mate_x, mate_y) {
            mate_x[u] = w;
            mate_y[w] = u;
            return true;
        }
    }
    false
}

/// All `r`-element subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(r);
    fn rec(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for x in start..n {
            if n - x < r - cur.len() {
                break;
            }
            cur.push(x);
            rec(x + 1, n, r, cur, out);
            cur.pop();
        }
    }
    rec(0, n, r, &mut cur, &mut out);
    out
}
