//! Geometric simplicial complexes with exact rational coordinates.
//!
//! Three families of domains are supported: the standard simplex
//! `Δ^{n-1}` (barycentric coordinates), products `Δ^{m-1} × Δ^{n-1}`
//! (coordinates `(a, b)` concatenated) and the boundary of the cross-polytope,
//! i.e. the unit L1-sphere in `R^n`.
//!
//! Vertex ids are positions in [`Triangulation::vertices`]. Maximal simplices
//! are stored as sorted id lists.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, structural, Error, Result};
use crate::linalg::determinant;
use crate::rational::{frac, int, one, zero, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Domain {
    Simplex { n: usize },
    Product { m: usize, n: usize },
    Sphere { n: usize },
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Simplex { n } => write!(f, "simplex({n})"),
            Domain::Product { m, n } => write!(f, "product({m},{n})"),
            Domain::Sphere { n } => write!(f, "sphere({n})"),
        }
    }
}

impl std::str::FromStr for Domain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let open = s.find('(').ok_or_else(|| invalid(format!("bad domain tag {s:?}")))?;
        let args: Vec<usize> = s[open + 1..]
            .trim_end_matches(')')
            .split(',')
            .map(|x| x.trim().parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|_| invalid(format!("bad domain tag {s:?}")))?;
        match (&s[..open], args.as_slice()) {
            ("simplex", [n]) => Ok(Domain::Simplex { n: *n }),
            ("product", [m, n]) => Ok(Domain::Product { m: *m, n: *n }),
            ("sphere", [n]) => Ok(Domain::Sphere { n: *n }),
            _ => Err(invalid(format!("bad domain tag {s:?}"))),
        }
    }
}

impl Domain {
    /// Length of a coordinate vector in this domain.
    pub fn ambient(&self) -> usize {
        match *self {
            Domain::Simplex { n } | Domain::Sphere { n } => n,
            Domain::Product { m, n } => m + n,
        }
    }

    pub fn dim(&self) -> usize {
        match *self {
            Domain::Simplex { n } | Domain::Sphere { n } => n - 1,
            Domain::Product { m, n } => m + n - 2,
        }
    }

    pub fn contains(&self, coords: &[Rational]) -> bool {
        if coords.len() != self.ambient() {
            return false;
        }
        let on_simplex =
            |c: &[Rational]| c.iter().all(|x| !x.is_negative()) && c.iter().sum::<Rational>() == one();
        match *self {
            Domain::Simplex { .. } => on_simplex(coords),
            Domain::Product { m, .. } => on_simplex(&coords[..m]) && on_simplex(&coords[m..]),
            Domain::Sphere { .. } => coords.iter().map(|x| x.abs()).sum::<Rational>() == one(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Triangulation {
    pub dim: usize,
    pub domain: Domain,
    pub vertices: Vec<Vec<Rational>>,
    pub simplices: Vec<Vec<usize>>,
    pub involution: Option<Vec<usize>>,
}

/// Faces of one maximal simplex, strictly increasing by inclusion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain(Vec<Vec<usize>>);

impl Chain {
    pub fn new(mut faces: Vec<Vec<usize>>) -> Result<Self> {
        for f in faces.iter_mut() {
            f.sort_unstable();
            f.dedup();
        }
        for w in faces.windows(2) {
            let proper = w[0].len() < w[1].len() && w[0].iter().all(|v| w[1].binary_search(v).is_ok());
            if !proper {
                return Err(invalid(format!("{:?} is not a proper face of {:?}", w[0], w[1])));
            }
        }
        Ok(Chain(faces))
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Triangulation {
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn coords(&self, v: usize) -> &[Rational] {
        &self.vertices[v]
    }

    pub fn barycenter(&self, simplex: &[usize]) -> Vec<Rational> {
        let mut acc = vec![zero(); self.domain.ambient()];
        for &v in simplex {
            for (a, x) in acc.iter_mut().zip(&self.vertices[v]) {
                *a += x;
            }
        }
        let k = int(simplex.len() as i64);
        acc.into_iter().map(|a| a / &k).collect()
    }

    /// Distinct faces with `d + 1` vertices, sorted.
    pub fn faces_of_dim(&self, d: usize) -> Vec<Vec<usize>> {
        let mut out = BTreeSet::new();
        for s in &self.simplices {
            for_each_subset_of_size(s, d + 1, |f| {
                out.insert(f.to_vec());
            });
        }
        out.into_iter().collect()
    }

    /// All distinct nonempty faces, ordered by size then lexicographically.
    pub fn all_faces(&self) -> Vec<Vec<usize>> {
        let mut out: BTreeSet<(usize, Vec<usize>)> = BTreeSet::new();
        for s in &self.simplices {
            for mask in 1u32..(1 << s.len()) {
                let f = subset(s, mask);
                out.insert((f.len(), f));
            }
        }
        out.into_iter().map(|(_, f)| f).collect()
    }

    pub fn neighbors(&self) -> Vec<BTreeSet<usize>> {
        let mut adj = vec![BTreeSet::new(); self.vertices.len()];
        for s in &self.simplices {
            for &a in s {
                for &b in s {
                    if a != b {
                        adj[a].insert(b);
                    }
                }
            }
        }
        adj
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let adj = self.neighbors();
        let mut out = Vec::new();
        for (a, ns) in adj.iter().enumerate() {
            out.extend(ns.iter().filter(|&&b| b > a).map(|&b| (a, b)));
        }
        out
    }

    /// Indices `j` with a nonzero coordinate: the vertices of the minimal face
    /// of the domain simplex containing `v` (simplex domains only).
    pub fn support(&self, v: usize) -> Vec<usize> {
        self.vertices[v]
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(j, _)| j)
            .collect()
    }

    pub fn antipode(&self, v: usize) -> Option<usize> {
        self.involution.as_ref().map(|inv| inv[v])
    }

    /// Coordinates in an affine chart of the domain, of length `dim`.
    fn chart(&self, v: usize) -> Vec<Rational> {
        let c = &self.vertices[v];
        match self.domain {
            Domain::Simplex { n } => c[..n - 1].to_vec(),
            Domain::Product { m, n } => {
                let mut out = c[..m - 1].to_vec();
                out.extend_from_slice(&c[m..m + n - 1]);
                out
            }
            Domain::Sphere { .. } => c.clone(),
        }
    }

    /// Determinant of the ordered simplex in the domain chart: edge vectors
    /// for simplex and product domains, position vectors for spheres.
    pub fn signed_volume(&self, order: &[usize]) -> Rational {
        match self.domain {
            Domain::Sphere { .. } => {
                let rows: Vec<Vec<Rational>> = order.iter().map(|&v| self.chart(v)).collect();
                determinant(&rows)
            }
            _ => {
                let base = self.chart(order[0]);
                let rows: Vec<Vec<Rational>> = order[1..]
                    .iter()
                    .map(|&v| self.chart(v).iter().zip(&base).map(|(a, b)| a - b).collect())
                    .collect();
                determinant(&rows)
            }
        }
    }

    /// Sign of the chart determinant of the reference order of the domain.
    /// For `Δ^{n-1}` the reference is `(v_1, ..., v_n)`; product and sphere
    /// domains use the chart orientation itself.
    fn reference_sign(&self) -> i32 {
        match self.domain {
            Domain::Simplex { n } if n >= 2 => {
                // corners e_1..e_n in the chart that drops the last coordinate
                let corner = |j: usize| -> Vec<Rational> {
                    (0..n - 1).map(|i| if i == j { one() } else { zero() }).collect()
                };
                let base = corner(0);
                let rows: Vec<Vec<Rational>> = (1..n)
                    .map(|j| corner(j).iter().zip(&base).map(|(a, b)| a - b).collect())
                    .collect();
                if determinant(&rows).is_positive() {
                    1
                } else {
                    -1
                }
            }
            _ => 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dim;
        if d != self.domain.dim() {
            return Err(structural(format!("dim {d} does not match domain {}", self.domain)));
        }
        for (v, c) in self.vertices.iter().enumerate() {
            if !self.domain.contains(c) {
                return Err(structural(format!("vertex {v} lies outside {}", self.domain)));
            }
        }
        let nv = self.vertices.len();
        let mut facet_count: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut total = zero();
        for s in &self.simplices {
            if s.len() != d + 1 || s.windows(2).any(|w| w[0] >= w[1]) || s.iter().any(|&v| v >= nv) {
                return Err(structural(format!("malformed simplex {s:?}")));
            }
            let vol = self.signed_volume(s);
            if vol.is_zero() {
                return Err(structural(format!("degenerate simplex {s:?}")));
            }
            total += vol.abs();
            if d > 0 {
                for_each_subset_of_size(s, d, |f| *facet_count.entry(f.to_vec()).or_default() += 1);
            }
        }
        for (f, count) in &facet_count {
            let on_boundary = match self.domain {
                Domain::Sphere { .. } => false,
                Domain::Simplex { .. } => {
                    (0..self.domain.ambient()).any(|j| f.iter().all(|&v| self.vertices[v][j].is_zero()))
                }
                Domain::Product { .. } => {
                    (0..self.domain.ambient()).any(|j| f.iter().all(|&v| self.vertices[v][j].is_zero()))
                }
            };
            let expected = if on_boundary { 1 } else { 2 };
            if *count != expected {
                return Err(structural(format!(
                    "face {f:?} lies in {count} maximal simplices, expected {expected}"
                )));
            }
        }
        let expected_total = match self.domain {
            Domain::Simplex { .. } => one(),
            Domain::Product { m, n } => int(binomial(m + n - 2, m - 1) as i64),
            Domain::Sphere { n } => int(1 << n),
        };
        if total != expected_total {
            return Err(structural(format!(
                "simplex volumes sum to {total}, domain volume is {expected_total}"
            )));
        }
        if let Some(inv) = &self.involution {
            if inv.len() != nv {
                return Err(structural("involution has wrong length"));
            }
            for v in 0..nv {
                if inv[v] == v || inv[v] >= nv || inv[inv[v]] != v {
                    return Err(structural(format!("involution is not free of order 2 at {v}")));
                }
            }
            let set: BTreeSet<&Vec<usize>> = self.simplices.iter().collect();
            for s in &self.simplices {
                let mut img: Vec<usize> = s.iter().map(|&v| inv[v]).collect();
                img.sort_unstable();
                if !set.contains(&img) {
                    return Err(structural(format!("involution does not map {s:?} to a simplex")));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> TriangulationJson {
        TriangulationJson {
            dim: self.dim,
            domain: self.domain.to_string(),
            vertices: self.vertices.clone(),
            simplices: self.simplices.clone(),
            involution: self.involution.clone(),
        }
    }

    pub fn from_json(j: TriangulationJson) -> Result<Self> {
        let domain: Domain = j.domain.parse()?;
        let mut simplices = j.simplices;
        for s in simplices.iter_mut() {
            s.sort_unstable();
        }
        let t = Triangulation {
            dim: j.dim,
            domain,
            vertices: j.vertices,
            simplices,
            involution: j.involution,
        };
        t.validate()?;
        Ok(t)
    }
}

/// Wire format: `{"dim", "domain", "vertices": [[[num,den],...],...],
/// "simplices", "involution"}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TriangulationJson {
    pub dim: usize,
    pub domain: String,
    #[serde(with = "crate::rational::serde_vec_vec")]
    pub vertices: Vec<Vec<Rational>>,
    pub simplices: Vec<Vec<usize>>,
    #[serde(default)]
    pub involution: Option<Vec<usize>>,
}

impl Serialize for Triangulation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Triangulation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = TriangulationJson::deserialize(d)?;
        Triangulation::from_json(j).map_err(serde::de::Error::custom)
    }
}

pub(crate) fn subset(s: &[usize], mask: u32) -> Vec<usize> {
    s.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &v)| v).collect()
}

pub(crate) fn for_each_subset_of_size(s: &[usize], size: usize, mut f: impl FnMut(&[usize])) {
    if size > s.len() {
        return;
    }
    let mut idx: Vec<usize> = (0..size).collect();
    let mut buf = Vec::with_capacity(size);
    loop {
        buf.clear();
        buf.extend(idx.iter().map(|&i| s[i]));
        f(&buf);
        // advance combination
        let mut i = size;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] < s.len() - size + i {
                idx[i] += 1;
                for j in i + 1..size {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Integer points of `k·Δ^{n-1}` with the Kuhn (Freudenthal) cells expressed
/// in cumulative coordinates `s_j = c_1 + ... + c_j`.
pub(crate) fn kuhn_cells(n: usize, k: usize) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    // lattice points as compositions of k into n parts
    let mut points: Vec<Vec<usize>> = Vec::new();
    let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
    fn compositions(n: usize, k: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n - 1 {
            let rest = k - prefix.iter().sum::<usize>();
            let mut c = prefix.clone();
            c.push(rest);
            out.push(c);
            return;
        }
        let used: usize = prefix.iter().sum();
        for x in (0..=k - used).rev() {
            prefix.push(x);
            compositions(n, k, prefix, out);
            prefix.pop();
        }
    }
    compositions(n, k, &mut Vec::new(), &mut points);
    for (i, p) in points.iter().enumerate() {
        index.insert(p.clone(), i);
    }
    if n == 1 {
        return (points, vec![vec![0]]);
    }
    let d = n - 1;
    let to_comp = |s: &[usize]| -> Vec<usize> {
        let mut c = Vec::with_capacity(n);
        let mut prev = 0;
        for &x in s {
            c.push(x - prev);
            prev = x;
        }
        c.push(k - prev);
        c
    };
    let perms = permutations(d);
    let mut cells = Vec::new();
    let mut base = vec![0usize; d];
    loop {
        for p in &perms {
            let mut s = base.clone();
            let mut verts = Vec::with_capacity(d + 1);
            let mut ok = s.windows(2).all(|w| w[0] <= w[1]);
            if ok {
                verts.push(s.clone());
            }
            for &axis in p {
                if !ok {
                    break;
                }
                s[axis] += 1;
                ok = s.windows(2).all(|w| w[0] <= w[1]) && s[d - 1] <= k;
                verts.push(s.clone());
            }
            if ok {
                let mut ids: Vec<usize> = verts.iter().map(|s| index[&to_comp(s)]).collect();
                ids.sort_unstable();
                cells.push(ids);
            }
        }
        // next base corner in {0..k-1}^d
        let mut i = 0;
        while i < d {
            base[i] += 1;
            if base[i] < k {
                break;
            }
            base[i] = 0;
            i += 1;
        }
        if i == d {
            break;
        }
    }
    cells.sort();
    (points, cells)
}

/// Kuhn triangulation of `Δ^{n-1}` with vertices on the grid `(1/k)·Z^n`.
pub fn kuhn_triangulation(n: usize, k: usize) -> Result<Triangulation> {
    if n == 0 || k == 0 {
        return Err(invalid("kuhn_triangulation needs n >= 1 and k >= 1"));
    }
    let (points, cells) = kuhn_cells(n, k);
    let vertices = points
        .iter()
        .map(|c| c.iter().map(|&x| frac(x as i64, k as i64)).collect())
        .collect();
    Ok(Triangulation {
        dim: n - 1,
        domain: Domain::Simplex { n },
        vertices,
        simplices: cells,
        involution: None,
    })
}

pub fn barycentric_subdivision(t: &Triangulation) -> Triangulation {
    let faces = t.all_faces();
    let id: HashMap<&Vec<usize>, usize> = faces.iter().enumerate().map(|(i, f)| (f, i)).collect();
    let vertices: Vec<Vec<Rational>> = faces.iter().map(|f| t.barycenter(f)).collect();
    let mut simplices = Vec::with_capacity(t.simplices.len() * (1..=t.dim + 1).product::<usize>());
    let perms = permutations(t.dim + 1);
    for s in &t.simplices {
        for p in &perms {
            let mut prefix = Vec::with_capacity(s.len());
            let mut chain = Vec::with_capacity(s.len());
            for &i in p {
                prefix.push(s[i]);
                let mut f = prefix.clone();
                f.sort_unstable();
                chain.push(id[&f]);
            }
            chain.sort_unstable();
            simplices.push(chain);
        }
    }
    simplices.sort();
    let involution = t.involution.as_ref().map(|inv| {
        faces
            .iter()
            .map(|f| {
                let mut g: Vec<usize> = f.iter().map(|&v| inv[v]).collect();
                g.sort_unstable();
                id[&g]
            })
            .collect()
    });
    Triangulation { dim: t.dim, domain: t.domain, vertices, simplices, involution }
}

/// Triangulates `Δ^{m-1} × T` without new vertices. Vertex `(u_i, v)` gets id
/// `i·|V(T)| + v`; each cell `Δ^{m-1} × σ` is cut along monotone staircase
/// paths in the grid `[m] × σ`, ordered by that id.
pub fn staircase_product(t: &Triangulation, m: usize) -> Result<Triangulation> {
    let Domain::Simplex { n } = t.domain else {
        return Err(invalid("staircase_product needs a triangulated simplex"));
    };
    if m == 0 {
        return Err(invalid("staircase_product needs m >= 1"));
    }
    let nv = t.num_vertices();
    let mut vertices = Vec::with_capacity(m * nv);
    for i in 0..m {
        for v in 0..nv {
            let mut c: Vec<Rational> = (0..m).map(|x| if x == i { one() } else { zero() }).collect();
            c.extend_from_slice(&t.vertices[v]);
            vertices.push(c);
        }
    }
    let mut simplices = Vec::new();
    for s in &t.simplices {
        staircase_cells(s, m, nv, |cell| simplices.push(cell.to_vec()));
    }
    simplices.sort();
    Ok(Triangulation {
        dim: m - 1 + t.dim,
        domain: Domain::Product { m, n },
        vertices,
        simplices,
        involution: None,
    })
}

/// Enumerates the staircase simplices of `Δ^{m-1} × σ` (ids `i·nv + v`,
/// emitted sorted).
pub(crate) fn staircase_cells(sigma: &[usize], m: usize, nv: usize, mut emit: impl FnMut(&[usize])) {
    let d = sigma.len() - 1;
    let mut path = Vec::with_capacity(m + d);
    fn rec(
        i: usize,
        j: usize,
        m: usize,
        sigma: &[usize],
        nv: usize,
        path: &mut Vec<usize>,
        emit: &mut dyn FnMut(&[usize]),
    ) {
        path.push(i * nv + sigma[j]);
        if i == m - 1 && j == sigma.len() - 1 {
            // ids increase along the path since (i, vertex) order is lexicographic
            emit(path);
        } else {
            if j + 1 < sigma.len() {
                rec(i, j + 1, m, sigma, nv, path, emit);
            }
            if i + 1 < m {
                rec(i + 1, j, m, sigma, nv, path, emit);
            }
        }
        path.pop();
    }
    rec(0, 0, m, sigma, nv, &mut path, &mut emit);
    let _ = d;
}

fn cross_polytope(n: usize) -> Triangulation {
    // +e_j -> 2j, -e_j -> 2j+1
    let mut vertices = Vec::with_capacity(2 * n);
    for j in 0..n {
        for s in [1, -1] {
            vertices.push((0..n).map(|i| if i == j { int(s) } else { zero() }).collect());
        }
    }
    let mut simplices = Vec::with_capacity(1 << n);
    for signs in 0u32..(1 << n) {
        simplices.push((0..n).map(|j| 2 * j + (signs >> j & 1) as usize).collect());
    }
    simplices.sort();
    let involution = (0..2 * n).map(|v| v ^ 1).collect();
    Triangulation {
        dim: n - 1,
        domain: Domain::Sphere { n },
        vertices,
        simplices,
        involution: Some(involution),
    }
}

/// Boundary of the `n`-dimensional cross-polytope subdivided barycentrically
/// `r` times, with the antipodal involution.
pub fn cross_polytope_sphere(n: usize, r: usize) -> Result<Triangulation> {
    if n < 2 {
        return Err(invalid("cross_polytope_sphere needs n >= 2"));
    }
    let mut t = cross_polytope(n);
    for _ in 0..r {
        t = barycentric_subdivision(&t);
    }
    Ok(t)
}

/// Centrally symmetric triangulation of the L1-sphere obtained by placing a
/// Kuhn triangulation `kuhn_triangulation(n, k)` on every orthant facet.
/// Mesh `O(1/k)` with `2^n · k^{n-1}` maximal simplices.
pub fn kuhn_sphere(n: usize, k: usize) -> Result<Triangulation> {
    if n < 2 || k == 0 {
        return Err(invalid("kuhn_sphere needs n >= 2 and k >= 1"));
    }
    let (points, cells) = kuhn_cells(n, k);
    let mut index: BTreeMap<Vec<i64>, usize> = BTreeMap::new();
    let mut signed: Vec<Vec<i64>> = Vec::new();
    let mut simplices = Vec::with_capacity(cells.len() << n);
    for signs in 0u32..(1 << n) {
        for cell in &cells {
            let mut ids = Vec::with_capacity(cell.len());
            for &p in cell {
                let c: Vec<i64> = points[p]
                    .iter()
                    .enumerate()
                    .map(|(j, &x)| if signs >> j & 1 == 1 { -(x as i64) } else { x as i64 })
                    .collect();
                let next = signed.len();
                let id = *index.entry(c.clone()).or_insert_with(|| {
                    signed.push(c);
                    next
                });
                ids.push(id);
            }
            ids.sort_unstable();
            simplices.push(ids);
        }
    }
    // renumber vertices in lexicographic order of their integer coordinates
    let order: Vec<usize> = index.values().copied().collect();
    let mut rename = vec![0; signed.len()];
    for (new, &old) in order.iter().enumerate() {
        rename[old] = new;
    }
    let vertices: Vec<Vec<Rational>> = index
        .keys()
        .map(|c| c.iter().map(|&x| frac(x, k as i64)).collect())
        .collect();
    for s in simplices.iter_mut() {
        for v in s.iter_mut() {
            *v = rename[*v];
        }
        s.sort_unstable();
    }
    simplices.sort();
    let involution = index
        .keys()
        .map(|c| {
            let neg: Vec<i64> = c.iter().map(|x| -x).collect();
            rename[index[&neg]]
        })
        .collect();
    Ok(Triangulation {
        dim: n - 1,
        domain: Domain::Sphere { n },
        vertices,
        simplices,
        involution: Some(involution),
    })
}

/// Orientation of the ordered maximal simplex `order` relative to the
/// reference orientation of the domain.
pub fn orientation_sign(t: &Triangulation, order: &[usize]) -> Result<i32> {
    if order.len() != t.dim + 1 {
        return Err(invalid(format!("{order:?} is not a maximal simplex order")));
    }
    let det = t.signed_volume(order);
    if det.is_zero() {
        return Err(structural(format!("degenerate simplex {order:?}")));
    }
    let s = if det.is_positive() { 1 } else { -1 };
    Ok(s * t.reference_sign())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kuhn_counts() {
        let t = kuhn_triangulation(2, 3).unwrap();
        assert_eq!((t.num_vertices(), t.simplices.len()), (4, 3));
        let t = kuhn_triangulation(3, 2).unwrap();
        assert_eq!((t.num_vertices(), t.simplices.len()), (6, 4));
        let t = kuhn_triangulation(3, 1).unwrap();
        assert_eq!(t.simplices, vec![vec![0, 1, 2]]);
        for (n, k) in [(1, 3), (2, 5), (3, 4), (4, 3), (5, 2)] {
            let t = kuhn_triangulation(n, k).unwrap();
            assert_eq!(t.simplices.len(), k.pow(n as u32 - 1));
            t.validate().unwrap();
        }
    }

    #[test]
    fn barycentric_small_cases() {
        let edge = kuhn_triangulation(2, 1).unwrap();
        let sd = barycentric_subdivision(&edge);
        assert_eq!((sd.num_vertices(), sd.simplices.len()), (3, 2));
        let tri = kuhn_triangulation(3, 1).unwrap();
        let sd = barycentric_subdivision(&tri);
        assert_eq!((sd.num_vertices(), sd.simplices.len()), (7, 6));
        sd.validate().unwrap();
    }

    #[test]
    fn spheres() {
        let s1 = cross_polytope_sphere(2, 0).unwrap();
        assert_eq!((s1.num_vertices(), s1.simplices.len()), (4, 4));
        let oct = cross_polytope_sphere(3, 0).unwrap();
        assert_eq!((oct.num_vertices(), oct.simplices.len()), (6, 8));
        let sd = cross_polytope_sphere(3, 1).unwrap();
        assert_eq!(sd.simplices.len(), 48);
        sd.validate().unwrap();
        let sd2 = cross_polytope_sphere(3, 2).unwrap();
        assert_eq!(sd2.simplices.len(), 288);
        sd2.validate().unwrap();
        for (n, k) in [(2, 5), (3, 3), (4, 2)] {
            let t = kuhn_sphere(n, k).unwrap();
            assert_eq!(t.simplices.len(), (1 << n) * k.pow(n as u32 - 1));
            t.validate().unwrap();
        }
    }

    #[test]
    fn staircase_small_cases() {
        let edge = kuhn_triangulation(2, 1).unwrap();
        let sq = staircase_product(&edge, 2).unwrap();
        assert_eq!(sq.simplices.len(), 2);
        sq.validate().unwrap();
        let tri = kuhn_triangulation(3, 1).unwrap();
        let prism = staircase_product(&tri, 2).unwrap();
        assert_eq!(prism.simplices.len(), 3);
        prism.validate().unwrap();
        let same = staircase_product(&tri, 1).unwrap();
        assert_eq!(same.simplices, tri.simplices);
    }

    #[test]
    fn orientation_reference_and_swap() {
        let t = kuhn_triangulation(3, 1).unwrap();
        // corners: (1,0,0) (0,1,0) (0,0,1) are ids 0,1,2 in composition order
        assert_eq!(t.vertices[0], vec![one(), zero(), zero()]);
        assert_eq!(orientation_sign(&t, &[0, 1, 2]).unwrap(), 1);
        assert_eq!(orientation_sign(&t, &[1, 0, 2]).unwrap(), -1);
        assert!(orientation_sign(&t, &[0, 1]).is_err());
    }

    #[test]
    fn domain_tags_round_trip() {
        for d in [Domain::Simplex { n: 3 }, Domain::Product { m: 2, n: 4 }, Domain::Sphere { n: 5 }] {
            assert_eq!(d.to_string().parse::<Domain>().unwrap(), d);
        }
        assert!("cube(3)".parse::<Domain>().is_err());
    }

    #[test]
    fn chain_requires_proper_inclusions() {
        assert!(Chain::new(vec![vec![1], vec![1, 2], vec![0, 1, 2]]).is_ok());
        assert!(Chain::new(vec![vec![1], vec![2, 3]]).is_err());
        assert!(Chain::new(vec![vec![1, 2], vec![1, 2]]).is_err());
    }
}
