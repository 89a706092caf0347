use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{multi_dense, MultiFan, Z2Complex};
use crate::complexes::kuhn_sphere;
use crate::error::{invalid, Error, Result};
use crate::fairdiv::{Status, Valuation};
use crate::labelings::{fan_violations, FanLabeling};
use crate::linalg::{LinearProgram, LpOutcome, Relation};
use crate::rational::{frac, int, one, zero, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalvingOptions {
    /// First grid size of the orthant triangulations.
    pub start: usize,
    /// Refinement stops before a sphere with more maximal simplices.
    pub max_simplices: usize,
    /// Number of perturbation masses tried, each half the previous one.
    pub rounds: usize,
}

impl Default for HalvingOptions {
    fn default() -> Self {
        HalvingOptions { start: 4, max_simplices: 200_000, rounds: 6 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Splitting {
        #[serde(with = "crate::rational::serde_q")]
        max_discrepancy: Rational,
    },
    /// `measures[t]` has discrepancy `signs[t]·γ` up to ε, `γ` the maximum.
    Extremal {
        measures: Vec<usize>,
        signs: Vec<i32>,
        #[serde(with = "crate::rational::serde_q")]
        gamma: Rational,
    },
    Unverified {
        #[serde(with = "crate::rational::serde_q")]
        max_discrepancy: Rational,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitOutcome {
    /// `[lo, hi]` for `I_1..I_n`, left to right; empty padding intervals sit
    /// at 1.
    #[serde(with = "crate::rational::serde_vec_vec")]
    pub intervals: Vec<Vec<Rational>>,
    pub verdicts: Vec<Verdict>,
    /// `μ(∪ odd) − μ(∪ even)` for every measure of every collection.
    #[serde(with = "crate::rational::serde_vec_vec")]
    pub discrepancies: Vec<Vec<Rational>>,
    pub status: Status,
    pub resolution: usize,
    #[serde(with = "crate::rational::serde_q")]
    pub perturbation: Rational,
}

/// `μ(∪_{odd j} I_j) − μ(∪_{even j} I_j)`, intervals numbered from 1.
pub fn discrepancy(v: &Valuation, intervals: &[Vec<Rational>]) -> Rational {
    intervals
        .iter()
        .enumerate()
        .map(|(j, iv)| {
            let x = v.value(&iv[0], &iv[1]);
            if j % 2 == 0 {
                x
            } else {
                -x
            }
        })
        .sum()
}

pub fn classify(disc: &[Rational], k: usize, eps: &Rational) -> Verdict {
    let max = disc.iter().map(Signed::abs).max().unwrap_or_else(zero);
    if max <= *eps {
        return Verdict::Splitting { max_discrepancy: max };
    }
    let floor = &max - eps;
    let mut measures = Vec::new();
    let mut signs = Vec::new();
    for (a, x) in disc.iter().enumerate() {
        if x.abs() >= floor {
            measures.push(a);
            signs.push(if x.is_positive() { 1 } else { -1 });
        }
    }
    let plus = signs.iter().filter(|&&s| s > 0).count();
    let minus = signs.len() - plus;
    if measures.len() >= k && plus >= k / 2 && minus >= k / 2 {
        Verdict::Extremal { measures, signs, gamma: max }
    } else {
        Verdict::Unverified { max_discrepancy: max }
    }
}

/// `n` bumps of mass `total/n` on the first `n` dyadic intervals of length
/// `2^-t`, `2^t >= n`.
fn perturbation(n: usize, total: &Rational) -> Vec<Valuation> {
    let w = n.next_power_of_two() as i64;
    (0..n as i64)
        .map(|a| Valuation::block_with_mass(frac(a, w), frac(a + 1, w), total / int(n as i64)).unwrap())
        .collect()
}

/// Interval lengths `u` with piece signs `s`: drop empty pieces, merge
/// neighbors of equal sign, pad with empty intervals to `n`.
fn intervals_of(s: &[i32], u: &[Rational], n: usize) -> Vec<Vec<Rational>> {
    let mut out: Vec<(Vec<Rational>, i32)> = Vec::new();
    let mut at = zero();
    for (sj, uj) in s.iter().zip(u) {
        if uj.is_zero() {
            continue;
        }
        let hi = &at + uj;
        match out.last_mut() {
            Some((iv, sign)) if *sign == *sj => iv[1] = hi.clone(),
            _ => out.push((vec![at.clone(), hi.clone()], *sj)),
        }
        at = hi;
    }
    let mut ivs: Vec<Vec<Rational>> = out.into_iter().map(|(iv, _)| iv).collect();
    while ivs.len() < n {
        ivs.push(vec![one(), one()]);
    }
    ivs
}

/// Most cell combinations tried by one polish.
const POLISH_LIMIT: usize = 512;

struct Instance<'a> {
    families: &'a [Vec<Valuation>],
    k: &'a [usize],
    n: usize,
    eps: &'a Rational,
}

impl Instance<'_> {
    fn evaluate(&self, s: &[i32], u: &[Rational], res: usize, pert: &Rational) -> SplitOutcome {
        let intervals = intervals_of(s, u, self.n);
        let discrepancies: Vec<Vec<Rational>> =
            self.families.iter().map(|f| f.iter().map(|v| discrepancy(v, &intervals)).collect()).collect();
        let verdicts: Vec<Verdict> =
            discrepancies.iter().zip(self.k).map(|(d, &k)| classify(d, k, self.eps)).collect();
        let ok = verdicts.iter().all(|v| !matches!(v, Verdict::Unverified { .. }));
        SplitOutcome {
            intervals,
            verdicts,
            discrepancies,
            status: if ok { Status::Certified } else { Status::NonCertified },
            resolution: res,
            perturbation: pert.clone(),
        }
    }
}

fn unverified(o: &SplitOutcome) -> usize {
    o.verdicts.iter().filter(|v| matches!(v, Verdict::Unverified { .. })).count()
}

/// `Σ_j sign(y_j) μ([Y_{j-1}, Y_j])` at a point of the L1-sphere.
fn signed_mass(v: &Valuation, y: &[Rational]) -> Rational {
    let mut at = zero();
    let mut out = zero();
    for yj in y {
        let hi = &at + yj.abs();
        if !yj.is_zero() {
            let x = v.value(&at, &hi);
            if yj.is_positive() {
                out += x;
            } else {
                out -= x;
            }
        }
        at = hi;
    }
    out
}

/// Affine form `(constant, gradient)` of `D_a(u)` with cut `r` in grid cell
/// `cells[r]`.
fn affine_discrepancy(v: &Valuation, s: &[i32], grid: &[Rational], cells: &[usize]) -> (Rational, Vec<Rational>) {
    let n = s.len();
    // F(Y_j) for j = 0..=n as (constant, gradient in u)
    let mut f: Vec<(Rational, Vec<Rational>)> = vec![(zero(), vec![zero(); n])];
    for (r, &c) in cells.iter().enumerate() {
        let d = v.density_at(&grid[c]).clone();
        let constant = v.cdf(&grid[c]) - &d * &grid[c];
        f.push((constant, (0..n).map(|x| if x <= r { d.clone() } else { zero() }).collect()));
    }
    f.push((v.total().clone(), vec![zero(); n]));
    let mut constant = zero();
    let mut grad = vec![zero(); n];
    for j in 0..n {
        let sign = int(s[j] as i64);
        constant += (&f[j + 1].0 - &f[j].0) * &sign;
        for x in 0..n {
            grad[x] += (&f[j + 1].1[x] - &f[j].1[x]) * &sign;
        }
    }
    (constant, grad)
}

/// Minimizes `Σ γ_i` subject to `|D_b| <= γ_i` on every original measure,
/// with `sign·D_a = γ_i` along the alternating face of `λ_i` when that face
/// names original measures only. Cuts stay near `base` in the merged
/// breakpoint grid.
fn polish(inst: &Instance, mf: &MultiFan, dense: &[Vec<i64>], s: &[i32], ranges: &[(usize, usize)], grid: &[Rational]) -> Vec<Vec<Rational>> {
    let n = inst.n;
    let m = inst.families.len();
    let mut out = Vec::new();
    let total: usize = ranges.iter().map(|(lo, hi)| hi - lo + 1).product();
    for code in 0..total {
        let mut c = code;
        let mut cells = Vec::with_capacity(ranges.len());
        for &(lo, hi) in ranges {
            let w = hi - lo + 1;
            cells.push(lo + c % w);
            c /= w;
        }
        if cells.windows(2).any(|w| w[0] > w[1]) {
            continue;
        }
        let nv = n + m;
        let mut lp = LinearProgram::new(nv);
        for i in 0..m {
            lp.objective[n + i] = one();
        }
        let mut row = vec![one(); n];
        row.extend(vec![zero(); m]);
        lp.add(row, Relation::Eq, one());
        for (r, &cell) in cells.iter().enumerate() {
            let mut row: Vec<Rational> = (0..n).map(|x| if x <= r { one() } else { zero() }).collect();
            row.extend(vec![zero(); m]);
            lp.add(row.clone(), Relation::Ge, grid[cell].clone());
            lp.add(row, Relation::Le, grid[cell + 1].clone());
        }
        for (i, fam) in inst.families.iter().enumerate() {
            let forms: Vec<(Rational, Vec<Rational>)> = fam.iter().map(|v| affine_discrepancy(v, s, grid, &cells)).collect();
            for (c0, g) in &forms {
                // ±(c0 + g·u) - γ_i <= 0
                for sign in [1i64, -1] {
                    let mut row: Vec<Rational> = g.iter().map(|x| x * int(sign)).collect();
                    row.extend((0..m).map(|x| if x == i { -one() } else { zero() }));
                    lp.add(row, Relation::Le, -(c0 * int(sign)));
                }
            }
            let face = &mf.faces[i];
            let originals: Vec<(usize, i64)> =
                face.vertices.iter().map(|&v| dense[i][v]).map(|l| (l.unsigned_abs() as usize - 1, l.signum())).collect();
            if originals.iter().all(|&(a, _)| a < fam.len()) {
                for &(a, sign) in &originals {
                    let (c0, g) = &forms[a];
                    let mut row: Vec<Rational> = g.iter().map(|x| x * int(sign)).collect();
                    row.extend((0..m).map(|x| if x == i { -one() } else { zero() }));
                    lp.add(row, Relation::Eq, -(c0 * int(sign)));
                }
            }
        }
        if let LpOutcome::Optimal { x, .. } = lp.solve() {
            out.push(x[..n].to_vec());
        }
    }
    out
}

/// Intervals `I_1..I_n` such that each collection is split within `eps` or
/// has at least `k_i` measures at the maximal discrepancy within `eps`,
/// balanced in sign.
pub fn consensus_halving(
    families: &[Vec<Valuation>],
    n: usize,
    k: &[usize],
    eps: &Rational,
    opts: HalvingOptions,
) -> Result<SplitOutcome> {
    let m = families.len();
    if m == 0 || n == 0 || k.len() != m || k.contains(&0) || families.iter().any(Vec::is_empty) {
        return Err(invalid("need nonempty collections, n >= 1 and one positive k per collection"));
    }
    if k.iter().sum::<usize>() != m + n - 1 {
        return Err(invalid(format!("k must sum to m + n - 1 = {}", m + n - 1)));
    }
    if !eps.is_positive() || opts.start == 0 {
        return Err(invalid("eps and the starting grid must be positive"));
    }
    let inst = Instance { families, k, n, eps };
    if n == 1 {
        return Ok(inst.evaluate(&[1], &[one()], 0, &zero()));
    }
    let d: Vec<usize> = k.iter().map(|x| x - 1).collect();
    let mut best: Option<SplitOutcome> = None;
    // bumps start twice as heavy as the heaviest measure and halve every round
    let mut pert = families.iter().flatten().map(|v| v.total().clone()).max().unwrap() * int(2);
    for _ in 0..opts.rounds.max(1) {
        let bumps = perturbation(n, &pert);
        let extended: Vec<Vec<Valuation>> =
            families.iter().map(|f| f.iter().chain(&bumps).cloned().collect()).collect();
        let mut grid: Vec<Rational> = extended.iter().flatten().flat_map(|v| v.breakpoints().to_vec()).collect();
        grid.sort();
        grid.dedup();
        let mut r = opts.start;
        while (1usize << n) * r.pow(n as u32 - 1) <= opts.max_simplices {
            let t = kuhn_sphere(n, r)?;
            let cx = Z2Complex::from_triangulation(&t, n - 1)?;
            let neighbors = cx.neighbors();
            let mut dense: Vec<Vec<i64>> = vec![Vec::with_capacity(t.num_vertices()); m];
            let mut degenerate = false;
            for y in &t.vertices {
                for (i, fam) in extended.iter().enumerate() {
                    let vals: Vec<Rational> = fam.iter().map(|v| signed_mass(v, y)).collect();
                    let top = vals.iter().map(Signed::abs).max().unwrap();
                    let a = vals.iter().position(|x| x.abs() == top).unwrap();
                    degenerate |= top.is_zero();
                    dense[i].push(if vals[a].is_negative() { -(a as i64 + 1) } else { a as i64 + 1 });
                }
            }
            let fan_ok = !degenerate
                && dense.iter().all(|lab| {
                    let l = FanLabeling::from_vec(lab.iter().map(|x| x.abs()).max().unwrap(), lab);
                    fan_violations(&neighbors, &cx.involution, &l).is_empty()
                });
            if fan_ok {
                let mf = match multi_dense(&cx, &dense, &d) {
                    Ok(mf) => mf,
                    Err(Error::Structural(_)) => {
                        r *= 2;
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                let corners: Vec<&Vec<Rational>> = mf.simplex.iter().map(|&v| &t.vertices[v]).collect();
                let s: Vec<i32> = (0..n)
                    .map(|j| if corners.iter().any(|c| c[j].is_negative()) { -1 } else { 1 })
                    .collect();
                let u: Vec<Rational> = (0..n)
                    .map(|j| corners.iter().map(|c| c[j].abs()).sum::<Rational>() / int(corners.len() as i64))
                    .collect();
                let mut candidates = vec![u.clone()];
                // grid cells met by each cut over the corners of σ, padded by
                // one cell, shrunk around the barycenter if too many
                let last = grid.len() - 2;
                let cell_of = |x: &Rational| grid.partition_point(|b| b <= x).saturating_sub(1).min(last);
                let cut = |w: &[Rational], r: usize| w[..=r].iter().sum::<Rational>();
                let mut ranges: Vec<(usize, usize)> = (0..n - 1)
                    .map(|r| {
                        let cs = corners.iter().map(|c| {
                            let a: Vec<Rational> = c.iter().map(Signed::abs).collect();
                            cell_of(&cut(&a, r))
                        });
                        let lo = cs.clone().min().unwrap().saturating_sub(1);
                        let hi = (cs.max().unwrap() + 1).min(last);
                        (lo, hi)
                    })
                    .collect();
                if ranges.iter().map(|(lo, hi)| hi - lo + 1).product::<usize>() > POLISH_LIMIT {
                    ranges = (0..n - 1)
                        .map(|r| {
                            let c = cell_of(&cut(&u, r));
                            (c.saturating_sub(1), (c + 1).min(last))
                        })
                        .collect();
                }
                candidates.extend(polish(&inst, &mf, &dense, &s, &ranges, &grid));
                for cand in candidates {
                    let out = inst.evaluate(&s, &cand, r, &pert);
                    if out.status == Status::Certified {
                        return Ok(out);
                    }
                    if best.as_ref().is_none_or(|b| unverified(&out) < unverified(b)) {
                        best = Some(out);
                    }
                }
            }
            r *= 2;
        }
        pert /= int(2);
    }
    best.ok_or_else(|| crate::error::structural("no resolution produced Fan labelings; raise max_simplices"))
}
