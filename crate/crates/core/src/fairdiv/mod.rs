//! Fair division on top of the covering-simplex engine: envy-free,
//! secretive and Survivor cake cutting, rent splitting and worker wages.
//!
//! Every problem is a "game": `m` players, `n` options (pieces, rooms,
//! factories) and a map from points `y` of `Δ^{n-1}` to offers (a division,
//! a price vector, a wage vector). Players label grid points by a preferred
//! option; a covering certificate yields the bipartite graph whose matchings
//! give the assignments. Players and options are 0-based here.

mod cake;
mod lazy;
mod rent;
mod valuation;
mod wages;

use std::collections::BTreeSet;

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::complexes::kuhn_cells;
use crate::error::{invalid, structural, Result};
use crate::linalg::{LinearProgram, LpOutcome, Relation};
use crate::matching::{hall_matching, BipartiteGraph, HallOutcome, Side};
use crate::multisperner::{cover_cells, CoveringCertificate, TargetPoint};
use crate::rational::{frac, int, one, zero, Rational};

pub use cake::{cake_divide, preferred_piece, CakeMode};
pub use lazy::{cake_oracle, lazy_solve, lazy_step, rent_oracle, Answer, LazyKind, LazyProblem, LazyStep, Query};
pub use rent::{rent_divide, rent_prices};
pub use valuation::Valuation;
pub use wages::{worker_wages, WageProblem, WageUtility};

/// Consecutive interval lengths of `[0, 1]`, pieces numbered left to right.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Division {
    #[serde(with = "crate::rational::serde_vec")]
    pub lengths: Vec<Rational>,
}

impl Division {
    pub fn new(lengths: Vec<Rational>) -> Result<Self> {
        if lengths.is_empty() || lengths.iter().any(Signed::is_negative) || lengths.iter().sum::<Rational>() != one() {
            return Err(invalid("lengths must be nonnegative and sum to 1"));
        }
        Ok(Division { lengths })
    }

    /// `Y_0 = 0, Y_1, ..., Y_n = 1`.
    pub fn cuts(&self) -> Vec<Rational> {
        let mut out = vec![zero()];
        for l in &self.lengths {
            let next = out.last().unwrap() + l;
            out.push(next);
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    /// Envy gap at most ε, verified exactly.
    Certified,
    /// Interactive run at a fixed grid; no utilities to certify against.
    ResolutionLimited,
    /// Refinement cap reached; best effort returned.
    NonCertified,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub removed_players: Vec<usize>,
    pub removed_pieces: Vec<usize>,
    /// `(player, piece)` pairs.
    pub matching: Vec<(usize, usize)>,
    #[serde(with = "crate::rational::serde_opt")]
    pub envy_gap: Option<Rational>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FairOutcome {
    /// `cake`, `rent` or `wages`.
    pub kind: String,
    pub mode: String,
    /// Piece lengths, room prices or wages.
    #[serde(with = "crate::rational::serde_vec")]
    pub division: Vec<Rational>,
    pub scenarios: Vec<Scenario>,
    #[serde(with = "crate::rational::serde_opt")]
    pub envy_gap: Option<Rational>,
    pub status: Status,
    /// Kuhn grid size of the accepting (or last) round.
    pub resolution: usize,
    pub certificate: Option<CoveringCertificate>,
}

impl FairOutcome {
    /// Cut positions, for cake outcomes.
    pub fn cuts(&self) -> Vec<Rational> {
        let mut out = vec![zero()];
        for l in &self.division {
            let next = out.last().unwrap() + l;
            out.push(next);
        }
        out
    }
}

/// Kuhn grid sizes tried by the refinement loop: `start`, doubling, up to
/// `cap`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub start: usize,
    pub cap: usize,
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule { start: 4, cap: 1024 }
    }
}

/// Utilities `U_i(j) = constant + gradient · z`, valid for offers `z` in a
/// region `lo <= row · z <= hi`.
pub(crate) struct LocalModel {
    pub(crate) utilities: Vec<Vec<(Rational, Vec<Rational>)>>,
    pub(crate) region: Vec<(Vec<Rational>, Rational, Rational)>,
}

pub(crate) trait Game {
    fn players(&self) -> usize;
    fn options(&self) -> usize;
    /// Sum of the coordinates of every offer.
    fn total(&self) -> Rational;
    fn offer(&self, y: &[Rational]) -> Vec<Rational>;
    /// Options a player may name at this offer.
    fn allowed(&self, z: &[Rational]) -> Vec<usize>;
    fn utility(&self, i: usize, j: usize, z: &[Rational]) -> Rational;
    /// Affine models of the utilities around `z`; empty when unavailable.
    fn local_models(&self, z: &[Rational]) -> Vec<LocalModel>;
}

pub(crate) fn preferred<G: Game + ?Sized>(g: &G, i: usize, z: &[Rational]) -> Result<usize> {
    let allowed = g.allowed(z);
    let mut best: Option<(usize, Rational)> = None;
    for j in allowed {
        let u = g.utility(i, j, z);
        if best.as_ref().is_none_or(|(_, b)| u > *b) {
            best = Some((j, u));
        }
    }
    best.map(|(j, _)| j).ok_or_else(|| structural("no allowed option"))
}

/// Which side of the certificate graph must be matched, which vertices of
/// the other side may disappear, and how many copies each option has.
pub(crate) struct Plan {
    pub(crate) cover: Side,
    pub(crate) removals: Vec<Vec<usize>>,
    pub(crate) multiplicity: Option<Vec<usize>>,
}

pub(crate) fn match_scenarios(
    graph: &BipartiteGraph,
    plan: &Plan,
) -> std::result::Result<Vec<Vec<(usize, usize)>>, Vec<usize>> {
    let mut out = Vec::with_capacity(plan.removals.len());
    for removed in &plan.removals {
        let outcome = match &plan.multiplicity {
            None => hall_matching(graph, plan.cover, removed),
            Some(mult) => {
                // one right vertex per copy of each option
                let owner: Vec<usize> = mult.iter().enumerate().flat_map(|(j, &k)| std::iter::repeat_n(j, k)).collect();
                let edges = graph
                    .edges
                    .iter()
                    .flat_map(|&(i, j)| owner.iter().enumerate().filter(move |(_, &o)| o == j).map(move |(c, _)| (i, c)))
                    .collect();
                let expanded = BipartiteGraph::new(graph.left, owner.len(), edges);
                match hall_matching(&expanded, plan.cover, removed) {
                    HallOutcome::Matching(m) => HallOutcome::Matching(m.into_iter().map(|(i, c)| (i, owner[c])).collect()),
                    d => d,
                }
            }
        };
        match outcome {
            HallOutcome::Matching(m) => out.push(m),
            HallOutcome::Deficient { .. } => return Err(removed.clone()),
        }
    }
    Ok(out)
}

pub(crate) fn matching_gap<G: Game + ?Sized>(g: &G, matching: &[(usize, usize)], z: &[Rational]) -> Rational {
    let mut worst = zero();
    for &(i, j) in matching {
        let own = g.utility(i, j, z);
        for k in 0..g.options() {
            let d = g.utility(i, k, z) - &own;
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

/// Minimizes the largest envy over the matched edges with the utilities
/// frozen to an affine model, over each model in turn. Returns the best
/// offer found with its exact gap.
fn polish<G: Game + ?Sized>(
    g: &G,
    matchings: &[Vec<(usize, usize)>],
    z: &[Rational],
) -> Option<(Vec<Rational>, Rational)> {
    let n = g.options();
    let edges: BTreeSet<(usize, usize)> = matchings.iter().flatten().copied().collect();
    let mut best: Option<(Vec<Rational>, Rational)> = None;
    for model in g.local_models(z) {
        // variables: z_0..z_{n-1}, t
        let mut lp = LinearProgram::new(n + 1);
        lp.objective[n] = one();
        let mut row = vec![one(); n];
        row.push(zero());
        lp.add(row, Relation::Eq, g.total());
        for (coeffs, lo, hi) in &model.region {
            let mut r = coeffs.clone();
            r.push(zero());
            lp.add(r.clone(), Relation::Ge, lo.clone());
            lp.add(r, Relation::Le, hi.clone());
        }
        for &(i, j) in &edges {
            let (cj, gj) = &model.utilities[i][j];
            for k in (0..n).filter(|&k| k != j) {
                let (ck, gk) = &model.utilities[i][k];
                // U_i(k) - U_i(j) <= t
                let mut r: Vec<Rational> = gk.iter().zip(gj).map(|(a, b)| a - b).collect();
                r.push(-one());
                lp.add(r, Relation::Le, cj - ck);
            }
        }
        if let LpOutcome::Optimal { x, .. } = lp.solve() {
            let cand: Vec<Rational> = x[..n].to_vec();
            let gap = matchings.iter().map(|m| matching_gap(g, m, &cand)).max().unwrap_or_else(zero);
            if best.as_ref().is_none_or(|(_, b)| gap < *b) {
                best = Some((cand, gap));
            }
        }
    }
    best
}

pub(crate) struct Solved {
    pub(crate) z: Vec<Rational>,
    pub(crate) matchings: Vec<Vec<(usize, usize)>>,
    pub(crate) gaps: Vec<Rational>,
    pub(crate) status: Status,
    pub(crate) resolution: usize,
    pub(crate) certificate: CoveringCertificate,
}

pub(crate) fn grid_point(c: &[usize], res: usize) -> Vec<Rational> {
    c.iter().map(|&x| frac(x as i64, res as i64)).collect()
}

pub(crate) fn barycenter(points: &[Vec<Rational>]) -> Vec<Rational> {
    let k = int(points.len() as i64);
    let mut acc = vec![zero(); points[0].len()];
    for p in points {
        for (a, x) in acc.iter_mut().zip(p) {
            *a += x;
        }
    }
    acc.into_iter().map(|a| a / &k).collect()
}

/// Refinement loop: certificate at each Kuhn grid, scenario matchings, gap
/// at the barycenter of the covering simplex, then the affine polish.
pub(crate) fn solve_game<G: Game + ?Sized>(
    g: &G,
    plan: &Plan,
    target: &TargetPoint,
    eps: &Rational,
    schedule: Schedule,
) -> Result<Solved> {
    if eps.is_negative() {
        return Err(invalid("eps must be nonnegative"));
    }
    if schedule.start == 0 || schedule.cap < schedule.start {
        return Err(invalid("bad refinement schedule"));
    }
    let (m, n) = (g.players(), g.options());
    let mut best: Option<Solved> = None;
    let mut res = schedule.start;
    while res <= schedule.cap {
        let (points, cells) = kuhn_cells(n, res);
        let mut labels = vec![vec![0usize; points.len()]; m];
        for (v, c) in points.iter().enumerate() {
            let z = g.offer(&grid_point(c, res));
            for (i, row) in labels.iter_mut().enumerate() {
                row[v] = preferred(g, i, &z)?;
            }
        }
        let image = |i: usize, v: usize| labels[i][v];
        let cert = cover_cells(cells.iter().map(Vec::as_slice), points.len(), m, target, &image)?;
        let matchings = match_scenarios(&cert.graph(), plan)
            .map_err(|r| structural(format!("no matching when removing {r:?}")))?;
        let corners: Vec<Vec<Rational>> = cert.sigma.iter().map(|&v| grid_point(&points[v], res)).collect();
        let mut z = g.offer(&barycenter(&corners));
        let mut gaps: Vec<Rational> = matchings.iter().map(|mt| matching_gap(g, mt, &z)).collect();
        let mut worst = gaps.iter().max().cloned().unwrap_or_else(zero);
        if worst > *eps {
            if let Some((zp, gp)) = polish(g, &matchings, &z) {
                if gp < worst {
                    z = zp;
                    gaps = matchings.iter().map(|mt| matching_gap(g, mt, &z)).collect();
                    worst = gp;
                }
            }
        }
        let accepted = worst <= *eps;
        let solved = Solved {
            z,
            matchings,
            gaps,
            status: if accepted { Status::Certified } else { Status::NonCertified },
            resolution: res,
            certificate: cert,
        };
        if accepted {
            return Ok(solved);
        }
        let better = best.as_ref().is_none_or(|b| worst < *b.gaps.iter().max().unwrap());
        if better {
            best = Some(solved);
        }
        res *= 2;
    }
    best.ok_or_else(|| structural("refinement schedule is empty"))
}

pub(crate) fn scenarios_from(
    plan: &Plan,
    matchings: &[Vec<(usize, usize)>],
    gaps: Option<&[Rational]>,
) -> Vec<Scenario> {
    plan.removals
        .iter()
        .zip(matchings)
        .enumerate()
        .map(|(s, (removed, matching))| {
            let (removed_players, removed_pieces) = match plan.cover {
                Side::Left => (Vec::new(), removed.clone()),
                Side::Right => (removed.clone(), Vec::new()),
            };
            Scenario {
                removed_players,
                removed_pieces,
                matching: matching.clone(),
                envy_gap: gaps.map(|g| g[s].clone()),
            }
        })
        .collect()
}

/// `⌈a / b⌉` for positive `b`.
pub(crate) fn ceil_div(a: usize, b: usize) -> usize {
    a.div_ceil(b)
}
