use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::rent::{free_rooms, rent_prices, survivor_plan};
use super::{barycenter, grid_point, match_scenarios, scenarios_from, Division, FairOutcome, Plan, Status, Valuation};
use super::cake::{preferred_piece, CakeMode};
use crate::complexes::kuhn_cells;
use crate::error::{invalid, structural, Error, Result};
use crate::multisperner::{cover_cells, TargetPoint};
use crate::rational::{zero, Rational};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LazyKind {
    Cake {
        mode: CakeMode,
        /// `p` or `q`; unused for envy-free.
        #[serde(default)]
        param: usize,
    },
    Rent {
        #[serde(with = "crate::rational::serde_q")]
        rent: Rational,
    },
}

/// An interactive problem at a fixed Kuhn resolution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LazyProblem {
    #[serde(flatten)]
    pub kind: LazyKind,
    pub players: usize,
    #[serde(default = "default_resolution")]
    pub resolution: usize,
}

fn default_resolution() -> usize {
    8
}

/// "Which allowed option does `player` prefer at `offer`?"
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Query {
    pub player: usize,
    pub vertex: usize,
    /// Piece lengths or room prices.
    #[serde(with = "crate::rational::serde_vec")]
    pub offer: Vec<Rational>,
    pub allowed: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Answer {
    pub player: usize,
    pub vertex: usize,
    pub choice: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "snake_case")]
pub enum LazyStep {
    Query(Query),
    Done(FairOutcome),
}

struct Shape {
    m: usize,
    n: usize,
    plan: Plan,
}

impl LazyProblem {
    fn shape(&self) -> Result<Shape> {
        if self.resolution == 0 {
            return Err(invalid("resolution must be positive"));
        }
        match &self.kind {
            LazyKind::Cake { mode, param } => {
                let (m, n, plan) = mode.shape(self.players, *param)?;
                Ok(Shape { m, n, plan })
            }
            LazyKind::Rent { rent } => {
                if self.players < 2 {
                    return Err(invalid("need at least two roommates"));
                }
                if *rent <= zero() {
                    return Err(invalid("total rent must be positive"));
                }
                Ok(Shape { m: self.players, n: self.players - 1, plan: survivor_plan(self.players) })
            }
        }
    }

    fn offer(&self, y: &[Rational]) -> Vec<Rational> {
        match &self.kind {
            LazyKind::Cake { .. } => y.to_vec(),
            LazyKind::Rent { rent } => rent_prices(y, rent),
        }
    }

    fn allowed(&self, z: &[Rational]) -> Vec<usize> {
        match &self.kind {
            LazyKind::Cake { .. } => (0..z.len()).filter(|&j| z[j] > zero()).collect(),
            LazyKind::Rent { .. } => free_rooms(z),
        }
    }

    /// Number of players who answer queries.
    pub fn active_players(&self) -> Result<usize> {
        Ok(self.shape()?.m)
    }

    fn mode(&self) -> String {
        match &self.kind {
            LazyKind::Cake { mode, .. } => mode.to_string(),
            LazyKind::Rent { .. } => "survivor".into(),
        }
    }

    fn kind_name(&self) -> &'static str {
        match &self.kind {
            LazyKind::Cake { .. } => "cake",
            LazyKind::Rent { .. } => "rent",
        }
    }

    /// The query that `answer` responds to, if `answer` names a vertex of
    /// the grid and an allowed option.
    pub fn check_answer(&self, answer: &Answer) -> Result<()> {
        let shape = self.shape()?;
        if answer.player >= shape.m {
            return Err(invalid(format!("no player {}", answer.player)));
        }
        let (points, _) = kuhn_cells(shape.n, self.resolution);
        let c = points.get(answer.vertex).ok_or_else(|| invalid(format!("no vertex {}", answer.vertex)))?;
        let z = self.offer(&grid_point(c, self.resolution));
        if !self.allowed(&z).contains(&answer.choice) {
            return Err(invalid(format!("option {} is not allowed here", answer.choice)));
        }
        Ok(())
    }
}

fn l1_to(point_sum: &[Rational], b: &[Rational]) -> Rational {
    point_sum.iter().zip(b).map(|(x, y)| if x > y { x - y } else { y - x }).sum()
}

/// Advances the lazy scan as far as `answers` allow.
///
/// Cells of the Kuhn grid are visited by increasing L1 distance of their
/// barycenter from the uniform point (ties by cell order). Each visited cell
/// first has every label of every player filled in, vertices in increasing
/// id and players in increasing index; the first missing one is returned as
/// a query. The first cell containing a covering face ends the run.
pub fn lazy_step(problem: &LazyProblem, answers: &[Answer]) -> Result<LazyStep> {
    let Shape { m, n, plan } = problem.shape()?;
    let res = problem.resolution;
    let mut known: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for a in answers {
        problem.check_answer(a)?;
        known.insert((a.player, a.vertex), a.choice);
    }
    let (points, cells) = kuhn_cells(n, res);
    let target = TargetPoint::uniform(m, n);
    let mut order: Vec<(Rational, usize)> = cells
        .iter()
        .enumerate()
        .map(|(c, cell)| {
            let corners: Vec<Vec<Rational>> = cell.iter().map(|&v| grid_point(&points[v], res)).collect();
            (l1_to(&barycenter(&corners), &target.b), c)
        })
        .collect();
    order.sort();
    for (_, c) in order {
        let cell = &cells[c];
        for &v in cell {
            for i in 0..m {
                if !known.contains_key(&(i, v)) {
                    let offer = problem.offer(&grid_point(&points[v], res));
                    let allowed = problem.allowed(&offer);
                    return Ok(LazyStep::Query(Query { player: i, vertex: v, offer, allowed }));
                }
            }
        }
        let image = |i: usize, v: usize| known[&(i, v)];
        let cert = match cover_cells(std::iter::once(cell.as_slice()), points.len(), m, &target, &image) {
            Ok(cert) => cert,
            Err(Error::Structural(_)) => continue,
            Err(e) => return Err(e),
        };
        let matchings = match_scenarios(&cert.graph(), &plan)
            .map_err(|r| structural(format!("no matching when removing {r:?}")))?;
        let corners: Vec<Vec<Rational>> = cert.sigma.iter().map(|&v| grid_point(&points[v], res)).collect();
        return Ok(LazyStep::Done(FairOutcome {
            kind: problem.kind_name().into(),
            mode: problem.mode(),
            division: problem.offer(&barycenter(&corners)),
            scenarios: scenarios_from(&plan, &matchings, None),
            envy_gap: None,
            status: Status::ResolutionLimited,
            resolution: res,
            certificate: Some(cert),
        }));
    }
    Err(structural("no cell of the grid covers the target point"))
}

/// Runs the lazy scan to completion, answering each query with `oracle`.
/// Returns the outcome and the answers in the order they were given.
pub fn lazy_solve(problem: &LazyProblem, mut oracle: impl FnMut(&Query) -> usize) -> Result<(FairOutcome, Vec<Answer>)> {
    let mut answers = Vec::new();
    loop {
        match lazy_step(problem, &answers)? {
            LazyStep::Done(out) => return Ok((out, answers)),
            LazyStep::Query(q) => {
                let choice = oracle(&q);
                answers.push(Answer { player: q.player, vertex: q.vertex, choice });
            }
        }
    }
}

/// Hungry cake player: the allowed piece of largest value.
pub fn cake_oracle(vals: &[Valuation]) -> impl Fn(&Query) -> usize + '_ {
    move |q| {
        let d = Division { lengths: q.offer.clone() };
        preferred_piece(&vals[q.player], &d, &q.allowed).unwrap_or(q.allowed[0])
    }
}

/// Quasilinear roommate: the allowed room maximizing `value - price`.
pub fn rent_oracle(values: &[Vec<Rational>]) -> impl Fn(&Query) -> usize + '_ {
    move |q| {
        let mut best: Option<(usize, Rational)> = None;
        for &j in &q.allowed {
            let u = &values[q.player][j] - &q.offer[j];
            if best.as_ref().is_none_or(|(_, b)| u > *b) {
                best = Some((j, u));
            }
        }
        best.map_or(0, |(j, _)| j)
    }
}
