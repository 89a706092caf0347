use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{ceil_div, scenarios_from, solve_game, Division, FairOutcome, Game, LocalModel, Plan, Schedule, Valuation};
use crate::error::{invalid, Error, Result};
use crate::matching::{subsets, Side};
use crate::multisperner::TargetPoint;
use crate::rational::{one, zero, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CakeMode {
    /// `k` players, `k` pieces.
    EnvyFree,
    /// `p` players, `k` pieces; any `⌈(k-p)/p⌉` pieces may vanish.
    Secretive,
    /// `k` players, `q` pieces; any `⌈(k-q)/q⌉` players may leave.
    Survivor,
}

impl fmt::Display for CakeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CakeMode::EnvyFree => "envyfree",
            CakeMode::Secretive => "secretive",
            CakeMode::Survivor => "survivor",
        })
    }
}

impl FromStr for CakeMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "envyfree" => Ok(CakeMode::EnvyFree),
            "secretive" => Ok(CakeMode::Secretive),
            "survivor" => Ok(CakeMode::Survivor),
            _ => Err(invalid(format!("unknown cake mode {s:?}"))),
        }
    }
}

impl CakeMode {
    /// `(players, pieces, plan)` for `k` players and parameter `p` or `q`.
    pub(crate) fn shape(self, k: usize, param: usize) -> Result<(usize, usize, Plan)> {
        if k == 0 {
            return Err(invalid("need at least one player"));
        }
        if self != CakeMode::EnvyFree && (param == 0 || param > k) {
            return Err(invalid(format!("parameter must lie in 1..={k}")));
        }
        Ok(match self {
            CakeMode::EnvyFree => (k, k, Plan { cover: Side::Left, removals: vec![Vec::new()], multiplicity: None }),
            CakeMode::Secretive => {
                let r = ceil_div(k - param, param);
                (param, k, Plan { cover: Side::Left, removals: subsets(k, r), multiplicity: None })
            }
            CakeMode::Survivor => {
                let r = ceil_div(k - param, param);
                (k, param, Plan { cover: Side::Right, removals: subsets(k, r), multiplicity: None })
            }
        })
    }
}

pub(crate) struct CakeGame<'a> {
    pub(crate) vals: &'a [Valuation],
    pub(crate) n: usize,
    grid: Vec<Rational>,
}

impl<'a> CakeGame<'a> {
    pub(crate) fn new(vals: &'a [Valuation], n: usize) -> Self {
        let mut grid: Vec<Rational> = vals.iter().flat_map(|v| v.breakpoints().iter().cloned()).collect();
        grid.sort();
        grid.dedup();
        CakeGame { vals, n, grid }
    }

    fn cell_of(&self, x: &Rational) -> usize {
        let a = self.grid.partition_point(|b| b <= x);
        a.saturating_sub(1).min(self.grid.len() - 2)
    }

    /// Piece values as affine functions of the lengths, with cut `r` confined
    /// to grid cell `cells[r]`.
    fn model(&self, cells: &[usize]) -> LocalModel {
        let n = self.n;
        let mut region = Vec::new();
        for (r, &a) in cells.iter().enumerate() {
            let row = (0..n).map(|s| if s <= r { one() } else { zero() }).collect();
            region.push((row, self.grid[a].clone(), self.grid[a + 1].clone()));
        }
        let utilities = self
            .vals
            .iter()
            .map(|v| {
                // F(c_r) as (constant, gradient) for r = 0..=n
                let mut f: Vec<(Rational, Vec<Rational>)> = vec![(zero(), vec![zero(); n])];
                for (r, &a) in cells.iter().enumerate() {
                    let d = v.density_at(&self.grid[a]).clone();
                    let c = v.cdf(&self.grid[a]) - &d * &self.grid[a];
                    let g = (0..n).map(|s| if s <= r { d.clone() } else { zero() }).collect();
                    f.push((c, g));
                }
                f.push((v.total().clone(), vec![zero(); n]));
                (0..n)
                    .map(|j| {
                        let c = &f[j + 1].0 - &f[j].0;
                        let g = f[j + 1].1.iter().zip(&f[j].1).map(|(a, b)| a - b).collect();
                        (c, g)
                    })
                    .collect()
            })
            .collect();
        LocalModel { utilities, region }
    }
}

impl Game for CakeGame<'_> {
    fn players(&self) -> usize {
        self.vals.len()
    }

    fn options(&self) -> usize {
        self.n
    }

    fn total(&self) -> Rational {
        one()
    }

    fn offer(&self, y: &[Rational]) -> Vec<Rational> {
        y.to_vec()
    }

    fn allowed(&self, z: &[Rational]) -> Vec<usize> {
        (0..z.len()).filter(|&j| !z[j].is_zero()).collect()
    }

    fn utility(&self, i: usize, j: usize, z: &[Rational]) -> Rational {
        let lo: Rational = z[..j].iter().sum();
        let hi = &lo + &z[j];
        self.vals[i].value(&lo, &hi)
    }

    fn local_models(&self, z: &[Rational]) -> Vec<LocalModel> {
        let cuts = &Division { lengths: z.to_vec() }.cuts()[1..self.n];
        let base: Vec<usize> = cuts.iter().map(|c| self.cell_of(c)).collect();
        let last = self.grid.len() - 2;
        // also try moving each cut one cell left or right
        let spread = if base.len() <= 4 { 1 } else { 0 };
        let mut out = Vec::new();
        let combos = (2 * spread + 1usize).pow(base.len() as u32);
        for code in 0..combos {
            let mut c = code;
            let mut cells = Vec::with_capacity(base.len());
            let mut ok = true;
            for &a in &base {
                let shift = (c % (2 * spread + 1)) as i64 - spread as i64;
                c /= 2 * spread + 1;
                let b = a as i64 + shift;
                if b < 0 || b > last as i64 {
                    ok = false;
                    break;
                }
                cells.push(b as usize);
            }
            if ok && cells.windows(2).all(|w| w[0] <= w[1]) {
                out.push(self.model(&cells));
            }
        }
        out
    }
}

/// The allowed piece of largest value, lowest index on ties.
pub fn preferred_piece(v: &Valuation, d: &Division, allowed: &[usize]) -> Result<usize> {
    let cuts = d.cuts();
    let mut best: Option<(usize, Rational)> = None;
    for &j in allowed {
        if j >= d.lengths.len() {
            return Err(invalid(format!("piece {j} does not exist")));
        }
        let val = v.value(&cuts[j], &cuts[j + 1]);
        if best.as_ref().is_none_or(|(bj, b)| val > *b || (val == *b && j < *bj)) {
            best = Some((j, val));
        }
    }
    best.map(|(j, _)| j).ok_or_else(|| invalid("no allowed piece"))
}

/// Divides `[0, 1]` for `sources.len() = k` players.
///
/// `param` is `p` for the secretive mode (the first `p` sources take part)
/// and `q` for the Survivor mode; it is ignored in envy-free mode.
pub fn cake_divide(
    sources: &[Valuation],
    mode: CakeMode,
    param: usize,
    eps: &Rational,
    schedule: Schedule,
) -> Result<FairOutcome> {
    let k = sources.len();
    let (m, n, plan) = mode.shape(k, param)?;
    let game = CakeGame::new(&sources[..m], n);
    let solved = solve_game(&game, &plan, &TargetPoint::uniform(m, n), eps, schedule)?;
    let gap = solved.gaps.iter().max().cloned().unwrap_or_else(zero);
    Ok(FairOutcome {
        kind: "cake".into(),
        mode: mode.to_string(),
        division: solved.z,
        scenarios: scenarios_from(&plan, &solved.matchings, Some(&solved.gaps)),
        envy_gap: Some(gap),
        status: solved.status,
        resolution: solved.resolution,
        certificate: Some(solved.certificate),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fairdiv::Status;
    use crate::rational::frac;

    #[test]
    fn preferred_piece_examples() {
        let u = Valuation::uniform();
        let d = Division::new(vec![frac(1, 3); 3]).unwrap();
        assert_eq!(preferred_piece(&u, &d, &[0, 1, 2]).unwrap(), 0);
        let half = Valuation::block(zero(), frac(1, 2)).unwrap();
        let d = Division::new(vec![frac(1, 4), frac(1, 4), frac(1, 2)]).unwrap();
        assert_eq!(preferred_piece(&half, &d, &[0, 1, 2]).unwrap(), 0);
        let d = Division::new(vec![zero(), frac(1, 2), frac(1, 2)]).unwrap();
        assert_eq!(preferred_piece(&u, &d, &[1, 2]).unwrap(), 1);
    }

    #[test]
    fn single_player_takes_everything() {
        let out = cake_divide(&[Valuation::uniform()], CakeMode::EnvyFree, 1, &zero(), Schedule::default()).unwrap();
        assert_eq!(out.division, vec![one()]);
        assert_eq!(out.envy_gap, Some(zero()));
        assert_eq!(out.status, Status::Certified);
    }

    #[test]
    fn identical_uniform_players_split_evenly() {
        let vals = vec![Valuation::uniform(); 3];
        let out = cake_divide(&vals, CakeMode::EnvyFree, 3, &zero(), Schedule::default()).unwrap();
        assert_eq!(out.status, Status::Certified);
        assert_eq!(out.cuts(), vec![zero(), frac(1, 3), frac(2, 3), one()]);
    }
}
