use num_traits::{Signed, Zero};

use super::{scenarios_from, solve_game, FairOutcome, Game, LocalModel, Plan, Schedule};
use crate::error::{invalid, Result};
use crate::matching::{subsets, Side};
use crate::multisperner::TargetPoint;
use crate::rational::{frac, one, zero, Rational};

/// Prices `R·φ(y)` with `φ(y)_j ∝ max(0, θ - y_j)`, `θ = min y + max y / 2`.
///
/// A room is free exactly when `y_j >= θ`. Free rooms therefore have
/// `y_j > 0`, and when no room is free every coordinate is positive: naming
/// a free room (or any room when none is free) is a Sperner labeling.
pub fn rent_prices(y: &[Rational], total: &Rational) -> Vec<Rational> {
    let min = y.iter().min().cloned().unwrap_or_else(zero);
    let max = y.iter().max().cloned().unwrap_or_else(zero);
    let theta = min + max * frac(1, 2);
    let raw: Vec<Rational> = y
        .iter()
        .map(|x| if *x < theta { &theta - x } else { zero() })
        .collect();
    let sum: Rational = raw.iter().sum();
    raw.into_iter().map(|r| r * total / &sum).collect()
}

pub(crate) fn free_rooms(prices: &[Rational]) -> Vec<usize> {
    let free: Vec<usize> = (0..prices.len()).filter(|&j| prices[j].is_zero()).collect();
    if free.is_empty() {
        (0..prices.len()).collect()
    } else {
        free
    }
}

/// Quasilinear roommates: utility of room `j` at prices `z` is
/// `values[i][j] - z_j`.
pub(crate) struct RentGame<'a> {
    pub(crate) values: &'a [Vec<Rational>],
    pub(crate) rent: Rational,
}

impl Game for RentGame<'_> {
    fn players(&self) -> usize {
        self.values.len()
    }

    fn options(&self) -> usize {
        self.values.len() - 1
    }

    fn total(&self) -> Rational {
        self.rent.clone()
    }

    fn offer(&self, y: &[Rational]) -> Vec<Rational> {
        rent_prices(y, &self.rent)
    }

    fn allowed(&self, z: &[Rational]) -> Vec<usize> {
        free_rooms(z)
    }

    fn utility(&self, i: usize, j: usize, z: &[Rational]) -> Rational {
        &self.values[i][j] - &z[j]
    }

    fn local_models(&self, _z: &[Rational]) -> Vec<LocalModel> {
        let n = self.options();
        let utilities = self
            .values
            .iter()
            .map(|row| {
                (0..n)
                    .map(|j| (row[j].clone(), (0..n).map(|s| if s == j { -one() } else { zero() }).collect()))
                    .collect()
            })
            .collect();
        vec![LocalModel { utilities, region: Vec::new() }]
    }
}

pub(crate) fn survivor_plan(k: usize) -> Plan {
    Plan { cover: Side::Right, removals: subsets(k, 1), multiplicity: None }
}

/// Prices for `k - 1` rooms shared by `k` roommates such that whichever
/// roommate leaves, the others can be housed without envy.
/// `values[i][j]` is roommate `i`'s value for room `j`.
pub fn rent_divide(values: &[Vec<Rational>], total_rent: &Rational, eps: &Rational, schedule: Schedule) -> Result<FairOutcome> {
    let k = values.len();
    if k < 2 {
        return Err(invalid("need at least two roommates"));
    }
    if values.iter().any(|row| row.len() != k - 1) {
        return Err(invalid(format!("each roommate needs {} room values", k - 1)));
    }
    if !total_rent.is_positive() {
        return Err(invalid("total rent must be positive"));
    }
    let game = RentGame { values, rent: total_rent.clone() };
    let plan = survivor_plan(k);
    let solved = solve_game(&game, &plan, &TargetPoint::uniform(k, k - 1), eps, schedule)?;
    let gap = solved.gaps.iter().max().cloned().unwrap_or_else(zero);
    Ok(FairOutcome {
        kind: "rent".into(),
        mode: "survivor".into(),
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
    use crate::rational::int;

    #[test]
    fn price_map_is_a_sperner_relabeling() {
        let y = vec![frac(1, 2), frac(1, 2), zero()];
        let p = rent_prices(&y, &int(90));
        assert_eq!(p, vec![zero(), zero(), int(90)]);
        assert_eq!(free_rooms(&p), vec![0, 1]);
        let p = rent_prices(&vec![frac(1, 3); 3], &int(90));
        assert_eq!(p, vec![int(30); 3]);
        assert_eq!(free_rooms(&p), vec![0, 1, 2]);
    }

    #[test]
    fn two_roommates_one_room() {
        let out = rent_divide(&[vec![int(5)], vec![int(7)]], &int(10), &zero(), Schedule::default()).unwrap();
        assert_eq!(out.division, vec![int(10)]);
        assert_eq!(out.status, Status::Certified);
        assert_eq!(out.scenarios.len(), 2);
        assert_eq!(out.scenarios[0].matching, vec![(1, 0)]);
        assert_eq!(out.scenarios[1].matching, vec![(0, 0)]);
    }
}
