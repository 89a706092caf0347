use std::fmt;
use std::sync::Arc;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{solve_game, FairOutcome, Game, LocalModel, Plan, Scenario, Schedule};
use crate::error::{invalid, Result};
use crate::matching::Side;
use crate::multisperner::TargetPoint;
use crate::rational::{frac, int, zero, Rational};

/// Utility `u_i(j, x)` of a worker for factory `j` at wage vector `x`.
#[derive(Clone)]
pub enum WageUtility {
    /// `w_j · x_j`.
    Linear(Vec<Rational>),
    Custom(Arc<dyn Fn(usize, &[Rational]) -> Rational + Send + Sync>),
}

impl fmt::Debug for WageUtility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WageUtility::Linear(w) => f.debug_tuple("Linear").field(w).finish(),
            WageUtility::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl WageUtility {
    pub fn eval(&self, j: usize, x: &[Rational]) -> Rational {
        match self {
            WageUtility::Linear(w) => &w[j] * &x[j],
            WageUtility::Custom(f) => f(j, x),
        }
    }
}

/// `{"quotas": [k_j], "budget": B, "utilities": [[w_ij]]}`; JSON utilities
/// are linear.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "WageJson", into = "WageJson")]
pub struct WageProblem {
    pub quotas: Vec<usize>,
    pub budget: Rational,
    pub utilities: Vec<WageUtility>,
}

#[derive(Serialize, Deserialize)]
struct WageJson {
    quotas: Vec<usize>,
    #[serde(with = "crate::rational::serde_q")]
    budget: Rational,
    #[serde(with = "crate::rational::serde_vec_vec")]
    utilities: Vec<Vec<Rational>>,
}

impl TryFrom<WageJson> for WageProblem {
    type Error = crate::Error;
    fn try_from(j: WageJson) -> Result<Self> {
        let p = WageProblem {
            quotas: j.quotas,
            budget: j.budget,
            utilities: j.utilities.into_iter().map(WageUtility::Linear).collect(),
        };
        p.validate()?;
        Ok(p)
    }
}

impl From<WageProblem> for WageJson {
    fn from(p: WageProblem) -> Self {
        let utilities = p
            .utilities
            .into_iter()
            .map(|u| match u {
                WageUtility::Linear(w) => w,
                WageUtility::Custom(_) => Vec::new(),
            })
            .collect();
        WageJson { quotas: p.quotas, budget: p.budget, utilities }
    }
}

impl WageProblem {
    pub fn validate(&self) -> Result<()> {
        let m = self.utilities.len();
        let n = self.quotas.len();
        if m == 0 || n == 0 {
            return Err(invalid("need workers and factories"));
        }
        if self.quotas.iter().sum::<usize>() != m {
            return Err(invalid("quotas must sum to the number of workers"));
        }
        if !self.budget.is_positive() {
            return Err(invalid("budget must be positive"));
        }
        for (i, u) in self.utilities.iter().enumerate() {
            if let WageUtility::Linear(w) = u {
                if w.len() != n || w.iter().any(Signed::is_negative) {
                    return Err(invalid(format!("worker {i} needs {n} nonnegative weights")));
                }
            }
            for j in 0..n {
                if !u.eval(j, &vec![zero(); n]).is_zero() {
                    return Err(invalid(format!("worker {i} values factory {j} at zero wage")));
                }
            }
        }
        Ok(())
    }
}

/// Factories with positive quota only; excluded factories pay nothing.
struct WageGame<'a> {
    prob: &'a WageProblem,
    open: Vec<usize>,
}

impl WageGame<'_> {
    fn wages(&self, z: &[Rational]) -> Vec<Rational> {
        let mut x = vec![zero(); self.prob.quotas.len()];
        for (s, &j) in self.open.iter().enumerate() {
            x[j] = &self.prob.budget * &z[s] / int(self.prob.quotas[j] as i64);
        }
        x
    }
}

impl Game for WageGame<'_> {
    fn players(&self) -> usize {
        self.prob.utilities.len()
    }

    fn options(&self) -> usize {
        self.open.len()
    }

    fn total(&self) -> Rational {
        int(1)
    }

    fn offer(&self, y: &[Rational]) -> Vec<Rational> {
        y.to_vec()
    }

    fn allowed(&self, z: &[Rational]) -> Vec<usize> {
        (0..z.len()).filter(|&j| !z[j].is_zero()).collect()
    }

    fn utility(&self, i: usize, j: usize, z: &[Rational]) -> Rational {
        self.prob.utilities[i].eval(self.open[j], &self.wages(z))
    }

    fn local_models(&self, _z: &[Rational]) -> Vec<LocalModel> {
        let n = self.open.len();
        let mut utilities = Vec::with_capacity(self.players());
        for u in &self.prob.utilities {
            let WageUtility::Linear(w) = u else { return Vec::new() };
            utilities.push(
                (0..n)
                    .map(|s| {
                        let j = self.open[s];
                        let slope = &w[j] * &self.prob.budget / int(self.prob.quotas[j] as i64);
                        (zero(), (0..n).map(|r| if r == s { slope.clone() } else { zero() }).collect())
                    })
                    .collect(),
            );
        }
        vec![LocalModel { utilities, region: Vec::new() }]
    }
}

/// Wages with `Σ k_j x_j = B` and an assignment of exactly `k_j` workers to
/// factory `j` in which no worker's regret exceeds `eps`.
pub fn worker_wages(prob: &WageProblem, eps: &Rational, schedule: Schedule) -> Result<FairOutcome> {
    prob.validate()?;
    let m = prob.utilities.len();
    let open: Vec<usize> = (0..prob.quotas.len()).filter(|&j| prob.quotas[j] > 0).collect();
    let game = WageGame { prob, open: open.clone() };
    let mult: Vec<usize> = open.iter().map(|&j| prob.quotas[j]).collect();
    let target = TargetPoint::new(
        vec![frac(1, m as i64); m],
        mult.iter().map(|&k| frac(k as i64, m as i64)).collect(),
    )?;
    let plan = Plan { cover: Side::Left, removals: vec![Vec::new()], multiplicity: Some(mult) };
    let solved = solve_game(&game, &plan, &target, eps, schedule)?;
    let matching = solved.matchings[0].iter().map(|&(i, s)| (i, open[s])).collect();
    let gap = solved.gaps[0].clone();
    Ok(FairOutcome {
        kind: "wages".into(),
        mode: "quotas".into(),
        division: game.wages(&solved.z),
        scenarios: vec![Scenario {
            removed_players: Vec::new(),
            removed_pieces: Vec::new(),
            matching,
            envy_gap: Some(gap.clone()),
        }],
        envy_gap: Some(gap),
        status: solved.status,
        resolution: solved.resolution,
        certificate: Some(solved.certificate),
    })
}
