use num_traits::{Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::rational::{frac, int, one, zero, Rational};

/// Piecewise-constant density on `[0, 1]`.
///
/// `densities[s]` applies on `[breakpoints[s], breakpoints[s + 1]]`; the
/// breakpoints start at 0 and end at 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ValuationJson", into = "ValuationJson")]
pub struct Valuation {
    breakpoints: Vec<Rational>,
    densities: Vec<Rational>,
    // cumulative mass at each breakpoint
    mass: Vec<Rational>,
}

#[derive(Serialize, Deserialize)]
struct ValuationJson {
    #[serde(with = "crate::rational::serde_vec")]
    breakpoints: Vec<Rational>,
    #[serde(with = "crate::rational::serde_vec")]
    densities: Vec<Rational>,
}

impl TryFrom<ValuationJson> for Valuation {
    type Error = crate::Error;
    fn try_from(j: ValuationJson) -> Result<Self> {
        Valuation::new(j.breakpoints, j.densities)
    }
}

impl From<Valuation> for ValuationJson {
    fn from(v: Valuation) -> Self {
        ValuationJson { breakpoints: v.breakpoints, densities: v.densities }
    }
}

impl Valuation {
    pub fn new(breakpoints: Vec<Rational>, densities: Vec<Rational>) -> Result<Self> {
        if breakpoints.len() != densities.len() + 1 || densities.is_empty() {
            return Err(invalid("need one density per segment between breakpoints"));
        }
        if breakpoints[0] != zero() || *breakpoints.last().unwrap() != one() {
            return Err(invalid("breakpoints must start at 0 and end at 1"));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("breakpoints must be strictly increasing"));
        }
        if densities.iter().any(Signed::is_negative) {
            return Err(invalid("densities must be nonnegative"));
        }
        let mut mass = vec![zero()];
        for (s, d) in densities.iter().enumerate() {
            let next = mass[s].clone() + d * (&breakpoints[s + 1] - &breakpoints[s]);
            mass.push(next);
        }
        if mass.last().unwrap().is_zero() {
            return Err(invalid("total mass must be positive"));
        }
        Ok(Valuation { breakpoints, densities, mass })
    }

    pub fn uniform() -> Self {
        Valuation::new(vec![zero(), one()], vec![one()]).unwrap()
    }

    /// Density `1/(hi - lo)` on `[lo, hi]`, zero elsewhere.
    pub fn block(lo: Rational, hi: Rational) -> Result<Self> {
        Valuation::block_with_mass(lo, hi, one())
    }

    pub fn block_with_mass(lo: Rational, hi: Rational, mass: Rational) -> Result<Self> {
        if lo < zero() || hi > one() || lo >= hi {
            return Err(invalid("block must satisfy 0 <= lo < hi <= 1"));
        }
        let d = mass / (&hi - &lo);
        let mut bps = vec![zero()];
        let mut ds = Vec::new();
        if lo > zero() {
            bps.push(lo.clone());
            ds.push(zero());
        }
        ds.push(d);
        if hi < one() {
            bps.push(hi.clone());
            ds.push(zero());
        }
        bps.push(one());
        Valuation::new(bps, ds)
    }

    /// Random valuation with `segments` equal-width pieces and integer
    /// densities in `0..=9` (at least one positive).
    pub fn random<R: Rng + ?Sized>(rng: &mut R, segments: usize) -> Self {
        let s = segments.max(1) as i64;
        let bps = (0..=s).map(|x| frac(x, s)).collect();
        loop {
            let ds: Vec<Rational> = (0..s).map(|_| int(rng.gen_range(0..10))).collect();
            if ds.iter().any(|d| !d.is_zero()) {
                return Valuation::new(bps, ds).unwrap();
            }
        }
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn densities(&self) -> &[Rational] {
        &self.densities
    }

    pub fn total(&self) -> &Rational {
        self.mass.last().unwrap()
    }

    fn segment(&self, x: &Rational) -> usize {
        // last s with breakpoints[s] <= x, capped to the final segment
        let s = self.breakpoints.partition_point(|b| b <= x);
        s.saturating_sub(1).min(self.densities.len() - 1)
    }

    pub fn cdf(&self, x: &Rational) -> Rational {
        if *x <= zero() {
            return zero();
        }
        if *x >= one() {
            return self.total().clone();
        }
        let s = self.segment(x);
        &self.mass[s] + &self.densities[s] * (x - &self.breakpoints[s])
    }

    /// Density on the segment containing `x` (right-continuous).
    pub fn density_at(&self, x: &Rational) -> &Rational {
        &self.densities[self.segment(x)]
    }

    pub fn value(&self, lo: &Rational, hi: &Rational) -> Rational {
        self.cdf(hi) - self.cdf(lo)
    }

    /// The same measure with every density multiplied by `factor`.
    pub fn scaled(&self, factor: &Rational) -> Self {
        Valuation::new(self.breakpoints.clone(), self.densities.iter().map(|d| d * factor).collect()).unwrap()
    }
}
