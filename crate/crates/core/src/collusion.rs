//! Side-payment incentives when the CP sells its signal to one ISP.
//!
//! With ISP 0 paying `p_d` per unit of demand, three thresholds on `p_d`
//! matter: up to where ISP 0 still beats the no-information outcome, up to
//! where the CP still beats it, and up to where the informed ISP out-earns its
//! uninformed rival. Region A (both colluders gain) and region B (the CP
//! gains) are read off the first two.

use crate::demand::{MarketParams, SignalDistribution};
use crate::equilibrium::{solve_collusion_closed, CollusionUtilities, DuopolyTerms};
use crate::error::{Error, Result};

/// Closed interval `[lo, hi]` of side payments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncentiveRegion {
    pub isp_threshold: f64,
    pub cp_threshold: f64,
    pub dominance_threshold: f64,
    /// Non-negative side payments at which ISP 0 and the CP both gain.
    pub region_a: Option<Interval>,
    /// Non-negative side payments at which the CP gains.
    pub region_b: Option<Interval>,
}

/// `1 − sqrt(1 − r)` without cancellation for small `r`.
fn one_minus_sqrt_complement(r: f64) -> f64 {
    r / (1.0 + (1.0 - r).sqrt())
}

/// Largest `p_d` at which ISP 0 earns at least its no-information revenue.
///
/// Smaller root of `k²p² − 2k·E[base]·p + Var(base)`, i.e.
/// `(2α+β)E[D]/(2α²−β²) · {1 − sqrt(1 − (2α−β)²Var(D)/(4α²E[D]²))}`.
/// The square-root argument must be non-negative.
pub fn isp_incentive_threshold(params: &MarketParams, dist: &SignalDistribution) -> Result<f64> {
    let t = DuopolyTerms::new(params, dist)?;
    let (a, b, mean, var) = (t.alpha, t.beta, t.mean_demand, t.variance);
    let ratio = (2.0 * a - b).powi(2) * var / (4.0 * a * a * mean * mean);
    if ratio > 1.0 {
        return Err(Error::Domain(format!(
            "ISP incentive threshold needs (2a-b)^2 Var(D) <= 4a^2 E[D]^2; ratio is {ratio}"
        )));
    }
    Ok((2.0 * a + b) * mean / (2.0 * a * a - b * b) * one_minus_sqrt_complement(ratio))
}

/// Largest `p_d` at which the CP earns at least its no-information revenue.
/// Negative when the CP never gains from charging.
pub fn cp_incentive_threshold(params: &MarketParams, dist: &SignalDistribution) -> Result<f64> {
    let t = DuopolyTerms::new(params, dist)?;
    let (a, b) = (t.alpha, t.beta);
    let c = 2.0 * a * a - b * b;
    Ok(t.mean_demand * (4.0 * a * a - b * b) / ((2.0 * a - b) * c) - (c - a * b) * t.p_a / c)
}

/// Largest `p_d` at which the informed ISP earns at least as much as the
/// uninformed one.
///
/// Smaller root of `(k²−m²)p² − 2(k+m)E[base]·p + Var(base)`:
/// `(2α+β)E[D]/(2α²−β²−αβ) · {1 − sqrt(1 − (2α−β)²Var(D)(2α²−β²−αβ)/(4α²E[D]²(2α²−β²+αβ)))}`.
pub fn dominance_threshold(params: &MarketParams, dist: &SignalDistribution) -> Result<f64> {
    let t = DuopolyTerms::new(params, dist)?;
    let (a, b, mean, var) = (t.alpha, t.beta, t.mean_demand, t.variance);
    let minus = 2.0 * a * a - b * b - a * b;
    let plus = 2.0 * a * a - b * b + a * b;
    let ratio = (2.0 * a - b).powi(2) * var * minus / (4.0 * a * a * mean * mean * plus);
    if ratio > 1.0 {
        return Err(Error::Domain(format!(
            "dominance threshold needs (2a-b)^2 Var(D)(2a^2-b^2-ab) <= 4a^2 E[D]^2 (2a^2-b^2+ab); ratio is {ratio}"
        )));
    }
    Ok((2.0 * a + b) * mean / minus * one_minus_sqrt_complement(ratio))
}

pub fn incentive_region(params: &MarketParams, dist: &SignalDistribution) -> Result<IncentiveRegion> {
    let isp = isp_incentive_threshold(params, dist)?;
    let cp = cp_incentive_threshold(params, dist)?;
    let dominance = dominance_threshold(params, dist)?;
    let upto = |hi: f64| (hi > 0.0).then_some(Interval { lo: 0.0, hi });
    Ok(IncentiveRegion {
        isp_threshold: isp,
        cp_threshold: cp,
        dominance_threshold: dominance,
        region_a: upto(isp.min(cp)),
        region_b: upto(cp),
    })
}

/// One row of the `p_d` sweep. `utilities` is `None` where the collusion
/// equilibrium is infeasible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdRow {
    pub p_d: f64,
    pub utilities: Option<CollusionUtilities>,
    pub in_region_a: bool,
    pub in_region_b: bool,
}

/// Equilibrium utilities of ISP 0, ISP 1 and the CP along a grid of side payments.
pub fn sweep_pd(params: &MarketParams, dist: &SignalDistribution, grid: &[f64]) -> Result<Vec<PdRow>> {
    let region = incentive_region(params, dist)?;
    grid.iter()
        .map(|&p_d| {
            let utilities = match solve_collusion_closed(params, dist, p_d) {
                Ok(out) => Some(CollusionUtilities {
                    isp1: out.expected_utility_isp[0],
                    isp2: out.expected_utility_isp[1],
                    cp: out.expected_utility_cp,
                }),
                Err(Error::Infeasible(_)) => None,
                Err(e) => return Err(e),
            };
            let within = |r: Option<Interval>| utilities.is_some() && r.is_some_and(|r| r.contains(p_d));
            Ok(PdRow {
                p_d,
                utilities,
                in_region_a: within(region.region_a),
                in_region_b: within(region.region_b),
            })
        })
        .collect()
}
