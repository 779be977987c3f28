//! Social welfare of the collusion equilibrium and the price of partial bargaining.
//!
//! Social utility is the sum of both ISPs' and the CP's expected utilities at
//! the collusion equilibrium for a side payment `p_d`. It is a concave
//! quadratic in `p_d`. PoPB compares its maximum with its value at the
//! symmetric (γ = 1/2) pre-bargained side payment.

use crate::bargaining::{pre_bargain_side_payment, PreBargainObjective};
use crate::demand::{MarketParams, SignalDistribution};
use crate::equilibrium::DuopolyTerms;
use crate::error::{Error, Result};
use crate::optimize::parabolic_vertex;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PopbResult {
    pub p_d_social: f64,
    pub p_d_nash: f64,
    pub social_utility_at_social: f64,
    pub social_utility_at_nash: f64,
    pub popb: f64,
}

/// Coefficients of social utility `c₂p² + c₁p + c₀` as a function of the side payment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SocialQuadratic {
    pub quadratic: f64,
    pub linear: f64,
    pub constant: f64,
}

impl SocialQuadratic {
    pub fn new(params: &MarketParams, dist: &SignalDistribution) -> Result<Self> {
        let t = DuopolyTerms::new(params, dist)?;
        let (a, k, m) = (t.alpha, t.k, t.m);
        let eb = t.mean_base;
        Ok(Self {
            quadratic: a * (k * k + m * m - k),
            linear: a * ((1.0 - 2.0 * k + 2.0 * m) * eb - (k - m) * t.p_a),
            constant: social_utility_with(&t, dist, 0.0),
        })
    }

    pub fn eval(&self, p_d: f64) -> f64 {
        (self.quadratic * p_d + self.linear) * p_d + self.constant
    }

    pub fn vertex(&self) -> f64 {
        -self.linear / (2.0 * self.quadratic)
    }
}

fn social_utility_with(terms: &DuopolyTerms, dist: &SignalDistribution, p_d: f64) -> f64 {
    terms.utilities(dist, p_d).total()
}

/// `E[U_ISP0] + E[U_ISP1] + E[U_CP]` at the collusion equilibrium for `p_d`.
pub fn social_utility(params: &MarketParams, dist: &SignalDistribution, p_d: f64) -> Result<f64> {
    Ok(social_utility_with(&DuopolyTerms::new(params, dist)?, dist, p_d))
}

/// Side payment maximizing social utility, from the vertex of its quadratic.
///
/// The leading coefficient `α³(3β² − 4α²)/(4α² − β²)²` is negative whenever
/// `α > β`, so the vertex is the unique maximizer. It is not clipped to the
/// range where every equilibrium demand stays positive.
pub fn social_optimal_side_payment(params: &MarketParams, dist: &SignalDistribution) -> Result<f64> {
    let q = SocialQuadratic::new(params, dist)?;
    if !(q.quadratic < 0.0) {
        return Err(Error::Precondition(format!(
            "social utility is not concave in the side payment (leading coefficient {})",
            q.quadratic
        )));
    }
    Ok(q.vertex())
}

/// Maximizer of social utility found from three evaluations of the same
/// function `popb` uses, independently of the closed-form coefficients.
pub fn social_optimal_side_payment_numeric(params: &MarketParams, dist: &SignalDistribution) -> Result<f64> {
    let t = DuopolyTerms::new(params, dist)?;
    let h = t.p_a.abs().max(t.mean_base).max(1.0);
    let first = parabolic_vertex(|p| social_utility_with(&t, dist, p), 0.0, h)
        .ok_or_else(|| Error::Precondition("social utility has no curvature in the side payment".into()))?;
    // a second fit centred on the first estimate removes the rounding of a distant centre
    parabolic_vertex(|p| social_utility_with(&t, dist, p), first, h)
        .ok_or_else(|| Error::Precondition("social utility has no curvature in the side payment".into()))
}

/// Price of partial bargaining: best achievable social utility over the
/// social utility at the side payment bargained with equal powers.
pub fn popb(params: &MarketParams, dist: &SignalDistribution) -> Result<PopbResult> {
    let t = DuopolyTerms::new(params, dist)?;
    let p_d_social = social_optimal_side_payment(params, dist)?;
    let p_d_nash = pre_bargain_side_payment(params, dist, 0.5)?.side_payment;
    let social = social_utility_with(&t, dist, p_d_social);
    let nash = social_utility_with(&t, dist, p_d_nash);
    Ok(PopbResult {
        p_d_social,
        p_d_nash,
        social_utility_at_social: social,
        social_utility_at_nash: nash,
        popb: social / nash,
    })
}

#[derive(Debug)]
pub struct TauRow {
    pub tau: f64,
    pub beta: f64,
    pub result: Result<PopbResult>,
    /// The social optimum lies outside the side payments that keep every
    /// equilibrium demand positive.
    pub social_outside_feasible: bool,
}

/// PoPB as a function of `τ = β/α` at fixed `α`, `p_a` and distribution.
pub fn sweep_tau(alpha: f64, tau_grid: &[f64], dist: &SignalDistribution, p_a: f64) -> Vec<TauRow> {
    tau_grid
        .iter()
        .map(|&tau| {
            let beta = tau * alpha;
            let result = MarketParams::duopoly(alpha, beta, p_a).and_then(|params| {
                let r = popb(&params, dist)?;
                let (lo, hi) = PreBargainObjective::new(&params, dist, 0.5)?.bracket()?;
                Ok((r, !(lo <= r.p_d_social && r.p_d_social <= hi)))
            });
            match result {
                Ok((r, outside)) => TauRow { tau, beta, result: Ok(r), social_outside_feasible: outside },
                Err(e) => TauRow { tau, beta, result: Err(e), social_outside_feasible: false },
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linspace;

    fn fig2() -> SignalDistribution {
        SignalDistribution::from_pairs(&[(0.1, 200.0), (0.6, 50.0), (0.3, 20.0)]).unwrap()
    }

    #[test]
    fn leading_coefficient_closed_form() {
        let dist = fig2();
        for (a, b) in [(2.0, 1.0), (2.0, 1.9), (1.0, 0.1), (5.0, 3.0)] {
            let params = MarketParams::duopoly(a, b, 5.0).unwrap();
            let q = SocialQuadratic::new(&params, &dist).unwrap();
            let expected = a * a * a * (3.0 * b * b - 4.0 * a * a) / (4.0 * a * a - b * b).powi(2);
            assert!((q.quadratic - expected).abs() < 1e-12 * expected.abs());
            assert!(q.quadratic < 0.0);
        }
    }

    #[test]
    fn quadratic_reproduces_social_utility() {
        let params = MarketParams::duopoly(2.0, 1.0, 5.0).unwrap();
        let dist = fig2();
        let q = SocialQuadratic::new(&params, &dist).unwrap();
        for p in [-10.0, -2.0, 0.0, 3.3, 15.0, 40.0] {
            let s = social_utility(&params, &dist, p).unwrap();
            assert!((q.eval(p) - s).abs() < 1e-10 * s.abs());
        }
    }

    #[test]
    fn vertex_matches_numeric_fit() {
        let dist = fig2();
        for tau in linspace(0.05, 0.95, 19) {
            let params = MarketParams::duopoly(2.0, 2.0 * tau, 5.0).unwrap();
            let closed = social_optimal_side_payment(&params, &dist).unwrap();
            let numeric = social_optimal_side_payment_numeric(&params, &dist).unwrap();
            assert!((closed - numeric).abs() < 1e-9 * closed.abs().max(1.0), "tau {tau}: {closed} vs {numeric}");
        }
    }

    #[test]
    fn vertex_is_homogeneous() {
        let params = MarketParams::duopoly(2.0, 1.0, 5.0).unwrap();
        let dist = fig2();
        let one = social_optimal_side_payment(&params, &dist).unwrap();
        let two = social_optimal_side_payment(&params.with_p_a(10.0).unwrap(), &dist.scaled(2.0).unwrap()).unwrap();
        assert!((two - 2.0 * one).abs() < 1e-12 * two.abs());
    }

    #[test]
    fn degenerate_distribution_vertex() {
        let params = MarketParams::duopoly(2.0, 1.0, 0.0).unwrap();
        let dist = SignalDistribution::deterministic(60.0).unwrap();
        // with Var = 0 and p_a = 0 only E[D] enters: vertex = −(1−2k+2m)·E[D]/(2α−β) / (2(k²+m²−k))
        let (a, b) = (2.0, 1.0);
        let den = 4.0 * a * a - b * b;
        let (k, m) = ((2.0 * a * a - b * b) / den, a * b / den);
        let eb = 60.0 / (2.0 * a - b);
        let expected = -(1.0 - 2.0 * k + 2.0 * m) * eb / (2.0 * (k * k + m * m - k));
        let got = social_optimal_side_payment(&params, &dist).unwrap();
        assert!((got - expected).abs() < 1e-12 * expected.abs());
    }

    #[test]
    fn popb_is_ratio_and_at_least_one() {
        let dist = fig2();
        for tau in linspace(0.05, 0.95, 19) {
            let params = MarketParams::duopoly(2.0, 2.0 * tau, 5.0).unwrap();
            let r = popb(&params, &dist).unwrap();
            assert!((r.popb - r.social_utility_at_social / r.social_utility_at_nash).abs() < 1e-12 * r.popb);
            assert!(r.popb >= 1.0 - 1e-9, "tau {tau}: {}", r.popb);
        }
    }

    #[test]
    fn tau_sweep_shape() {
        let grid = linspace(0.05, 0.95, 19);
        let rows = sweep_tau(2.0, &grid, &fig2(), 5.0);
        let values: Vec<f64> = rows.iter().map(|r| r.result.as_ref().unwrap().popb).collect();
        let (argmin, min) = values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, v)| (i, *v))
            .unwrap();
        assert!((grid[argmin] - 0.5).abs() < 1e-12);
        assert!((min - 1.0).abs() < 1e-3);
        assert!(values[0] > min && values[18] > min);
        assert!(values[18] > 1.2);
        assert!(rows.iter().all(|r| (r.beta - 2.0 * r.tau).abs() < 1e-15));
        // the unconstrained social optimum leaves the feasible range at high τ
        assert!(rows.iter().any(|r| r.social_outside_feasible));
        assert!(!rows[9].social_outside_feasible);
    }

    #[test]
    fn sweep_flags_invalid_tau() {
        let rows = sweep_tau(2.0, &[1.0, 0.5], &fig2(), 5.0);
        assert!(rows[0].result.is_err());
        assert!(rows[1].result.is_ok());
    }
}
