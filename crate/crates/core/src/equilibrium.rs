//! Nash equilibria of the ISP pricing game under the three information regimes.
//!
//! Closed forms cover linear demand (duopoly, plus symmetric `n`-ISP neutral
//! regimes). [`best_response_iterate`] solves any supermodular game by
//! simultaneous best responses and serves as the independent check on every
//! closed form.

use crate::demand::{
    check_assumptions, default_price_cap, linear_demand_unchecked, moments, DemandModel,
    MarketParams, SignalDistribution,
};
use crate::error::{Error, Result};
use crate::optimize::{bisect, scan_golden_max};

/// Who observes the CP's signal, and what the informed ISP pays for it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regime {
    NoInfo,
    FullInfo,
    /// The CP reveals the signal to `informed_isp` only, charging
    /// `side_payment` per unit of that ISP's demand.
    Collusion { informed_isp: usize, side_payment: f64 },
}

impl Regime {
    /// Regime where the CP reveals the signal to ISP 0 at a per-unit price `p_d`.
    pub fn collusion(p_d: f64) -> Self {
        Regime::Collusion {
            informed_isp: 0,
            side_payment: p_d,
        }
    }

    pub fn is_informed(&self, isp: usize) -> bool {
        match *self {
            Regime::NoInfo => false,
            Regime::FullInfo => true,
            Regime::Collusion { informed_isp, .. } => informed_isp == isp,
        }
    }

    /// Per-unit transfer ISP `isp` owes the CP.
    pub fn payment_of(&self, isp: usize) -> f64 {
        match *self {
            Regime::Collusion {
                informed_isp,
                side_payment,
            } if informed_isp == isp => side_payment,
            _ => 0.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Regime::NoInfo => "no_info",
            Regime::FullInfo => "full_info",
            Regime::Collusion { .. } => "collusion",
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        if let Regime::Collusion {
            informed_isp,
            side_payment,
        } = *self
        {
            if informed_isp >= n {
                return Err(Error::arg(format!("informed ISP {informed_isp} out of range for n = {n}")));
            }
            if !side_payment.is_finite() {
                return Err(Error::arg("side payment must be finite"));
            }
        }
        Ok(())
    }
}

/// Price set by one ISP: flat if it prices on the distribution alone,
/// one price per signal if it observes the signal.
#[derive(Debug, Clone, PartialEq)]
pub enum IspPrice {
    Flat(f64),
    Contingent(Vec<f64>),
}

impl IspPrice {
    pub fn at(&self, theta: usize) -> f64 {
        match self {
            IspPrice::Flat(p) => *p,
            IspPrice::Contingent(ps) => ps[theta],
        }
    }

    fn values(&self) -> &[f64] {
        match self {
            IspPrice::Flat(p) => std::slice::from_ref(p),
            IspPrice::Contingent(ps) => ps,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PriceProfile {
    pub prices: Vec<IspPrice>,
}

impl PriceProfile {
    pub fn new(prices: Vec<IspPrice>) -> Self {
        Self { prices }
    }

    /// Constant profile `value` with the structure `regime` requires.
    pub fn uniform(regime: &Regime, n: usize, signals: usize, value: f64) -> Self {
        Self::new(
            (0..n)
                .map(|i| {
                    if regime.is_informed(i) {
                        IspPrice::Contingent(vec![value; signals])
                    } else {
                        IspPrice::Flat(value)
                    }
                })
                .collect(),
        )
    }

    pub fn isps(&self) -> usize {
        self.prices.len()
    }

    pub fn price(&self, isp: usize, theta: usize) -> f64 {
        self.prices[isp].at(theta)
    }

    /// Full price vector faced at signal `theta`.
    pub fn at(&self, theta: usize) -> Vec<f64> {
        self.prices.iter().map(|p| p.at(theta)).collect()
    }

    /// Sup-norm distance between two profiles of the same structure.
    pub fn distance(&self, other: &PriceProfile) -> f64 {
        self.prices
            .iter()
            .zip(&other.prices)
            .flat_map(|(a, b)| a.values().iter().zip(b.values()).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }

    /// Checks that the profile has the informed/uninformed layout of `regime`.
    pub fn check_structure(&self, regime: &Regime, n: usize, signals: usize) -> Result<()> {
        if self.prices.len() != n {
            return Err(Error::arg(format!("profile has {} ISPs, expected {n}", self.prices.len())));
        }
        for (i, p) in self.prices.iter().enumerate() {
            match (regime.is_informed(i), p) {
                (true, IspPrice::Contingent(ps)) if ps.len() == signals => {}
                (true, IspPrice::Contingent(ps)) => {
                    return Err(Error::arg(format!(
                        "ISP {i} has {} signal prices, expected {signals}",
                        ps.len()
                    )))
                }
                (true, IspPrice::Flat(_)) => {
                    return Err(Error::arg(format!(
                        "ISP {i} observes the signal under {} and needs signal-contingent prices",
                        regime.name()
                    )))
                }
                (false, IspPrice::Contingent(_)) => {
                    return Err(Error::arg(format!(
                        "ISP {i} does not observe the signal under {} and needs a flat price",
                        regime.name()
                    )))
                }
                (false, IspPrice::Flat(_)) => {}
            }
        }
        Ok(())
    }
}

/// Expected per-unit-time revenue of every player.
#[derive(Debug, Clone, PartialEq)]
pub struct Utilities {
    pub isp: Vec<f64>,
    pub cp: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumOutcome {
    pub regime: Regime,
    pub profile: PriceProfile,
    /// `demands[isp][theta]`.
    pub demands: Vec<Vec<f64>>,
    pub expected_utility_isp: Vec<f64>,
    pub expected_utility_cp: f64,
    pub converged: bool,
    /// Zero for closed forms.
    pub iterations: usize,
}

impl EquilibriumOutcome {
    pub fn expected_demand(&self, isp: usize, dist: &SignalDistribution) -> f64 {
        dist.expect(|t| self.demands[isp][t])
    }
}

fn demand_table(
    model: DemandModel<'_>,
    params: &MarketParams,
    dist: &SignalDistribution,
    profile: &PriceProfile,
) -> Vec<Vec<f64>> {
    let n = profile.isps();
    let mut table = vec![vec![0.0; dist.len()]; n];
    for theta in 0..dist.len() {
        let prices = profile.at(theta);
        let d = match model {
            DemandModel::Linear => (0..n)
                .map(|i| linear_demand_unchecked(i, dist.baseline(theta), &prices, params))
                .collect(),
            DemandModel::Oracle(o) => o.demands(theta, &prices),
        };
        for i in 0..n {
            table[i][theta] = d[i];
        }
    }
    table
}

fn utilities_from(
    profile: &PriceProfile,
    demands: &[Vec<f64>],
    regime: &Regime,
    params: &MarketParams,
    dist: &SignalDistribution,
) -> Utilities {
    let isp = (0..profile.isps())
        .map(|i| {
            let fee = regime.payment_of(i);
            dist.expect(|t| (profile.price(i, t) - fee) * demands[i][t])
        })
        .collect();
    let cp = (0..profile.isps())
        .map(|i| {
            let per_unit = params.p_a() + regime.payment_of(i);
            dist.expect(|t| demands[i][t]) * per_unit
        })
        .sum();
    Utilities { isp, cp }
}

/// Expected utilities of every ISP and the CP at `profile`, under linear demand.
///
/// Under collusion the informed ISP keeps `p_i(θ) − p_d` per unit and the CP
/// collects `p_a + p_d` on that ISP's traffic and `p_a` on the rest.
pub fn expected_utilities(
    profile: &PriceProfile,
    regime: &Regime,
    params: &MarketParams,
    dist: &SignalDistribution,
) -> Result<Utilities> {
    regime.validate(params.n())?;
    profile.check_structure(regime, params.n(), dist.len())?;
    let demands = demand_table(DemandModel::Linear, params, dist, profile);
    Ok(utilities_from(profile, &demands, regime, params, dist))
}

/// Informed ISPs price signal by signal and need positive demand at every
/// signal; uninformed ISPs price on expected demand and need it positive.
fn require_positive_demand(demands: &[Vec<f64>], regime: &Regime, dist: &SignalDistribution) -> Result<()> {
    for (i, row) in demands.iter().enumerate() {
        if regime.is_informed(i) {
            for (t, &d) in row.iter().enumerate() {
                if !(d > 0.0) {
                    return Err(Error::Infeasible(format!(
                        "demand of informed ISP {i} at signal {:?} is {d}, not positive",
                        dist.outcomes()[t].label
                    )));
                }
            }
        } else {
            let expected = dist.expect(|t| row[t]);
            if !(expected > 0.0) {
                return Err(Error::Infeasible(format!(
                    "expected demand of ISP {i} is {expected}, not positive"
                )));
            }
        }
    }
    Ok(())
}

fn closed_outcome(
    regime: Regime,
    profile: PriceProfile,
    params: &MarketParams,
    dist: &SignalDistribution,
    isp: Vec<f64>,
    cp: f64,
) -> Result<EquilibriumOutcome> {
    let demands = demand_table(DemandModel::Linear, params, dist, &profile);
    require_positive_demand(&demands, &regime, dist)?;
    Ok(EquilibriumOutcome {
        regime,
        profile,
        demands,
        expected_utility_isp: isp,
        expected_utility_cp: cp,
        converged: true,
        iterations: 0,
    })
}

/// `2α − (n−1)β`, the symmetric equilibrium denominator.
fn symmetric_slack(params: &MarketParams) -> f64 {
    2.0 * params.alpha() - (params.n() - 1) as f64 * params.beta()
}

/// No-information equilibrium: every ISP charges `E[D]/(2α−(n−1)β)`.
///
/// For `n = 2` this gives `E[U_ISP] = α·E[D]²/(2α−β)²` and
/// `E[U_CP] = 2α·E[D]·p_a/(2α−β)`. Larger `n` uses the symmetric extension.
pub fn solve_no_info_closed(params: &MarketParams, dist: &SignalDistribution) -> Result<EquilibriumOutcome> {
    params.require_dominant_diagonal()?;
    let (a, n) = (params.alpha(), params.n());
    let mean = moments(dist).mean;
    let slack = symmetric_slack(params);
    let price = mean / slack;
    let u_isp = a * price.powi(2);
    let u_cp = n as f64 * a * mean * params.p_a() / slack;
    closed_outcome(
        Regime::NoInfo,
        PriceProfile::new(vec![IspPrice::Flat(price); n]),
        params,
        dist,
        vec![u_isp; n],
        u_cp,
    )
}

/// Full-information equilibrium: `p(θ) = D(θ)/(2α−(n−1)β)` for every ISP.
pub fn solve_full_info_closed(params: &MarketParams, dist: &SignalDistribution) -> Result<EquilibriumOutcome> {
    params.require_dominant_diagonal()?;
    let (a, n) = (params.alpha(), params.n());
    let mean = moments(dist).mean;
    let slack = symmetric_slack(params);
    let prices: Vec<f64> = (0..dist.len()).map(|t| dist.baseline(t) / slack).collect();
    let u_isp = a * dist.expect(|t| prices[t].powi(2));
    let u_cp = n as f64 * a * mean * params.p_a() / slack;
    closed_outcome(
        Regime::FullInfo,
        PriceProfile::new(vec![IspPrice::Contingent(prices); n]),
        params,
        dist,
        vec![u_isp; n],
        u_cp,
    )
}

/// Coefficients shared by the duopoly collusion closed forms.
///
/// With ISP 0 informed and paying `p_d`, the equilibrium margin of the
/// informed ISP is `p₁(θ) − p_d = base(θ) − k·p_d` and the uninformed price
/// is `p₂ = mean_base + m·p_d`.
#[derive(Debug, Clone, PartialEq)]
pub struct DuopolyTerms {
    /// `D(θ)/(2α) + β·E[D]/(2α(2α−β))`.
    pub base: Vec<f64>,
    /// `E[base] = E[D]/(2α−β)`.
    pub mean_base: f64,
    /// `(2α²−β²)/(4α²−β²)`.
    pub k: f64,
    /// `αβ/(4α²−β²)`.
    pub m: f64,
    pub alpha: f64,
    pub beta: f64,
    pub p_a: f64,
    pub mean_demand: f64,
    pub variance: f64,
}

impl DuopolyTerms {
    pub fn new(params: &MarketParams, dist: &SignalDistribution) -> Result<Self> {
        params.require_duopoly("the collusion closed form")?;
        params.require_dominant_diagonal()?;
        let (a, b) = (params.alpha(), params.beta());
        let mo = moments(dist);
        let shift = b * mo.mean / (2.0 * a * (2.0 * a - b));
        let denom = 4.0 * a * a - b * b;
        Ok(Self {
            base: (0..dist.len()).map(|t| dist.baseline(t) / (2.0 * a) + shift).collect(),
            mean_base: mo.mean / (2.0 * a - b),
            k: (2.0 * a * a - b * b) / denom,
            m: a * b / denom,
            alpha: a,
            beta: b,
            p_a: params.p_a(),
            mean_demand: mo.mean,
            variance: mo.variance,
        })
    }

    pub fn informed_price(&self, theta: usize, p_d: f64) -> f64 {
        self.base[theta] - self.k * p_d + p_d
    }

    pub fn uninformed_price(&self, p_d: f64) -> f64 {
        self.mean_base + self.m * p_d
    }

    /// Largest side payment keeping the informed ISP's demand positive at every signal.
    pub fn max_side_payment(&self) -> f64 {
        self.base.iter().copied().fold(f64::INFINITY, f64::min) / self.k
    }

    /// Smallest side payment keeping the uninformed ISP's price positive.
    pub fn min_side_payment(&self) -> f64 {
        -self.mean_base / self.m
    }

    /// `E[U_ISP1]`, `E[U_ISP2]`, `E[U_CP]` at the collusion equilibrium for `p_d`.
    pub fn utilities(&self, dist: &SignalDistribution, p_d: f64) -> CollusionUtilities {
        let (a, k, m) = (self.alpha, self.k, self.m);
        let isp1 = a * dist.expect(|t| (self.base[t] - k * p_d).powi(2));
        let isp2 = a * (self.mean_base + m * p_d).powi(2);
        let cp = 2.0 * a * self.mean_demand * self.p_a / (2.0 * a - self.beta) - a * k * p_d * p_d
            + (a * self.mean_base - a * (k - m) * self.p_a) * p_d;
        CollusionUtilities { isp1, isp2, cp }
    }

    /// Expected demand through the informed ISP: `α·(E[base] − k·p_d)`.
    pub fn informed_demand(&self, p_d: f64) -> f64 {
        self.alpha * (self.mean_base - self.k * p_d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollusionUtilities {
    pub isp1: f64,
    pub isp2: f64,
    pub cp: f64,
}

impl CollusionUtilities {
    pub fn total(&self) -> f64 {
        self.isp1 + self.isp2 + self.cp
    }
}

/// Duopoly equilibrium when ISP 0 alone observes the signal and pays `p_d`
/// per unit of its demand.
///
/// `p₁(θ) = D(θ)/(2α) + β·E[D]/(2α(2α−β)) + 2α²·p_d/(4α²−β²)` and
/// `p₂ = E[D]/(2α−β) + αβ·p_d/(4α²−β²)`.
pub fn solve_collusion_closed(
    params: &MarketParams,
    dist: &SignalDistribution,
    p_d: f64,
) -> Result<EquilibriumOutcome> {
    if !p_d.is_finite() {
        return Err(Error::arg("side payment must be finite"));
    }
    let terms = DuopolyTerms::new(params, dist)?;
    let u = terms.utilities(dist, p_d);
    let informed = (0..dist.len()).map(|t| terms.informed_price(t, p_d)).collect();
    let profile = PriceProfile::new(vec![
        IspPrice::Contingent(informed),
        IspPrice::Flat(terms.uninformed_price(p_d)),
    ]);
    closed_outcome(Regime::collusion(p_d), profile, params, dist, vec![u.isp1, u.isp2], u.cp)
}

/// Controls for [`best_response_iterate`].
#[derive(Debug, Clone, PartialEq)]
pub struct IterConfig {
    /// Stop once the sup-norm price change falls below this.
    pub tol: f64,
    pub max_iter: usize,
    /// Upper price bound for linear demand; `10·E[D]/α` when unset.
    pub p_max: Option<f64>,
    /// Grid for the numeric assumption check on oracles. Unset: three
    /// interior points per axis of the oracle's price domain.
    pub assumption_grid: Option<Vec<Vec<f64>>>,
}

impl Default for IterConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 10_000,
            p_max: None,
            assumption_grid: None,
        }
    }
}

impl IterConfig {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

/// Simultaneous (Jacobi) best-response dynamics. Each call to `next` returns
/// the profile of best responses to the previous one.
pub struct BestResponseDynamics<'a> {
    regime: Regime,
    model: DemandModel<'a>,
    params: MarketParams,
    dist: &'a SignalDistribution,
    bounds: Vec<(f64, f64)>,
    current: PriceProfile,
}

impl<'a> BestResponseDynamics<'a> {
    pub fn new(
        regime: Regime,
        model: DemandModel<'a>,
        params: &MarketParams,
        dist: &'a SignalDistribution,
        init: PriceProfile,
        p_max: Option<f64>,
    ) -> Result<Self> {
        let n = params.n();
        regime.validate(n)?;
        init.check_structure(&regime, n, dist.len())?;
        let bounds: Vec<(f64, f64)> = match model {
            DemandModel::Linear => {
                let cap = p_max.unwrap_or_else(|| default_price_cap(params, dist));
                if !(cap > 0.0) {
                    return Err(Error::arg(format!("price cap must be positive, got {cap}")));
                }
                vec![(0.0, cap); n]
            }
            DemandModel::Oracle(o) => {
                if o.isps() != n || o.signals() != dist.len() {
                    return Err(Error::arg(format!(
                        "oracle covers {} ISPs and {} signals, market has {n} and {}",
                        o.isps(),
                        o.signals(),
                        dist.len()
                    )));
                }
                (0..n).map(|i| o.price_domain(i)).collect()
            }
        };
        for (i, p) in init.prices.iter().enumerate() {
            let (lo, hi) = bounds[i];
            if let Some(x) = p.values().iter().find(|x| !(lo..=hi).contains(*x)) {
                return Err(Error::arg(format!("initial price {x} of ISP {i} outside [{lo}, {hi}]")));
            }
        }
        Ok(Self {
            regime,
            model,
            params: *params,
            dist,
            bounds,
            current: init,
        })
    }

    pub fn current(&self) -> &PriceProfile {
        &self.current
    }

    fn best_response(&self, isp: usize, profile: &PriceProfile) -> IspPrice {
        let fee = self.regime.payment_of(isp);
        let (lo, hi) = self.bounds[isp];
        let dist = self.dist;
        match self.model {
            DemandModel::Linear => {
                let (a, b) = (self.params.alpha(), self.params.beta());
                let rivals = |t: usize| -> f64 {
                    (0..profile.isps()).filter(|&j| j != isp).map(|j| profile.price(j, t)).sum()
                };
                if self.regime.is_informed(isp) {
                    IspPrice::Contingent(
                        (0..dist.len())
                            .map(|t| ((dist.baseline(t) + b * rivals(t) + a * fee) / (2.0 * a)).clamp(lo, hi))
                            .collect(),
                    )
                } else {
                    let expected = dist.expect(|t| dist.baseline(t) + b * rivals(t));
                    IspPrice::Flat((expected / (2.0 * a)).clamp(lo, hi))
                }
            }
            DemandModel::Oracle(oracle) => {
                let revenue = |t: usize, p: f64| -> f64 {
                    let mut prices = profile.at(t);
                    prices[isp] = p;
                    (p - fee) * oracle.demands(t, &prices)[isp]
                };
                if self.regime.is_informed(isp) {
                    IspPrice::Contingent(
                        (0..dist.len())
                            .map(|t| maximise_on(|p| revenue(t, p), lo, hi))
                            .collect(),
                    )
                } else {
                    IspPrice::Flat(maximise_on(|p| dist.expect(|t| revenue(t, p)), lo, hi))
                }
            }
        }
    }

    fn step(&self, profile: &PriceProfile) -> PriceProfile {
        PriceProfile::new((0..profile.isps()).map(|i| self.best_response(i, profile)).collect())
    }
}

impl Iterator for BestResponseDynamics<'_> {
    type Item = PriceProfile;

    fn next(&mut self) -> Option<PriceProfile> {
        let next = self.step(&self.current);
        self.current = next.clone();
        Some(next)
    }
}

/// Bounded maximiser for generic best responses: golden section, then a
/// bisection on the central-difference slope. Golden section alone stalls
/// near `sqrt(eps)` relative accuracy where the objective is flat.
fn maximise_on(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let coarse = scan_golden_max(&f, lo, hi, 64, 1e-12 * (1.0 + hi.abs()));
    let x = coarse.x;
    let h = |p: f64| 1e-4 * p.abs().max(1.0);
    let slope = |p: f64| (f(p + h(p)) - f(p - h(p))) / (2.0 * h(p));
    let width = 1e-5 * (1.0 + x.abs());
    let (a, b) = ((x - width).max(lo + h(lo)), (x + width).min(hi - h(hi)));
    if a < b {
        if let Some(root) = bisect(slope, a, b, 1e-15 * (1.0 + x.abs())) {
            return root;
        }
    }
    x
}

fn default_oracle_grid(bounds: &[(f64, f64)]) -> Vec<Vec<f64>> {
    let mut grid = vec![Vec::new()];
    for &(lo, hi) in bounds {
        grid = grid
            .into_iter()
            .flat_map(|point| {
                [0.25, 0.5, 0.75].into_iter().map(move |f| {
                    let mut q = point.clone();
                    q.push(lo + f * (hi - lo));
                    q
                })
            })
            .collect();
    }
    grid
}

/// Iterates simultaneous best responses from `init` until the sup-norm price
/// change drops below `config.tol`.
///
/// Informed ISPs best-respond signal by signal; uninformed ISPs maximise
/// expected revenue. Linear best responses are solved exactly, oracle best
/// responses by bounded 1-D maximisation over the oracle's price domain.
pub fn best_response_iterate(
    regime: Regime,
    model: DemandModel<'_>,
    params: &MarketParams,
    dist: &SignalDistribution,
    init: PriceProfile,
    config: &IterConfig,
) -> Result<EquilibriumOutcome> {
    if !(config.tol > 0.0) {
        return Err(Error::arg(format!("tolerance must be positive, got {}", config.tol)));
    }
    let mut dynamics = BestResponseDynamics::new(regime, model, params, dist, init, config.p_max)?;
    let grid = match (&model, &config.assumption_grid) {
        (DemandModel::Linear, _) => Vec::new(),
        (DemandModel::Oracle(_), Some(g)) => g.clone(),
        (DemandModel::Oracle(_), None) => default_oracle_grid(&dynamics.bounds),
    };
    check_assumptions(params, model, &grid)?.require()?;

    let mut previous = dynamics.current().clone();
    let mut change = f64::INFINITY;
    for iteration in 1..=config.max_iter {
        let next = dynamics.next().expect("dynamics never end");
        change = next.distance(&previous);
        if change < config.tol {
            let demands = demand_table(model, params, dist, &next);
            require_positive_demand(&demands, &regime, dist)?;
            let u = utilities_from(&next, &demands, &regime, params, dist);
            return Ok(EquilibriumOutcome {
                regime,
                profile: next,
                demands,
                expected_utility_isp: u.isp,
                expected_utility_cp: u.cp,
                converged: true,
                iterations: iteration,
            });
        }
        previous = next;
    }
    Err(Error::NonConvergence {
        iterations: config.max_iter,
        last_change: change,
        last: Box::new(previous),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demand::{FnDemand, LinearOracle, Outcome};

    fn fig2() -> (MarketParams, SignalDistribution) {
        (
            MarketParams::duopoly(2.0, 1.0, 5.0).unwrap(),
            SignalDistribution::from_pairs(&[(0.1, 200.0), (0.6, 50.0), (0.3, 20.0)]).unwrap(),
        )
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    fn iterate_from_zero(regime: Regime, params: &MarketParams, dist: &SignalDistribution) -> EquilibriumOutcome {
        let init = PriceProfile::uniform(&regime, params.n(), dist.len(), 0.0);
        best_response_iterate(regime, DemandModel::Linear, params, dist, init, &IterConfig::default()).unwrap()
    }

    fn assert_reproducible(out: &EquilibriumOutcome, params: &MarketParams, dist: &SignalDistribution) {
        let u = expected_utilities(&out.profile, &out.regime, params, dist).unwrap();
        for (a, b) in u.isp.iter().zip(&out.expected_utility_isp) {
            assert!(rel(*a, *b) < 1e-10, "{a} vs {b}");
        }
        assert!(rel(u.cp, out.expected_utility_cp) < 1e-10);
    }

    #[test]
    fn no_info_fig2() {
        let (params, dist) = fig2();
        let out = solve_no_info_closed(&params, &dist).unwrap();
        assert!(rel(out.profile.price(0, 0), 56.0 / 3.0) < 1e-14);
        assert!(rel(out.expected_utility_isp[0], 2.0 * 56.0 * 56.0 / 9.0) < 1e-14);
        assert!(rel(out.expected_utility_cp, 4.0 * 56.0 * 5.0 / 3.0) < 1e-14);
        assert_eq!(out.iterations, 0);
        assert_reproducible(&out, &params, &dist);

        let it = iterate_from_zero(Regime::NoInfo, &params, &dist);
        assert!(out.profile.distance(&it.profile) < 1e-9 * 56.0 / 3.0);
    }

    #[test]
    fn no_info_degenerate_and_decoupled() {
        let params = MarketParams::duopoly(2.0, 1.0, 5.0).unwrap();
        let dist = SignalDistribution::deterministic(100.0).unwrap();
        let out = solve_no_info_closed(&params, &dist).unwrap();
        assert!(rel(out.profile.price(1, 0), 100.0 / 3.0) < 1e-14);
        assert!(rel(out.expected_utility_isp[1], 2.0 * 1e4 / 9.0) < 1e-14);

        let weak = MarketParams::duopoly(2.0, 1e-9, 0.0).unwrap();
        let out = solve_no_info_closed(&weak, &dist).unwrap();
        assert!(rel(out.profile.price(0, 0), 100.0 / 4.0) < 1e-8);
    }

    #[test]
    fn full_info_fig2() {
        let (params, dist) = fig2();
        let full = solve_full_info_closed(&params, &dist).unwrap();
        assert!(rel(full.expected_utility_isp[0], 2.0 * 5620.0 / 9.0) < 1e-12);
        assert_reproducible(&full, &params, &dist);
        let none = solve_no_info_closed(&params, &dist).unwrap();
        let gap = full.expected_utility_isp[0] - none.expected_utility_isp[0];
        assert!(rel(gap, 2.0 * 2484.0 / 9.0) < 1e-10);

        let it = iterate_from_zero(Regime::FullInfo, &params, &dist);
        for t in 0..3 {
            assert!(rel(it.profile.price(0, t), full.profile.price(0, t)) < 1e-9);
        }
    }

    #[test]
    fn zero_variance_signal_carries_no_information() {
        let params = MarketParams::duopoly(2.0, 1.0, 5.0).unwrap();
        let dist = SignalDistribution::deterministic(100.0).unwrap();
        let a = solve_full_info_closed(&params, &dist).unwrap();
        let b = solve_no_info_closed(&params, &dist).unwrap();
        assert_eq!(a.expected_utility_isp, b.expected_utility_isp);
        assert_eq!(a.expected_utility_cp, b.expected_utility_cp);
        let c = solve_collusion_closed(&params, &dist, 0.0).unwrap();
        assert!(rel(c.expected_utility_isp[0], c.expected_utility_isp[1]) < 1e-12);
    }

    #[test]
    fn collusion_free_signal_fig2() {
        let (params, dist) = fig2();
        let out = solve_collusion_closed(&params, &dist, 0.0).unwrap();
        // E[D²]/(4α) + β·E[D]²·(4α−β)/(4α(2α−β)²)
        let expected = 5620.0 / 8.0 + 3136.0 * 7.0 / 72.0;
        assert!(rel(out.expected_utility_isp[0], expected) < 1e-12);
        assert!((out.expected_utility_isp[0] - 1007.4).abs() < 0.05);
        let none = solve_no_info_closed(&params, &dist).unwrap();
        assert!(rel(out.expected_utility_isp[1], none.expected_utility_isp[1]) < 1e-14);
        assert_reproducible(&out, &params, &dist);
    }

    #[test]
    fn collusion_matches_iteration_with_payment() {
        let (params, dist) = fig2();
        let closed = solve_collusion_closed(&params, &dist, 5.0).unwrap();
        let it = iterate_from_zero(Regime::collusion(5.0), &params, &dist);
        for t in 0..3 {
            assert!(rel(it.profile.price(0, t), closed.profile.price(0, t)) < 1e-9);
        }
        assert!(rel(it.profile.price(1, 0), closed.profile.price(1, 0)) < 1e-9);
        for i in 0..2 {
            assert!(rel(it.expected_utility_isp[i], closed.expected_utility_isp[i]) < 1e-9);
        }
        assert!(rel(it.expected_utility_cp, closed.expected_utility_cp) < 1e-9);
        assert_reproducible(&closed, &params, &dist);
    }

    #[test]
    fn collusion_reports_infeasible_signal() {
        let (params, dist) = fig2();
        let terms = DuopolyTerms::new(&params, &dist).unwrap();
        let err = solve_collusion_closed(&params, &dist, terms.max_side_payment() + 1.0).unwrap_err();
        match err {
            Error::Infeasible(msg) => assert!(msg.contains("\"s2\""), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn collusion_needs_duopoly() {
        let params = MarketParams::new(3, 3.0, 1.0, 0.0).unwrap();
        let (_, dist) = fig2();
        assert!(matches!(solve_collusion_closed(&params, &dist, 0.0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn starting_at_the_equilibrium_takes_one_step() {
        let (params, dist) = fig2();
        for (regime, closed) in [
            (Regime::NoInfo, solve_no_info_closed(&params, &dist).unwrap()),
            (Regime::FullInfo, solve_full_info_closed(&params, &dist).unwrap()),
            (Regime::collusion(5.0), solve_collusion_closed(&params, &dist, 5.0).unwrap()),
        ] {
            let out = best_response_iterate(
                regime,
                DemandModel::Linear,
                &params,
                &dist,
                closed.profile.clone(),
                &IterConfig::default(),
            )
            .unwrap();
            assert_eq!(out.iterations, 1, "{regime:?}");
        }
    }

    #[test]
    fn symmetric_n_closed_forms_agree_with_iteration() {
        let dist = SignalDistribution::from_pairs(&[(0.25, 120.0), (0.5, 60.0), (0.25, 30.0)]).unwrap();
        for n in 3..6 {
            let params = MarketParams::new(n, 3.0, 2.9 / (n - 1) as f64, 2.0).unwrap();
            for (regime, closed) in [
                (Regime::NoInfo, solve_no_info_closed(&params, &dist).unwrap()),
                (Regime::FullInfo, solve_full_info_closed(&params, &dist).unwrap()),
            ] {
                let it = iterate_from_zero(regime, &params, &dist);
                let scale = closed.profile.price(0, 0);
                assert!(it.profile.distance(&closed.profile) < 1e-9 * scale, "n={n} {regime:?}");
                for i in 0..n {
                    assert!(rel(it.expected_utility_isp[i], closed.expected_utility_isp[i]) < 1e-9);
                }
                assert!(rel(it.expected_utility_cp, closed.expected_utility_cp) < 1e-9);
            }
        }
    }

    #[test]
    fn iteration_from_zero_is_monotone() {
        let (params, dist) = fig2();
        for regime in [Regime::NoInfo, Regime::FullInfo, Regime::collusion(5.0)] {
            let init = PriceProfile::uniform(&regime, 2, 3, 0.0);
            let dyn_ = BestResponseDynamics::new(regime, DemandModel::Linear, &params, &dist, init.clone(), None)
                .unwrap();
            let mut prev = init;
            for next in dyn_.take(60) {
                for i in 0..2 {
                    for t in 0..3 {
                        assert!(next.price(i, t) >= prev.price(i, t), "{regime:?}");
                    }
                }
                prev = next;
            }
        }
    }

    #[test]
    fn non_convergence_carries_last_profile() {
        let (params, dist) = fig2();
        let init = PriceProfile::uniform(&Regime::NoInfo, 2, 3, 0.0);
        let cfg = IterConfig {
            max_iter: 3,
            ..IterConfig::default()
        };
        match best_response_iterate(Regime::NoInfo, DemandModel::Linear, &params, &dist, init, &cfg) {
            Err(Error::NonConvergence { iterations, last, .. }) => {
                assert_eq!(iterations, 3);
                assert!(last.price(0, 0) > 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn iteration_rejects_bad_inputs() {
        let (params, dist) = fig2();
        let flat = PriceProfile::uniform(&Regime::NoInfo, 2, 3, 0.0);
        let cfg = IterConfig::default();
        assert!(best_response_iterate(Regime::FullInfo, DemandModel::Linear, &params, &dist, flat.clone(), &cfg).is_err());
        assert!(best_response_iterate(Regime::NoInfo, DemandModel::Linear, &params, &dist, flat.clone(), &IterConfig::with_tol(0.0)).is_err());
        let bad = Regime::Collusion { informed_isp: 2, side_payment: 0.0 };
        assert!(best_response_iterate(bad, DemandModel::Linear, &params, &dist, flat, &cfg).is_err());
    }

    #[test]
    fn iteration_refuses_failed_assumptions() {
        let params = MarketParams::duopoly(2.0, 1.0, 0.0).unwrap();
        let dist = SignalDistribution::deterministic(10.0).unwrap();
        let bad = FnDemand::new(2, 1, (0.0, 10.0), |_, p: &[f64]| vec![10.0 + p[0] + p[1], 10.0 - p[1] + p[0]]);
        let init = PriceProfile::uniform(&Regime::NoInfo, 2, 1, 1.0);
        let err = best_response_iterate(
            Regime::NoInfo,
            DemandModel::Oracle(&bad),
            &params,
            &dist,
            init,
            &IterConfig::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Precondition(_)), "{err:?}");
    }

    #[test]
    fn generic_path_recovers_linear_equilibria() {
        let (params, dist) = fig2();
        let oracle = LinearOracle::new(params, dist.clone());
        let cfg = IterConfig::with_tol(1e-9);
        for (regime, closed) in [
            (Regime::NoInfo, solve_no_info_closed(&params, &dist).unwrap()),
            (Regime::FullInfo, solve_full_info_closed(&params, &dist).unwrap()),
            (Regime::collusion(5.0), solve_collusion_closed(&params, &dist, 5.0).unwrap()),
        ] {
            let init = PriceProfile::uniform(&regime, 2, 3, 0.0);
            let out = best_response_iterate(regime, DemandModel::Oracle(&oracle), &params, &dist, init, &cfg).unwrap();
            assert!(out.profile.distance(&closed.profile) < 1e-6, "{regime:?}");
            assert!(rel(out.expected_utility_isp[0], closed.expected_utility_isp[0]) < 1e-7);
        }
    }

    #[test]
    fn nonlinear_equilibrium_is_unique_from_several_starts() {
        // d_i = M(θ) − a·p_i − e·p_i² + b·p_j + c·p_i·p_j
        let dist = SignalDistribution::new(vec![Outcome::new("hi", 0.4, 300.0), Outcome::new("lo", 0.6, 100.0)]).unwrap();
        let sizes = [300.0, 100.0];
        let (a, e, b, c) = (2.0, 0.02, 1.0, 0.005);
        let oracle = FnDemand::new(2, 2, (0.0, 40.0), move |t, p: &[f64]| {
            (0..2)
                .map(|i| {
                    let (own, other) = (p[i], p[1 - i]);
                    sizes[t] - a * own - e * own * own + b * other + c * own * other
                })
                .collect()
        });
        let params = MarketParams::duopoly(2.0, 1.0, 1.0).unwrap();
        let cfg = IterConfig::with_tol(1e-9);
        for regime in [Regime::NoInfo, Regime::FullInfo, Regime::collusion(1.0)] {
            let mut found: Vec<PriceProfile> = Vec::new();
            for start in [0.0, 10.0, 39.0] {
                let init = PriceProfile::uniform(&regime, 2, 2, start);
                let out = best_response_iterate(regime, DemandModel::Oracle(&oracle), &params, &dist, init, &cfg).unwrap();
                assert!(out.converged);
                assert!(out.profile.price(0, 1) > 0.0 && out.profile.price(0, 1) < 40.0);
                found.push(out.profile);
            }
            for p in &found[1..] {
                assert!(p.distance(&found[0]) < 1e-6, "{regime:?}");
            }
        }
    }

    #[test]
    fn expected_utilities_examples() {
        let (params, dist) = fig2();
        let none = solve_no_info_closed(&params, &dist).unwrap();
        let u = expected_utilities(&none.profile, &Regime::NoInfo, &params, &dist).unwrap();
        let total_demand: f64 = (0..2).map(|i| none.expected_demand(i, &dist)).sum();
        assert!(rel(u.cp, 5.0 * total_demand) < 1e-14);
        assert!(rel(none.expected_demand(0, &dist), 2.0 * 56.0 / 3.0) < 1e-12);

        let colluded = solve_collusion_closed(&params, &dist, 0.0).unwrap();
        let free = expected_utilities(&colluded.profile, &Regime::collusion(0.0), &params, &dist).unwrap();
        let paid = expected_utilities(&colluded.profile, &Regime::collusion(5.0), &params, &dist).unwrap();
        let informed_demand = colluded.expected_demand(0, &dist);
        assert!(rel(paid.cp - free.cp, 5.0 * informed_demand) < 1e-12);
        assert!(rel(free.isp[0] - paid.isp[0], 5.0 * informed_demand) < 1e-12);

        let err = expected_utilities(&none.profile, &Regime::FullInfo, &params, &dist).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
    }
}
