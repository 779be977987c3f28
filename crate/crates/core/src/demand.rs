//! Signal distribution, market constants and the demand models.
//!
//! The CP's private signal takes finitely many values. Each value carries a
//! probability and the baseline demand `D(θ)` every ISP would see at zero
//! prices. The linear model is
//!
//! ```text
//! d_i(θ, p) = D(θ) − α·p_i + β·Σ_{j≠i} p_j
//! ```
//!
//! Other demand models plug in through [`DemandOracle`]; their structural
//! assumptions are verified numerically by [`check_assumptions`].

use std::collections::HashSet;

use crate::error::{joined, Error, Result, Violation};

const PROBABILITY_SUM_TOL: f64 = 1e-12;

/// One realisation of the CP's signal.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub label: String,
    pub probability: f64,
    /// Demand per unit time through each ISP when all prices are zero.
    pub baseline_demand: f64,
}

impl Outcome {
    pub fn new(label: impl Into<String>, probability: f64, baseline_demand: f64) -> Self {
        Self {
            label: label.into(),
            probability,
            baseline_demand,
        }
    }
}

/// Finite signal space with probabilities and baseline demands.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalDistribution {
    outcomes: Vec<Outcome>,
}

impl SignalDistribution {
    pub fn new(outcomes: Vec<Outcome>) -> Result<Self> {
        let violations = Self::violations(&outcomes, "distribution");
        if !violations.is_empty() {
            return Err(Error::arg(joined(&violations)));
        }
        Ok(Self { outcomes })
    }

    /// Convenience constructor from `(probability, baseline_demand)` pairs,
    /// labelled `s0, s1, ...`.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            pairs
                .iter()
                .enumerate()
                .map(|(i, &(p, d))| Outcome::new(format!("s{i}"), p, d))
                .collect(),
        )
    }

    /// A single outcome with probability one.
    pub fn deterministic(baseline_demand: f64) -> Result<Self> {
        Self::new(vec![Outcome::new("only", 1.0, baseline_demand)])
    }

    /// Every broken invariant of `outcomes`, with field paths rooted at `root`.
    pub fn violations(outcomes: &[Outcome], root: &str) -> Vec<Violation> {
        let mut out = Vec::new();
        if outcomes.is_empty() {
            out.push(Violation::new(root, "at least one outcome is required"));
            return out;
        }
        let mut seen = HashSet::new();
        for (i, o) in outcomes.iter().enumerate() {
            if !seen.insert(o.label.as_str()) {
                out.push(Violation::new(
                    format!("{root}[{i}].label"),
                    format!("duplicate label {:?}", o.label),
                ));
            }
            if !(o.probability.is_finite() && (0.0..=1.0).contains(&o.probability)) {
                out.push(Violation::new(
                    format!("{root}[{i}].probability"),
                    format!("must lie in [0, 1], got {}", o.probability),
                ));
            }
            if !(o.baseline_demand.is_finite() && o.baseline_demand > 0.0) {
                out.push(Violation::new(
                    format!("{root}[{i}].baseline_demand"),
                    format!("must be positive, got {}", o.baseline_demand),
                ));
            }
        }
        let total: f64 = outcomes.iter().map(|o| o.probability).sum();
        if !((total - 1.0).abs() <= PROBABILITY_SUM_TOL) {
            out.push(Violation::new(
                root,
                format!("probabilities sum to {total}, expected 1"),
            ));
        }
        out
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn probability(&self, theta: usize) -> f64 {
        self.outcomes[theta].probability
    }

    pub fn baseline(&self, theta: usize) -> f64 {
        self.outcomes[theta].baseline_demand
    }

    /// `Σ_θ P(θ)·f(θ)`.
    pub fn expect(&self, mut f: impl FnMut(usize) -> f64) -> f64 {
        self.outcomes
            .iter()
            .enumerate()
            .map(|(theta, o)| o.probability * f(theta))
            .sum()
    }

    /// Same signal with every baseline demand multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.outcomes
                .iter()
                .map(|o| Outcome {
                    baseline_demand: o.baseline_demand * factor,
                    ..o.clone()
                })
                .collect(),
        )
    }
}

/// Market constants shared by all ISPs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketParams {
    n: usize,
    alpha: f64,
    beta: f64,
    p_a: f64,
}

impl MarketParams {
    /// Validated constructor; rejects `α ≤ (n−1)β`.
    pub fn new(n: usize, alpha: f64, beta: f64, p_a: f64) -> Result<Self> {
        let violations = Self::violations(n, alpha, beta, p_a, "market");
        if !violations.is_empty() {
            return Err(Error::arg(joined(&violations)));
        }
        Ok(Self { n, alpha, beta, p_a })
    }

    /// Two-ISP market, the setting of every closed form in this crate.
    pub fn duopoly(alpha: f64, beta: f64, p_a: f64) -> Result<Self> {
        Self::new(2, alpha, beta, p_a)
    }

    /// Checks field domains only and skips the dominant-diagonal condition,
    /// so that [`check_assumptions`] can report on markets violating it.
    /// Solvers still refuse such markets.
    pub fn unchecked_diagonal(n: usize, alpha: f64, beta: f64, p_a: f64) -> Result<Self> {
        let violations: Vec<_> = Self::violations(n, alpha, beta, p_a, "market")
            .into_iter()
            .filter(|v| !v.message.contains("dominant diagonal"))
            .collect();
        if !violations.is_empty() {
            return Err(Error::arg(joined(&violations)));
        }
        Ok(Self { n, alpha, beta, p_a })
    }

    pub fn violations(n: usize, alpha: f64, beta: f64, p_a: f64, root: &str) -> Vec<Violation> {
        let mut out = Vec::new();
        if n < 2 {
            out.push(Violation::new(format!("{root}.n"), format!("need at least 2 ISPs, got {n}")));
        }
        if !(alpha.is_finite() && alpha > 0.0) {
            out.push(Violation::new(format!("{root}.alpha"), format!("must be positive, got {alpha}")));
        }
        if !(beta.is_finite() && beta > 0.0) {
            out.push(Violation::new(format!("{root}.beta"), format!("must be positive, got {beta}")));
        }
        if !(p_a.is_finite() && p_a >= 0.0) {
            out.push(Violation::new(format!("{root}.p_a"), format!("must be non-negative, got {p_a}")));
        }
        if n >= 2 && alpha.is_finite() && beta.is_finite() && alpha <= (n - 1) as f64 * beta {
            out.push(Violation::new(
                format!("{root}.alpha"),
                format!(
                    "dominant diagonal requires alpha > (n-1)*beta, got {alpha} <= {}*{beta}",
                    n - 1
                ),
            ));
        }
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn p_a(&self) -> f64 {
        self.p_a
    }

    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        Self::new(self.n, self.alpha, beta, self.p_a)
    }

    pub fn with_p_a(&self, p_a: f64) -> Result<Self> {
        Self::new(self.n, self.alpha, self.beta, p_a)
    }

    pub fn dominant_diagonal(&self) -> bool {
        self.alpha > (self.n - 1) as f64 * self.beta
    }

    pub(crate) fn require_dominant_diagonal(&self) -> Result<()> {
        if self.dominant_diagonal() {
            Ok(())
        } else {
            Err(Error::Precondition(format!(
                "dominant diagonal fails: alpha={} <= (n-1)*beta={}",
                self.alpha,
                (self.n - 1) as f64 * self.beta
            )))
        }
    }

    pub(crate) fn require_duopoly(&self, what: &str) -> Result<()> {
        if self.n == 2 {
            Ok(())
        } else {
            Err(Error::arg(format!("{what} is defined for n = 2, got n = {}", self.n)))
        }
    }
}

/// First two moments of `D(θ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub second_moment: f64,
    pub variance: f64,
}

/// Exact weighted sums over the outcomes.
///
/// Sums are taken around the first baseline so that a constant demand gives
/// a mean equal to that constant and a variance of exactly zero.
pub fn moments(dist: &SignalDistribution) -> Moments {
    let pivot = dist.baseline(0);
    let mean = pivot + dist.expect(|t| dist.baseline(t) - pivot);
    let variance = dist.expect(|t| (dist.baseline(t) - mean).powi(2));
    Moments {
        mean,
        second_moment: variance + mean * mean,
        variance,
    }
}

/// Linear demand through ISP `i` at signal `theta`. May be negative.
pub fn linear_demand(
    i: usize,
    theta: usize,
    prices: &[f64],
    params: &MarketParams,
    dist: &SignalDistribution,
) -> Result<f64> {
    if i >= params.n() {
        return Err(Error::arg(format!("ISP index {i} out of range for n = {}", params.n())));
    }
    if theta >= dist.len() {
        return Err(Error::arg(format!("signal index {theta} out of range ({} outcomes)", dist.len())));
    }
    if prices.len() != params.n() {
        return Err(Error::arg(format!("expected {} prices, got {}", params.n(), prices.len())));
    }
    if let Some(p) = prices.iter().find(|p| !(**p >= 0.0)) {
        return Err(Error::arg(format!("prices must be non-negative, got {p}")));
    }
    Ok(linear_demand_unchecked(i, dist.baseline(theta), prices, params))
}

pub(crate) fn linear_demand_unchecked(i: usize, baseline: f64, prices: &[f64], params: &MarketParams) -> f64 {
    let others: f64 = prices.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, p)| p).sum();
    baseline - params.alpha() * prices[i] + params.beta() * others
}

/// A demand model evaluated pointwise: `(signal, full price vector) → demand per ISP`.
pub trait DemandOracle {
    fn isps(&self) -> usize;
    fn signals(&self) -> usize;
    fn demands(&self, theta: usize, prices: &[f64]) -> Vec<f64>;
    /// Closed interval of admissible prices for `isp`.
    fn price_domain(&self, isp: usize) -> (f64, f64);
}

/// Wraps a closure as a [`DemandOracle`] with one price domain for every ISP.
pub struct FnDemand<F> {
    isps: usize,
    signals: usize,
    domain: (f64, f64),
    f: F,
}

impl<F> FnDemand<F>
where
    F: Fn(usize, &[f64]) -> Vec<f64>,
{
    pub fn new(isps: usize, signals: usize, domain: (f64, f64), f: F) -> Self {
        Self { isps, signals, domain, f }
    }
}

impl<F> DemandOracle for FnDemand<F>
where
    F: Fn(usize, &[f64]) -> Vec<f64>,
{
    fn isps(&self) -> usize {
        self.isps
    }

    fn signals(&self) -> usize {
        self.signals
    }

    fn demands(&self, theta: usize, prices: &[f64]) -> Vec<f64> {
        (self.f)(theta, prices)
    }

    fn price_domain(&self, _isp: usize) -> (f64, f64) {
        self.domain
    }
}

/// The linear model exposed through the generic oracle interface.
#[derive(Debug, Clone)]
pub struct LinearOracle {
    params: MarketParams,
    dist: SignalDistribution,
    p_max: f64,
}

impl LinearOracle {
    pub fn new(params: MarketParams, dist: SignalDistribution) -> Self {
        let p_max = default_price_cap(&params, &dist);
        Self { params, dist, p_max }
    }
}

impl DemandOracle for LinearOracle {
    fn isps(&self) -> usize {
        self.params.n()
    }

    fn signals(&self) -> usize {
        self.dist.len()
    }

    fn demands(&self, theta: usize, prices: &[f64]) -> Vec<f64> {
        (0..self.params.n())
            .map(|i| linear_demand_unchecked(i, self.dist.baseline(theta), prices, &self.params))
            .collect()
    }

    fn price_domain(&self, _isp: usize) -> (f64, f64) {
        (0.0, self.p_max)
    }
}

/// Default upper price bound `10·E[D]/α`.
pub fn default_price_cap(params: &MarketParams, dist: &SignalDistribution) -> f64 {
    10.0 * moments(dist).mean / params.alpha()
}

/// Which demand model a solver runs on.
#[derive(Clone, Copy)]
pub enum DemandModel<'a> {
    /// The linear model of [`linear_demand`]; best responses in closed form.
    Linear,
    /// Any oracle; best responses by bounded 1-D maximisation.
    Oracle(&'a dyn DemandOracle),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Assumption {
    /// Own-price derivative negative, cross-price derivatives positive.
    Monotonicity,
    /// Non-negative cross-partials `∂²d_i/∂p_i∂p_j`.
    Supermodularity,
    DominantDiagonal,
}

impl Assumption {
    pub fn name(&self) -> &'static str {
        match self {
            Assumption::Monotonicity => "monotonicity",
            Assumption::Supermodularity => "supermodularity",
            Assumption::DominantDiagonal => "dominant_diagonal",
        }
    }
}

/// The grid point where an assumption fails worst.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub theta: usize,
    pub isp: usize,
    pub prices: Vec<f64>,
    /// Size of the violation, positive.
    pub excess: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssumptionCheck {
    pub assumption: Assumption,
    pub holds: bool,
    pub detail: String,
    pub worst: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssumptionReport {
    pub checks: Vec<AssumptionCheck>,
}

impl AssumptionReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn get(&self, assumption: Assumption) -> &AssumptionCheck {
        self.checks
            .iter()
            .find(|c| c.assumption == assumption)
            .expect("report covers every assumption")
    }

    pub(crate) fn require(&self) -> Result<()> {
        let failed: Vec<_> = self
            .checks
            .iter()
            .filter(|c| !c.holds)
            .map(|c| format!("{} ({})", c.assumption.name(), c.detail))
            .collect();
        if failed.is_empty() {
            Ok(())
        } else {
            Err(Error::Precondition(failed.join("; ")))
        }
    }
}

/// Verifies monotonicity, supermodularity and the dominant diagonal property.
///
/// The linear model is decided analytically and ignores `grid`. Oracles are
/// probed by central finite differences at every grid point and every signal.
pub fn check_assumptions(
    params: &MarketParams,
    model: DemandModel<'_>,
    grid: &[Vec<f64>],
) -> Result<AssumptionReport> {
    match model {
        DemandModel::Linear => Ok(linear_report(params)),
        DemandModel::Oracle(oracle) => oracle_report(oracle, grid),
    }
}

fn linear_report(params: &MarketParams) -> AssumptionReport {
    let (a, b, n) = (params.alpha(), params.beta(), params.n());
    let bound = (n - 1) as f64 * b;
    let dd = a > bound;
    AssumptionReport {
        checks: vec![
            AssumptionCheck {
                assumption: Assumption::Monotonicity,
                holds: true,
                detail: format!("own-price slope -{a} < 0, cross-price slope {b} > 0"),
                worst: None,
            },
            AssumptionCheck {
                assumption: Assumption::Supermodularity,
                holds: true,
                detail: "cross-partials vanish identically".into(),
                worst: None,
            },
            AssumptionCheck {
                assumption: Assumption::DominantDiagonal,
                holds: dd,
                detail: format!("alpha = {a} {} (n-1)*beta = {bound}", if dd { ">" } else { "<=" }),
                worst: None,
            },
        ],
    }
}

fn first_step(p: f64) -> f64 {
    1e-6 * p.abs().max(1.0)
}

// Second differences at the first-derivative step drown in rounding.
fn second_step(p: f64) -> f64 {
    1e-4 * p.abs().max(1.0)
}

struct Probe<'a> {
    oracle: &'a dyn DemandOracle,
}

impl Probe<'_> {
    fn eval(&self, theta: usize, prices: &[f64], i: usize) -> f64 {
        self.oracle.demands(theta, prices)[i]
    }

    fn shifted(prices: &[f64], moves: &[(usize, f64)]) -> Vec<f64> {
        let mut p = prices.to_vec();
        for &(j, dx) in moves {
            p[j] += dx;
        }
        p
    }

    /// Central difference of `d_i` along `p_j`.
    fn slope(&self, theta: usize, prices: &[f64], i: usize, j: usize) -> f64 {
        let h = first_step(prices[j]);
        let up = self.eval(theta, &Self::shifted(prices, &[(j, h)]), i);
        let down = self.eval(theta, &Self::shifted(prices, &[(j, -h)]), i);
        (up - down) / (2.0 * h)
    }

    /// Central second difference of `d_i` along `p_i` and `p_j`.
    fn curvature(&self, theta: usize, prices: &[f64], i: usize, j: usize) -> f64 {
        let hi = second_step(prices[i]);
        if i == j {
            let up = self.eval(theta, &Self::shifted(prices, &[(i, hi)]), i);
            let mid = self.eval(theta, prices, i);
            let down = self.eval(theta, &Self::shifted(prices, &[(i, -hi)]), i);
            return (up - 2.0 * mid + down) / (hi * hi);
        }
        let hj = second_step(prices[j]);
        let pp = self.eval(theta, &Self::shifted(prices, &[(i, hi), (j, hj)]), i);
        let pm = self.eval(theta, &Self::shifted(prices, &[(i, hi), (j, -hj)]), i);
        let mp = self.eval(theta, &Self::shifted(prices, &[(i, -hi), (j, hj)]), i);
        let mm = self.eval(theta, &Self::shifted(prices, &[(i, -hi), (j, -hj)]), i);
        (pp - pm - mp + mm) / (4.0 * hi * hj)
    }
}

#[derive(Default)]
struct Worst(Option<Witness>);

impl Worst {
    fn offer(&mut self, theta: usize, isp: usize, prices: &[f64], excess: f64) {
        if excess > 0.0 && self.0.as_ref().is_none_or(|w| excess > w.excess) {
            self.0 = Some(Witness {
                theta,
                isp,
                prices: prices.to_vec(),
                excess,
            });
        }
    }

    fn into_check(self, assumption: Assumption, points: usize) -> AssumptionCheck {
        let detail = match &self.0 {
            None => format!("no violation at {points} grid points"),
            Some(w) => format!(
                "worst violation {:e} at signal {}, ISP {}, prices {:?}",
                w.excess, w.theta, w.isp, w.prices
            ),
        };
        AssumptionCheck {
            assumption,
            holds: self.0.is_none(),
            detail,
            worst: self.0,
        }
    }
}

fn oracle_report(oracle: &dyn DemandOracle, grid: &[Vec<f64>]) -> Result<AssumptionReport> {
    if grid.is_empty() {
        return Err(Error::arg("assumption check on a generic oracle needs a non-empty price grid"));
    }
    let n = oracle.isps();
    for point in grid {
        if point.len() != n {
            return Err(Error::arg(format!("grid point {point:?} has {} prices, expected {n}", point.len())));
        }
        for (i, &p) in point.iter().enumerate() {
            let (lo, hi) = oracle.price_domain(i);
            if !(lo..=hi).contains(&p) {
                return Err(Error::arg(format!("grid price {p} for ISP {i} outside domain [{lo}, {hi}]")));
            }
        }
    }

    let probe = Probe { oracle };
    let signals = oracle.signals();
    let (mut mono, mut sm, mut dd) = (Worst::default(), Worst::default(), Worst::default());

    for point in grid {
        // per signal: demand level, slopes[i][j], curvatures[i][j]
        let mut level = vec![vec![0.0; n]; signals];
        let mut slopes = vec![vec![vec![0.0; n]; n]; signals];
        let mut curv = vec![vec![vec![0.0; n]; n]; signals];
        for theta in 0..signals {
            let d = oracle.demands(theta, point);
            for i in 0..n {
                level[theta][i] = d[i];
                for j in 0..n {
                    slopes[theta][i][j] = probe.slope(theta, point, i, j);
                    curv[theta][i][j] = probe.curvature(theta, point, i, j);
                }
            }
        }

        for theta in 0..signals {
            for i in 0..n {
                let noise1 = 1e-8 * (1.0 + level[theta][i].abs());
                let noise2 = 1e-5 * (1.0 + level[theta][i].abs());
                mono.offer(theta, i, point, slopes[theta][i][i] + noise1);
                for j in (0..n).filter(|&j| j != i) {
                    mono.offer(theta, i, point, noise1 - slopes[theta][i][j]);
                    sm.offer(theta, i, point, -curv[theta][i][j] - noise2);
                }
                // Σ_j d_i(θ)·∂²d_i(γ)/∂p_i∂p_j − ∂d_i(θ)/∂p_i·∂d_i(γ)/∂p_j ≤ 0 for every γ
                for gamma in 0..signals {
                    let value: f64 = (0..n)
                        .map(|j| {
                            level[theta][i] * curv[gamma][i][j]
                                - slopes[theta][i][i] * slopes[gamma][i][j]
                        })
                        .sum();
                    let noise = 1e-5 * (1.0 + level[theta][i].abs()) * (1.0 + level[gamma][i].abs());
                    dd.offer(theta, i, point, value - noise);
                }
            }
        }
    }

    Ok(AssumptionReport {
        checks: vec![
            mono.into_check(Assumption::Monotonicity, grid.len()),
            sm.into_check(Assumption::Supermodularity, grid.len()),
            dd.into_check(Assumption::DominantDiagonal, grid.len()),
        ],
    })
}


#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    fn market() -> impl Strategy<Value = MarketParams> {
        (2usize..5, 0.5f64..5.0, 0.01f64..0.99, 0.0f64..10.0).prop_map(|(n, a, frac, pa)| {
            MarketParams::new(n, a, frac * a / (n - 1) as f64, pa).unwrap()
        })
    }

    proptest! {
        #[test]
        fn own_price_shift_is_affine(
            params in market(),
            base in 1.0f64..500.0,
            prices in proptest::collection::vec(0.0f64..50.0, 4),
            delta in 0.0f64..10.0,
        ) {
            let dist = SignalDistribution::deterministic(base).unwrap();
            let p: Vec<f64> = prices[..params.n()].to_vec();
            let mut q = p.clone();
            q[0] += delta;
            let d0 = linear_demand(0, 0, &p, &params, &dist).unwrap();
            let d1 = linear_demand(0, 0, &q, &params, &dist).unwrap();
            let scale = 1.0 + d0.abs() + params.alpha() * delta;
            prop_assert!((d1 - d0 + params.alpha() * delta).abs() <= 1e-12 * scale);
        }

        #[test]
        fn total_demand_is_permutation_invariant(
            params in market(),
            prices in proptest::collection::vec(0.0f64..50.0, 4),
            rot in 0usize..4,
        ) {
            let dist = SignalDistribution::deterministic(100.0).unwrap();
            let n = params.n();
            let p: Vec<f64> = prices[..n].to_vec();
            let mut q = p.clone();
            q.rotate_left(rot % n);
            q.swap(0, n - 1);
            let total = |v: &[f64]| -> f64 {
                (0..n).map(|i| linear_demand(i, 0, v, &params, &dist).unwrap()).sum()
            };
            let (a, b) = (total(&p), total(&q));
            prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()));
        }

        #[test]
        fn variance_is_consistent_and_nonnegative(
            raw in proptest::collection::vec((0.01f64..1.0, 1.0f64..1000.0), 1..6)
        ) {
            let total: f64 = raw.iter().map(|r| r.0).sum();
            let mut pairs: Vec<(f64, f64)> = raw.iter().map(|&(w, d)| (w / total, d)).collect();
            let drift: f64 = 1.0 - pairs.iter().map(|p| p.0).sum::<f64>();
            pairs[0].0 += drift;
            let dist = SignalDistribution::from_pairs(&pairs).unwrap();
            let m = moments(&dist);
            prop_assert!(m.variance >= 0.0);
            prop_assert!((m.variance - (m.second_moment - m.mean * m.mean)).abs() <= 1e-12 * m.second_moment);
            let all_equal = pairs.iter().all(|p| p.1 == pairs[0].1);
            prop_assert_eq!(m.variance == 0.0, all_equal);
        }

        #[test]
        fn linear_check_passes_iff_diagonal_dominates(
            n in 2usize..6, a in 0.1f64..5.0, b in 0.01f64..5.0,
        ) {
            let params = MarketParams::unchecked_diagonal(n, a, b, 0.0).unwrap();
            let report = check_assumptions(&params, DemandModel::Linear, &[]).unwrap();
            prop_assert_eq!(report.all_hold(), a > (n - 1) as f64 * b);
        }
    }
}
