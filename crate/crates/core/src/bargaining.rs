//! Setting the side payment by weighted Nash bargaining between ISP 0 and the CP.
//!
//! Pre-bargaining fixes `p_d` before prices are set: an arbitrator maximizes
//! `E[U_ISP]^γ · (CP share)^(1−γ)` over the collusion equilibrium. In
//! post-bargaining the ISP and CP first price as one unit on their pooled
//! margin `p + p_a` and then split the pooled revenue `γ : 1−γ`.

use crate::demand::{MarketParams, SignalDistribution};
use crate::equilibrium::{solve_collusion_closed, DuopolyTerms, EquilibriumOutcome, Regime};
use crate::error::{Error, Result};
use crate::optimize::{bisect, golden_max, scan_golden_max};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BargainMode {
    PreBargain,
    PostBargain,
}

impl BargainMode {
    pub fn name(&self) -> &'static str {
        match self {
            BargainMode::PreBargain => "pre",
            BargainMode::PostBargain => "post",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BargainingConfig {
    pub gamma: f64,
    pub mode: BargainMode,
}

impl BargainingConfig {
    pub fn new(gamma: f64, mode: BargainMode) -> Result<Self> {
        check_gamma(gamma)?;
        Ok(Self { gamma, mode })
    }

    pub fn solve(&self, params: &MarketParams, dist: &SignalDistribution) -> Result<BargainOutcome> {
        match self.mode {
            BargainMode::PreBargain => pre_bargain_side_payment(params, dist, self.gamma),
            BargainMode::PostBargain => post_bargain_equilibrium(params, dist, self.gamma),
        }
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma < 1.0 {
        Ok(())
    } else {
        Err(Error::arg(format!("bargaining power must lie in (0, 1), got {gamma}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BargainOutcome {
    pub gamma: f64,
    pub side_payment: f64,
    /// Prices, demands and utilities with ISP 0 paying `side_payment`.
    pub equilibrium: EquilibriumOutcome,
    /// `γ·ln E[U_ISP0] + (1−γ)·ln(CP revenue from ISP 0's traffic)`.
    pub regulator_log_utility: f64,
}

impl BargainOutcome {
    pub fn isp_utility(&self) -> f64 {
        self.equilibrium.expected_utility_isp[0]
    }

    pub fn cp_utility(&self) -> f64 {
        self.equilibrium.expected_utility_cp
    }

    /// CP revenue earned on ISP 0's traffic: `E[d₀]·(p_a + p_d)`.
    pub fn cp_share(&self, params: &MarketParams, dist: &SignalDistribution) -> f64 {
        self.equilibrium.expected_demand(0, dist) * (params.p_a() + self.side_payment)
    }
}

/// The arbitrator's log-objective for pre-bargaining, as a function of `p_d`.
///
/// With `b(θ) = base(θ) − k·p_d` the informed ISP's equilibrium margin, the
/// objective is `γ·ln E[b²] + (1−γ)·ln E[b] + (1−γ)·ln(p_a + p_d)`.
#[derive(Debug, Clone)]
pub struct PreBargainObjective<'a> {
    terms: DuopolyTerms,
    dist: &'a SignalDistribution,
    gamma: f64,
}

impl<'a> PreBargainObjective<'a> {
    pub fn new(params: &MarketParams, dist: &'a SignalDistribution, gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        Ok(Self { terms: DuopolyTerms::new(params, dist)?, dist, gamma })
    }

    pub fn terms(&self) -> &DuopolyTerms {
        &self.terms
    }

    /// Open interval of side payments with `p_a + p_d > 0` and every
    /// equilibrium demand positive, shrunk by `1e-9·max(1, p_a)` at each end.
    pub fn bracket(&self) -> Result<(f64, f64)> {
        let t = &self.terms;
        let eps = 1e-9 * t.p_a.max(1.0);
        let lo = (-t.p_a).max(t.min_side_payment()) + eps;
        let hi = t.max_side_payment() - eps;
        if lo < hi {
            Ok((lo, hi))
        } else {
            Err(Error::Infeasible(format!(
                "no side payment keeps the CP margin and all demands positive: bracket ({lo}, {hi}) is empty"
            )))
        }
    }

    fn margins(&self, p_d: f64) -> (f64, f64) {
        let k = self.terms.k;
        let first = self.dist.expect(|t| self.terms.base[t] - k * p_d);
        let second = self.dist.expect(|t| (self.terms.base[t] - k * p_d).powi(2));
        (first, second)
    }

    pub fn value(&self, p_d: f64) -> f64 {
        let (first, second) = self.margins(p_d);
        let g = self.gamma;
        g * second.ln() + (1.0 - g) * first.ln() + (1.0 - g) * (self.terms.p_a + p_d).ln()
    }

    /// Analytic derivative of [`value`](Self::value) in `p_d`.
    pub fn gradient(&self, p_d: f64) -> f64 {
        let (first, second) = self.margins(p_d);
        let (g, k) = (self.gamma, self.terms.k);
        -2.0 * g * k * first / second - (1.0 - g) * k / first + (1.0 - g) / (self.terms.p_a + p_d)
    }

    /// Maximizer over the bracket: scan plus golden section, then a bisection
    /// on the analytic gradient when the maximum is interior.
    pub fn maximize(&self) -> Result<f64> {
        let (lo, hi) = self.bracket()?;
        self.maximize_on(lo, hi)
    }

    /// Same as [`maximize`](Self::maximize) restricted to `[lo, hi]`.
    pub fn maximize_on(&self, lo: f64, hi: f64) -> Result<f64> {
        let coarse = scan_golden_max(|p| self.value(p), lo, hi, 200, 1e-10 * (hi - lo).max(1.0));
        Ok(self.polish(coarse.x, lo, hi))
    }

    /// Golden-section search alone on `[lo, hi]`, without scanning.
    pub fn golden_on(&self, lo: f64, hi: f64) -> f64 {
        let x = golden_max(|p| self.value(p), lo, hi, 1e-10).x;
        self.polish(x, lo, hi)
    }

    fn polish(&self, x: f64, lo: f64, hi: f64) -> f64 {
        let mut w = 1e-6 * x.abs().max(1.0);
        while w < hi - lo {
            let (a, b) = ((x - w).max(lo), (x + w).min(hi));
            let (ga, gb) = (self.gradient(a), self.gradient(b));
            if ga > 0.0 && gb < 0.0 {
                return bisect(|p| self.gradient(p), a, b, 1e-13 * x.abs().max(1.0)).unwrap_or(x);
            }
            if a == lo && b == hi {
                break;
            }
            w *= 4.0;
        }
        x
    }
}

fn regulator_log(gamma: f64, isp: f64, cp_share: f64) -> f64 {
    gamma * isp.ln() + (1.0 - gamma) * cp_share.ln()
}

/// Side payment fixed before pricing, maximizing the arbitrator's weighted
/// Nash product over the collusion equilibrium it induces.
pub fn pre_bargain_side_payment(
    params: &MarketParams,
    dist: &SignalDistribution,
    gamma: f64,
) -> Result<BargainOutcome> {
    let objective = PreBargainObjective::new(params, dist, gamma)?;
    let p_d = objective.maximize()?;
    let equilibrium = solve_collusion_closed(params, dist, p_d)?;
    let isp = equilibrium.expected_utility_isp[0];
    let share = equilibrium.expected_demand(0, dist) * (params.p_a() + p_d);
    Ok(BargainOutcome {
        gamma,
        side_payment: p_d,
        regulator_log_utility: regulator_log(gamma, isp, share),
        equilibrium,
    })
}

/// Side payment splitting ISP 0's pooled revenue `T = E[d₀(p₀+p_a)]` as
/// `γ·T` to the ISP and `(1−γ)·T` to the CP, at fixed prices.
///
/// `p_d = ((1−γ)·E[d₀p₀] − γ·p_a·E[d₀]) / E[d₀]`.
pub fn post_bargain_side_payment(
    p1_profile: &[f64],
    p2: f64,
    params: &MarketParams,
    dist: &SignalDistribution,
    gamma: f64,
) -> Result<f64> {
    check_gamma(gamma)?;
    params.require_duopoly("post-bargaining")?;
    if p1_profile.len() != dist.len() {
        return Err(Error::arg(format!(
            "informed price profile has {} entries for {} signals",
            p1_profile.len(),
            dist.len()
        )));
    }
    let (a, b) = (params.alpha(), params.beta());
    let demand = |t: usize| dist.baseline(t) - a * p1_profile[t] + b * p2;
    let mean_demand = dist.expect(demand);
    if !(mean_demand > 0.0) {
        return Err(Error::Domain(format!(
            "expected demand of the informed ISP is {mean_demand}, not positive"
        )));
    }
    let revenue = dist.expect(|t| demand(t) * p1_profile[t]);
    Ok(((1.0 - gamma) * revenue - gamma * params.p_a() * mean_demand) / mean_demand)
}

/// Equilibrium when ISP 0 and the CP price on their pooled margin and split
/// the proceeds afterwards.
///
/// Prices are the collusion prices at `p_d = −p_a`; utilities are
/// `E[U_ISP0] = γ·α·E[(base + k·p_a)²]`, `E[U_ISP1] = α(E[base] − m·p_a)²`
/// and `E[U_CP] = α(E[base] − m·p_a)·p_a + (1−γ)·T`.
pub fn post_bargain_equilibrium(
    params: &MarketParams,
    dist: &SignalDistribution,
    gamma: f64,
) -> Result<BargainOutcome> {
    check_gamma(gamma)?;
    let t = DuopolyTerms::new(params, dist)?;
    let pooled = solve_collusion_closed(params, dist, -t.p_a)?;
    let p1 = pooled.profile.prices[0].clone();
    let p1: Vec<f64> = (0..dist.len()).map(|s| p1.at(s)).collect();
    let p2 = pooled.profile.price(1, 0);
    let p_d = post_bargain_side_payment(&p1, p2, params, dist, gamma)?;

    let (a, k, m, pa) = (t.alpha, t.k, t.m, t.p_a);
    let total = a * dist.expect(|s| (t.base[s] + k * pa).powi(2));
    let isp0 = gamma * total;
    let rival_margin = t.mean_base - m * pa;
    let isp1 = a * rival_margin * rival_margin;
    let cp = a * rival_margin * pa + (1.0 - gamma) * total;

    let equilibrium = EquilibriumOutcome {
        regime: Regime::collusion(p_d),
        expected_utility_isp: vec![isp0, isp1],
        expected_utility_cp: cp,
        ..pooled
    };
    let share = equilibrium.expected_demand(0, dist) * (pa + p_d);
    Ok(BargainOutcome {
        gamma,
        side_payment: p_d,
        regulator_log_utility: regulator_log(gamma, isp0, share),
        equilibrium,
    })
}

/// What one mechanism yields at one `γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSummary {
    pub u_isp1: f64,
    pub u_cp: f64,
    pub side_payment: f64,
}

impl From<&BargainOutcome> for ModeSummary {
    fn from(o: &BargainOutcome) -> Self {
        Self { u_isp1: o.isp_utility(), u_cp: o.cp_utility(), side_payment: o.side_payment }
    }
}

#[derive(Debug)]
pub struct CompareRow {
    pub gamma: f64,
    pub pre: Result<ModeSummary>,
    pub post: Result<ModeSummary>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Party {
    Isp,
    Cp,
}

/// A bargaining power at which a party switches between mechanisms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossover {
    pub party: Party,
    pub gamma: f64,
    /// Mechanism the party prefers just below `gamma`.
    pub prefers_below: BargainMode,
}

#[derive(Debug)]
pub struct ModeComparison {
    pub rows: Vec<CompareRow>,
    pub crossovers: Vec<Crossover>,
}

impl ModeComparison {
    pub fn crossovers_of(&self, party: Party) -> impl Iterator<Item = &Crossover> {
        self.crossovers.iter().filter(move |c| c.party == party)
    }
}

fn compare_at(params: &MarketParams, dist: &SignalDistribution, gamma: f64) -> (Result<ModeSummary>, Result<ModeSummary>) {
    let pre = pre_bargain_side_payment(params, dist, gamma).map(|o| ModeSummary::from(&o));
    let post = post_bargain_equilibrium(params, dist, gamma).map(|o| ModeSummary::from(&o));
    (pre, post)
}

fn preference_gap(party: Party, pre: &ModeSummary, post: &ModeSummary) -> f64 {
    match party {
        Party::Isp => pre.u_isp1 - post.u_isp1,
        Party::Cp => pre.u_cp - post.u_cp,
    }
}

/// Both mechanisms over a grid of bargaining powers, with every switch in
/// ISP 0's or the CP's preferred mechanism located by bisection.
pub fn compare_modes(params: &MarketParams, dist: &SignalDistribution, gamma_grid: &[f64]) -> Result<ModeComparison> {
    params.require_duopoly("mechanism comparison")?;
    for &g in gamma_grid {
        check_gamma(g)?;
    }
    if gamma_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::arg("bargaining-power grid must be strictly increasing"));
    }
    let rows: Vec<CompareRow> = gamma_grid
        .iter()
        .map(|&gamma| {
            let (pre, post) = compare_at(params, dist, gamma);
            CompareRow { gamma, pre, post }
        })
        .collect();

    let mut crossovers = Vec::new();
    for party in [Party::Isp, Party::Cp] {
        let gap_of = |row: &CompareRow| match (&row.pre, &row.post) {
            (Ok(pre), Ok(post)) => Some(preference_gap(party, pre, post)),
            _ => None,
        };
        for w in rows.windows(2) {
            let (Some(g0), Some(g1)) = (gap_of(&w[0]), gap_of(&w[1])) else {
                continue;
            };
            if g0 == 0.0 || g0.signum() == g1.signum() {
                continue;
            }
            let gap = |gamma: f64| match compare_at(params, dist, gamma) {
                (Ok(pre), Ok(post)) => preference_gap(party, &pre, &post),
                _ => f64::NAN,
            };
            if let Some(gamma) = bisect(gap, w[0].gamma, w[1].gamma, 1e-10) {
                let prefers_below = if g0 > 0.0 { BargainMode::PreBargain } else { BargainMode::PostBargain };
                crossovers.push(Crossover { party, gamma, prefers_below });
            }
        }
    }
    Ok(ModeComparison { rows, crossovers })
}

/// Pooled revenue `T = α·E[(base + k·p_a)²]` shared in post-bargaining.
pub fn pooled_revenue(params: &MarketParams, dist: &SignalDistribution) -> Result<f64> {
    let t = DuopolyTerms::new(params, dist)?;
    Ok(t.alpha * dist.expect(|s| (t.base[s] + t.k * t.p_a).powi(2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::{best_response_iterate, IterConfig, PriceProfile};
    use crate::demand::DemandModel;
    use crate::linspace;

    fn fig3() -> (MarketParams, SignalDistribution) {
        (
            MarketParams::duopoly(2.0, 1.5, 5.0).unwrap(),
            SignalDistribution::from_pairs(&[(0.1, 200.0), (0.6, 50.0), (0.3, 20.0)]).unwrap(),
        )
    }

    #[test]
    fn gamma_must_be_open_unit() {
        let (params, dist) = fig3();
        for g in [0.0, 1.0, -0.1, f64::NAN] {
            assert!(matches!(pre_bargain_side_payment(&params, &dist, g), Err(Error::InvalidArgument(_))));
            assert!(matches!(post_bargain_equilibrium(&params, &dist, g), Err(Error::InvalidArgument(_))));
            assert!(BargainingConfig::new(g, BargainMode::PreBargain).is_err());
        }
    }

    #[test]
    fn pre_bargain_interior_stationary_point() {
        let (params, dist) = fig3();
        let out = pre_bargain_side_payment(&params, &dist, 0.5).unwrap();
        let obj = PreBargainObjective::new(&params, &dist, 0.5).unwrap();
        let (lo, hi) = obj.bracket().unwrap();
        assert!(out.side_payment > lo + 1e-3 && out.side_payment < hi - 1e-3);
        assert!(obj.gradient(out.side_payment).abs() < 1e-8);
        // central difference of the regulator utility agrees
        let h = 1e-5;
        let reg = |p: f64| {
            let e = solve_collusion_closed(&params, &dist, p).unwrap();
            regulator_log(0.5, e.expected_utility_isp[0], e.expected_demand(0, &dist) * (5.0 + p))
        };
        let fd = (reg(out.side_payment + h) - reg(out.side_payment - h)) / (2.0 * h);
        assert!(fd.abs() < 1e-6, "{fd}");
    }

    #[test]
    fn objective_differs_from_regulator_utility_by_ln_alpha() {
        let (params, dist) = fig3();
        let obj = PreBargainObjective::new(&params, &dist, 0.3).unwrap();
        let out = pre_bargain_side_payment(&params, &dist, 0.3).unwrap();
        let diff = out.regulator_log_utility - obj.value(out.side_payment);
        assert!((diff - 2f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn analytic_gradient_matches_finite_difference() {
        let (params, dist) = fig3();
        let obj = PreBargainObjective::new(&params, &dist, 0.7).unwrap();
        for p in [-4.0, 0.0, 3.0, 10.0] {
            let h = 1e-6;
            let fd = (obj.value(p + h) - obj.value(p - h)) / (2.0 * h);
            assert!((fd - obj.gradient(p)).abs() < 1e-6 * fd.abs().max(1.0));
        }
    }

    #[test]
    fn pre_bargain_tends_to_lower_edge_as_gamma_grows() {
        let (params, dist) = fig3();
        let edge = -params.p_a();
        let a = pre_bargain_side_payment(&params, &dist, 0.999).unwrap().side_payment;
        let b = pre_bargain_side_payment(&params, &dist, 0.9999).unwrap().side_payment;
        assert!(a > edge && b > edge);
        assert!(b < a);
        assert!(b - edge < a - edge);
        assert!(b - edge < 0.05);
    }

    #[test]
    fn pre_bargain_unique_from_both_edges() {
        let (params, dist) = fig3();
        for gamma in linspace(0.05, 0.95, 19) {
            let obj = PreBargainObjective::new(&params, &dist, gamma).unwrap();
            let (lo, hi) = obj.bracket().unwrap();
            let x = obj.maximize().unwrap();
            let from_lo = obj.golden_on(lo, (x + 0.5 * (hi - x)).min(hi));
            let from_hi = obj.golden_on((x - 0.5 * (x - lo)).max(lo), hi);
            assert!((from_lo - x).abs() < 1e-8, "gamma {gamma}: {from_lo} vs {x}");
            assert!((from_hi - x).abs() < 1e-8, "gamma {gamma}: {from_hi} vs {x}");
        }
    }

    #[test]
    fn pre_bargain_empty_bracket_is_infeasible() {
        let params = MarketParams::duopoly(2.0, 1.0, 0.0).unwrap();
        // with p_a = 0 and negligible demand the informed ISP cannot pay anything positive
        let dist = SignalDistribution::deterministic(1e-12).unwrap();
        assert!(matches!(pre_bargain_side_payment(&params, &dist, 0.5), Err(Error::Infeasible(_))));
    }

    #[test]
    fn post_side_payment_even_split() {
        let params = MarketParams::duopoly(2.0, 1.0, 0.0).unwrap();
        let dist = SignalDistribution::deterministic(100.0).unwrap();
        let p = post_bargain_side_payment(&[10.0], 10.0, &params, &dist, 0.5).unwrap();
        assert!((p - 5.0).abs() < 1e-12);
    }

    #[test]
    fn post_side_payment_maximizes_weighted_product() {
        let (params, dist) = fig3();
        let (a, b) = (params.alpha(), params.beta());
        let p1 = [60.0, 30.0, 20.0];
        let p2 = 25.0;
        let d = |t: usize| dist.baseline(t) - a * p1[t] + b * p2;
        for gamma in [0.2, 0.5, 0.8] {
            let pd = post_bargain_side_payment(&p1, p2, &params, &dist, gamma).unwrap();
            let product = |x: f64| {
                let isp = dist.expect(|t| d(t) * (p1[t] - x));
                let cp = dist.expect(|t| d(t) * (params.p_a() + x));
                if isp > 0.0 && cp > 0.0 { gamma * isp.ln() + (1.0 - gamma) * cp.ln() } else { f64::NEG_INFINITY }
            };
            let best = linspace(-5.0, 60.0, 65_001)
                .into_iter()
                .max_by(|x, y| product(*x).total_cmp(&product(*y)))
                .unwrap();
            assert!((best - pd).abs() < 2e-3, "{best} vs {pd}");
            let isp = dist.expect(|t| d(t) * (p1[t] - pd));
            let cp = dist.expect(|t| d(t) * (params.p_a() + pd));
            assert!((isp / cp - gamma / (1.0 - gamma)).abs() < 1e-10);
        }
    }

    #[test]
    fn post_side_payment_rejects_nonpositive_demand() {
        let (params, dist) = fig3();
        let r = post_bargain_side_payment(&[500.0, 500.0, 500.0], 0.0, &params, &dist, 0.5);
        assert!(matches!(r, Err(Error::Domain(_))));
        assert!(post_bargain_side_payment(&[1.0], 0.0, &params, &dist, 0.5).is_err());
    }

    #[test]
    fn post_bargain_split_and_rival_independence() {
        let (params, dist) = fig3();
        let total = pooled_revenue(&params, &dist).unwrap();
        let rival = post_bargain_equilibrium(&params, &dist, 0.5).unwrap().equilibrium.expected_utility_isp[1];
        for gamma in linspace(0.1, 0.9, 9) {
            let out = post_bargain_equilibrium(&params, &dist, gamma).unwrap();
            let share = out.cp_share(&params, &dist);
            assert!((out.isp_utility() / share - gamma / (1.0 - gamma)).abs() < 1e-10);
            assert!((out.isp_utility() - gamma * total).abs() < 1e-9 * total);
            assert_eq!(out.equilibrium.expected_utility_isp[1], rival);
        }
        let half = post_bargain_equilibrium(&params, &dist, 0.5).unwrap();
        assert!((half.isp_utility() - half.cp_share(&params, &dist)).abs() < 1e-9 * total);
    }

    #[test]
    fn post_bargain_matches_direct_utilities() {
        // the recorded regime with the recovered side payment reproduces the
        // closed-form utilities when summed from demands
        let (params, dist) = fig3();
        for gamma in [0.1, 0.35, 0.8] {
            let out = post_bargain_equilibrium(&params, &dist, gamma).unwrap();
            let u = crate::equilibrium::expected_utilities(
                &out.equilibrium.profile,
                &out.equilibrium.regime,
                &params,
                &dist,
            )
            .unwrap();
            for (a, b) in u.isp.iter().zip(&out.equilibrium.expected_utility_isp) {
                assert!((a - b).abs() < 1e-9 * b.abs());
            }
            assert!((u.cp - out.cp_utility()).abs() < 1e-9 * out.cp_utility());
        }
    }

    #[test]
    fn post_bargain_matches_pooled_margin_iteration() {
        let (params, dist) = fig3();
        let pooled = Regime::collusion(-params.p_a());
        let init = PriceProfile::uniform(&pooled, 2, dist.len(), 0.0);
        let config = IterConfig::with_tol(1e-13);
        let it = best_response_iterate(pooled, DemandModel::Linear, &params, &dist, init, &config).unwrap();
        for gamma in [0.2, 0.6] {
            let out = post_bargain_equilibrium(&params, &dist, gamma).unwrap();
            for s in 0..dist.len() {
                for i in 0..2 {
                    let (a, b) = (it.profile.price(i, s), out.equilibrium.profile.price(i, s));
                    assert!((a - b).abs() < 1e-9 * b.abs());
                }
            }
            let total = it.expected_utility_isp[0];
            assert!((gamma * total - out.isp_utility()).abs() < 1e-9 * out.isp_utility());
            assert!((it.expected_utility_isp[1] - out.equilibrium.expected_utility_isp[1]).abs() < 1e-9 * total);
            let cp = it.expected_utility_cp + (1.0 - gamma) * total;
            assert!((cp - out.cp_utility()).abs() < 1e-9 * cp);
        }
    }

    #[test]
    fn post_bargain_scales_quadratically() {
        let (params, dist) = fig3();
        let c = 2.5;
        let scaled_params = params.with_p_a(c * params.p_a()).unwrap();
        let scaled_dist = dist.scaled(c).unwrap();
        for gamma in [0.25, 0.75] {
            let one = post_bargain_equilibrium(&params, &dist, gamma).unwrap();
            let two = post_bargain_equilibrium(&scaled_params, &scaled_dist, gamma).unwrap();
            assert!((two.isp_utility() - c * c * one.isp_utility()).abs() < 1e-10 * two.isp_utility());
            assert!((two.cp_utility() - c * c * one.cp_utility()).abs() < 1e-10 * two.cp_utility());
            assert!((two.side_payment - c * one.side_payment).abs() < 1e-10 * two.side_payment.abs().max(1.0));
        }
    }

    #[test]
    fn comparison_has_one_cp_switch_on_fig3() {
        let (params, dist) = fig3();
        let grid = linspace(0.05, 0.95, 19);
        let cmp = compare_modes(&params, &dist, &grid).unwrap();
        assert_eq!(cmp.rows.len(), 19);
        let cp: Vec<_> = cmp.crossovers_of(Party::Cp).collect();
        assert_eq!(cp.len(), 1);
        let a = cp[0];
        // the reported direction agrees with the rows on either side
        for row in &cmp.rows {
            let (pre, post) = (row.pre.as_ref().unwrap(), row.post.as_ref().unwrap());
            let prefers_pre = pre.u_cp > post.u_cp;
            let below = row.gamma < a.gamma;
            assert_eq!(prefers_pre, below == (a.prefers_below == BargainMode::PreBargain));
        }
        // ISP 0 prefers fixing the payment up front when its power is small
        let first = &cmp.rows[0];
        assert!(first.pre.as_ref().unwrap().u_isp1 > first.post.as_ref().unwrap().u_isp1);
    }

    #[test]
    fn comparison_rejects_bad_grid() {
        let (params, dist) = fig3();
        assert!(compare_modes(&params, &dist, &[0.5, 0.4]).is_err());
        assert!(compare_modes(&params, &dist, &[0.0, 0.4]).is_err());
    }
}
