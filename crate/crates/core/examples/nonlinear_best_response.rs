//! Best-response iteration on a user-supplied demand function with a
//! quadratic own-price term and a price interaction.

use isp_signaling::demand::{check_assumptions, DemandModel, FnDemand};
use isp_signaling::equilibrium::{best_response_iterate, IterConfig};
use isp_signaling::{MarketParams, Outcome, PriceProfile, Regime, SignalDistribution};

fn main() -> isp_signaling::Result<()> {
    let dist = SignalDistribution::new(vec![Outcome::new("peak", 0.4, 300.0), Outcome::new("off-peak", 0.6, 100.0)])?;
    let sizes = [300.0, 100.0];
    let oracle = FnDemand::new(2, 2, (0.0, 120.0), move |t, p: &[f64]| {
        (0..2)
            .map(|i| {
                let (own, other) = (p[i], p[1 - i]);
                sizes[t] - 2.0 * own - 0.02 * own * own + other + 0.005 * own * other
            })
            .collect()
    });
    // alpha and beta only matter to the linear model; p_a sets the CP's revenue
    let params = MarketParams::duopoly(2.0, 1.0, 1.0)?;

    let levels = [10.0, 50.0, 90.0];
    let grid: Vec<Vec<f64>> = levels.iter().flat_map(|&a| levels.iter().map(move |&b| vec![a, b])).collect();
    for check in check_assumptions(&params, DemandModel::Oracle(&oracle), &grid)?.checks {
        println!("{:<18} {}", check.assumption.name(), if check.holds { "holds" } else { "fails" });
    }

    let config = IterConfig::with_tol(1e-9);
    for regime in [Regime::NoInfo, Regime::FullInfo, Regime::collusion(2.0)] {
        let init = PriceProfile::uniform(&regime, 2, dist.len(), 0.0);
        let out = best_response_iterate(regime, DemandModel::Oracle(&oracle), &params, &dist, init, &config)?;
        println!();
        println!("{} ({} iterations)", regime.name(), out.iterations);
        for i in 0..2 {
            let prices: Vec<String> = (0..dist.len()).map(|t| format!("{:.4}", out.profile.price(i, t))).collect();
            println!("  ISP{} prices {:?} utility {:.3}", i + 1, prices, out.expected_utility_isp[i]);
        }
        println!("  CP utility {:.3}", out.expected_utility_cp);
    }
    Ok(())
}
