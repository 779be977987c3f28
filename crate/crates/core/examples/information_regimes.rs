//! Prices and utilities when no ISP, every ISP, or one paying ISP sees the
//! CP's demand signal.

use isp_signaling::demand::moments;
use isp_signaling::equilibrium::{solve_collusion_closed, solve_full_info_closed, solve_no_info_closed};
use isp_signaling::{MarketParams, SignalDistribution};

fn main() -> isp_signaling::Result<()> {
    let params = MarketParams::duopoly(2.0, 1.0, 5.0)?;
    let dist = SignalDistribution::from_pairs(&[(0.1, 200.0), (0.6, 50.0), (0.3, 20.0)])?;

    let none = solve_no_info_closed(&params, &dist)?;
    let full = solve_full_info_closed(&params, &dist)?;
    let sold = solve_collusion_closed(&params, &dist, 5.0)?;

    println!("{:<16} {:>12} {:>12} {:>12}", "regime", "E[U_ISP1]", "E[U_ISP2]", "E[U_CP]");
    for (name, o) in [("no information", &none), ("full information", &full), ("sold at p_d = 5", &sold)] {
        println!(
            "{:<16} {:>12.3} {:>12.3} {:>12.3}",
            name, o.expected_utility_isp[0], o.expected_utility_isp[1], o.expected_utility_cp
        );
    }

    let (a, b) = (params.alpha(), params.beta());
    let gain = full.expected_utility_isp[0] - none.expected_utility_isp[0];
    println!();
    println!("value of the signal to each ISP: {gain:.3}");
    println!("alpha * Var(D) / (2 alpha - beta)^2: {:.3}", a * moments(&dist).variance / (2.0 * a - b).powi(2));

    println!();
    println!("informed ISP prices by signal at p_d = 5:");
    for (t, o) in dist.outcomes().iter().enumerate() {
        println!("  {:<3} {:>8.3}", o.label, sold.profile.price(0, t));
    }
    println!("uninformed ISP price: {:.3}", sold.profile.price(1, 0));
    Ok(())
}
