//! Fixing the side payment before pricing versus splitting pooled revenue
//! after it, across the informed ISP's bargaining power.

use isp_signaling::bargaining::{compare_modes, post_bargain_equilibrium, pre_bargain_side_payment, Party};
use isp_signaling::{linspace, MarketParams, SignalDistribution};

fn main() -> isp_signaling::Result<()> {
    let params = MarketParams::duopoly(2.0, 1.5, 5.0)?;
    let dist = SignalDistribution::from_pairs(&[(0.1, 200.0), (0.6, 50.0), (0.3, 20.0)])?;

    let pre = pre_bargain_side_payment(&params, &dist, 0.5)?;
    let post = post_bargain_equilibrium(&params, &dist, 0.5)?;
    println!("equal power: pre p_d = {:.4}, post p_d = {:.4}", pre.side_payment, post.side_payment);

    let cmp = compare_modes(&params, &dist, &linspace(0.05, 0.95, 19))?;
    println!();
    println!("{:>5} {:>10} {:>10} {:>10} {:>10}", "gamma", "pre ISP1", "post ISP1", "pre CP", "post CP");
    for row in &cmp.rows {
        if let (Ok(a), Ok(b)) = (&row.pre, &row.post) {
            println!("{:>5.2} {:>10.2} {:>10.2} {:>10.2} {:>10.2}", row.gamma, a.u_isp1, b.u_isp1, a.u_cp, b.u_cp);
        }
    }
    println!();
    for c in &cmp.crossovers {
        let who = match c.party {
            Party::Isp => "ISP1",
            Party::Cp => "CP",
        };
        println!("{who} switches at gamma = {:.6}, preferring {}-bargaining below", c.gamma, c.prefers_below.name());
    }
    Ok(())
}
