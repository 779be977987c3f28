//! Side payments at which selling the signal pays off for the buyer, the CP,
//! or both.

use isp_signaling::collusion::{incentive_region, sweep_pd};
use isp_signaling::{linspace, MarketParams, SignalDistribution};

fn main() -> isp_signaling::Result<()> {
    let params = MarketParams::duopoly(2.0, 1.0, 5.0)?;
    let dist = SignalDistribution::from_pairs(&[(0.1, 200.0), (0.6, 50.0), (0.3, 20.0)])?;

    let r = incentive_region(&params, &dist)?;
    println!("informed ISP beats no information up to p_d = {:.4}", r.isp_threshold);
    println!("CP beats no information up to p_d = {:.4}", r.cp_threshold);
    println!("informed ISP out-earns its rival up to p_d = {:.4}", r.dominance_threshold);
    if let Some(a) = r.region_a {
        println!("both colluders gain on [{:.4}, {:.4}]", a.lo, a.hi);
    }

    println!();
    println!("{:>6} {:>10} {:>10} {:>10}  A  B", "p_d", "ISP1", "ISP2", "CP");
    for row in sweep_pd(&params, &dist, &linspace(0.0, 40.0, 17))? {
        let flag = |b: bool| if b { '*' } else { '.' };
        match row.utilities {
            Some(u) => println!(
                "{:>6.1} {:>10.2} {:>10.2} {:>10.2}  {}  {}",
                row.p_d,
                u.isp1,
                u.isp2,
                u.cp,
                flag(row.in_region_a),
                flag(row.in_region_b)
            ),
            None => println!("{:>6.1} {:>32}", row.p_d, "infeasible"),
        }
    }
    Ok(())
}
