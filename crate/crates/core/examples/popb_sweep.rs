//! Price of partial bargaining as the cross-price sensitivity varies.

use isp_signaling::welfare::sweep_tau;
use isp_signaling::{linspace, SignalDistribution};

fn main() -> isp_signaling::Result<()> {
    let dist = SignalDistribution::from_pairs(&[(0.1, 200.0), (0.6, 50.0), (0.3, 20.0)])?;
    println!("{:>5} {:>10} {:>10} {:>10}", "tau", "PoPB", "p_d social", "p_d nash");
    for row in sweep_tau(2.0, &linspace(0.05, 0.95, 19), &dist, 5.0) {
        match row.result {
            Ok(r) => println!(
                "{:>5.2} {:>10.5} {:>10.3} {:>10.3}{}",
                row.tau,
                r.popb,
                r.p_d_social,
                r.p_d_nash,
                if row.social_outside_feasible { "  (social optimum infeasible)" } else { "" }
            ),
            Err(e) => println!("{:>5.2} {e}", row.tau),
        }
    }
    Ok(())
}
