//! Equilibrium pricing, side-payment incentives, bargaining and welfare for
//! ISPs competing over access to a content provider that holds private
//! demand information.

pub mod bargaining;
pub mod cli;
pub mod collusion;
pub mod demand;
pub mod equilibrium;
pub mod error;
pub mod optimize;
pub mod scenario;
pub mod welfare;

pub use demand::{MarketParams, Moments, Outcome, SignalDistribution};
pub use equilibrium::{EquilibriumOutcome, IspPrice, PriceProfile, Regime};
pub use error::{Error, Result};

/// `steps` evenly spaced points from `from` to `to` inclusive.
/// A single step yields `[from]`. Interior points are rounded to 15
/// significant digits so decimal grids print as written.
pub fn linspace(from: f64, to: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![from],
        _ => {
            let last = (steps - 1) as f64;
            (0..steps)
                .map(|i| match i {
                    0 => from,
                    i if i + 1 == steps => to,
                    i => snap(from + (to - from) * i as f64 / last),
                })
                .collect()
        }
    }
}

fn snap(x: f64) -> f64 {
    format!("{x:.14e}").parse().unwrap_or(x)
}
