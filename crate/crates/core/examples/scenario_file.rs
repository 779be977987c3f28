//! Driving the command pipeline from a scenario file.
//!
//! `cargo run --example scenario_file -- path/to/scenario.toml` runs every
//! command the scenario supports; without an argument it uses a shipped preset.

use isp_signaling::cli::{execute, Command};
use isp_signaling::scenario::{Scenario, PRESETS};

fn main() {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}")),
        None => PRESETS[0].1.to_string(),
    };
    match Scenario::parse_str(&text) {
        Ok(s) => println!("parsed scenario: n = {}, {} signals\n", s.market.n(), s.distribution.len()),
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(2);
        }
    }
    for command in Command::ALL {
        match execute(command, &text, None) {
            Ok(out) => {
                println!("== {} ==", command.name());
                print!("{}", out.summary);
                let rows = out.csv.lines().filter(|l| !l.starts_with('#')).count() - 1;
                println!("({rows} CSV rows)\n");
            }
            Err(e) => println!("== {} == skipped: {e}\n", command.name()),
        }
    }
}
