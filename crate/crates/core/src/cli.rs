//! Scenario-driven commands producing CSV tables.
//!
//! Every table starts with `#`-prefixed metadata lines: the SHA-256 of the
//! scenario file, the command, and any notes. Numbers use Rust's shortest
//! round-trip formatting, so identical inputs give byte-identical output.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::bargaining::{compare_modes, BargainMode, Party};
use crate::collusion::{incentive_region, sweep_pd};
use crate::demand::{check_assumptions, DemandModel};
use crate::equilibrium::{
    best_response_iterate, solve_collusion_closed, solve_full_info_closed, solve_no_info_closed, EquilibriumOutcome,
    IterConfig, PriceProfile, Regime,
};
use crate::error::{Error, Result, Violation};
use crate::scenario::{Scenario, SweepVariable};
use crate::welfare::{popb, sweep_tau, TauRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Solve,
    SweepPd,
    SweepGamma,
    Popb,
    Thresholds,
    Check,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::Solve,
        Command::SweepPd,
        Command::SweepGamma,
        Command::Popb,
        Command::Thresholds,
        Command::Check,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::SweepPd => "sweep-pd",
            Command::SweepGamma => "sweep-gamma",
            Command::Popb => "popb",
            Command::Thresholds => "thresholds",
            Command::Check => "check",
        }
    }

    pub fn parse(s: &str) -> Option<Command> {
        Command::ALL.into_iter().find(|c| c.name() == s)
    }
}

/// Default tolerance of the best-response iteration run by `solve`.
pub const DEFAULT_TOL: f64 = 1e-10;

pub const TAU_DISTRIBUTION_NOTE: &str = "assumption: the tau sweep uses the scenario's signal distribution; \
     the shipped sweep reuses the three-level H/M/L distribution of the side-payment scenario";

/// A finished command: the CSV table and a human-readable summary.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub csv: String,
    pub summary: String,
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub command: Command,
    pub scenario: PathBuf,
    pub out: Option<PathBuf>,
    pub tol: Option<f64>,
}

/// Process exit status for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidArgument(_) | Error::Precondition(_) | Error::Parse(_) | Error::Validation(_) => 2,
        Error::NonConvergence { .. } => 3,
        Error::Infeasible(_) | Error::Domain(_) => 4,
        Error::Io { .. } => 5,
    }
}

/// Reads the scenario, runs the command, writes the table to `out` (or
/// standard output) and returns the exit status.
pub fn run(opts: &RunOptions) -> i32 {
    match run_inner(opts) {
        Ok(summary) => {
            if opts.out.is_some() {
                print!("{summary}");
            } else {
                eprint!("{summary}");
            }
            0
        }
        Err(e) => {
            match &e {
                Error::Validation(v) => {
                    eprintln!("error: invalid scenario {}", opts.scenario.display());
                    for v in v {
                        eprintln!("  {v}");
                    }
                }
                e => eprintln!("error: {e}"),
            }
            exit_code(&e)
        }
    }
}

fn run_inner(opts: &RunOptions) -> Result<String> {
    let text = read(&opts.scenario)?;
    let output = execute(opts.command, &text, opts.tol)?;
    match &opts.out {
        Some(path) => std::fs::write(path, &output.csv).map_err(|e| io_error(path, e))?,
        None => print!("{}", output.csv),
    }
    Ok(output.summary)
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| io_error(path, e))
}

fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Io { path: path.display().to_string(), message: e.to_string() }
}

pub fn scenario_hash(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Runs `command` on scenario text without touching the file system.
pub fn execute(command: Command, scenario_text: &str, tol: Option<f64>) -> Result<Output> {
    let tol = tol.unwrap_or(DEFAULT_TOL);
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::arg(format!("--tol must be positive and finite, got {tol}")));
    }
    let scenario = Scenario::parse_str(scenario_text)?;
    let mut table = Table::new(scenario_hash(scenario_text), command);
    let summary = match command {
        Command::Solve => solve(&scenario, tol, &mut table)?,
        Command::SweepPd => sweep_side_payment(&scenario, &mut table)?,
        Command::SweepGamma => sweep_gamma(&scenario, &mut table)?,
        Command::Popb => price_of_partial_bargaining(&scenario, &mut table)?,
        Command::Thresholds => thresholds(&scenario, &mut table)?,
        Command::Check => check(&scenario, &mut table)?,
    };
    Ok(Output { csv: table.finish(), summary })
}

struct Table {
    hash: String,
    command: Command,
    notes: Vec<String>,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new(hash: String, command: Command) -> Self {
        Self { hash, command, notes: Vec::new(), header: Vec::new(), rows: Vec::new() }
    }

    fn header<S: Into<String>>(&mut self, cols: impl IntoIterator<Item = S>) {
        self.header = cols.into_iter().map(Into::into).collect();
    }

    fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    fn row(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn finish(self) -> String {
        let mut out = String::new();
        writeln!(out, "# scenario_sha256: {}", self.hash).unwrap();
        writeln!(out, "# command: {}", self.command.name()).unwrap();
        for n in &self.notes {
            writeln!(out, "# note: {n}").unwrap();
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        out.push_str(&String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields"));
        out
    }
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn requires_sweep(scenario: &Scenario, variable: SweepVariable, command: Command) -> Result<Vec<f64>> {
    match scenario.sweep {
        Some(s) if s.variable == variable => Ok(s.grid()),
        _ => Err(Error::Validation(vec![Violation::new(
            "sweep.variable",
            format!("`{}` needs a [sweep] block with variable = \"{}\"", command.name(), variable.name()),
        )])),
    }
}

fn closed_form(scenario: &Scenario, regime: &Regime) -> Option<Result<EquilibriumOutcome>> {
    let (params, dist) = (&scenario.market, &scenario.distribution);
    match *regime {
        Regime::NoInfo => Some(solve_no_info_closed(params, dist)),
        Regime::FullInfo => Some(solve_full_info_closed(params, dist)),
        Regime::Collusion { informed_isp: 0, side_payment } if params.n() == 2 => {
            Some(solve_collusion_closed(params, dist, side_payment))
        }
        Regime::Collusion { .. } => None,
    }
}

fn solve(scenario: &Scenario, tol: f64, table: &mut Table) -> Result<String> {
    let (params, dist) = (&scenario.market, &scenario.distribution);
    let mut summary = String::new();
    // bargaining fixes the side payment; the iteration checks the prices it implies
    let (outcome, pricing_regime) = match scenario.bargaining {
        Some(config) => {
            let b = config.solve(params, dist)?;
            table.note(format!(
                "side payment from {}-bargaining with gamma = {}",
                config.mode.name(),
                config.gamma
            ));
            writeln!(summary, "{}-bargained side payment: {}", config.mode.name(), b.side_payment).unwrap();
            let pricing = match config.mode {
                BargainMode::PreBargain => Regime::collusion(b.side_payment),
                BargainMode::PostBargain => Regime::collusion(-params.p_a()),
            };
            (Some(b.equilibrium), pricing)
        }
        None => (closed_form(scenario, &scenario.regime).transpose()?, scenario.regime),
    };

    let init = PriceProfile::uniform(&pricing_regime, params.n(), dist.len(), 0.0);
    let config = IterConfig::with_tol(tol);
    let iterated = best_response_iterate(pricing_regime, DemandModel::Linear, params, dist, init, &config)?;
    writeln!(summary, "best-response iteration converged in {} steps (tol {tol:e})", iterated.iterations).unwrap();
    let outcome = match outcome {
        Some(o) => {
            let gap = o.profile.distance(&iterated.profile);
            writeln!(summary, "closed-form prices differ from the iteration by {gap:e}").unwrap();
            o
        }
        None => {
            table.note("no closed form for this regime; prices come from best-response iteration");
            iterated
        }
    };

    let labels: Vec<&str> = dist.outcomes().iter().map(|o| o.label.as_str()).collect();
    let n = params.n();
    let mut header = vec!["regime".to_string(), "side_payment".to_string()];
    for i in 1..=n {
        for l in &labels {
            header.push(format!("price_isp{i}_{l}"));
        }
    }
    header.extend((1..=n).map(|i| format!("u_isp{i}")));
    header.push("u_cp".into());
    table.header(header);

    let side_payment = match outcome.regime {
        Regime::Collusion { side_payment, .. } => Some(side_payment),
        _ => None,
    };
    let mut row = vec![outcome.regime.name().to_string(), opt(side_payment)];
    for i in 0..n {
        row.extend((0..labels.len()).map(|t| num(outcome.profile.price(i, t))));
    }
    row.extend(outcome.expected_utility_isp.iter().map(|&u| num(u)));
    row.push(num(outcome.expected_utility_cp));
    table.row(row);

    writeln!(summary, "regime: {}", outcome.regime.name()).unwrap();
    for (i, u) in outcome.expected_utility_isp.iter().enumerate() {
        writeln!(summary, "E[U_ISP{}] = {u}", i + 1).unwrap();
    }
    writeln!(summary, "E[U_CP] = {}", outcome.expected_utility_cp).unwrap();
    Ok(summary)
}

fn sweep_side_payment(scenario: &Scenario, table: &mut Table) -> Result<String> {
    let grid = requires_sweep(scenario, SweepVariable::SidePayment, Command::SweepPd)?;
    let rows = sweep_pd(&scenario.market, &scenario.distribution, &grid)?;
    table.header(["p_d", "u_isp1", "u_isp2", "u_cp", "in_region_a", "in_region_b"]);
    table.note("ISP 1 is informed and pays p_d per unit of its demand; empty utilities mark infeasible side payments");
    let mut infeasible = 0;
    for r in &rows {
        let u = r.utilities;
        infeasible += usize::from(u.is_none());
        table.row(vec![
            num(r.p_d),
            opt(u.map(|u| u.isp1)),
            opt(u.map(|u| u.isp2)),
            opt(u.map(|u| u.cp)),
            r.in_region_a.to_string(),
            r.in_region_b.to_string(),
        ]);
    }
    Ok(format!("{} side payments swept, {infeasible} infeasible\n", rows.len()))
}

fn sweep_gamma(scenario: &Scenario, table: &mut Table) -> Result<String> {
    let grid = requires_sweep(scenario, SweepVariable::Gamma, Command::SweepGamma)?;
    let cmp = compare_modes(&scenario.market, &scenario.distribution, &grid)?;
    table.header(["gamma", "pre_u_isp1", "pre_u_cp", "pre_pd", "post_u_isp1", "post_u_cp", "post_pd"]);
    let mut summary = String::new();
    for c in &cmp.crossovers {
        let who = match c.party {
            Party::Isp => "isp1",
            Party::Cp => "cp",
        };
        let line = format!("{who} prefers {}-bargaining below gamma = {}", c.prefers_below.name(), c.gamma);
        writeln!(summary, "{line}").unwrap();
        table.note(line);
    }
    for r in &cmp.rows {
        let pre = r.pre.as_ref().ok();
        let post = r.post.as_ref().ok();
        for (mode, res) in [("pre", &r.pre), ("post", &r.post)] {
            if let Err(e) = res {
                table.note(format!("gamma = {}: {mode}-bargaining failed: {e}", r.gamma));
            }
        }
        table.row(vec![
            num(r.gamma),
            opt(pre.map(|s| s.u_isp1)),
            opt(pre.map(|s| s.u_cp)),
            opt(pre.map(|s| s.side_payment)),
            opt(post.map(|s| s.u_isp1)),
            opt(post.map(|s| s.u_cp)),
            opt(post.map(|s| s.side_payment)),
        ]);
    }
    if cmp.crossovers.is_empty() {
        summary.push_str("no preference switch on the grid\n");
    }
    Ok(summary)
}

fn price_of_partial_bargaining(scenario: &Scenario, table: &mut Table) -> Result<String> {
    let (params, dist) = (&scenario.market, &scenario.distribution);
    let rows: Vec<TauRow> = match scenario.sweep {
        Some(s) if s.variable == SweepVariable::Tau => {
            table.note(TAU_DISTRIBUTION_NOTE);
            sweep_tau(params.alpha(), &s.grid(), dist, params.p_a())
        }
        Some(_) => {
            return Err(Error::Validation(vec![Violation::new(
                "sweep.variable",
                "`popb` accepts only a tau sweep, or no sweep for a single row",
            )]))
        }
        None => {
            let r = popb(params, dist)?;
            vec![TauRow {
                tau: params.beta() / params.alpha(),
                beta: params.beta(),
                result: Ok(r),
                social_outside_feasible: false,
            }]
        }
    };
    table.header(["tau", "beta", "popb", "pd_social", "pd_nash"]);
    let mut outside = Vec::new();
    let mut best: Option<(f64, f64)> = None;
    for r in &rows {
        match &r.result {
            Ok(p) => {
                if best.is_none_or(|(_, v)| p.popb < v) {
                    best = Some((r.tau, p.popb));
                }
                table.row(vec![num(r.tau), num(r.beta), num(p.popb), num(p.p_d_social), num(p.p_d_nash)]);
            }
            Err(e) => {
                table.note(format!("tau = {}: {e}", r.tau));
                table.row(vec![num(r.tau), num(r.beta), String::new(), String::new(), String::new()]);
            }
        }
        if r.social_outside_feasible {
            outside.push(num(r.tau));
        }
    }
    if !outside.is_empty() {
        table.note(format!(
            "social optimum lies outside the side payments keeping all demands positive at tau = {}",
            outside.join(" ")
        ));
    }
    Ok(match best {
        Some((tau, v)) => format!("{} rows; smallest PoPB {v} at tau = {tau}\n", rows.len()),
        None => format!("{} rows; none solved\n", rows.len()),
    })
}

fn thresholds(scenario: &Scenario, table: &mut Table) -> Result<String> {
    let r = incentive_region(&scenario.market, &scenario.distribution)?;
    table.header([
        "isp_threshold",
        "cp_threshold",
        "dominance_threshold",
        "region_a_lo",
        "region_a_hi",
        "region_b_lo",
        "region_b_hi",
    ]);
    table.row(vec![
        num(r.isp_threshold),
        num(r.cp_threshold),
        num(r.dominance_threshold),
        opt(r.region_a.map(|i| i.lo)),
        opt(r.region_a.map(|i| i.hi)),
        opt(r.region_b.map(|i| i.lo)),
        opt(r.region_b.map(|i| i.hi)),
    ]);
    let mut s = String::new();
    writeln!(s, "ISP incentive threshold: {}", r.isp_threshold).unwrap();
    writeln!(s, "CP incentive threshold: {}", r.cp_threshold).unwrap();
    writeln!(s, "dominance threshold: {}", r.dominance_threshold).unwrap();
    let show = |i: Option<crate::collusion::Interval>| match i {
        Some(i) => format!("[{}, {}]", i.lo, i.hi),
        None => "empty".into(),
    };
    writeln!(s, "region A: {}", show(r.region_a)).unwrap();
    writeln!(s, "region B: {}", show(r.region_b)).unwrap();
    Ok(s)
}

fn check(scenario: &Scenario, table: &mut Table) -> Result<String> {
    let report = check_assumptions(&scenario.market, DemandModel::Linear, &[])?;
    table.header(["assumption", "holds", "detail"]);
    let mut s = String::new();
    for c in &report.checks {
        table.row(vec![c.assumption.name().to_string(), c.holds.to_string(), c.detail.clone()]);
        writeln!(s, "{}: {} ({})", c.assumption.name(), if c.holds { "holds" } else { "FAILS" }, c.detail).unwrap();
    }
    Ok(s)
}
