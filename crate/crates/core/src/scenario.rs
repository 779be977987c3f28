//! Scenario files: TOML documents describing a market, a signal distribution
//! and optionally a regime, a bargaining setup and a sweep.
//!
//! ```toml
//! [market]
//! n = 2
//! alpha = 2.0
//! beta = 1.0
//! p_a = 5.0
//!
//! [[distribution]]
//! label = "H"
//! probability = 0.1
//! baseline_demand = 200.0
//!
//! [regime]
//! kind = "collusion"   # or "no_info", "full_info"
//! informed_isp = 0
//! side_payment = 5.0
//!
//! [bargaining]
//! gamma = 0.5
//! mode = "pre"         # or "post"
//!
//! [sweep]
//! variable = "p_d"     # or "gamma", "tau"
//! from = 0.0
//! to = 20.0
//! steps = 41
//! ```
//!
//! Parsing reports every broken field at once, each with its line.

use std::ops::Range;
use std::path::Path;

use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::bargaining::{BargainMode, BargainingConfig};
use crate::demand::{MarketParams, Outcome, SignalDistribution};
use crate::equilibrium::Regime;
use crate::error::{Error, Result, Violation};
use crate::linspace;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    SidePayment,
    Gamma,
    Tau,
}

impl SweepVariable {
    pub fn name(&self) -> &'static str {
        match self {
            SweepVariable::SidePayment => "p_d",
            SweepVariable::Gamma => "gamma",
            SweepVariable::Tau => "tau",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "p_d" => Some(SweepVariable::SidePayment),
            "gamma" => Some(SweepVariable::Gamma),
            "tau" => Some(SweepVariable::Tau),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sweep {
    pub variable: SweepVariable,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

impl Sweep {
    pub fn grid(&self) -> Vec<f64> {
        linspace(self.from, self.to, self.steps)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub market: MarketParams,
    pub distribution: SignalDistribution,
    pub regime: Regime,
    pub bargaining: Option<BargainingConfig>,
    pub sweep: Option<Sweep>,
}

/// Scenario files shipped with the crate, by name.
pub const PRESETS: &[(&str, &str)] = &[
    ("side_payment_regions", include_str!("../scenarios/side_payment_regions.toml")),
    ("bargaining_modes", include_str!("../scenarios/bargaining_modes.toml")),
    ("popb_tau_sweep", include_str!("../scenarios/popb_tau_sweep.toml")),
];

impl Scenario {
    pub fn preset(name: &str) -> Option<Scenario> {
        PRESETS
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, text)| Scenario::parse_str(text).expect("shipped scenario parses"))
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Scenario> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Scenario::parse_str(&text)
    }

    pub fn parse_str(text: &str) -> Result<Scenario> {
        let raw: RawScenario = toml::from_str(text).map_err(|e| {
            let at = e.span().map(|s| {
                let (line, col) = line_col(text, s.start);
                format!("line {line}, column {col}: ")
            });
            Error::Parse(format!("{}{}", at.unwrap_or_default(), e.message().trim()))
        })?;
        raw.validate(text)
    }

    pub fn to_toml(&self) -> String {
        let out = OutScenario {
            market: OutMarket {
                n: self.market.n(),
                alpha: self.market.alpha(),
                beta: self.market.beta(),
                p_a: self.market.p_a(),
            },
            distribution: self
                .distribution
                .outcomes()
                .iter()
                .map(|o| OutOutcome {
                    label: o.label.clone(),
                    probability: o.probability,
                    baseline_demand: o.baseline_demand,
                })
                .collect(),
            regime: match self.regime {
                Regime::NoInfo => OutRegime { kind: "no_info", informed_isp: None, side_payment: None },
                Regime::FullInfo => OutRegime { kind: "full_info", informed_isp: None, side_payment: None },
                Regime::Collusion { informed_isp, side_payment } => OutRegime {
                    kind: "collusion",
                    informed_isp: Some(informed_isp),
                    side_payment: Some(side_payment),
                },
            },
            bargaining: self.bargaining.map(|b| OutBargaining { gamma: b.gamma, mode: b.mode.name() }),
            sweep: self.sweep.map(|s| OutSweep {
                variable: s.variable.name(),
                from: s.from,
                to: s.to,
                steps: s.steps,
            }),
        };
        toml::to_string(&out).expect("scenario serializes")
    }
}

/// 1-based line and column of a byte offset.
fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    market: Spanned<RawMarket>,
    distribution: Spanned<Vec<Spanned<RawOutcome>>>,
    regime: Option<Spanned<RawRegime>>,
    bargaining: Option<Spanned<RawBargaining>>,
    sweep: Option<Spanned<RawSweep>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMarket {
    n: Option<Spanned<i64>>,
    alpha: Spanned<f64>,
    beta: Spanned<f64>,
    p_a: Spanned<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutcome {
    label: Option<Spanned<String>>,
    probability: Spanned<f64>,
    baseline_demand: Spanned<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRegime {
    kind: Spanned<String>,
    informed_isp: Option<Spanned<i64>>,
    side_payment: Option<Spanned<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBargaining {
    gamma: Spanned<f64>,
    mode: Spanned<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    variable: Spanned<String>,
    from: Spanned<f64>,
    to: Spanned<f64>,
    steps: Spanned<i64>,
}

/// Collects violations, attaching the line of the narrowest known span.
struct Report<'a> {
    text: &'a str,
    spans: Vec<(String, Range<usize>)>,
    violations: Vec<Violation>,
}

impl<'a> Report<'a> {
    fn span(&mut self, field: impl Into<String>, span: Range<usize>) {
        self.spans.push((field.into(), span));
    }

    fn line_of(&self, field: &str) -> Option<usize> {
        // longest registered path that is a prefix of `field`
        self.spans
            .iter()
            .filter(|(f, _)| field == f || field.starts_with(&format!("{f}.")) || field.starts_with(&format!("{f}[")))
            .max_by_key(|(f, _)| f.len())
            .map(|(_, s)| line_col(self.text, s.start).0)
    }

    fn push(&mut self, v: Violation) {
        let line = self.line_of(&v.field);
        self.violations.push(v.at_line(line));
    }

    fn add(&mut self, field: impl Into<String>, message: impl Into<String>) {
        self.push(Violation::new(field, message));
    }
}

impl RawScenario {
    fn validate(self, text: &str) -> Result<Scenario> {
        let mut r = Report { text, spans: Vec::new(), violations: Vec::new() };

        let m = self.market.get_ref();
        r.span("market", self.market.span());
        r.span("market.alpha", m.alpha.span());
        r.span("market.beta", m.beta.span());
        r.span("market.p_a", m.p_a.span());
        let n = match &m.n {
            Some(n) => {
                r.span("market.n", n.span());
                match usize::try_from(*n.get_ref()) {
                    Ok(v) => v,
                    Err(_) => {
                        r.add("market.n", format!("must be a count, got {}", n.get_ref()));
                        0
                    }
                }
            }
            None => 2,
        };
        let (alpha, beta, p_a) = (*m.alpha.get_ref(), *m.beta.get_ref(), *m.p_a.get_ref());
        for v in MarketParams::violations(n, alpha, beta, p_a, "market") {
            // an unreadable n was already reported
            if !(n == 0 && v.field == "market.n") {
                r.push(v);
            }
        }

        r.span("distribution", self.distribution.span());
        let outcomes: Vec<Outcome> = self
            .distribution
            .get_ref()
            .iter()
            .enumerate()
            .map(|(i, o)| {
                r.span(format!("distribution[{i}]"), o.span());
                let o = o.get_ref();
                r.span(format!("distribution[{i}].probability"), o.probability.span());
                r.span(format!("distribution[{i}].baseline_demand"), o.baseline_demand.span());
                let label = match &o.label {
                    Some(l) => {
                        r.span(format!("distribution[{i}].label"), l.span());
                        l.get_ref().clone()
                    }
                    None => format!("s{i}"),
                };
                Outcome::new(label, *o.probability.get_ref(), *o.baseline_demand.get_ref())
            })
            .collect();
        for v in SignalDistribution::violations(&outcomes, "distribution") {
            r.push(v);
        }

        let regime = match &self.regime {
            None => Some(Regime::NoInfo),
            Some(raw) => {
                r.span("regime", raw.span());
                let g = raw.get_ref();
                r.span("regime.kind", g.kind.span());
                if let Some(i) = &g.informed_isp {
                    r.span("regime.informed_isp", i.span());
                }
                if let Some(p) = &g.side_payment {
                    r.span("regime.side_payment", p.span());
                }
                regime_of(g, n, &mut r)
            }
        };

        let bargaining = self.bargaining.as_ref().and_then(|raw| {
            r.span("bargaining", raw.span());
            let b = raw.get_ref();
            r.span("bargaining.gamma", b.gamma.span());
            r.span("bargaining.mode", b.mode.span());
            let gamma = *b.gamma.get_ref();
            if !(gamma > 0.0 && gamma < 1.0) {
                r.add("bargaining.gamma", format!("must lie in (0, 1), got {gamma}"));
            }
            let mode = match b.mode.get_ref().as_str() {
                "pre" => Some(BargainMode::PreBargain),
                "post" => Some(BargainMode::PostBargain),
                other => {
                    r.add("bargaining.mode", format!("must be \"pre\" or \"post\", got {other:?}"));
                    None
                }
            };
            if n != 2 {
                r.add("bargaining", format!("bargaining needs a duopoly, got n = {n}"));
            }
            mode.and_then(|mode| BargainingConfig::new(gamma, mode).ok())
        });

        let sweep = self.sweep.as_ref().and_then(|raw| {
            r.span("sweep", raw.span());
            let s = raw.get_ref();
            r.span("sweep.variable", s.variable.span());
            r.span("sweep.from", s.from.span());
            r.span("sweep.to", s.to.span());
            r.span("sweep.steps", s.steps.span());
            sweep_of(s, n, &mut r)
        });

        if !r.violations.is_empty() {
            return Err(Error::Validation(r.violations));
        }
        let market = MarketParams::new(n, alpha, beta, p_a)?;
        let distribution = SignalDistribution::new(outcomes)?;
        Ok(Scenario {
            market,
            distribution,
            regime: regime.expect("regime validated"),
            bargaining,
            sweep,
        })
    }
}

fn regime_of(g: &RawRegime, n: usize, r: &mut Report<'_>) -> Option<Regime> {
    let kind = g.kind.get_ref().as_str();
    match kind {
        "no_info" | "full_info" => {
            for (field, present) in [
                ("regime.informed_isp", g.informed_isp.is_some()),
                ("regime.side_payment", g.side_payment.is_some()),
            ] {
                if present {
                    r.add(field, format!("only allowed for kind = \"collusion\", not {kind:?}"));
                }
            }
            Some(if kind == "no_info" { Regime::NoInfo } else { Regime::FullInfo })
        }
        "collusion" => {
            let informed = g.informed_isp.as_ref().map_or(0, |i| *i.get_ref());
            let informed = match usize::try_from(informed) {
                Ok(i) if n == 0 || i < n => Some(i),
                _ => {
                    r.add("regime.informed_isp", format!("must index one of the {n} ISPs, got {informed}"));
                    None
                }
            };
            let side_payment = match &g.side_payment {
                Some(p) if p.get_ref().is_finite() => Some(*p.get_ref()),
                Some(p) => {
                    r.add("regime.side_payment", format!("must be finite, got {}", p.get_ref()));
                    None
                }
                None => {
                    r.add("regime.side_payment", "required for kind = \"collusion\"");
                    None
                }
            };
            Some(Regime::Collusion { informed_isp: informed?, side_payment: side_payment? })
        }
        other => {
            r.add(
                "regime.kind",
                format!("must be \"no_info\", \"full_info\" or \"collusion\", got {other:?}"),
            );
            None
        }
    }
}

fn sweep_of(s: &RawSweep, n: usize, r: &mut Report<'_>) -> Option<Sweep> {
    let variable = SweepVariable::parse(s.variable.get_ref());
    if variable.is_none() {
        r.add(
            "sweep.variable",
            format!("must be \"p_d\", \"gamma\" or \"tau\", got {:?}", s.variable.get_ref()),
        );
    }
    let (from, to) = (*s.from.get_ref(), *s.to.get_ref());
    let steps = *s.steps.get_ref();
    let mut ok = variable.is_some();
    if !(from.is_finite() && to.is_finite() && from < to) {
        r.add("sweep", format!("needs finite from < to, got from = {from}, to = {to}"));
        ok = false;
    }
    if steps < 2 {
        r.add("sweep.steps", format!("must be at least 2, got {steps}"));
        ok = false;
    }
    if let Some(v) = variable {
        if matches!(v, SweepVariable::Gamma | SweepVariable::Tau) {
            for (field, x) in [("sweep.from", from), ("sweep.to", to)] {
                if !(x > 0.0 && x < 1.0) {
                    r.add(field, format!("{} must lie in (0, 1), got {x}", v.name()));
                    ok = false;
                }
            }
        }
        if n != 2 {
            r.add("sweep.variable", format!("a {} sweep needs a duopoly, got n = {n}", v.name()));
            ok = false;
        }
    }
    let steps = usize::try_from(steps).ok()?;
    let variable = variable?;
    ok.then_some(Sweep { variable, from, to, steps })
}

#[derive(Serialize)]
struct OutScenario {
    market: OutMarket,
    distribution: Vec<OutOutcome>,
    regime: OutRegime,
    #[serde(skip_serializing_if = "Option::is_none")]
    bargaining: Option<OutBargaining>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sweep: Option<OutSweep>,
}

#[derive(Serialize)]
struct OutMarket {
    n: usize,
    alpha: f64,
    beta: f64,
    p_a: f64,
}

#[derive(Serialize)]
struct OutOutcome {
    label: String,
    probability: f64,
    baseline_demand: f64,
}

#[derive(Serialize)]
struct OutRegime {
    kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    informed_isp: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    side_payment: Option<f64>,
}

#[derive(Serialize)]
struct OutBargaining {
    gamma: f64,
    mode: &'static str,
}

#[derive(Serialize)]
struct OutSweep {
    variable: &'static str,
    from: f64,
    to: f64,
    steps: usize,
}
