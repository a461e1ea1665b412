//! Serializable records and JSON/CSV rendering.
//!
//! Every JSON document carries `"schema": "gbi/1"`, the command name and the
//! seed. Angles appear both in radians and as a readable multiple of π.

use std::f64::consts::PI;

use clap::ValueEnum;
use gbi_core::{
    AppendixCheck, CatState, CorrelationBreakdown, Direction, DirectionSet, Functional, GbiReport,
    MeasurementMode, SearchSpace,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA: &str = "gbi/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Complete projective measurement in every rotated eigenbasis.
    Full,
    /// Only the two spin-coherent outcomes ±s at each site.
    Scs,
}

impl From<Mode> for MeasurementMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Full => MeasurementMode::Full,
            Mode::Scs => MeasurementMode::RestrictedScs,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Which {
    Local,
    Full,
    Scaled,
}

impl From<Which> for Functional {
    fn from(w: Which) -> Self {
        match w {
            Which::Local => Functional::LocalOnly,
            Which::Full => Functional::FullQuantum,
            Which::Scaled => Functional::ScaledQuantum,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Space {
    AnglesOnly,
    AnglesAndState,
}

impl From<SearchSpace> for Space {
    fn from(s: SearchSpace) -> Self {
        match s {
            SearchSpace::AnglesOnly => Space::AnglesOnly,
            SearchSpace::AnglesAndState => Space::AnglesAndState,
        }
    }
}

/// `x` as a multiple of π: `0`, `pi`, `-pi/2`, `3pi/4`. Angles that are not
/// a small rational multiple fall back to a decimal coefficient.
pub fn pi_form(x: f64) -> String {
    for q in 1..=64i64 {
        let p = (x * q as f64 / PI).round();
        if (x - p * PI / q as f64).abs() <= 1e-9 * x.abs().max(1.0) {
            let p = p as i64;
            let num = match p {
                0 => return "0".into(),
                1 => "pi".to_string(),
                -1 => "-pi".to_string(),
                _ => format!("{p}pi"),
            };
            return if q == 1 { num } else { format!("{num}/{q}") };
        }
    }
    format!("{:.9}pi", x / PI)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Angle {
    pub rad: f64,
    pub pi: String,
}

impl Angle {
    pub fn new(rad: f64) -> Self {
        Angle { rad, pi: pi_form(rad) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectionRecord {
    pub theta: Angle,
    pub phi: Angle,
}

impl From<&Direction> for DirectionRecord {
    fn from(d: &Direction) -> Self {
        DirectionRecord { theta: Angle::new(d.theta()), phi: Angle::new(d.phi()) }
    }
}

pub fn direction_records(dirs: &[Direction]) -> Vec<DirectionRecord> {
    dirs.iter().map(DirectionRecord::from).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateRecord {
    pub n: usize,
    pub twice_s: u32,
    pub spin: String,
    pub xi: Angle,
    pub eta: Angle,
}

impl From<&CatState> for StateRecord {
    fn from(c: &CatState) -> Self {
        StateRecord {
            n: c.n(),
            twice_s: c.spin().twice(),
            spin: c.spin().to_string(),
            xi: Angle::new(c.xi()),
            eta: Angle::new(c.eta()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BreakdownRecord {
    pub local: f64,
    pub nonlocal: f64,
    pub total: f64,
    pub subspace_norm: f64,
    pub scaled_total: f64,
}

impl From<&CorrelationBreakdown> for BreakdownRecord {
    fn from(b: &CorrelationBreakdown) -> Self {
        BreakdownRecord {
            local: b.local,
            nonlocal: b.nonlocal,
            total: b.total,
            subspace_norm: b.subspace_norm,
            scaled_total: b.scaled_total,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRecord {
    pub directions: Vec<DirectionRecord>,
    #[serde(flatten)]
    pub values: BreakdownRecord,
    /// Present when a closed form exists for this spin and mode.
    pub closed_form: Option<BreakdownRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GbiRecord {
    pub directions: Vec<DirectionRecord>,
    pub window_values: Vec<f64>,
    pub odd_value: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub p_gb: f64,
    pub violated: bool,
}

impl GbiRecord {
    pub fn new(ds: &DirectionSet, r: &GbiReport) -> Self {
        GbiRecord {
            directions: direction_records(ds.dirs()),
            window_values: r.window_values.clone(),
            odd_value: r.odd_value,
            lhs: r.lhs,
            rhs: r.rhs,
            p_gb: r.p_gb,
            violated: r.violated,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelateOutput {
    pub mode: Mode,
    pub state: StateRecord,
    pub records: Vec<CorrelationRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GbiOutput {
    pub mode: Mode,
    pub functional: Which,
    pub state: StateRecord,
    pub records: Vec<GbiRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaximizeOutput {
    pub mode: Mode,
    pub search_space: Space,
    pub restarts: usize,
    pub evaluations: usize,
    pub max_p_gb: f64,
    pub violated: bool,
    pub state: StateRecord,
    pub report: GbiRecord,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub n: usize,
    pub twice_s: u32,
    pub max_p_gb: f64,
    pub violated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanOutput {
    pub mode: Mode,
    pub search_space: Space,
    pub restarts: usize,
    pub rows: Vec<ScanRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateRecord {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LhvTrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub directions: Vec<DirectionRecord>,
    pub windows: Vec<EstimateRecord>,
    pub odd: EstimateRecord,
    pub lhs: f64,
    pub rhs: f64,
    pub sigma: f64,
    pub margin: f64,
    pub holds: bool,
    pub mean_product: f64,
    pub premise_holds: bool,
}

impl LhvTrialRecord {
    pub fn new(trial: usize, seed: u64, ds: &DirectionSet, c: &AppendixCheck) -> Self {
        let est = |e: &gbi_core::LhvEstimate| EstimateRecord { mean: e.mean, std_error: e.std_error, samples: e.samples };
        LhvTrialRecord {
            trial,
            seed,
            directions: direction_records(ds.dirs()),
            windows: c.window_estimates.iter().map(est).collect(),
            odd: est(&c.odd_estimate),
            lhs: c.lhs,
            rhs: c.rhs,
            sigma: c.sigma,
            margin: c.margin,
            holds: c.holds,
            mean_product: c.mean_product,
            premise_holds: c.premise_holds,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LhvModelOutput {
    pub model: String,
    pub description: String,
    pub n: usize,
    pub samples: u64,
    pub failures: usize,
    pub premise_failures: usize,
    pub worst_margin: f64,
    pub all_hold: bool,
    pub trials: Vec<LhvTrialRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LhvOutput {
    pub models: Vec<LhvModelOutput>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", content = "result", rename_all = "kebab-case")]
pub enum Body {
    Correlate(CorrelateOutput),
    Gbi(GbiOutput),
    Maximize(MaximizeOutput),
    ScanParity(ScanOutput),
    Lhv(LhvOutput),
}

/// One output document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub schema: String,
    pub seed: u64,
    #[serde(flatten)]
    pub body: Body,
}

impl Document {
    pub fn new(seed: u64, body: Body) -> Self {
        Document { schema: SCHEMA.into(), seed, body }
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self)?;
                s.push('\n');
                Ok(s)
            }
            Format::Csv => self.to_csv(),
        }
    }

    fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let seed = self.seed;
        match &self.body {
            Body::Correlate(o) => {
                for r in &o.records {
                    w.serialize(CorrelateRow {
                        n: o.state.n,
                        twice_s: o.state.twice_s,
                        mode: o.mode,
                        xi: o.state.xi.rad,
                        eta: o.state.eta.rad,
                        thetas: join_pi(r.directions.iter().map(|d| &d.theta)),
                        phis: join_pi(r.directions.iter().map(|d| &d.phi)),
                        local: r.values.local,
                        nonlocal: r.values.nonlocal,
                        total: r.values.total,
                        subspace_norm: r.values.subspace_norm,
                        scaled_total: r.values.scaled_total,
                        seed,
                    })?;
                }
            }
            Body::Gbi(o) => {
                for r in &o.records {
                    w.serialize(GbiRow {
                        n: o.state.n,
                        twice_s: o.state.twice_s,
                        mode: o.mode,
                        functional: o.functional,
                        xi: o.state.xi.rad,
                        eta: o.state.eta.rad,
                        thetas: join_pi(r.directions.iter().map(|d| &d.theta)),
                        phis: join_pi(r.directions.iter().map(|d| &d.phi)),
                        lhs: r.lhs,
                        rhs: r.rhs,
                        p_gb: r.p_gb,
                        violated: r.violated,
                        seed,
                    })?;
                }
            }
            Body::Maximize(o) => w.serialize(MaximizeRow {
                n: o.state.n,
                twice_s: o.state.twice_s,
                mode: o.mode,
                max_p_gb: o.max_p_gb,
                violated: o.violated,
                xi: o.state.xi.rad,
                eta: o.state.eta.rad,
                thetas: join_pi(o.report.directions.iter().map(|d| &d.theta)),
                phis: join_pi(o.report.directions.iter().map(|d| &d.phi)),
                restarts: o.restarts,
                evaluations: o.evaluations,
                seed,
            })?,
            Body::ScanParity(o) => {
                for r in &o.rows {
                    w.serialize(ScanRow { n: r.n, twice_s: r.twice_s, max_p_gb: r.max_p_gb, violated: r.violated, seed })?;
                }
            }
            Body::Lhv(o) => {
                for m in &o.models {
                    for t in &m.trials {
                        w.serialize(LhvRow {
                            model: &m.model,
                            n: m.n,
                            trial: t.trial,
                            samples: m.samples,
                            lhs: t.lhs,
                            rhs: t.rhs,
                            sigma: t.sigma,
                            margin: t.margin,
                            holds: t.holds,
                            mean_product: t.mean_product,
                            premise_holds: t.premise_holds,
                            seed: t.seed,
                        })?;
                    }
                }
            }
        }
        let bytes = w.into_inner().map_err(|e| CliError::Encode(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| CliError::Encode(e.to_string()))
    }
}

fn join_pi<'a>(angles: impl Iterator<Item = &'a Angle>) -> String {
    angles.map(|a| a.pi.as_str()).collect::<Vec<_>>().join(" ")
}

#[derive(Serialize)]
struct CorrelateRow {
    n: usize,
    twice_s: u32,
    mode: Mode,
    xi: f64,
    eta: f64,
    thetas: String,
    phis: String,
    local: f64,
    nonlocal: f64,
    total: f64,
    subspace_norm: f64,
    scaled_total: f64,
    seed: u64,
}

#[derive(Serialize)]
struct GbiRow {
    n: usize,
    twice_s: u32,
    mode: Mode,
    functional: Which,
    xi: f64,
    eta: f64,
    thetas: String,
    phis: String,
    lhs: f64,
    rhs: f64,
    p_gb: f64,
    violated: bool,
    seed: u64,
}

#[derive(Serialize)]
struct MaximizeRow {
    n: usize,
    twice_s: u32,
    mode: Mode,
    max_p_gb: f64,
    violated: bool,
    xi: f64,
    eta: f64,
    thetas: String,
    phis: String,
    restarts: usize,
    evaluations: usize,
    seed: u64,
}

#[derive(Serialize)]
struct ScanRow {
    n: usize,
    twice_s: u32,
    max_p_gb: f64,
    violated: bool,
    seed: u64,
}

#[derive(Serialize)]
struct LhvRow<'a> {
    model: &'a str,
    n: usize,
    trial: usize,
    samples: u64,
    lhs: f64,
    rhs: f64,
    sigma: f64,
    margin: f64,
    holds: bool,
    mean_product: f64,
    premise_holds: bool,
    seed: u64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn pi_forms() {
        assert_eq!(pi_form(0.0), "0");
        assert_eq!(pi_form(PI), "pi");
        assert_eq!(pi_form(-PI), "-pi");
        assert_eq!(pi_form(FRAC_PI_4), "pi/4");
        assert_eq!(pi_form(0.75 * PI), "3pi/4");
        assert_eq!(pi_form(2.0 * PI), "2pi");
        assert_eq!(pi_form(-PI / 6.0), "-pi/6");
        assert_eq!(pi_form(PI / 12.0), "pi/12");
        assert_eq!(pi_form(1.0), "0.318309886pi");
    }

    #[test]
    fn document_tags() {
        let doc = Document::new(
            7,
            Body::ScanParity(ScanOutput {
                mode: Mode::Scs,
                search_space: Space::AnglesOnly,
                restarts: 2,
                rows: vec![ScanRecord { n: 3, twice_s: 1, max_p_gb: 0.5, violated: true }],
            }),
        );
        let json = doc.render(Format::Json).unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["schema"], "gbi/1");
        assert_eq!(v["command"], "scan-parity");
        assert_eq!(v["seed"], 7);
        assert_eq!(v["result"]["search_space"], "angles-only");
        let back: Document = serde_json::from_str(&json).unwrap();
        assert_eq!(back, doc);

        let csv = doc.render(Format::Csv).unwrap();
        assert_eq!(csv, "n,twice_s,max_p_gb,violated,seed\n3,1,0.5,true,7\n");
    }
}
