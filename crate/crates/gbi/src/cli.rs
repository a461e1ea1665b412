//! Command-line definitions and the commands behind them.

use std::f64::consts::FRAC_PI_2;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use gbi_core::correlation::{closed_form_breakdown, correlation, has_closed_form};
use gbi_core::linalg::DEFAULT_DIM_CAP;
use gbi_core::sampling::random_directions;
use gbi_core::{
    analytic_max_config, evaluate_gbi, CatState, DimCap, Direction, DirectionSet, HalfInteger, LhvModel,
    OptimizerConfig, SearchSpace,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::CliError;
use crate::output::{
    BreakdownRecord, Body, CorrelateOutput, CorrelationRecord, Document, Format, GbiOutput, GbiRecord,
    LhvModelOutput, LhvOutput, LhvTrialRecord, MaximizeOutput, Mode, ScanOutput, ScanRecord, StateRecord, Which,
};
use crate::parallel;
use crate::parse::{parse_angle, parse_spin};

pub const DIM_CAP_ENV: &str = "GBI_DIM_CAP";

#[derive(Debug, Parser)]
#[command(name = "gbi", version, about = "Cat-state correlations and the generalized Bell-like inequality")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Seed for every random draw; echoed in the output.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Write the result to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Output format [default: csv for scan-parity, json otherwise].
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Local, non-local and total correlation for one set of n directions.
    Correlate(CorrelateArgs),
    /// Evaluate the inequality on 2n-1 directions.
    Gbi(GbiArgs),
    /// Multi-start search for the largest violation.
    Maximize(MaximizeArgs),
    /// Maximum violation over a grid of particle numbers and spins.
    ScanParity(ScanArgs),
    /// Monte-Carlo check of the inequality for local hidden-variable models.
    Lhv(LhvArgs),
}

#[derive(Debug, Args)]
pub struct StateArgs {
    /// Number of particles.
    #[arg(long)]
    pub n: usize,

    /// Spin as a fraction (1/2, 3/2) or decimal (0.5, 1).
    #[arg(long, value_parser = parse_spin, default_value = "1/2")]
    pub spin: HalfInteger,

    #[arg(long, value_parser = parse_angle, default_value = "pi/4", allow_hyphen_values = true)]
    pub xi: f64,

    #[arg(long, value_parser = parse_angle, default_value = "pi/4", allow_hyphen_values = true)]
    pub eta: f64,

    #[arg(long, value_enum, default_value_t = Mode::Scs)]
    pub mode: Mode,
}

impl StateArgs {
    fn cat(&self) -> Result<CatState, CliError> {
        Ok(CatState::new(self.n, self.spin, self.xi, self.eta)?)
    }
}

#[derive(Debug, Args)]
pub struct AngleArgs {
    /// Polar angles, comma separated [default: pi/2 for every direction].
    #[arg(long, value_parser = parse_angle, value_delimiter = ',', allow_hyphen_values = true)]
    pub theta: Vec<f64>,

    /// Azimuths, comma separated.
    #[arg(long, value_parser = parse_angle, value_delimiter = ',', allow_hyphen_values = true)]
    pub phi: Vec<f64>,

    /// Draw this many direction sets uniformly on the sphere instead.
    #[arg(long, conflicts_with_all = ["theta", "phi"])]
    pub random: Option<usize>,
}

impl AngleArgs {
    /// The explicit directions, or `random` sets of `count` each.
    fn direction_sets(&self, count: usize, seed: u64) -> Result<Vec<Vec<Direction>>, CliError> {
        if let Some(k) = self.random {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            return Ok((0..k).map(|_| random_directions(&mut rng, count)).collect());
        }
        if self.phi.is_empty() {
            return Err(CliError::Usage("--phi (or --random) is required".into()));
        }
        Ok(vec![explicit_directions(&self.theta, &self.phi, count)?])
    }
}

/// Pairs polar angles with azimuths; missing polar angles default to π/2.
fn explicit_directions(theta: &[f64], phi: &[f64], count: usize) -> Result<Vec<Direction>, CliError> {
    let thetas = if theta.is_empty() { vec![FRAC_PI_2; phi.len()] } else { theta.to_vec() };
    if thetas.len() != phi.len() {
        return Err(CliError::Usage(format!("--theta has {} entries but --phi has {}", thetas.len(), phi.len())));
    }
    if phi.len() != count {
        return Err(gbi_core::Error::DirectionCount { expected: count, found: phi.len() }.into());
    }
    Ok(thetas.iter().zip(phi).map(|(&t, &p)| Direction::new(t, p)).collect::<Result<_, _>>()?)
}

#[derive(Debug, Args)]
pub struct CorrelateArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[command(flatten)]
    pub angles: AngleArgs,
}

#[derive(Debug, Args)]
pub struct GbiArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[command(flatten)]
    pub angles: AngleArgs,

    /// Which correlation enters the inequality.
    #[arg(long, value_enum, default_value_t = Which::Scaled)]
    pub which: Which,

    /// Use the known maximum-violation state and directions.
    #[arg(long, conflicts_with_all = ["theta", "phi", "random", "xi", "eta"])]
    pub analytic: bool,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long, default_value_t = 32)]
    pub restarts: usize,

    #[arg(long, default_value_t = 5000)]
    pub max_iterations: usize,

    /// Also vary polar angles and the state parameters xi, eta.
    #[arg(long)]
    pub free: bool,
}

impl SearchArgs {
    fn config(&self, seed: u64) -> OptimizerConfig {
        OptimizerConfig { restarts: self.restarts, max_iterations: self.max_iterations, seed, ..OptimizerConfig::default() }
    }

    fn space(&self) -> SearchSpace {
        if self.free {
            SearchSpace::AnglesAndState
        } else {
            SearchSpace::AnglesOnly
        }
    }
}

#[derive(Debug, Args)]
pub struct MaximizeArgs {
    #[arg(long)]
    pub n: usize,

    #[arg(long, value_parser = parse_spin, default_value = "1/2")]
    pub spin: HalfInteger,

    #[arg(long, value_enum, default_value_t = Mode::Scs)]
    pub mode: Mode,

    #[command(flatten)]
    pub search: SearchArgs,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// Particle numbers, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,

    /// Spins, comma separated.
    #[arg(long, value_parser = parse_spin, value_delimiter = ',', required = true)]
    pub spin: Vec<HalfInteger>,

    #[arg(long, value_enum, default_value_t = Mode::Scs)]
    pub mode: Mode,

    #[command(flatten)]
    pub search: SearchArgs,
}

#[derive(Debug, Args)]
pub struct LhvArgs {
    /// Built-in model name, or `all`.
    #[arg(long, default_value = "sign-cos")]
    pub model: String,

    #[arg(long, default_value_t = 3)]
    pub n: usize,

    /// Number of random direction sets.
    #[arg(long, default_value_t = 100)]
    pub trials: usize,

    /// Hidden-variable draws per correlation estimate.
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,

    /// Polar angles of one explicit direction set [default: pi/2].
    #[arg(long, value_parser = parse_angle, value_delimiter = ',', allow_hyphen_values = true)]
    pub theta: Vec<f64>,

    /// Azimuths of one explicit direction set, replacing the random trials.
    #[arg(long, value_parser = parse_angle, value_delimiter = ',', allow_hyphen_values = true)]
    pub phi: Vec<f64>,
}

/// Reads the oracle dimension cap from `GBI_DIM_CAP`.
pub fn dim_cap_from_env() -> Result<DimCap, CliError> {
    match std::env::var(DIM_CAP_ENV) {
        Err(_) => Ok(DimCap(DEFAULT_DIM_CAP)),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(c) if c > 0 => Ok(DimCap(c)),
            _ => Err(CliError::Usage(format!("{DIM_CAP_ENV} must be a positive integer, got '{v}'"))),
        },
    }
}

/// Runs the command and returns the rendered output.
pub fn run(cli: &Cli, cap: DimCap) -> Result<String, CliError> {
    let seed = cli.seed;
    let body = match &cli.command {
        Command::Correlate(a) => correlate(a, seed, cap)?,
        Command::Gbi(a) => gbi(a, seed, cap)?,
        Command::Maximize(a) => maximize(a, seed, cap)?,
        Command::ScanParity(a) => scan(a, seed, cap)?,
        Command::Lhv(a) => lhv(a, seed)?,
    };
    let default_format = match body {
        Body::ScanParity(_) => Format::Csv,
        _ => Format::Json,
    };
    Document::new(seed, body).render(cli.format.unwrap_or(default_format))
}

/// Runs the command and writes its output once, to `--out` or stdout.
pub fn execute(cli: &Cli) -> Result<(), CliError> {
    let cap = dim_cap_from_env()?;
    let text = run(cli, cap)?;
    match &cli.out {
        Some(path) => {
            fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source })
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn correlate(a: &CorrelateArgs, seed: u64, cap: DimCap) -> Result<Body, CliError> {
    let cat = a.state.cat()?;
    let mode = a.state.mode.into();
    let records = a
        .angles
        .direction_sets(cat.n(), seed)?
        .iter()
        .map(|dirs| {
            let b = correlation(&cat, dirs, mode, cap)?;
            let closed_form = if has_closed_form(cat.spin(), mode) {
                Some(BreakdownRecord::from(&closed_form_breakdown(&cat, dirs, mode)?))
            } else {
                None
            };
            Ok(CorrelationRecord {
                directions: crate::output::direction_records(dirs),
                values: (&b).into(),
                closed_form,
            })
        })
        .collect::<Result<_, CliError>>()?;
    Ok(Body::Correlate(CorrelateOutput { mode: a.state.mode, state: (&cat).into(), records }))
}

fn gbi(a: &GbiArgs, seed: u64, cap: DimCap) -> Result<Body, CliError> {
    let mode = a.state.mode.into();
    let which = a.which.into();
    let (cat, sets) = if a.analytic {
        let c = analytic_max_config(a.state.n, a.state.spin)?;
        (c.cat, vec![c.directions])
    } else {
        let cat = a.state.cat()?;
        let sets = a
            .angles
            .direction_sets(2 * cat.n().max(1) - 1, seed)?
            .into_iter()
            .map(|dirs| DirectionSet::new(cat.n(), dirs))
            .collect::<Result<Vec<_>, _>>()?;
        (cat, sets)
    };
    let records = sets
        .iter()
        .map(|ds| Ok(GbiRecord::new(ds, &evaluate_gbi(&cat, ds, mode, which, cap)?)))
        .collect::<Result<_, CliError>>()?;
    Ok(Body::Gbi(GbiOutput { mode: a.state.mode, functional: a.which, state: StateRecord::from(&cat), records }))
}

fn maximize(a: &MaximizeArgs, seed: u64, cap: DimCap) -> Result<Body, CliError> {
    let space = a.search.space();
    let m = parallel::maximize_violation(a.n, a.spin, a.mode.into(), a.search.config(seed), space, cap)?;
    Ok(Body::Maximize(MaximizeOutput {
        mode: a.mode,
        search_space: space.into(),
        restarts: m.restarts,
        evaluations: m.evaluations,
        max_p_gb: m.p_gb,
        violated: m.report.violated,
        state: (&m.cat).into(),
        report: GbiRecord::new(&m.directions, &m.report),
    }))
}

fn scan(a: &ScanArgs, seed: u64, cap: DimCap) -> Result<Body, CliError> {
    let space = a.search.space();
    let rows = parallel::parity_scan(&a.n, &a.spin, a.mode.into(), &a.search.config(seed), space, cap)?
        .into_iter()
        .map(|r| ScanRecord { n: r.n, twice_s: r.spin.twice(), max_p_gb: r.max_p_gb, violated: r.violated })
        .collect();
    Ok(Body::ScanParity(ScanOutput { mode: a.mode, search_space: space.into(), restarts: a.search.restarts, rows }))
}

fn lhv(a: &LhvArgs, seed: u64) -> Result<Body, CliError> {
    let models = if a.model == "all" {
        LhvModel::builtins()
    } else {
        let m = LhvModel::by_name(&a.model).ok_or_else(|| {
            let names: Vec<String> = LhvModel::builtins().into_iter().map(|m| m.name).collect();
            CliError::Usage(format!("unknown model '{}'; expected one of {}, all", a.model, names.join(", ")))
        })?;
        vec![m]
    };
    if a.samples == 0 {
        return Err(CliError::Usage("--samples must be at least 1".into()));
    }
    let count = 2 * a.n.max(1) - 1;
    // Explicit directions give a single trial; otherwise each trial draws a
    // direction set and then its Monte-Carlo seed from one stream.
    let trials: Vec<(DirectionSet, u64)> = if a.phi.is_empty() {
        if a.trials == 0 {
            return Err(CliError::Usage("--trials must be at least 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..a.trials)
            .map(|_| {
                let ds = DirectionSet::new(a.n, random_directions(&mut rng, count))?;
                Ok((ds, rng.gen()))
            })
            .collect::<Result<_, CliError>>()?
    } else {
        let dirs = explicit_directions(&a.theta, &a.phi, count)?;
        vec![(DirectionSet::new(a.n, dirs)?, seed)]
    };

    let models = models
        .iter()
        .map(|model| {
            let records = trials
                .par_iter()
                .enumerate()
                .map(|(t, (ds, s))| {
                    let check = parallel::verify_appendix_bound(model, ds, a.samples, *s)?;
                    Ok(LhvTrialRecord::new(t, *s, ds, &check))
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            let failures = records.iter().filter(|r| !r.holds).count();
            Ok(LhvModelOutput {
                model: model.name.clone(),
                description: model.description.clone(),
                n: a.n,
                samples: a.samples,
                failures,
                premise_failures: records.iter().filter(|r| !r.premise_holds).count(),
                worst_margin: records.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min),
                all_hold: failures == 0,
                trials: records,
            })
        })
        .collect::<Result<_, CliError>>()?;
    Ok(Body::Lhv(LhvOutput { models }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn default_state_is_the_maximum_state() {
        let cli = Cli::parse_from(["gbi", "correlate", "--n", "3", "--phi", "0,0,0"]);
        let Command::Correlate(a) = cli.command else { panic!() };
        assert_eq!(a.state.xi, FRAC_PI_4);
        assert_eq!(a.state.eta, FRAC_PI_4);
        assert_eq!(a.state.mode, Mode::Scs);
        assert_eq!(a.state.spin.twice(), 1);
    }
}
