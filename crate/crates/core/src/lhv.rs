//! Deterministic local hidden-variable models and Monte-Carlo checks of the
//! inequality against them.
//!
//! A model answers `A(a, λ) = sign(g(a)·λ − t)` with `sign(0) = +1`, where
//! `λ` is a unit vector drawn once per round and shared by every observer.
//!
//! Sampling is split into fixed chunks of [`CHUNK_SIZE`] draws. Chunk `c` of
//! estimate `k` reads ChaCha8 stream `k·2³² + c` of the run seed, and chunk
//! tallies are integer counts, so any evaluation order gives identical
//! estimates.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::TAU;

#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::correlation::MeasurementMode;
use crate::error::{Error, Result};
use crate::gbi::{evaluate_gbi, windows, DirectionSet, Functional};
use crate::linalg::DimCap;
use crate::sampling::{random_directions, random_state_angles};
use crate::spin::{Direction, HalfInteger};
use crate::states::CatState;

pub const CHUNK_SIZE: u64 = 1 << 14;

/// Statistical margin in standard errors.
pub const SIGMA_MARGIN: f64 = 4.0;

/// Feature map `g(a)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Feature {
    /// Outcome is always `+1`.
    Constant,
    /// `(cos φ, sin φ, 0)`: only the azimuth matters.
    Planar,
    /// The unit vector of the direction.
    Spatial,
}

/// Distribution of `λ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum HiddenVariable {
    /// `(cos λ, sin λ, 0)` with `λ` uniform in `[0, 2π)`.
    UniformCircle,
    UniformSphere,
    /// Point mass.
    Fixed([f64; 3]),
}

impl HiddenVariable {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> [f64; 3] {
        match *self {
            HiddenVariable::UniformCircle => {
                let (s, c) = (TAU * rng.gen::<f64>()).sin_cos();
                [c, s, 0.0]
            }
            HiddenVariable::UniformSphere => {
                let z = 1.0 - 2.0 * rng.gen::<f64>();
                let r = (1.0 - z * z).max(0.0).sqrt();
                let (s, c) = (TAU * rng.gen::<f64>()).sin_cos();
                [r * c, r * s, z]
            }
            HiddenVariable::Fixed(v) => v,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LhvModel {
    pub name: String,
    pub description: String,
    pub feature: Feature,
    pub hidden: HiddenVariable,
    pub threshold: f64,
}

impl LhvModel {
    pub fn constant() -> Self {
        LhvModel {
            name: "constant".into(),
            description: "A = +1 for every direction".into(),
            feature: Feature::Constant,
            hidden: HiddenVariable::UniformCircle,
            threshold: 0.0,
        }
    }

    pub fn sign_cos() -> Self {
        LhvModel {
            name: "sign-cos".into(),
            description: "A = sign(cos(phi - lambda)), lambda uniform on [0, 2pi)".into(),
            feature: Feature::Planar,
            hidden: HiddenVariable::UniformCircle,
            threshold: 0.0,
        }
    }

    pub fn hemisphere() -> Self {
        LhvModel {
            name: "hemisphere".into(),
            description: "A = sign(a . lambda), lambda uniform on the unit sphere".into(),
            feature: Feature::Spatial,
            hidden: HiddenVariable::UniformSphere,
            threshold: 0.0,
        }
    }

    pub fn shifted_cos() -> Self {
        LhvModel {
            name: "shifted-cos".into(),
            description: "A = sign(cos(phi - lambda) - 1/2), lambda uniform on [0, 2pi)".into(),
            feature: Feature::Planar,
            hidden: HiddenVariable::UniformCircle,
            threshold: 0.5,
        }
    }

    /// `self` with `λ` pinned to `lambda`.
    pub fn point_mass(&self, lambda: [f64; 3]) -> Self {
        LhvModel {
            name: alloc::format!("{}@point", self.name),
            description: alloc::format!("{} with lambda fixed", self.description),
            hidden: HiddenVariable::Fixed(lambda),
            ..self.clone()
        }
    }

    pub fn builtins() -> Vec<LhvModel> {
        alloc::vec![LhvModel::constant(), LhvModel::sign_cos(), LhvModel::hemisphere(), LhvModel::shifted_cos()]
    }

    pub fn by_name(name: &str) -> Option<LhvModel> {
        LhvModel::builtins().into_iter().find(|m| m.name == name)
    }

    /// `g(a)`, or `None` for the constant model.
    pub fn feature(&self, a: Direction) -> Option<[f64; 3]> {
        match self.feature {
            Feature::Constant => None,
            Feature::Planar => {
                let (s, c) = a.phi().sin_cos();
                Some([c, s, 0.0])
            }
            Feature::Spatial => Some(a.unit_vector()),
        }
    }

    fn respond(&self, g: Option<&[f64; 3]>, lambda: &[f64; 3]) -> i8 {
        let Some(g) = g else { return 1 };
        let x = g[0] * lambda[0] + g[1] * lambda[1] + g[2] * lambda[2] - self.threshold;
        if x >= 0.0 {
            1
        } else {
            -1
        }
    }

    pub fn outcome(&self, a: Direction, lambda: &[f64; 3]) -> i8 {
        self.respond(self.feature(a).as_ref(), lambda)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LhvEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
}

/// Integer counts for one or more chunks.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Tally {
    pub samples: u64,
    pub plus: u64,
}

impl Tally {
    pub fn merge(self, other: Tally) -> Tally {
        Tally { samples: self.samples + other.samples, plus: self.plus + other.plus }
    }

    /// Mean of the ±1 products and its standard error `sample-std/√N`.
    pub fn estimate(self) -> LhvEstimate {
        let n = self.samples as f64;
        let mean = (2.0 * self.plus as f64 - n) / n;
        // Every draw is ±1, so Σx² = N.
        let var = if self.samples > 1 { ((1.0 - mean * mean) * n / (n - 1.0)).max(0.0) } else { 0.0 };
        LhvEstimate { mean, std_error: (var / n).sqrt(), samples: self.samples }
    }
}

pub fn chunk_count(samples: u64) -> u64 {
    samples.div_ceil(CHUNK_SIZE)
}

/// Draws of chunk `chunk` of estimate `stream`.
pub fn tally_chunk(model: &LhvModel, dirs: &[Direction], samples: u64, seed: u64, stream: u32, chunk: u64) -> Tally {
    let start = chunk * CHUNK_SIZE;
    let len = CHUNK_SIZE.min(samples.saturating_sub(start));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::from(stream) << 32 | chunk);
    let features: Vec<Option<[f64; 3]>> = dirs.iter().map(|&a| model.feature(a)).collect();
    let mut plus = 0;
    for _ in 0..len {
        let lambda = model.hidden.sample(&mut rng);
        let product: i8 = features.iter().map(|g| model.respond(g.as_ref(), &lambda)).product();
        if product > 0 {
            plus += 1;
        }
    }
    Tally { samples: len, plus }
}

/// `⟨Πᵢ A(aᵢ, λ)⟩` on stream `stream`.
pub fn lhv_correlation_stream(
    model: &LhvModel,
    dirs: &[Direction],
    samples: u64,
    seed: u64,
    stream: u32,
) -> Result<LhvEstimate> {
    if samples == 0 {
        return Err(Error::InvalidConfig("samples must be at least 1"));
    }
    let tally = (0..chunk_count(samples))
        .map(|c| tally_chunk(model, dirs, samples, seed, stream, c))
        .fold(Tally::default(), Tally::merge);
    Ok(tally.estimate())
}

/// `⟨Πᵢ A(aᵢ, λ)⟩` over `samples` draws of `λ`.
pub fn lhv_correlation(model: &LhvModel, dirs: &[Direction], samples: u64, seed: u64) -> Result<LhvEstimate> {
    lhv_correlation_stream(model, dirs, samples, seed, 0)
}

/// One Monte-Carlo estimate needed by [`verify_appendix_bound`].
#[derive(Clone, Debug, PartialEq)]
pub struct AppendixJob {
    pub dirs: Vec<Direction>,
    pub stream: u32,
}

/// Windows on streams `0..n`, the odd tuple on stream `n`, then one
/// single-direction mean per odd label.
pub fn appendix_jobs(ds: &DirectionSet) -> Result<Vec<AppendixJob>> {
    let w = windows(ds.n())?;
    let jobs: Vec<AppendixJob> = w
        .windows
        .iter()
        .chain(core::iter::once(&w.odd))
        .map(|idx| ds.select(idx))
        .chain(w.odd.iter().map(|&i| alloc::vec![ds.dirs()[i]]))
        .enumerate()
        .map(|(k, dirs)| AppendixJob { dirs, stream: k as u32 })
        .collect();
    Ok(jobs)
}

#[derive(Clone, Debug, PartialEq)]
pub struct AppendixCheck {
    pub window_estimates: Vec<LhvEstimate>,
    pub odd_estimate: LhvEstimate,
    /// Product of the window means.
    pub lhs: f64,
    /// `|odd mean|`.
    pub rhs: f64,
    /// Propagated standard error of `lhs − rhs`.
    pub sigma: f64,
    /// `rhs + 4σ − lhs`; negative means the bound failed.
    pub margin: f64,
    pub holds: bool,
    /// `|Π ⟨A(a_j)⟩|` over the odd labels: the intermediate quantity the
    /// bound is routed through.
    pub mean_product: f64,
    /// Whether `mean_product ≤ rhs` within the same margin.
    pub premise_holds: bool,
}

impl AppendixCheck {
    /// Assembles the check from estimates ordered as in [`appendix_jobs`].
    pub fn from_estimates(n: usize, estimates: &[LhvEstimate]) -> Result<Self> {
        if estimates.len() != 2 * n + 1 {
            return Err(Error::DimensionMismatch { expected: 2 * n + 1, found: estimates.len() });
        }
        let window_estimates = estimates[..n].to_vec();
        let odd_estimate = estimates[n];
        let singles = &estimates[n + 1..];

        let (lhs, lhs_var) = product_with_error(&window_estimates);
        let rhs = odd_estimate.mean.abs();
        let sigma = (lhs_var + odd_estimate.std_error.powi(2)).sqrt();
        let margin = rhs + SIGMA_MARGIN * sigma - lhs;

        let (mp, mp_var) = product_with_error(singles);
        let mean_product = mp.abs();
        let premise_sigma = (mp_var + odd_estimate.std_error.powi(2)).sqrt();
        Ok(AppendixCheck {
            window_estimates,
            odd_estimate,
            lhs,
            rhs,
            sigma,
            margin,
            holds: margin >= 0.0,
            mean_product,
            premise_holds: mean_product <= rhs + SIGMA_MARGIN * premise_sigma,
        })
    }
}

/// `Π mₖ` and its first-order variance `Σₖ (Π_{j≠k} mⱼ)² σₖ²`.
fn product_with_error(est: &[LhvEstimate]) -> (f64, f64) {
    let product = est.iter().map(|e| e.mean).product();
    let var = (0..est.len())
        .map(|k| {
            let others: f64 = est.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, e)| e.mean).product();
            others * others * est[k].std_error * est[k].std_error
        })
        .sum();
    (product, var)
}

/// Checks `Πₖ ⟨window k⟩ ≤ |⟨odd tuple⟩|` for `model` within `4σ`.
pub fn verify_appendix_bound(model: &LhvModel, ds: &DirectionSet, samples: u64, seed: u64) -> Result<AppendixCheck> {
    let estimates = appendix_jobs(ds)?
        .iter()
        .map(|job| lhv_correlation_stream(model, &job.dirs, samples, seed, job.stream))
        .collect::<Result<Vec<_>>>()?;
    AppendixCheck::from_estimates(ds.n(), &estimates)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalPartReport {
    pub trials: usize,
    pub max_p_gb: f64,
    /// `max_p_gb ≤ 1e-12`.
    pub holds: bool,
}

/// Largest `p_gb` of the quantum local part over random states and
/// directions.
pub fn local_part_is_lhv(
    n: usize,
    s: HalfInteger,
    mode: MeasurementMode,
    trials: usize,
    seed: u64,
    cap: DimCap,
) -> Result<LocalPartReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_p_gb = f64::NEG_INFINITY;
    for _ in 0..trials {
        let (xi, eta) = random_state_angles(&mut rng);
        let cat = CatState::new(n, s, xi, eta)?;
        let ds = DirectionSet::new(n, random_directions(&mut rng, 2 * n - 1))?;
        let r = evaluate_gbi(&cat, &ds, mode, Functional::LocalOnly, cap)?;
        max_p_gb = max_p_gb.max(r.p_gb);
    }
    Ok(LocalPartReport { trials, max_p_gb, holds: max_p_gb <= 1e-12 })
}
