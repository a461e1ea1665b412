//! The generalized Bell-like inequality over `2n − 1` directions
//!
//! ```text
//! p(a₁…aₙ) p(a₂…aₙ₊₁) ⋯ p(aₙ…a₂ₙ₋₁) ≤ |p(a₁, a₃, …, a₂ₙ₋₁)|
//! ```
//!
//! and the search for configurations that break it.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::correlation::{
    closed_form_breakdown, correlation, has_closed_form, CorrelationBreakdown, MeasurementMode,
};
use crate::error::{Error, Result};
use crate::linalg::DimCap;
use crate::optimize::{minimize, NelderMead};
use crate::spin::{reduce_angle, Direction, HalfInteger};
use crate::states::CatState;

/// `p_gb` above this counts as a violation.
pub const VIOLATION_THRESHOLD: f64 = 1e-9;

/// Zero-based direction indices: window `k` is `k..k+n`, the odd tuple is
/// `0, 2, …, 2n−2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Windows {
    pub windows: Vec<Vec<usize>>,
    pub odd: Vec<usize>,
}

pub fn windows(n: usize) -> Result<Windows> {
    if n < 2 {
        return Err(Error::TooFewParticles(n));
    }
    Ok(Windows {
        windows: (0..n).map(|k| (k..k + n).collect()).collect(),
        odd: (0..n).map(|k| 2 * k).collect(),
    })
}

/// `2n − 1` measuring directions.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectionSet {
    n: usize,
    dirs: Vec<Direction>,
}

impl DirectionSet {
    pub fn new(n: usize, dirs: Vec<Direction>) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewParticles(n));
        }
        if dirs.len() != 2 * n - 1 {
            return Err(Error::DirectionCount { expected: 2 * n - 1, found: dirs.len() });
        }
        Ok(DirectionSet { n, dirs })
    }

    pub fn from_angles(n: usize, thetas: &[f64], phis: &[f64]) -> Result<Self> {
        if thetas.len() != phis.len() {
            return Err(Error::DirectionCount { expected: thetas.len(), found: phis.len() });
        }
        let dirs = thetas.iter().zip(phis).map(|(&t, &p)| Direction::new(t, p)).collect::<Result<_>>()?;
        DirectionSet::new(n, dirs)
    }

    /// All directions on the equator.
    pub fn equatorial(n: usize, phis: &[f64]) -> Result<Self> {
        DirectionSet::from_angles(n, &alloc::vec![FRAC_PI_2; phis.len()], phis)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dirs(&self) -> &[Direction] {
        &self.dirs
    }

    pub fn select(&self, indices: &[usize]) -> Vec<Direction> {
        indices.iter().map(|&i| self.dirs[i]).collect()
    }
}

/// Which correlation enters the window products.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Functional {
    /// Local part only; obeys the inequality.
    LocalOnly,
    /// Unscaled total correlation.
    FullQuantum,
    /// Total divided by the subspace norm `N` (equal to `FullQuantum` in
    /// full mode).
    ScaledQuantum,
}

impl Functional {
    pub fn pick(self, b: &CorrelationBreakdown) -> f64 {
        match self {
            Functional::LocalOnly => b.local,
            Functional::FullQuantum => b.total,
            Functional::ScaledQuantum => b.scaled_total,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GbiReport {
    pub n: usize,
    pub window_values: Vec<f64>,
    pub odd_value: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub p_gb: f64,
    pub violated: bool,
}

impl GbiReport {
    pub fn from_values(window_values: Vec<f64>, odd_value: f64) -> Self {
        let lhs = window_values.iter().product::<f64>();
        let rhs = odd_value.abs();
        let p_gb = lhs - rhs;
        GbiReport {
            n: window_values.len(),
            window_values,
            odd_value,
            lhs,
            rhs,
            p_gb,
            violated: p_gb > VIOLATION_THRESHOLD,
        }
    }
}

/// Closed forms where they exist, the full oracle otherwise.
fn breakdown(cat: &CatState, dirs: &[Direction], mode: MeasurementMode, cap: DimCap) -> Result<CorrelationBreakdown> {
    if has_closed_form(cat.spin(), mode) {
        closed_form_breakdown(cat, dirs, mode)
    } else {
        correlation(cat, dirs, mode, cap)
    }
}

pub fn evaluate_gbi(
    cat: &CatState,
    ds: &DirectionSet,
    mode: MeasurementMode,
    which: Functional,
    cap: DimCap,
) -> Result<GbiReport> {
    if ds.n() != cat.n() {
        return Err(Error::DirectionCount { expected: 2 * cat.n() - 1, found: ds.dirs().len() });
    }
    let w = windows(cat.n())?;
    let value = |idx: &[usize]| breakdown(cat, &ds.select(idx), mode, cap).map(|b| which.pick(&b));
    let window_values = w.windows.iter().map(|idx| value(idx)).collect::<Result<Vec<_>>>()?;
    let odd_value = value(&w.odd)?;
    Ok(GbiReport::from_values(window_values, odd_value))
}

/// State and directions of the known maximal violation.
#[derive(Clone, Debug, PartialEq)]
pub struct AnalyticConfig {
    pub cat: CatState,
    pub directions: DirectionSet,
}

/// `ξ = η = π/4`, every `θ = π/2`, directions `a₁, a₃, …` at `φ = 0`.
///
/// Odd `n`: `φ = 3π/(8s)` on `a_{n−1}` and `a_{n+1}`, zero on the other even
/// labels. Even `n`: `φ = π/(2ns)` on every even label.
pub fn analytic_max_config(n: usize, s: HalfInteger) -> Result<AnalyticConfig> {
    if s.is_integer() {
        return Err(Error::IntegerSpin(s.twice()));
    }
    let cat = CatState::new(n, s, FRAC_PI_4, FRAC_PI_4)?;
    let twice = f64::from(s.twice());
    let mut phis = alloc::vec![0.0; 2 * n - 1];
    if n % 2 == 1 {
        // labels n−1 and n+1 are 1-based
        phis[n - 2] = 3.0 * PI / (4.0 * twice);
        phis[n] = 3.0 * PI / (4.0 * twice);
    } else {
        for label in (2..2 * n).step_by(2) {
            phis[label - 1] = PI / (n as f64 * twice);
        }
    }
    Ok(AnalyticConfig { cat, directions: DirectionSet::equatorial(n, &phis)? })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SearchSpace {
    /// The `2n − 1` azimuths vary; `θ = π/2` and `ξ = η = π/4` stay fixed.
    AnglesOnly,
    /// Azimuths, polar angles, `ξ` and `η` all vary.
    AnglesAndState,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iterations: usize,
    pub seed: u64,
    pub convergence_tol: f64,
    /// Edge length (radians) of each starting simplex.
    pub initial_step: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig { restarts: 32, max_iterations: 5000, seed: 0, convergence_tol: 1e-13, initial_step: 0.6 }
    }
}

/// Best point of one or more restarts. Parameters are canonical: angles in
/// `[0, 2π)`, polar angles in `[0, π]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub p_gb: f64,
    pub params: Vec<f64>,
    pub evaluations: usize,
}

impl Candidate {
    /// Associative and commutative: larger `p_gb` wins, exact ties go to the
    /// lexicographically smaller parameter vector.
    pub fn merge(self, other: Candidate) -> Candidate {
        let evaluations = self.evaluations + other.evaluations;
        let keep_self = match self.p_gb.total_cmp(&other.p_gb) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => lex_cmp(&self.params, &other.params) != Ordering::Greater,
        };
        let mut best = if keep_self { self } else { other };
        best.evaluations = evaluations;
        best
    }
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| *o != Ordering::Equal)
        .unwrap_or_else(|| a.len().cmp(&b.len()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Maximum {
    pub p_gb: f64,
    pub cat: CatState,
    pub directions: DirectionSet,
    pub report: GbiReport,
    pub evaluations: usize,
    pub restarts: usize,
}

/// Multi-start maximization of the scaled `p_gb`. Each restart draws its
/// start from its own ChaCha8 stream, so restarts can run in any order or
/// in parallel and merge to the same result.
#[derive(Clone, Debug)]
pub struct ViolationSearch {
    n: usize,
    s: HalfInteger,
    mode: MeasurementMode,
    space: SearchSpace,
    cfg: OptimizerConfig,
    cap: DimCap,
}

impl ViolationSearch {
    pub fn new(
        n: usize,
        s: HalfInteger,
        mode: MeasurementMode,
        space: SearchSpace,
        cfg: OptimizerConfig,
        cap: DimCap,
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewParticles(n));
        }
        if cfg.restarts == 0 {
            return Err(Error::InvalidConfig("restarts must be at least 1"));
        }
        if !has_closed_form(s, mode) {
            cap.power(s.dim(), n)?;
        }
        Ok(ViolationSearch { n, s, mode, space, cfg, cap })
    }

    pub fn config(&self) -> &OptimizerConfig {
        &self.cfg
    }

    fn m(&self) -> usize {
        2 * self.n - 1
    }

    pub fn dimension(&self) -> usize {
        match self.space {
            SearchSpace::AnglesOnly => self.m(),
            SearchSpace::AnglesAndState => 2 * self.m() + 2,
        }
    }

    /// Layout: `[φ…]` or `[φ…, θ…, ξ, η]`. Any real polar angle is folded
    /// back onto the sphere.
    pub fn decode(&self, params: &[f64]) -> Result<(CatState, DirectionSet)> {
        let m = self.m();
        match self.space {
            SearchSpace::AnglesOnly => Ok((
                CatState::new(self.n, self.s, FRAC_PI_4, FRAC_PI_4)?,
                DirectionSet::equatorial(self.n, &params[..m])?,
            )),
            SearchSpace::AnglesAndState => {
                let dirs = (0..m).map(|i| Direction::wrapped(params[m + i], params[i])).collect::<Result<_>>()?;
                Ok((
                    CatState::new(self.n, self.s, params[2 * m], params[2 * m + 1])?,
                    DirectionSet::new(self.n, dirs)?,
                ))
            }
        }
    }

    fn encode(&self, cat: &CatState, ds: &DirectionSet) -> Vec<f64> {
        let mut out: Vec<f64> = ds.dirs().iter().map(|d| d.phi()).collect();
        if self.space == SearchSpace::AnglesAndState {
            out.extend(ds.dirs().iter().map(|d| d.theta()));
            out.push(cat.xi());
            out.push(cat.eta());
        }
        out
    }

    pub fn evaluate(&self, params: &[f64]) -> Result<GbiReport> {
        let (cat, ds) = self.decode(params)?;
        evaluate_gbi(&cat, &ds, self.mode, Functional::ScaledQuantum, self.cap)
    }

    fn start(&self, restart: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
        rng.set_stream(restart as u64);
        let m = self.m();
        let mut x: Vec<f64> = (0..m).map(|_| TAU * rng.gen::<f64>()).collect();
        if self.space == SearchSpace::AnglesAndState {
            x.extend((0..m).map(|_| (1.0 - 2.0 * rng.gen::<f64>()).acos()));
            x.push(TAU * rng.gen::<f64>());
            x.push(TAU * rng.gen::<f64>());
        }
        x
    }

    fn canonical(&self, params: &[f64]) -> Result<Vec<f64>> {
        let (cat, ds) = self.decode(params)?;
        Ok(self.encode(&cat, &ds))
    }

    pub fn run_restart(&self, restart: usize) -> Result<Candidate> {
        let nm = NelderMead {
            max_iterations: self.cfg.max_iterations,
            f_tol: self.cfg.convergence_tol,
            initial_step: self.cfg.initial_step,
            ..NelderMead::default()
        };
        let objective = |x: &[f64]| match self.evaluate(x) {
            Ok(r) => -r.p_gb,
            Err(_) => f64::INFINITY,
        };
        let found = minimize(objective, &self.start(restart), &nm);
        let params = self.canonical(&found.x)?;
        let p_gb = self.evaluate(&params)?.p_gb;
        Ok(Candidate { p_gb, params, evaluations: found.evaluations })
    }

    pub fn finish(&self, best: Candidate) -> Result<Maximum> {
        let (cat, directions) = self.decode(&best.params)?;
        let report = evaluate_gbi(&cat, &directions, self.mode, Functional::ScaledQuantum, self.cap)?;
        Ok(Maximum {
            p_gb: report.p_gb,
            cat,
            directions,
            report,
            evaluations: best.evaluations,
            restarts: self.cfg.restarts,
        })
    }
}

/// Serial multi-start search; see [`ViolationSearch`] for the parallel pieces.
pub fn maximize_violation(
    n: usize,
    s: HalfInteger,
    mode: MeasurementMode,
    cfg: OptimizerConfig,
    space: SearchSpace,
    cap: DimCap,
) -> Result<Maximum> {
    let search = ViolationSearch::new(n, s, mode, space, cfg, cap)?;
    let mut best: Option<Candidate> = None;
    for restart in 0..search.config().restarts {
        let c = search.run_restart(restart)?;
        best = Some(match best {
            Some(b) => b.merge(c),
            None => c,
        });
    }
    search.finish(best.expect("at least one restart"))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanRow {
    pub n: usize,
    pub spin: HalfInteger,
    pub max_p_gb: f64,
    pub violated: bool,
}

/// One row per `(n, s)`, `n` outermost.
pub fn parity_scan(
    ns: &[usize],
    spins: &[HalfInteger],
    mode: MeasurementMode,
    cfg: &OptimizerConfig,
    space: SearchSpace,
    cap: DimCap,
) -> Result<Vec<ScanRow>> {
    if ns.is_empty() || spins.is_empty() {
        return Err(Error::InvalidConfig("scan ranges must be nonempty"));
    }
    let mut rows = Vec::with_capacity(ns.len() * spins.len());
    for &n in ns {
        for &s in spins {
            let best = maximize_violation(n, s, mode, cfg.clone(), space, cap)?;
            rows.push(ScanRow { n, spin: s, max_p_gb: best.p_gb, violated: best.report.violated });
        }
    }
    Ok(rows)
}

/// Reduces an angle vector mod 2π entry by entry.
pub fn canonical_angles(angles: &[f64]) -> Vec<f64> {
    angles.iter().map(|&a| reduce_angle(a)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{random_directions, random_state_angles};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::Rng;

    const CAP: DimCap = DimCap(4096);

    fn spin(twice: u32) -> HalfInteger {
        HalfInteger::from_twice(twice).unwrap()
    }

    fn one_based(v: &[usize]) -> Vec<usize> {
        v.iter().map(|i| i + 1).collect()
    }

    #[test]
    fn window_examples() {
        let w = windows(2).unwrap();
        assert_eq!(w.windows.iter().map(|x| one_based(x)).collect::<Vec<_>>(), [[1, 2], [2, 3]]);
        assert_eq!(one_based(&w.odd), [1, 3]);
        let w = windows(3).unwrap();
        assert_eq!(
            w.windows.iter().map(|x| one_based(x)).collect::<Vec<_>>(),
            [[1, 2, 3], [2, 3, 4], [3, 4, 5]]
        );
        assert_eq!(one_based(&w.odd), [1, 3, 5]);
        let w = windows(4).unwrap();
        assert_eq!(one_based(&w.windows[3]), [4, 5, 6, 7]);
        assert_eq!(one_based(&w.odd), [1, 3, 5, 7]);
        assert!(windows(1).is_err());
    }

    #[test]
    fn direction_set_validation() {
        assert!(DirectionSet::new(3, alloc::vec![Direction::z(); 4]).is_err());
        assert!(DirectionSet::new(3, alloc::vec![Direction::z(); 5]).is_ok());
        let cat = CatState::new(3, spin(1), 0.1, 0.1).unwrap();
        let ds = DirectionSet::new(2, alloc::vec![Direction::z(); 3]).unwrap();
        let r = evaluate_gbi(&cat, &ds, MeasurementMode::Full, Functional::LocalOnly, CAP);
        assert!(matches!(r, Err(Error::DirectionCount { .. })));
    }

    #[test]
    fn three_particle_spin_half_maximum() {
        let cat = CatState::new(3, spin(1), FRAC_PI_4, FRAC_PI_4).unwrap();
        let ds = DirectionSet::equatorial(3, &[0.0, 0.75 * PI, 0.0, 0.75 * PI, 0.0]).unwrap();
        for mode in [MeasurementMode::Full, MeasurementMode::RestrictedScs] {
            let r = evaluate_gbi(&cat, &ds, mode, Functional::ScaledQuantum, CAP).unwrap();
            assert_abs_diff_eq!(r.p_gb, 0.5, epsilon = 1e-12);
            assert!(r.violated);
            assert_abs_diff_eq!(r.odd_value, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn four_particle_spin_half_maximum() {
        let cat = CatState::new(4, spin(1), FRAC_PI_4, FRAC_PI_4).unwrap();
        let q = FRAC_PI_4;
        let ds = DirectionSet::equatorial(4, &[0.0, q, 0.0, q, 0.0, q, 0.0]).unwrap();
        let r = evaluate_gbi(&cat, &ds, MeasurementMode::Full, Functional::ScaledQuantum, CAP).unwrap();
        assert_abs_diff_eq!(r.p_gb, 1.0, epsilon = 1e-12);
        assert_eq!(r.p_gb, r.lhs - r.rhs);
    }

    #[test]
    fn analytic_configs() {
        let c = analytic_max_config(3, spin(1)).unwrap();
        let phis: Vec<f64> = c.directions.dirs().iter().map(|d| d.phi()).collect();
        assert_eq!(phis, [0.0, 0.75 * PI, 0.0, 0.75 * PI, 0.0]);
        let c = analytic_max_config(4, spin(1)).unwrap();
        let phis: Vec<f64> = c.directions.dirs().iter().map(|d| d.phi()).collect();
        assert_eq!(phis, [0.0, FRAC_PI_4, 0.0, FRAC_PI_4, 0.0, FRAC_PI_4, 0.0]);
        let c = analytic_max_config(5, spin(3)).unwrap();
        let phis: Vec<f64> = c.directions.dirs().iter().map(|d| d.phi()).collect();
        assert_abs_diff_eq!(phis[3], FRAC_PI_4, epsilon = 1e-16);
        assert_abs_diff_eq!(phis[5], FRAC_PI_4, epsilon = 1e-16);
        assert_eq!(phis.iter().filter(|p| **p != 0.0).count(), 2);
        assert_eq!(analytic_max_config(3, spin(2)), Err(Error::IntegerSpin(2)));
    }

    #[test]
    fn analytic_configs_reach_parity_bounds() {
        for twice in [1u32, 3, 5, 7] {
            for n in 2..=7 {
                let c = analytic_max_config(n, spin(twice)).unwrap();
                let mode = MeasurementMode::RestrictedScs;
                let r = evaluate_gbi(&c.cat, &c.directions, mode, Functional::ScaledQuantum, CAP).unwrap();
                let expect = if n % 2 == 0 { 1.0 } else { 0.5 };
                assert_abs_diff_eq!(r.p_gb, expect, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn full_mode_above_half_uses_oracle() {
        let cat = CatState::new(2, spin(2), 0.3, 0.4).unwrap();
        let ds = DirectionSet::new(2, random_directions(&mut ChaCha8Rng::seed_from_u64(1), 3)).unwrap();
        let r = evaluate_gbi(&cat, &ds, MeasurementMode::Full, Functional::FullQuantum, CAP).unwrap();
        assert_eq!(r.window_values.len(), 2);
        let big = CatState::new(9, spin(2), 0.3, 0.4).unwrap();
        let ds = DirectionSet::new(9, alloc::vec![Direction::z(); 17]).unwrap();
        let r = evaluate_gbi(&big, &ds, MeasurementMode::Full, Functional::FullQuantum, CAP);
        assert!(matches!(r, Err(Error::DimensionCap { .. })));
    }

    #[test]
    fn local_only_never_violates() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for n in 2..=5 {
            for twice in 1..=3 {
                for mode in [MeasurementMode::Full, MeasurementMode::RestrictedScs] {
                    for _ in 0..30 {
                        let (xi, eta) = random_state_angles(&mut rng);
                        let cat = CatState::new(n, spin(twice), xi, eta).unwrap();
                        let ds = DirectionSet::new(n, random_directions(&mut rng, 2 * n - 1)).unwrap();
                        let r = evaluate_gbi(&cat, &ds, mode, Functional::LocalOnly, CAP).unwrap();
                        assert!(r.p_gb <= 1e-12, "n={n} twice={twice} {mode:?} {}", r.p_gb);
                    }
                }
            }
        }
    }

    #[test]
    fn violation_flag_matches_constant_norm_scaling() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for twice in 1..=4u32 {
            for n in 2..=4 {
                let norm = 0.5f64.powi((n as u32 * (twice - 1)) as i32);
                for _ in 0..40 {
                    let cat = CatState::new(n, spin(twice), FRAC_PI_4, FRAC_PI_4).unwrap();
                    let phis: Vec<f64> = (0..2 * n - 1).map(|_| TAU * rng.gen::<f64>()).collect();
                    let ds = DirectionSet::equatorial(n, &phis).unwrap();
                    let mode = MeasurementMode::RestrictedScs;
                    let scaled = evaluate_gbi(&cat, &ds, mode, Functional::ScaledQuantum, CAP).unwrap();
                    let raw = evaluate_gbi(&cat, &ds, mode, Functional::FullQuantum, CAP).unwrap();
                    let by_constant = GbiReport::from_values(
                        raw.window_values.iter().map(|v| v / norm).collect(),
                        raw.odd_value / norm,
                    );
                    assert_eq!(scaled.violated, by_constant.violated);
                }
            }
        }
    }

    #[test]
    fn full_turns_leave_report_bit_identical() {
        // Dyadic azimuths keep φ + 2kπ − 2kπ exact.
        let cat = CatState::new(3, spin(3), 0.7, 0.2).unwrap();
        let phis = [0.5, 1.25, 2.0, 3.0, 5.75];
        let thetas = [0.5, 1.0, 1.5, 2.0, 2.5];
        let base = DirectionSet::from_angles(3, &thetas, &phis).unwrap();
        for k in [-3.0, -1.0, 1.0, 2.0] {
            let shifted: Vec<f64> = phis.iter().map(|p| p + k * TAU).collect();
            let moved = DirectionSet::from_angles(3, &thetas, &shifted).unwrap();
            for mode in [MeasurementMode::Full, MeasurementMode::RestrictedScs] {
                let a = evaluate_gbi(&cat, &base, mode, Functional::ScaledQuantum, CAP).unwrap();
                let b = evaluate_gbi(&cat, &moved, mode, Functional::ScaledQuantum, CAP).unwrap();
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn maximize_three_spin_half_finds_excess_over_half() {
        // Along φ₂ = φ₄ = x with the other azimuths zero,
        // p_gb = −sin²x·sin 2x, whose maximum 3√3/8 sits at x = 2π/3.
        let x = 2.0 * PI / 3.0;
        let cat = CatState::new(3, spin(1), FRAC_PI_4, FRAC_PI_4).unwrap();
        let ds = DirectionSet::equatorial(3, &[0.0, x, 0.0, x, 0.0]).unwrap();
        let at = evaluate_gbi(&cat, &ds, MeasurementMode::Full, Functional::ScaledQuantum, CAP).unwrap();
        let bound = 3.0 * 3f64.sqrt() / 8.0;
        assert_abs_diff_eq!(at.p_gb, bound, epsilon = 1e-12);

        let cfg = OptimizerConfig { restarts: 8, ..OptimizerConfig::default() };
        let best = maximize_violation(3, spin(1), MeasurementMode::Full, cfg, SearchSpace::AnglesOnly, CAP).unwrap();
        assert_abs_diff_eq!(best.p_gb, bound, epsilon = 1e-6);
    }

    #[test]
    fn maximize_four_spin_half() {
        let cfg = OptimizerConfig { restarts: 8, ..OptimizerConfig::default() };
        let best = maximize_violation(4, spin(1), MeasurementMode::Full, cfg, SearchSpace::AnglesOnly, CAP).unwrap();
        assert_abs_diff_eq!(best.p_gb, 1.0, epsilon = 1e-6);
        assert!(best.report.violated);
    }

    #[test]
    fn maximize_integer_spin_finds_nothing() {
        let cfg = OptimizerConfig { restarts: 6, ..OptimizerConfig::default() };
        let best =
            maximize_violation(3, spin(2), MeasurementMode::RestrictedScs, cfg, SearchSpace::AnglesOnly, CAP).unwrap();
        assert!(best.p_gb <= 1e-9);
        assert!(!best.report.violated);
    }

    #[test]
    fn integer_spin_scaled_violation_off_the_equator() {
        // s = 1, n = 2, ξ = π/4, η = 0, cos θ = ε on every site. With
        // φ = (0, π/2, 0) both windows sit where N = ε² and scale to 1, while
        // the odd pair has N = ((1+ε²)² + (1−ε²)²)/4.
        let eps: f64 = 0.1;
        let theta = eps.acos();
        let cat = CatState::new(2, spin(2), FRAC_PI_4, 0.0).unwrap();
        let ds = DirectionSet::from_angles(2, &[theta; 3], &[0.0, FRAC_PI_2, 0.0]).unwrap();
        let r = evaluate_gbi(&cat, &ds, MeasurementMode::RestrictedScs, Functional::ScaledQuantum, CAP).unwrap();
        let odd_norm = ((1.0 + eps * eps).powi(2) + (1.0 - eps * eps).powi(2)) / 4.0;
        assert_abs_diff_eq!(r.window_values[0], 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r.window_values[1], 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r.odd_value, eps * eps / odd_norm, epsilon = 1e-12);
        assert!(r.violated && r.p_gb > 0.97);
        // The unscaled correlation stays inside the bound.
        let raw = evaluate_gbi(&cat, &ds, MeasurementMode::RestrictedScs, Functional::FullQuantum, CAP).unwrap();
        assert!(!raw.violated);
    }

    #[test]
    fn maximize_is_deterministic_and_order_free() {
        let cfg = OptimizerConfig { restarts: 5, seed: 99, ..OptimizerConfig::default() };
        let search = ViolationSearch::new(
            3,
            spin(1),
            MeasurementMode::RestrictedScs,
            SearchSpace::AnglesAndState,
            cfg.clone(),
            CAP,
        )
        .unwrap();
        let cands: Vec<Candidate> = (0..5).map(|r| search.run_restart(r).unwrap()).collect();
        let forward = cands.iter().cloned().reduce(Candidate::merge).unwrap();
        let backward = cands.iter().rev().cloned().reduce(Candidate::merge).unwrap();
        let split = cands[..2]
            .iter()
            .cloned()
            .reduce(Candidate::merge)
            .unwrap()
            .merge(cands[2..].iter().cloned().reduce(Candidate::merge).unwrap());
        assert_eq!(forward, backward);
        assert_eq!(forward, split);
        let serial = maximize_violation(
            3,
            spin(1),
            MeasurementMode::RestrictedScs,
            cfg,
            SearchSpace::AnglesAndState,
            CAP,
        )
        .unwrap();
        assert_eq!(serial, search.finish(forward).unwrap());
    }

    #[test]
    fn merge_tie_break() {
        let a = Candidate { p_gb: 0.5, params: alloc::vec![1.0, 2.0], evaluations: 3 };
        let b = Candidate { p_gb: 0.5, params: alloc::vec![1.0, 1.5], evaluations: 4 };
        let m = a.clone().merge(b.clone());
        assert_eq!(m.params, [1.0, 1.5]);
        assert_eq!(m.evaluations, 7);
        assert_eq!(b.merge(a).params, [1.0, 1.5]);
    }

    #[test]
    fn canonical_params_are_in_range() {
        let cfg = OptimizerConfig { restarts: 2, max_iterations: 200, ..OptimizerConfig::default() };
        let search = ViolationSearch::new(
            2,
            spin(3),
            MeasurementMode::RestrictedScs,
            SearchSpace::AnglesAndState,
            cfg,
            CAP,
        )
        .unwrap();
        let c = search.run_restart(0).unwrap();
        let m = 3;
        assert!(c.params[..m].iter().all(|p| (0.0..TAU).contains(p)));
        assert!(c.params[m..2 * m].iter().all(|t| (0.0..=PI).contains(t)));
    }

    #[test]
    fn scan_rows() {
        let cfg = OptimizerConfig { restarts: 4, ..OptimizerConfig::default() };
        let rows = parity_scan(
            &[3, 4],
            &[spin(1), spin(2)],
            MeasurementMode::RestrictedScs,
            &cfg,
            SearchSpace::AnglesOnly,
            CAP,
        )
        .unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!((rows[0].n, rows[0].spin), (3, spin(1)));
        assert!(rows[0].violated && !rows[1].violated && rows[2].violated && !rows[3].violated);
        assert_abs_diff_eq!(rows[2].max_p_gb, 1.0, epsilon = 1e-6);
        assert!(parity_scan(&[], &[spin(1)], MeasurementMode::Full, &cfg, SearchSpace::AnglesOnly, CAP).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]
        #[test]
        fn local_only_obeys_inequality(seed in any::<u64>(), n in 2usize..6, twice in 1u32..4, restricted in any::<bool>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (xi, eta) = random_state_angles(&mut rng);
            let cat = CatState::new(n, spin(twice), xi, eta).unwrap();
            let ds = DirectionSet::new(n, random_directions(&mut rng, 2 * n - 1)).unwrap();
            let mode = if restricted { MeasurementMode::RestrictedScs } else { MeasurementMode::Full };
            let r = evaluate_gbi(&cat, &ds, mode, Functional::LocalOnly, CAP).unwrap();
            prop_assert!(r.p_gb <= 1e-12);
            prop_assert!((r.p_gb - (r.lhs - r.rhs)).abs() <= 1e-14);
        }

        #[test]
        fn two_pi_periodic(seed in any::<u64>(), k in -3i32..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 3;
            let phis: Vec<f64> = (0..5).map(|_| TAU * rng.gen::<f64>()).collect();
            let shifted: Vec<f64> = phis.iter().map(|p| p + f64::from(k) * TAU).collect();
            let cat = CatState::new(n, spin(3), 0.4, 0.9).unwrap();
            let mode = MeasurementMode::RestrictedScs;
            let a = evaluate_gbi(&cat, &DirectionSet::equatorial(n, &phis).unwrap(), mode, Functional::ScaledQuantum, CAP).unwrap();
            let b = evaluate_gbi(&cat, &DirectionSet::equatorial(n, &shifted).unwrap(), mode, Functional::ScaledQuantum, CAP).unwrap();
            prop_assert!((a.p_gb - b.p_gb).abs() <= 1e-12);
        }
    }
}
