//! Acceptance suite: one line per criterion, exit status 1 if any fails.
//!
//! Run with `cargo test -p gbi-core --test acceptance`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use gbi_core::correlation::{correlation_oracle_full, correlation_restricted};
use gbi_core::sampling::{random_directions, random_state_angles};
use gbi_core::{
    analytic_max_config, closed_form_breakdown, closed_form_local, closed_form_nonlocal, evaluate_gbi,
    maximize_violation, verify_appendix_bound, CatState, DimCap, Direction, DirectionSet, Functional,
    HalfInteger, LhvModel, MeasurementMode, OptimizerConfig, SearchSpace,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CAP: DimCap = DimCap(4096);

fn spin(twice: u32) -> HalfInteger {
    HalfInteger::from_twice(twice).unwrap()
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn run(id: u32, title: &str, budget: Duration, f: fn() -> Outcome) -> bool {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    let in_time = elapsed <= budget;
    let pass = out.pass && in_time;
    println!(
        "[{}] criterion {id:>2}: {title} ({:.2}s / {}s budget{}) {}",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        budget.as_secs(),
        if in_time { "" } else { ", over budget" },
        out.detail
    );
    pass
}

fn equatorial_report(n: usize, s: HalfInteger, phis: &[f64], mode: MeasurementMode) -> f64 {
    let cat = CatState::new(n, s, FRAC_PI_4, FRAC_PI_4).unwrap();
    let ds = DirectionSet::equatorial(n, phis).unwrap();
    evaluate_gbi(&cat, &ds, mode, Functional::ScaledQuantum, CAP).unwrap().p_gb
}

fn c1_three_particle_max() -> Outcome {
    let q = 0.75 * PI;
    let p = equatorial_report(3, spin(1), &[0.0, q, 0.0, q, 0.0], MeasurementMode::Full);
    Outcome { pass: (p - 0.5).abs() <= 1e-9, detail: format!("p_gb = {p:.15}") }
}

fn c2_four_particle_max() -> Outcome {
    let c = analytic_max_config(4, spin(1)).unwrap();
    let p = evaluate_gbi(&c.cat, &c.directions, MeasurementMode::Full, Functional::ScaledQuantum, CAP)
        .unwrap()
        .p_gb;
    Outcome { pass: (p - 1.0).abs() <= 1e-9, detail: format!("p_gb = {p:.15}") }
}

fn c3_parity_of_bound() -> Outcome {
    let cfg = OptimizerConfig { restarts: 32, ..OptimizerConfig::default() };
    let mut pass = true;
    let mut parts = Vec::new();
    for (n, target) in [(3, 0.5), (5, 0.5), (4, 1.0), (6, 1.0)] {
        let best = maximize_violation(n, spin(1), MeasurementMode::Full, cfg.clone(), SearchSpace::AnglesAndState, CAP)
            .unwrap();
        let ok = (best.p_gb - target).abs() <= 1e-6;
        pass &= ok;
        parts.push(format!("n={n}: {:.9} (want {target}{})", best.p_gb, if ok { "" } else { ", off" }));
    }
    Outcome { pass, detail: parts.join("; ") }
}

fn c4_spin_s_analytic() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (n, twice, target) in [(3, 3, 0.5), (3, 5, 0.5), (4, 3, 1.0)] {
        let c = analytic_max_config(n, spin(twice)).unwrap();
        let p = evaluate_gbi(&c.cat, &c.directions, MeasurementMode::RestrictedScs, Functional::ScaledQuantum, CAP)
            .unwrap()
            .p_gb;
        pass &= (p - target).abs() <= 1e-9;
        parts.push(format!("(n={n}, s={}) {p:.12}", spin(twice)));
    }
    Outcome { pass, detail: parts.join("; ") }
}

fn c5_spin_parity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_nonlocal: f64 = 0.0;
    for twice in [2, 4] {
        for k in 0..1000 {
            let n = 2 + k % 3;
            let (xi, eta) = random_state_angles(&mut rng);
            let cat = CatState::new(n, spin(twice), xi, eta).unwrap();
            let dirs = random_directions(&mut rng, n);
            let b = correlation_restricted(&cat, &dirs, CAP).unwrap();
            worst_nonlocal = worst_nonlocal.max(b.nonlocal.abs());
        }
    }
    let cfg = OptimizerConfig { restarts: 32, ..OptimizerConfig::default() };
    let mut worst_p = f64::NEG_INFINITY;
    for twice in [2, 4] {
        for n in [2, 3, 4] {
            let best = maximize_violation(n, spin(twice), MeasurementMode::RestrictedScs, cfg.clone(), SearchSpace::AnglesOnly, CAP)
                .unwrap();
            worst_p = worst_p.max(best.p_gb);
        }
    }
    Outcome {
        pass: worst_nonlocal <= 1e-12 && worst_p <= 1e-9,
        detail: format!("max |nonlocal| = {worst_nonlocal:.2e}, max p_gb = {worst_p:.2e}"),
    }
}

fn c6_full_vanishing() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for (n, twice) in [(2, 2), (2, 3), (3, 2)] {
        for _ in 0..500 {
            let (xi, eta) = random_state_angles(&mut rng);
            let cat = CatState::new(n, spin(twice), xi, eta).unwrap();
            let dirs = random_directions(&mut rng, n);
            worst = worst.max(correlation_oracle_full(&cat, &dirs, CAP).unwrap().nonlocal.abs());
        }
    }
    Outcome { pass: worst <= 1e-12, detail: format!("max |nonlocal| = {worst:.2e}") }
}

fn c7_closed_form_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    let mut pairs = 0;
    for twice in 1..=5u32 {
        let s = spin(twice);
        let mut n = 2;
        while CAP.power(s.dim(), n).is_ok() {
            pairs += 1;
            for _ in 0..200 {
                let (xi, eta) = random_state_angles(&mut rng);
                let cat = CatState::new(n, s, xi, eta).unwrap();
                let dirs = random_directions(&mut rng, n);
                let r = correlation_restricted(&cat, &dirs, CAP).unwrap();
                let c = closed_form_breakdown(&cat, &dirs, MeasurementMode::RestrictedScs).unwrap();
                worst = worst.max((r.local - c.local).abs()).max((r.nonlocal - c.nonlocal).abs());
                let f = correlation_oracle_full(&cat, &dirs, CAP).unwrap();
                let full_nonlocal = closed_form_nonlocal(n, s, xi, eta, &dirs, MeasurementMode::Full).unwrap();
                worst = worst.max((f.nonlocal - full_nonlocal).abs());
                // The full-mode local part keeps the spin-1/2 product form at every spin.
                let full_local = closed_form_local(n, HalfInteger::HALF, cat.xi(), &dirs, MeasurementMode::Full).unwrap();
                worst = worst.max((f.local - full_local).abs());
            }
            n += 1;
        }
    }
    Outcome { pass: worst <= 1e-10, detail: format!("{pairs} (n, s) pairs, max deviation = {worst:.2e}") }
}

fn c8_local_gbi() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = f64::NEG_INFINITY;
    for mode in [MeasurementMode::Full, MeasurementMode::RestrictedScs] {
        for k in 0..10_000 {
            let n = 2 + k % 4;
            let s = spin(1 + (k / 4 % 3) as u32);
            let (xi, eta) = random_state_angles(&mut rng);
            let cat = CatState::new(n, s, xi, eta).unwrap();
            let ds = DirectionSet::new(n, random_directions(&mut rng, 2 * n - 1)).unwrap();
            worst = worst.max(evaluate_gbi(&cat, &ds, mode, Functional::LocalOnly, CAP).unwrap().p_gb);
        }
    }
    Outcome { pass: worst <= 1e-12, detail: format!("max p_gb = {worst:.3e} over 2 x 10^4 evaluations") }
}

fn c9_normalization() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut pass = true;
    let mut parts = Vec::new();
    for n in [3usize, 4] {
        for twice in [1u32, 2, 3, 5] {
            let expect = 0.5f64.powi((n as u32 * (twice - 1)) as i32);
            let mut worst: f64 = 0.0;
            for _ in 0..100 {
                let (xi, eta) = random_state_angles(&mut rng);
                let cat = CatState::new(n, spin(twice), xi, eta).unwrap();
                let dirs: Vec<Direction> =
                    (0..n).map(|_| Direction::new(FRAC_PI_2, TAU * rng.gen::<f64>()).unwrap()).collect();
                let norm = correlation_restricted(&cat, &dirs, CAP).unwrap().subspace_norm;
                worst = worst.max((norm - expect).abs());
            }
            let ok = worst <= 1e-12;
            pass &= ok;
            if !ok {
                parts.push(format!("(n={n}, s={}) max |N - 2^-n(2s-1)| = {worst:.3e}", spin(twice)));
            }
        }
    }
    if parts.is_empty() {
        parts.push("all 8 rows within 1e-12".into());
    }
    Outcome { pass, detail: parts.join("; ") }
}

fn c10_lhv_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut pass = true;
    let mut parts = Vec::new();
    for model in LhvModel::builtins() {
        let mut failures = 0;
        let mut worst_margin = f64::INFINITY;
        for n in [2, 3, 4] {
            for _ in 0..100 {
                let ds = DirectionSet::new(n, random_directions(&mut rng, 2 * n - 1)).unwrap();
                let seed = rng.gen();
                let check = verify_appendix_bound(&model, &ds, 100_000, seed).unwrap();
                worst_margin = worst_margin.min(check.margin);
                if !check.holds {
                    failures += 1;
                }
            }
        }
        pass &= failures == 0;
        parts.push(format!("{}: {failures}/300 failed (worst margin {worst_margin:+.4})", model.name));
    }
    Outcome { pass, detail: parts.join("; ") }
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let results = [
        run(1, "n=3 spin-1/2 maximum", secs(1), c1_three_particle_max),
        run(2, "n=4 spin-1/2 maximum", secs(1), c2_four_particle_max),
        run(3, "optimizer bound parity n=3..6", secs(60), c3_parity_of_bound),
        run(4, "spin-s analytic maxima", secs(5), c4_spin_s_analytic),
        run(5, "integer-spin parity effect", secs(30), c5_spin_parity),
        run(6, "full-mode non-local vanishing s>1/2", secs(30), c6_full_vanishing),
        run(7, "closed forms vs oracles", secs(60), c7_closed_form_equivalence),
        run(8, "local parts obey the inequality", secs(60), c8_local_gbi),
        run(9, "subspace norm on the equator", secs(5), c9_normalization),
        run(10, "hidden-variable bound", secs(120), c10_lhv_bound),
    ];
    let passed = results.iter().filter(|p| **p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
