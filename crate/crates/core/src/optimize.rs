//! Derivative-free Nelder–Mead minimization with adaptive coefficients.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use num_traits::Float;

#[derive(Clone, Debug, PartialEq)]
pub struct NelderMead {
    pub max_iterations: usize,
    /// Stop once the spread of simplex values falls below this.
    pub f_tol: f64,
    /// ...and every vertex lies within this distance (max-norm) of the best.
    pub x_tol: f64,
    /// Edge length of the initial axis-aligned simplex.
    pub initial_step: f64,
    /// Fresh simplices rebuilt around the incumbent after convergence.
    pub polish_rounds: usize,
}

impl Default for NelderMead {
    fn default() -> Self {
        NelderMead { max_iterations: 5000, f_tol: 1e-13, x_tol: 1e-9, initial_step: 0.6, polish_rounds: 8 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
}

struct Coefficients {
    reflect: f64,
    expand: f64,
    contract: f64,
    shrink: f64,
}

impl Coefficients {
    // Dimension-dependent choice; reduces to the classic (1, 2, 1/2, 1/2) at d = 2.
    fn adaptive(d: usize) -> Self {
        let d = d.max(2) as f64;
        Coefficients { reflect: 1.0, expand: 1.0 + 2.0 / d, contract: 0.75 - 1.0 / (2.0 * d), shrink: 1.0 - 1.0 / d }
    }
}

/// Minimizes `f` starting from `x0`. A NaN value is treated as `+∞`.
pub fn minimize<F: FnMut(&[f64]) -> f64>(mut f: F, x0: &[f64], cfg: &NelderMead) -> Minimum {
    let mut eval = |x: &[f64]| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut best = Minimum { x: x0.to_vec(), value: eval(x0), iterations: 0, evaluations: 1 };
    if x0.is_empty() {
        return best;
    }
    let mut step = cfg.initial_step;
    for round in 0..=cfg.polish_rounds {
        let run = descend(&mut eval, &best.x, best.value, step, cfg);
        let improved = best.value - run.value;
        best.iterations += run.iterations;
        best.evaluations += run.evaluations;
        if run.value < best.value {
            best.x = run.x;
            best.value = run.value;
        }
        if round > 0 && improved <= cfg.f_tol {
            break;
        }
        step = (step * 0.25).max(1e-4);
    }
    best
}

fn descend<F: FnMut(&[f64]) -> f64>(f: &mut F, x0: &[f64], f0: f64, step: f64, cfg: &NelderMead) -> Minimum {
    let d = x0.len();
    let c = Coefficients::adaptive(d);
    let mut evaluations = 0;
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    simplex.push((x0.to_vec(), f0));
    for i in 0..d {
        let mut x = x0.to_vec();
        x[i] += step;
        let v = f(&x);
        evaluations += 1;
        simplex.push((x, v));
    }

    let mut centroid = vec![0.0; d];
    let mut trial = vec![0.0; d];
    let mut iterations = 0;
    while iterations < cfg.max_iterations {
        // Stable sort keeps earlier vertices ahead on ties, so runs repeat exactly.
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (lo, hi) = (simplex[0].1, simplex[d].1);
        let spread = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if hi - lo <= cfg.f_tol && spread <= cfg.x_tol {
            break;
        }
        iterations += 1;

        centroid.iter_mut().for_each(|v| *v = 0.0);
        for (x, _) in &simplex[..d] {
            for (cj, xj) in centroid.iter_mut().zip(x) {
                *cj += xj;
            }
        }
        centroid.iter_mut().for_each(|v| *v /= d as f64);

        let worst = simplex[d].0.clone();
        let point = |t: f64, out: &mut Vec<f64>| {
            for ((o, cj), wj) in out.iter_mut().zip(&centroid).zip(&worst) {
                *o = cj + t * (cj - wj);
            }
        };

        point(c.reflect, &mut trial);
        let fr = f(&trial);
        evaluations += 1;
        if fr < lo {
            let reflected = trial.clone();
            point(c.reflect * c.expand, &mut trial);
            let fe = f(&trial);
            evaluations += 1;
            simplex[d] = if fe < fr { (trial.clone(), fe) } else { (reflected, fr) };
            continue;
        }
        if fr < simplex[d - 1].1 {
            simplex[d] = (trial.clone(), fr);
            continue;
        }
        // Outside contraction when the reflection beat the worst point, inside otherwise.
        let (t, bound) = if fr < hi { (c.reflect * c.contract, fr) } else { (-c.contract, hi) };
        point(t, &mut trial);
        let fc = f(&trial);
        evaluations += 1;
        if fc <= bound {
            simplex[d] = (trial.clone(), fc);
            continue;
        }
        let anchor = simplex[0].0.clone();
        for (x, v) in simplex[1..].iter_mut() {
            for (xj, aj) in x.iter_mut().zip(&anchor) {
                *xj = aj + c.shrink * (*xj - aj);
            }
            *v = f(x);
            evaluations += 1;
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    Minimum { x, value, iterations, evaluations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn quadratic_bowl() {
        let m = minimize(
            |x| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 2.0).powi(2) + 0.5,
            &[0.0, 0.0],
            &NelderMead::default(),
        );
        assert_abs_diff_eq!(m.x[0], 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(m.x[1], -2.0, epsilon = 1e-6);
        assert_abs_diff_eq!(m.value, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn rosenbrock() {
        let cfg = NelderMead { max_iterations: 20_000, ..NelderMead::default() };
        let m = minimize(
            |x| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2),
            &[-1.2, 1.0],
            &cfg,
        );
        assert_abs_diff_eq!(m.x[0], 1.0, epsilon = 1e-5);
        assert_abs_diff_eq!(m.x[1], 1.0, epsilon = 1e-5);
    }

    #[test]
    fn higher_dimensional_sphere() {
        let m = minimize(|x| x.iter().map(|v| (v - 0.3) * (v - 0.3)).sum(), &[0.0; 10], &NelderMead::default());
        assert!(m.value < 1e-12, "{}", m.value);
    }

    #[test]
    fn trigonometric_maximum() {
        // max of sin²x·(−sin 2x) is 3√3/8 at x = 2π/3
        let m = minimize(|x| x[0].sin().powi(2) * (2.0 * x[0]).sin(), &[2.0], &NelderMead::default());
        assert_abs_diff_eq!(-m.value, 3.0 * 3f64.sqrt() / 8.0, epsilon = 1e-12);
    }

    #[test]
    fn nan_is_rejected() {
        let m = minimize(|x| if x[0] > 0.5 { f64::NAN } else { (x[0] - 0.4).powi(2) }, &[0.0], &NelderMead::default());
        assert_abs_diff_eq!(m.x[0], 0.4, epsilon = 1e-6);
    }

    #[test]
    fn deterministic() {
        let f = |x: &[f64]| (x[0] * 3.0).sin() + (x[1] - x[0]).cos();
        let a = minimize(f, &[0.1, 0.2], &NelderMead::default());
        let b = minimize(f, &[0.1, 0.2], &NelderMead::default());
        assert_eq!(a, b);
    }

    #[test]
    fn empty_input() {
        let m = minimize(|_| 2.0, &[], &NelderMead::default());
        assert_eq!(m.value, 2.0);
    }
}
