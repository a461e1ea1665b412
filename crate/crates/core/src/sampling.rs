//! Random configurations for property tests, acceptance sweeps and optimizer
//! starts.

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use num_traits::Float;
use rand::Rng;

use crate::spin::Direction;

/// Uniform on the unit sphere.
pub fn random_direction<R: Rng + ?Sized>(rng: &mut R) -> Direction {
    let u: f64 = rng.gen();
    let v: f64 = rng.gen();
    let theta = (1.0 - 2.0 * u).clamp(-1.0, 1.0).acos();
    Direction::new(theta.min(PI), TAU * v).expect("angles in range")
}

/// Uniform azimuth on the equator.
pub fn random_equatorial<R: Rng + ?Sized>(rng: &mut R) -> Direction {
    Direction::equatorial(TAU * rng.gen::<f64>()).expect("angles in range")
}

pub fn random_directions<R: Rng + ?Sized>(rng: &mut R, count: usize) -> Vec<Direction> {
    (0..count).map(|_| random_direction(rng)).collect()
}

/// `(ξ, η)` uniform in `[0, 2π)²`.
pub fn random_state_angles<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
    (TAU * rng.gen::<f64>(), TAU * rng.gen::<f64>())
}
