//! Spin-s operators, projections along arbitrary directions and spin
//! coherent states.
//!
//! Basis ordering everywhere: index `k = s − m`, i.e. `m = +s, s−1, …, −s`.

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};
use core::fmt;

#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, ComplexMatrix, StateVector, C64};

/// A spin value stored as twice the spin, so half-integers stay exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInteger(u32);

impl HalfInteger {
    pub const HALF: HalfInteger = HalfInteger(1);
    pub const ONE: HalfInteger = HalfInteger(2);

    pub fn from_twice(twice: u32) -> Result<Self> {
        if twice == 0 {
            Err(Error::InvalidSpin(twice))
        } else {
            Ok(HalfInteger(twice))
        }
    }

    pub fn twice(self) -> u32 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    /// Dimension `2s + 1` of the single-particle space.
    pub fn dim(self) -> usize {
        self.0 as usize + 1
    }

    pub fn is_half_integer(self) -> bool {
        self.0 % 2 == 1
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }
}

impl fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// Reduces an angle into `[0, 2π)`.
///
/// `%` on floats is exact, so this only rounds when adding `2π` to a
/// negative remainder.
pub fn reduce_angle(x: f64) -> f64 {
    let r = x % TAU;
    let r = if r < 0.0 { r + TAU } else { r };
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Measuring direction `(sin θ cos φ, sin θ sin φ, cos θ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Direction {
    theta: f64,
    phi: f64,
}

impl Direction {
    /// Polar angle must lie in `[0, π]`; the azimuth is reduced mod 2π.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !(0.0..=PI).contains(&theta) {
            return Err(Error::InvalidAngle { name: "theta", value: theta });
        }
        if !phi.is_finite() {
            return Err(Error::InvalidAngle { name: "phi", value: phi });
        }
        Ok(Direction { theta, phi: reduce_angle(phi) })
    }

    /// Accepts any finite polar angle, folding it back into `[0, π]` while
    /// keeping the same point on the sphere.
    pub fn wrapped(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::InvalidAngle { name: "theta", value: theta });
        }
        let t = reduce_angle(theta);
        if t > PI {
            Direction::new(TAU - t, phi + PI)
        } else {
            Direction::new(t, phi)
        }
    }

    pub fn z() -> Self {
        Direction { theta: 0.0, phi: 0.0 }
    }

    /// In the equatorial plane at azimuth `phi`.
    pub fn equatorial(phi: f64) -> Result<Self> {
        Direction::new(core::f64::consts::FRAC_PI_2, phi)
    }

    pub fn theta(self) -> f64 {
        self.theta
    }

    pub fn phi(self) -> f64 {
        self.phi
    }

    pub fn unit_vector(self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// `K = cos(θ/2)`.
    pub fn half_cos(self) -> f64 {
        (self.theta / 2.0).cos()
    }

    /// `Γ = sin(θ/2)`.
    pub fn half_sin(self) -> f64 {
        (self.theta / 2.0).sin()
    }
}

pub struct SpinOperators {
    pub x: ComplexMatrix,
    pub y: ComplexMatrix,
    pub z: ComplexMatrix,
}

/// `Sx, Sy, Sz` from the ladder operators.
pub fn spin_operators(s: HalfInteger) -> SpinOperators {
    let dim = s.dim();
    let sv = s.value();
    let mut raise = ComplexMatrix::zeros(dim, dim);
    for k in 1..dim {
        // S+ |m⟩ = √(s(s+1) − m(m+1)) |m+1⟩ with m = s − k.
        let m = sv - k as f64;
        raise[(k - 1, k)] = C64::new((sv * (sv + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
    }
    let lower = raise.dagger();
    let half = C64::new(0.5, 0.0);
    let x = raise.add(&lower).expect("same shape").scale(half);
    let y = raise.sub(&lower).expect("same shape").scale(C64::new(0.0, -0.5));
    let z = ComplexMatrix::from_real_diagonal(&(0..dim).map(|k| sv - k as f64).collect::<Vec<_>>());
    SpinOperators { x, y, z }
}

/// `ŝ·r`.
pub fn projection_operator(s: HalfInteger, r: Direction) -> ComplexMatrix {
    let ops = spin_operators(s);
    let [nx, ny, nz] = r.unit_vector();
    ops.x
        .scale(C64::new(nx, 0.0))
        .add(&ops.y.scale(C64::new(ny, 0.0)))
        .and_then(|m| m.add(&ops.z.scale(C64::new(nz, 0.0))))
        .expect("same shape")
}

/// Exact binomial coefficient.
pub fn binomial(n: u32, k: u32) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        // Each partial product is itself a binomial coefficient, so the division is exact.
        acc = acc * u64::from(n - i) / u64::from(i + 1);
    }
    acc
}

/// `x^k` by repeated multiplication; `0^0 = 1`.
pub(crate) fn powu(x: f64, k: u32) -> f64 {
    let mut acc = 1.0;
    for _ in 0..k {
        acc *= x;
    }
    acc
}

/// The two extremal eigenstates `|±r⟩` of `ŝ·r`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScsPair {
    pub plus: StateVector,
    pub minus: StateVector,
    pub direction: Direction,
    pub spin: HalfInteger,
}

impl ScsPair {
    pub fn get(&self, minus: bool) -> &StateVector {
        if minus {
            &self.minus
        } else {
            &self.plus
        }
    }
}

/// Spin coherent states from the binomial expansion.
///
/// North-pole gauge: `|+r⟩ = Σ √C(2s, s+m) K^{s+m} Γ^{s−m} e^{i(s−m)φ} |m⟩`.
/// South-pole gauge: `|−r⟩ = Σ √C(2s, s+m) K^{s−m} Γ^{s+m} e^{i(s−m)(φ+π)} |m⟩`.
/// The south-pole phase is evaluated as `(−1)^{s−m} e^{i(s−m)φ}`.
pub fn scs_pair(s: HalfInteger, r: Direction) -> ScsPair {
    let two_s = s.twice();
    let k_half = r.half_cos();
    let g_half = r.half_sin();
    let mut plus = Vec::with_capacity(s.dim());
    let mut minus = Vec::with_capacity(s.dim());
    for k in 0..=two_s {
        // k = s − m, s + m = 2s − k
        let weight = (binomial(two_s, two_s - k) as f64).sqrt();
        let phase = C64::from_polar(1.0, k as f64 * r.phi());
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        plus.push(phase * (weight * powu(k_half, two_s - k) * powu(g_half, k)));
        minus.push(phase * (sign * weight * powu(k_half, k) * powu(g_half, two_s - k)));
    }
    ScsPair {
        plus: StateVector::new(plus),
        minus: StateVector::new(minus),
        direction: r,
        spin: s,
    }
}

/// An eigenstate of `ŝ·r` with eigenvalue `m`.
#[derive(Clone, Debug, PartialEq)]
pub struct RotatedState {
    pub twice_m: i32,
    pub vector: StateVector,
}

impl RotatedState {
    pub fn m(&self) -> f64 {
        f64::from(self.twice_m) / 2.0
    }
}

/// All `2s+1` eigenstates of `ŝ·r`, ordered `m = +s … −s`.
///
/// Interior members come from the Jacobi solver; the extremal members are
/// replaced by [`scs_pair`] so their gauge is the binomial one.
pub fn rotated_eigenbasis(s: HalfInteger, r: Direction) -> Result<Vec<RotatedState>> {
    let dim = s.dim();
    let eig = hermitian_eigen(&projection_operator(s, r))?;
    let scs = scs_pair(s, r);
    let two_s = s.twice() as i32;
    let states = (0..dim)
        .map(|k| {
            let twice_m = two_s - 2 * k as i32;
            let vector = if k == 0 {
                scs.plus.clone()
            } else if k == dim - 1 {
                scs.minus.clone()
            } else {
                // eigenvalues ascend, so m = s − k sits at column dim − 1 − k
                canonical_phase(eig.vector(dim - 1 - k))
            };
            RotatedState { twice_m, vector }
        })
        .collect();
    Ok(states)
}

/// Fixes the global phase so the largest-magnitude amplitude is real positive.
fn canonical_phase(v: StateVector) -> StateVector {
    let pivot = v
        .amplitudes()
        .iter()
        .copied()
        .fold(C64::new(0.0, 0.0), |best, z| if z.norm() > best.norm() + 1e-12 { z } else { best });
    if pivot.norm() == 0.0 {
        return v;
    }
    v.scale(pivot.conj() / pivot.norm())
}
