//! Measurement correlations `Tr[ρ Ω]/sⁿ` with `Ω = ⊗ᵢ ŝ·aᵢ`.
//!
//! Three routes to the same numbers:
//!
//! - [`correlation_oracle_full`] enumerates every outcome tuple over the full
//!   rotated eigenbases.
//! - [`correlation_restricted`] keeps only the `±s` outcomes on each site
//!   (2ⁿ spin-coherent product kets).
//! - the `closed_form_*` functions evaluate the product formulas directly.
//!
//! Every trace factorizes over sites, so nothing larger than a single-site
//! eigenbasis is ever built.

use alloc::vec::Vec;

#[allow(unused_imports)] // inherent f64 methods shadow it when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{DimCap, C64};
use crate::spin::{powu, rotated_eigenbasis, scs_pair, Direction, HalfInteger};
use crate::states::{density_parts, for_each_tuple, CatState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MeasurementMode {
    /// Every eigenvalue of `ŝ·a` is recorded.
    Full,
    /// Only the extremal outcomes `±s` are kept.
    RestrictedScs,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrelationBreakdown {
    pub local: f64,
    pub nonlocal: f64,
    pub total: f64,
    /// Probability of landing in the recorded outcome set; 1 in full mode.
    pub subspace_norm: f64,
    pub scaled_total: f64,
}

impl CorrelationBreakdown {
    fn full(local: f64, nonlocal: f64, total: f64) -> Self {
        CorrelationBreakdown { local, nonlocal, total, subspace_norm: 1.0, scaled_total: total }
    }
}

/// One of the 2ⁿ restricted outcomes. Bit `i` of `index` set means site `i`
/// recorded `−s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OutcomeBasis {
    index: usize,
    n: usize,
}

impl OutcomeBasis {
    pub fn new(n: usize, index: usize) -> Self {
        debug_assert!(n < usize::BITS as usize && index < 1 << n);
        OutcomeBasis { index, n }
    }

    /// Builds the outcome from per-site signs (`true` = minus).
    pub fn from_signs(minus: &[bool]) -> Self {
        let index = minus.iter().enumerate().fold(0, |acc, (i, &m)| acc | (usize::from(m) << i));
        OutcomeBasis::new(minus.len(), index)
    }

    pub fn index(self) -> usize {
        self.index
    }

    pub fn n(self) -> usize {
        self.n
    }

    pub fn is_minus(self, site: usize) -> bool {
        self.index >> site & 1 == 1
    }

    /// `+1` or `−1` per site.
    pub fn signs(self) -> Vec<i8> {
        (0..self.n).map(|i| if self.is_minus(i) { -1 } else { 1 }).collect()
    }

    pub fn minus_count(self) -> u32 {
        self.index.count_ones()
    }

    /// `+1` iff an even number of sites recorded `−s`.
    pub fn parity_sign(self) -> i8 {
        if self.minus_count() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// All outcomes in index order.
    pub fn all(n: usize) -> impl Iterator<Item = OutcomeBasis> {
        (0..1usize << n).map(move |index| OutcomeBasis::new(n, index))
    }

    /// Even-parity outcomes first, then odd; within each group ordered
    /// lexicographically by sign with site 1 most significant and `+`
    /// before `−`.
    pub fn grouped_by_parity(n: usize) -> Vec<OutcomeBasis> {
        let key = |b: &OutcomeBasis| {
            let lex = (0..n).fold(0usize, |acc, i| acc << 1 | usize::from(b.is_minus(i)));
            (b.parity_sign() < 0, lex)
        };
        let mut out: Vec<_> = OutcomeBasis::all(n).collect();
        out.sort_by_key(key);
        out
    }
}

/// `(−1)^{2s}`: the relative phase picked up by the `−s` coherent state.
pub fn berry_phase_factor(s: HalfInteger) -> i32 {
    if s.is_half_integer() {
        -1
    } else {
        1
    }
}

fn check_dirs(cat: &CatState, dirs: &[Direction]) -> Result<()> {
    if dirs.len() != cat.n() {
        return Err(Error::DirectionCount { expected: cat.n(), found: dirs.len() });
    }
    Ok(())
}

/// Per-site data for one eigenvector: `(m/s, ⟨v|+s⟩, ⟨v|−s⟩)`.
type SiteOutcome = (f64, C64, C64);

/// Brute-force `Tr[ρ Ω]/sⁿ` over all `(2s+1)ⁿ` outcome tuples.
pub fn correlation_oracle_full(cat: &CatState, dirs: &[Direction], cap: DimCap) -> Result<CorrelationBreakdown> {
    check_dirs(cat, dirs)?;
    let s = cat.spin();
    let d = s.dim();
    cat.hilbert_dim(cap)?;
    let sites: Vec<Vec<SiteOutcome>> = dirs
        .iter()
        .map(|&r| {
            rotated_eigenbasis(s, r).map(|basis| {
                basis
                    .iter()
                    .map(|st| {
                        let amps = st.vector.amplitudes();
                        (st.m() / s.value(), amps[0].conj(), amps[d - 1].conj())
                    })
                    .collect()
            })
        })
        .collect::<Result<_>>()?;

    let parts = density_parts(cat);
    let (c1, c2) = (cat.c1(), cat.c2());
    let (mut local, mut nonlocal, mut total) = (0.0, 0.0, 0.0);
    for_each_tuple(d, cat.n(), |tuple| {
        let mut w = 1.0;
        let mut a = C64::new(1.0, 0.0);
        let mut b = C64::new(1.0, 0.0);
        for (site, &k) in tuple.iter().enumerate() {
            let (m, pa, pb) = sites[site][k];
            w *= m;
            a *= pa;
            b *= pb;
        }
        if w == 0.0 {
            return;
        }
        local += w * (parts.local[0] * a.norm_sqr() + parts.local[1] * b.norm_sqr());
        nonlocal += w * 2.0 * (parts.nonlocal * a * b.conj()).re;
        total += w * (c1 * a + c2 * b).norm_sqr();
    });
    Ok(CorrelationBreakdown::full(local, nonlocal, total))
}

/// Local and non-local contributions to one diagonal element `ρᵢᵢ` in the
/// restricted outcome basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiagonalElement {
    pub basis: OutcomeBasis,
    pub local: f64,
    pub nonlocal: f64,
    /// `|⟨i|ψ⟩|²`.
    pub total: f64,
}

/// `ρᵢᵢ` for every restricted outcome, in index order.
pub fn restricted_diagonal(cat: &CatState, dirs: &[Direction], cap: DimCap) -> Result<Vec<DiagonalElement>> {
    check_dirs(cat, dirs)?;
    let n = cat.n();
    cap.power(2, n)?;
    let s = cat.spin();
    let d = s.dim();
    // (⟨±r|+s⟩, ⟨±r|−s⟩) per site, indexed by [site][minus]
    let overlaps: Vec<[(C64, C64); 2]> = dirs
        .iter()
        .map(|&r| {
            let pair = scs_pair(s, r);
            let ov = |minus: bool| {
                let amps = pair.get(minus).amplitudes();
                (amps[0].conj(), amps[d - 1].conj())
            };
            [ov(false), ov(true)]
        })
        .collect();
    let parts = density_parts(cat);
    let (c1, c2) = (cat.c1(), cat.c2());
    Ok(OutcomeBasis::all(n)
        .map(|basis| {
            let mut a = C64::new(1.0, 0.0);
            let mut b = C64::new(1.0, 0.0);
            for (site, ov) in overlaps.iter().enumerate() {
                let (pa, pb) = ov[usize::from(basis.is_minus(site))];
                a *= pa;
                b *= pb;
            }
            DiagonalElement {
                basis,
                local: parts.local[0] * a.norm_sqr() + parts.local[1] * b.norm_sqr(),
                nonlocal: 2.0 * (parts.nonlocal * a * b.conj()).re,
                total: (c1 * a + c2 * b).norm_sqr(),
            }
        })
        .collect())
}

/// Restricted correlation `Σᵢ parityᵢ ρᵢᵢ`, its norm `N = Σᵢ ρᵢᵢ` and the
/// scaled value `total / N` (0 when `N` vanishes).
pub fn correlation_restricted(cat: &CatState, dirs: &[Direction], cap: DimCap) -> Result<CorrelationBreakdown> {
    let diag = restricted_diagonal(cat, dirs, cap)?;
    let (mut local, mut nonlocal, mut total, mut norm) = (0.0, 0.0, 0.0, 0.0);
    for el in &diag {
        let sign = f64::from(el.basis.parity_sign());
        local += sign * el.local;
        nonlocal += sign * el.nonlocal;
        total += sign * el.total;
        norm += el.total;
    }
    let scaled_total = if norm > 0.0 { total / norm } else { 0.0 };
    Ok(CorrelationBreakdown { local, nonlocal, total, subspace_norm: norm, scaled_total })
}

/// Either route, picked by `mode`.
pub fn correlation(cat: &CatState, dirs: &[Direction], mode: MeasurementMode, cap: DimCap) -> Result<CorrelationBreakdown> {
    match mode {
        MeasurementMode::Full => correlation_oracle_full(cat, dirs, cap),
        MeasurementMode::RestrictedScs => correlation_restricted(cat, dirs, cap),
    }
}

fn check_count(n: usize, dirs: &[Direction]) -> Result<()> {
    if n < 2 {
        return Err(Error::TooFewParticles(n));
    }
    if dirs.len() != n {
        return Err(Error::DirectionCount { expected: n, found: dirs.len() });
    }
    Ok(())
}

/// `K^{4s} − Γ^{4s}`.
fn restricted_site_factor(s: HalfInteger, r: Direction) -> f64 {
    let e = 2 * s.twice();
    powu(r.half_cos(), e) - powu(r.half_sin(), e)
}

/// `2^{−n(2s−1)} Π sin^{2s}θᵢ cos(2s Σφᵢ + 2η)`: the site product shared by
/// the half-integer non-local part and the integer-spin norm correction.
fn coherence_product(n: usize, s: HalfInteger, eta: f64, dirs: &[Direction]) -> f64 {
    let two_s = s.twice();
    let prefactor = powu(0.5, n as u32 * (two_s - 1));
    let sines: f64 = dirs.iter().map(|r| powu(r.theta().sin(), two_s)).product();
    let phase: f64 = dirs.iter().map(|r| r.phi()).sum();
    prefactor * sines * (f64::from(two_s) * phase + 2.0 * eta).cos()
}

/// `sin²ξ + (−1)ⁿ cos²ξ`: `1` for even `n`, `−cos 2ξ` for odd.
fn parity_weight(n: usize, xi: f64) -> f64 {
    if n % 2 == 0 {
        1.0
    } else {
        -(2.0 * xi).cos()
    }
}

/// Local part in product form.
///
/// Full mode only has this form at `s = 1/2` (`f = cos θ`); restricted mode
/// uses `f = K^{4s} − Γ^{4s}` at any spin.
pub fn closed_form_local(n: usize, s: HalfInteger, xi: f64, dirs: &[Direction], mode: MeasurementMode) -> Result<f64> {
    check_count(n, dirs)?;
    let product: f64 = match mode {
        MeasurementMode::Full => {
            if s != HalfInteger::HALF {
                return Err(Error::Unsupported("full-mode closed form needs spin 1/2"));
            }
            dirs.iter().map(|r| r.theta().cos()).product()
        }
        MeasurementMode::RestrictedScs => dirs.iter().map(|&r| restricted_site_factor(s, r)).product(),
    };
    Ok(parity_weight(n, xi) * product)
}

/// Non-local part in product form. Exactly zero for restricted integer spin
/// and for full mode above spin 1/2.
pub fn closed_form_nonlocal(
    n: usize,
    s: HalfInteger,
    xi: f64,
    eta: f64,
    dirs: &[Direction],
    mode: MeasurementMode,
) -> Result<f64> {
    check_count(n, dirs)?;
    let zero = match mode {
        MeasurementMode::Full => s != HalfInteger::HALF,
        MeasurementMode::RestrictedScs => s.is_integer(),
    };
    if zero {
        return Ok(0.0);
    }
    // At s = 1/2 the prefactor is 1 and both modes coincide.
    Ok((2.0 * xi).sin() * coherence_product(n, s, eta, dirs))
}

/// `N = Σᵢ ρᵢᵢ` over the restricted outcomes.
///
/// `Π(K^{4s} + Γ^{4s})`, plus for integer spin the coherence term
/// `2^{−n(2s−1)} sin 2ξ Π sin^{2s}θᵢ cos(2s Σφᵢ + 2η)`, which survives there
/// because `(−1)^{2s} = +1`. Always 1 in full mode.
pub fn closed_form_subspace_norm(
    n: usize,
    s: HalfInteger,
    xi: f64,
    eta: f64,
    dirs: &[Direction],
    mode: MeasurementMode,
) -> Result<f64> {
    check_count(n, dirs)?;
    if mode == MeasurementMode::Full {
        return Ok(1.0);
    }
    let e = 2 * s.twice();
    let diagonal: f64 = dirs.iter().map(|r| powu(r.half_cos(), e) + powu(r.half_sin(), e)).product();
    let coherence = if s.is_integer() {
        (2.0 * xi).sin() * coherence_product(n, s, eta, dirs)
    } else {
        0.0
    };
    Ok(diagonal + coherence)
}

/// All fields from the product formulas. The scaled value is clamped to
/// `[−1, 1]` to absorb cancellation when `N` is tiny.
pub fn closed_form_breakdown(cat: &CatState, dirs: &[Direction], mode: MeasurementMode) -> Result<CorrelationBreakdown> {
    let (n, s, xi, eta) = (cat.n(), cat.spin(), cat.xi(), cat.eta());
    let local = closed_form_local(n, s, xi, dirs, mode)?;
    let nonlocal = closed_form_nonlocal(n, s, xi, eta, dirs, mode)?;
    let total = local + nonlocal;
    let norm = closed_form_subspace_norm(n, s, xi, eta, dirs, mode)?;
    let scaled_total = match mode {
        MeasurementMode::Full => total,
        MeasurementMode::RestrictedScs if norm > 0.0 => (total / norm).clamp(-1.0, 1.0),
        MeasurementMode::RestrictedScs => 0.0,
    };
    Ok(CorrelationBreakdown { local, nonlocal, total, subspace_norm: norm, scaled_total })
}

/// Whether [`closed_form_breakdown`] covers `(mode, s)`.
pub fn has_closed_form(s: HalfInteger, mode: MeasurementMode) -> bool {
    mode == MeasurementMode::RestrictedScs || s == HalfInteger::HALF
}
